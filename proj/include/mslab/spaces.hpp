#pragma once

#include <mslab/geometry.hpp>

#include <memory>
#include <string>
#include <vector>

namespace mslab {

// ---------------------------------------------------------------------------
// Conformal weight fields on the plane.
//
// A weight omega >= 0 induces a length metric d(x,y) = inf over joining paths
// of int omega ds, and the area measure int omega^2 dL^2 (which is the
// 2-dimensional Hausdorff measure of the deformed metric).  Built-in kinds:
//
//   Unit       omega == 1                            (Euclidean plane)
//   ExpRadial  omega(x) = e^{-1/|x|} / |x|^2,  omega(0) = 0
//   Grushin    omega(x) = |x1|^{-beta} on x1 > 0, and 1 on x1 <= 0
//              (a Grushin-type half-plane glued to a Euclidean half-plane
//               along the vertical axis; beta in (0, 1/2))
// ---------------------------------------------------------------------------

enum class WeightKind { Unit, ExpRadial, Grushin };

enum class Symmetry { Radial, VerticalLines, None };

struct WeightField {
  WeightKind kind = WeightKind::Unit;
  double beta = 0.0;                      // Grushin exponent, range (0, 1/2)
  Box2 domain{-4.0, -4.0, 4.0, 4.0};

  double at(Vec2 p) const;                // omega(p)
  double at2(Vec2 p) const;               // omega(p)^2
  Symmetry symmetry() const;

  // Radial profile omega(t) for t = |x| >= 0 (Unit and ExpRadial only).
  double profile(double t) const;

  // Exact primitive P(t) = int_0^t profile(s) ds of the radial profile:
  // ExpRadial gives e^{-1/t} (P(0) = 0), Unit gives t.
  double radial_primitive(double t) const;

  // Grushin only: exact primitives along horizontal lines, valid across the
  // axis.  int_0^{x1} omega ds and int_0^{x1} omega^2 ds; the x1 > 0 branch
  // integrates s^{-beta} (resp. s^{-2beta}), which is finite for beta < 1/2.
  double horizontal_primitive(double x1) const;
  double horizontal_primitive2(double x1) const;

  // Isolated points where omega is 0 or undefined ({origin} for ExpRadial).
  std::vector<Vec2> singular_points() const;
  // Grushin: omega blows up approaching the vertical axis from the right.
  bool unbounded_on_vertical_axis() const;
};

// ---------------------------------------------------------------------------
// Spike surfaces: a plane with rotationally symmetric spikes grafted at the
// points (t_n, 0).  The open disks B((t_n,0), r_n) are removed and replaced:
//
//   Cones      lateral cone joining the rim circle S((t_n,0), r_n) x {0}
//              to the apex (t_n, 0, h_n);
//   Cylinders  vertical tube S((t_n,0), r_n) x [0, h_n] plus the flat cap
//              (the removed closed disk translated to height h_n).
//
// Parameter tables (n >= 1):
//   Cones      t_n = 2^-n,  h_n = 2^{-n/2},  r_n = 2^-2 * 2^{-3n/2}
//   Cylinders  t_n = 2^-n,  h_n = 2^-n,      r_n = 2^-2 * 2^{-2n}
//
// The surface carries the ambient Euclidean metric of R^3 (chordal distances)
// and 2-dimensional Hausdorff measure (surface area).  Only spikes with index
// n <= truncation are realized; the omitted tail is a geometric series whose
// total area is reported via tail_area_bound().
// ---------------------------------------------------------------------------

enum class SurfaceKind { Cones, Cylinders };

struct SpikeSurface {
  SurfaceKind kind = SurfaceKind::Cones;
  int truncation = 12;

  double t(int n) const;                  // spike center abscissa
  double h(int n) const;                  // spike height
  double r(int n) const;                  // spike base radius

  // Closed-form area of spike n's grafted piece:
  // cone lateral pi r sqrt(h^2 + r^2); cylinder tube + cap 2 pi r h + pi r^2.
  double piece_area(int n) const;
  double removed_disk_area(int n) const;  // pi r_n^2
  // Upper bound on the total area of the omitted spikes (n > truncation).
  double tail_area_bound() const;

  // Unsigned distance from p to the surface (exact up to the meridian
  // reduction; used to validate "on surface within projection tolerance").
  double surface_offset(Vec3 p) const;
  bool on_surface(Vec3 p, double tol) const;

  // H^2 of the portion of spike n's grafted piece inside the open ambient
  // ball B(c, R).  Reduces to a 1-D adaptive quadrature over exact angular
  // sublevel intervals of the meridian parametrization.
  double piece_area_in_ball(int n, Vec3 c, double R) const;
};

// ---------------------------------------------------------------------------
// Unified space handle: geometry + measure + admissible-cover radius rule.
// ---------------------------------------------------------------------------

enum class GeometryKind { Plane, Surface };

enum class MeasureKind {
  Lebesgue,           // planar Lebesgue measure
  WeightedArea,       // int omega^2 dL^2
  SurfaceHausdorff2,  // H^2 on an embedded spike surface
};

struct SpaceHandle {
  std::string name;                       // registry id, e.g. "exp-weight"
  std::string params;                     // canonical parameter string ("" if none)
  GeometryKind geometry = GeometryKind::Plane;
  WeightField weight;                     // valid when geometry == Plane
  std::shared_ptr<const SpikeSurface> surface;  // valid when geometry == Surface
  MeasureKind measure = MeasureKind::Lebesgue;
  Box2 domain{-4.0, -4.0, 4.0, 4.0};

  bool is_plane() const { return geometry == GeometryKind::Plane; }

  // Admissible-cover radius r_x: metric balls B_d(x, r) with r < r_x form the
  // cover on which ball-mass comparisons and the length-gauge are evaluated.
  //   euclidean        r_x = 1
  //   exp-weight       r_x = min(|x|/2, 0.1) for x != 0, and r_0 = 0.1
  //   grushin-glued    r_x = 1/2
  //   spike surfaces   r_x = 1/2 (matching the radius used at the origin)
  double cover_radius(Vec2 x) const;
  double cover_radius3(Vec3 x) const;

  std::string descriptor_json() const;    // name, params, domain, measure, ...
};

// Construct one of the registered examples.  `id` is a name, optionally
// followed by ":key=value,key=value" parameters:
//   euclidean
//   exp-weight
//   spikes-cones[:N=<truncation>]
//   spikes-cylinders[:N=<truncation>]
//   grushin-glued[:beta=<value in (0,1/2)>]     (default beta = 0.25)
// Throws std::invalid_argument on unknown names or invalid parameters.
SpaceHandle make_example(const std::string& id);

// omega(x) for plane geometries; throws std::domain_error if x is outside the
// space's numerical domain, std::invalid_argument for surface geometries.
double weight_at(const SpaceHandle& space, Vec2 x);

// Ambient (chordal) distance between two points of a spike surface.  Both
// points must lie on the surface within `tol`; otherwise std::domain_error.
double ambient_distance(const SpikeSurface& s, Vec3 p, Vec3 q, double tol = 1e-6);

}  // namespace mslab
