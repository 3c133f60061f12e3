#pragma once

#include <mslab/geodesics.hpp>
#include <mslab/spaces.hpp>
#include <mslab/surface_mesh.hpp>

#include <limits>
#include <string>
#include <vector>

namespace mslab {

// ---------------------------------------------------------------------------
// Measure-theoretic layer: the measure mu of a space (weighted area on the
// plane, H^2 on spike surfaces), the ball-mass gauge
//     phi(B) = 2 pi^{-1/2} mu(B)^{1/2},
// the cover-content length ell_{mu,delta} and its small-delta limit ell_mu,
// and the deformed metric q(x, y) = inf over joining curves of ell_mu.
// ---------------------------------------------------------------------------

enum class BallMeasureMethod { ClosedForm, SublevelIntegration, SurfaceTriangulation };
const char* to_string(BallMeasureMethod m);

struct BallMeasureTable {
  Vec3 center;                   // z = 0 for plane spaces
  std::vector<double> radii;
  std::vector<double> values;    // mu(B_d(center, r)) per radius
  BallMeasureMethod method = BallMeasureMethod::SublevelIntegration;
};

struct MuLengthEstimate {
  Polyline2 curve;
  std::vector<double> deltas;    // sorted decreasing
  std::vector<double> contents;  // ell_{mu,delta} per delta
  double extrapolated = 0.0;     // linear Richardson over the two smallest deltas
};

struct QMetricField {
  Vec2 source;
  std::vector<double> dist;      // q-distance per grid node; +inf if unreached
  std::vector<int32_t> parent;
};

// ---------------------------------------------------------------------------
// Weighted area: int omega^2 dL^2 over a rectangle or a disk.  Radial weights
// over centered disks reduce to a 1-D radial integral; the glued Grushin
// weight integrates exactly in x via its antiderivatives; everything else is
// tensor-product adaptive quadrature.
// ---------------------------------------------------------------------------
double weighted_area(const WeightField& f, const Box2& box);
double weighted_area_disk(const WeightField& f, Vec2 center, double radius);

// ---------------------------------------------------------------------------
// Ball measure mu(B_d(x, r)).
//
// Routing: closed forms where available (unit weight anywhere; the
// exponential weight centered at the origin), the exact-geometry quadrature
// surface_ball_area on spike surfaces, and sublevel-set integration of a
// distance field otherwise (a lattice cell counts iff its center is inside;
// the box grows until the sublevel set is strictly interior, and r "exceeds
// the domain reach" if that fails within the space domain).
// ---------------------------------------------------------------------------
struct BallMeasureParams {
  double h = 0.0;               // sublevel lattice spacing; 0 = auto (box/192)
  int stencil = 16;
  bool force_sublevel = false;  // bypass plane closed forms (cross-check use)
};

double ball_measure(const SpaceHandle& s, Vec3 x, double r,
                    const BallMeasureParams& p = {});
BallMeasureTable ball_measure_table(const SpaceHandle& s, Vec3 x,
                                    const std::vector<double>& radii,
                                    const BallMeasureParams& p = {});
// Lumped-mass ball masses of an explicit surface mesh (triangulation tag).
BallMeasureTable ball_measure_table_mesh(const SurfaceMesh& m, Vec3 x,
                                         const std::vector<double>& radii);

// ---------------------------------------------------------------------------
// Small-ball measure and gauge for plane spaces, used by the cover content,
// the q-metric edge costs, and H^1_q.  Closed forms where exact (unit weight:
// pi delta^2; exponential weight at the origin); otherwise a star-shaped
// approximation of the sublevel set: `rays` directions, the d-sublevel
// crossing bisected along each ray, sector masses by radial quadrature.
// ---------------------------------------------------------------------------
double small_ball_measure(const SpaceHandle& s, Vec2 m, double delta, int rays = 12);
// 2 pi^{-1/2} sqrt(mu(B_d(m, delta)))
double ball_gauge(const SpaceHandle& s, Vec2 m, double delta, int rays = 12);

// ---------------------------------------------------------------------------
// Cover-content length.  For each delta, the curve is covered greedily by
// balls B_d(c_j, delta) centered on the curve, consecutive centers spaced
// 2 delta (1 - 1e-3) apart in d-arclength (so consecutive balls just overlap
// along the curve); the content is sum of the gauges.  The extrapolated value
// removes the O(delta) cover overshoot by linear Richardson over the two
// smallest deltas.  Plane spaces only.
// ---------------------------------------------------------------------------
MuLengthEstimate mu_length(const SpaceHandle& s, const Polyline2& c,
                           std::vector<double> deltas, int rays = 12);

// ---------------------------------------------------------------------------
// q-metric on a grid: Dijkstra with edge cost 2 pi^{-1/2} mu(B_d(m, s/2))^{1/2}
// for an edge of Euclidean midpoint m and d-length s (exact for Lebesgue
// measure, where the cost reduces to s).  Throws if an edge's half d-length
// exceeds the local cover radius (grid too coarse).
// ---------------------------------------------------------------------------
QMetricField q_metric_field(const SpaceHandle& s, const GridGraph& g, Vec2 source,
                            int rays = 12,
                            double budget = std::numeric_limits<double>::infinity());
double q_distance(const SpaceHandle& s, const GridGraph& g, Vec2 x, Vec2 y,
                  int rays = 12);

// H^1 of a polyline in the q-metric: subdivide below the cover radii and sum
// the segment gauges.  `fineness` is the Euclidean subdivision target
// (0 = auto: total length / 512).
double hausdorff1_q(const SpaceHandle& s, const Polyline2& c, double fineness = 0.0,
                    int rays = 12);

}  // namespace mslab
