#pragma once

#include <mslab/spaces.hpp>

#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

namespace mslab {

// ---------------------------------------------------------------------------
// Graph discretization of a spike surface.
//
// The plane part is a lattice of spacing h over a window box, with 8-neighbor
// connectivity and nodes removed inside the grafting disks of every spike the
// lattice can resolve (r_n >= resolve_factor * h).  Each resolved spike gets a
// structured parametric mesh (rings of n_theta nodes along the meridian;
// cones end in an apex node, cylinder tubes continue into a polar cap mesh)
// whose rim ring is stitched to nearby plane nodes.  Spikes finer than the
// lattice are left unresolved: the plane is left intact underneath them and
// the omitted piece areas are reported, so callers can bound the error.
//
// Edge lengths are ambient chordal distances, making Dijkstra on the mesh an
// upper-biased estimate of the intrinsic path metric.  Node masses lump
// adjacent triangle areas (spike pieces) and lattice cell areas (plane part),
// so sums of masses estimate H^2.
// ---------------------------------------------------------------------------

struct SurfaceMeshOptions {
  Box2 box{-1.0, -1.0, 1.0, 1.0};  // plane window (within the space domain)
  double h = 1.0 / 128.0;          // plane lattice spacing
  int max_theta = 64;              // azimuthal nodes on the largest rings
  int min_theta = 8;               // azimuthal nodes on the smallest rings
  double resolve_factor = 2.0;     // resolve spike n iff r_n >= factor * h
  // Extent of the true plane, used when edge costs need exact ball areas that
  // may spill past the mesh window (defaults to the registry surface domain).
  Box2 plane_domain{-1.5, -1.5, 1.5, 1.5};
};

struct SurfaceMesh {
  std::shared_ptr<const SpikeSurface> surface;
  SurfaceMeshOptions opt;

  std::vector<Vec3> pos;
  std::vector<double> mass;         // lumped H^2 mass per node
  std::vector<int32_t> piece;       // 0 = plane part, n >= 1 = spike n

  // CSR adjacency (both directions stored), chordal edge lengths.
  std::vector<uint32_t> adj_start;
  std::vector<uint32_t> adj_node;
  std::vector<double> adj_len;

  std::vector<int> resolved;                // resolved spike indices
  std::vector<double> piece_mesh_area;      // [n] = triangle-area sum of spike n
  double omitted_piece_area = 0.0;          // closed-form area of unresolved spikes

  size_t node_count() const { return pos.size(); }
  uint32_t nearest_node(Vec3 p) const;
  double total_mass() const;

  // Sum of lumped node masses inside the open ambient ball B(c, R).
  double ball_mass(Vec3 c, double R) const;
  // Node ids inside the open ambient ball.
  std::vector<uint32_t> nodes_in_ball(Vec3 c, double R) const;

 private:
  friend SurfaceMesh build_surface_mesh(const SpikeSurface&, const SurfaceMeshOptions&);
  // xy spatial hash over lattice-aligned buckets, for ball queries.
  std::vector<uint32_t> bucket_start_, bucket_node_;
  int bx_ = 0, by_ = 0;
  double bcell_ = 0.0;
};

SurfaceMesh build_surface_mesh(const SpikeSurface& s, const SurfaceMeshOptions& opt);

// ---------------------------------------------------------------------------
// Searches on the mesh.
// ---------------------------------------------------------------------------

enum class MeshEdgeCost {
  Chordal,  // ambient length: intrinsic path metric
  QGauge,   // 2 pi^{-1/2} sqrt(H^2(B(mid, len/2))): the measure-deformed metric
};

struct MeshDistanceField {
  std::vector<double> dist;
  std::vector<int32_t> parent;
};

MeshDistanceField mesh_distance_field(
    const SurfaceMesh& m, uint32_t src, MeshEdgeCost cost = MeshEdgeCost::Chordal,
    double budget = std::numeric_limits<double>::infinity());

// Widest-path field: best[v] = max over paths src -> v of the minimum |pos|
// along the path (endpoints included).  Certifies forced passages near the
// origin: every path from src to v enters the closed ball of radius best[v].
std::vector<double> mesh_bottleneck_from(const SurfaceMesh& m, uint32_t src);

// ---------------------------------------------------------------------------
// Exact-geometry area of a surface ball (independent of any mesh): H^2 of
// {y on surface : |y - c| < R}.  Plane contribution is a disk minus the
// grafting-disk lenses (closed forms); every spike contributes its meridian
// quadrature piece_area_in_ball.  Throws std::domain_error if the ball's
// plane footprint leaves `plane_window`.
// ---------------------------------------------------------------------------
double surface_ball_area(const SpikeSurface& s, Vec3 c, double R,
                         const Box2& plane_window);

}  // namespace mslab
