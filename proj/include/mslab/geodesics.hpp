#pragma once

#include <mslab/spaces.hpp>

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace mslab {

// ---------------------------------------------------------------------------
// Weighted grid graph over an axis-aligned box.
//
// Nodes sit on a lattice of spacing h (boundary-inclusive).  Neighbors follow
// a k-direction stencil (k in {8, 16, 32}; 8 = axis + diagonal, 16 adds the
// (2,1)-type knight moves, 32 adds (3,1) and (3,2) types).  Edge lengths are
// int omega ds along the straight segment, evaluated on demand during a
// search: exactly for unit weights, by closed-form primitives on radial
// segments of radial weights and on all segments of the glued Grushin weight,
// and by adaptive quadrature (split at the nearest approach to the
// singularity) otherwise.  Node masses integrate omega^2 (or 1 for Lebesgue
// measure) over the lattice cell clipped to the box.
// ---------------------------------------------------------------------------

struct GridGraph {
  Box2 box;
  double h = 0.0;
  int stencil = 16;
  int nx = 0, ny = 0;                  // boundary-inclusive node counts
  WeightField weight;
  MeasureKind measure = MeasureKind::Lebesgue;

  int64_t node_count() const { return static_cast<int64_t>(nx) * ny; }
  uint32_t node_id(int ix, int iy) const { return static_cast<uint32_t>(iy) * nx + ix; }
  Vec2 node_pos(uint32_t id) const {
    const int iy = static_cast<int>(id) / nx, ix = static_cast<int>(id) % nx;
    return {box.x0 + ix * h, box.y0 + iy * h};
  }
  uint32_t nearest_node(Vec2 p) const;
  double snap_displacement(Vec2 p) const {
    return (node_pos(nearest_node(p)) - p).norm();
  }

  // Directed stencil offsets for this graph (index units).
  const std::vector<std::pair<int, int>>& offsets() const;

  // d-length of the straight edge between two lattice nodes.
  double edge_length(uint32_t u, uint32_t v) const;

  // Lattice-cell masses; computed on first use and cached.
  const std::vector<double>& masses() const;
  double total_mass() const;

 private:
  mutable std::vector<double> mass_cache_;
  mutable std::vector<std::pair<int, int>> offsets_cache_;
};

// Builds the lattice for a planar space; throws std::invalid_argument for
// surface geometries, boxes outside the space domain, or h that resolves
// fewer than 4 nodes per side.  If h does not divide the box the box is
// cropped to the largest resolved sub-lattice anchored at (x0, y0).
GridGraph build_grid(const SpaceHandle& space, Box2 box, double h, int stencil);

// ---------------------------------------------------------------------------
// Shortest paths (Dijkstra on the stencil graph).
// ---------------------------------------------------------------------------

struct DistanceField {
  std::vector<double> dist;      // +inf where unreached/unsettled
  std::vector<int32_t> parent;   // -1 at sources and unreached nodes
};

// Full single-source field, or stop once the settled frontier exceeds
// `budget` (entries beyond the budget are reported as +inf).
DistanceField distance_field(const GridGraph& g, Vec2 src,
                             double budget = std::numeric_limits<double>::infinity());

struct PathResult {
  Polyline2 path;      // lattice polyline, src node first
  double length = 0.0; // graph distance (upper bound on the true d)
  double src_snap = 0.0, dst_snap = 0.0;  // snap displacements of the queries
};

PathResult shortest_path(const GridGraph& g, Vec2 src, Vec2 dst);

// One source, many targets, a single search.
std::vector<PathResult> geodesic_fan(const GridGraph& g, Vec2 p,
                                     const std::vector<Vec2>& targets);

// ---------------------------------------------------------------------------
// Length functionals.
// ---------------------------------------------------------------------------

// int omega ds along the straight segment a-b (same rules as edge_length).
double segment_length(const WeightField& w, Vec2 a, Vec2 b);

// Sum of segment lengths over a polyline.
double curve_length(const SpaceHandle& space, const Polyline2& c);

// Distance from the origin for radial weight fields: the radial ray realizes
// the infimum (the weight increases with the radius on the scales we use), so
// d(0, x) equals the closed-form primitive e^{-1/|x|} for the exponential
// weight and |x| for the unit weight.
double radial_distance(const WeightField& f, Vec2 x);

}  // namespace mslab
