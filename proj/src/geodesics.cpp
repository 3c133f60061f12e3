#include <mslab/geodesics.hpp>

#include <mslab/quadrature.hpp>

#include <cmath>
#include <queue>
#include <stdexcept>

namespace mslab {

namespace {

const std::vector<std::pair<int, int>>& primitive_offsets(int stencil) {
  static const std::vector<std::pair<int, int>> k8 = {
      {1, 0}, {0, 1}, {1, 1}, {1, -1}};
  static const std::vector<std::pair<int, int>> k16 = {
      {1, 0}, {0, 1}, {1, 1}, {1, -1},
      {2, 1}, {1, 2}, {2, -1}, {1, -2}};
  static const std::vector<std::pair<int, int>> k32 = {
      {1, 0}, {0, 1}, {1, 1}, {1, -1},
      {2, 1}, {1, 2}, {2, -1}, {1, -2},
      {3, 1}, {1, 3}, {3, -1}, {1, -3},
      {3, 2}, {2, 3}, {3, -2}, {2, -3}};
  switch (stencil) {
    case 8: return k8;
    case 16: return k16;
    case 32: return k32;
    default: throw std::invalid_argument("stencil order must be 8, 16 or 32");
  }
}

// Segment collinear with the origin, within floating slack?
bool radial_segment(Vec2 a, Vec2 b) {
  const double cross = a.x * b.y - a.y * b.x;
  const double scale = std::max(a.norm() * b.norm(), 1e-30);
  return std::fabs(cross) <= 1e-14 * scale;
}

}  // namespace

double segment_length(const WeightField& w, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double L = d.norm();
  if (L == 0.0) return 0.0;

  switch (w.kind) {
    case WeightKind::Unit:
      return L;

    case WeightKind::Grushin: {
      if (a.x == b.x) return L * w.at(a);  // omega constant on vertical lines
      // ds = L dt and x1 is affine in t, so the integral reduces to the
      // closed-form primitive of omega along the x1-axis.
      const double P = w.horizontal_primitive(b.x) - w.horizontal_primitive(a.x);
      return L * P / (b.x - a.x);
    }

    case WeightKind::ExpRadial: {
      if (radial_segment(a, b)) {
        const double Pa = w.radial_primitive(a.norm());
        const double Pb = w.radial_primitive(b.norm());
        // Origin between the endpoints means two radial legs; otherwise the
        // difference of primitives along one ray.
        return a.dot(b) <= 0.0 ? Pa + Pb : std::fabs(Pb - Pa);
      }
      auto f = [&](double t) { return w.at(a + d * t); };
      // Split at the nearest approach to the singular origin.
      const double tstar = std::clamp(-(a.dot(d)) / (L * L), 0.0, 1.0);
      std::vector<double> splits;
      if (tstar > 0.0 && tstar < 1.0) splits.push_back(tstar);
      return L * integrate_split(f, 0.0, 1.0, splits, QuadTol{});
    }
  }
  return L;
}

// ---------------------------------------------------------------------------
// GridGraph
// ---------------------------------------------------------------------------

uint32_t GridGraph::nearest_node(Vec2 p) const {
  int ix = static_cast<int>(std::lround((p.x - box.x0) / h));
  int iy = static_cast<int>(std::lround((p.y - box.y0) / h));
  ix = std::clamp(ix, 0, nx - 1);
  iy = std::clamp(iy, 0, ny - 1);
  return node_id(ix, iy);
}

const std::vector<std::pair<int, int>>& GridGraph::offsets() const {
  if (offsets_cache_.empty()) {
    for (auto [dx, dy] : primitive_offsets(stencil)) {
      offsets_cache_.emplace_back(dx, dy);
      offsets_cache_.emplace_back(-dx, -dy);
    }
  }
  return offsets_cache_;
}

double GridGraph::edge_length(uint32_t u, uint32_t v) const {
  return segment_length(weight, node_pos(u), node_pos(v));
}

const std::vector<double>& GridGraph::masses() const {
  if (!mass_cache_.empty()) return mass_cache_;
  mass_cache_.resize(static_cast<size_t>(node_count()));
  const bool lebesgue = measure == MeasureKind::Lebesgue;
  // 3-point Simpson weights per axis on the clipped cell.
  static const double sw[3] = {1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0};
  for (int iy = 0; iy < ny; ++iy) {
    const double y = box.y0 + iy * h;
    const double yl = std::max(y - 0.5 * h, box.y0), yr = std::min(y + 0.5 * h, box.y1);
    for (int ix = 0; ix < nx; ++ix) {
      const double x = box.x0 + ix * h;
      const double xl = std::max(x - 0.5 * h, box.x0), xr = std::min(x + 0.5 * h, box.x1);
      const double area = (xr - xl) * (yr - yl);
      double m;
      if (lebesgue || weight.kind == WeightKind::Unit) {
        m = area;
      } else if (weight.kind == WeightKind::Grushin) {
        // omega^2 depends only on x1; exact in x, constant in y.
        m = (yr - yl) * (weight.horizontal_primitive2(xr) - weight.horizontal_primitive2(xl));
      } else {
        m = 0.0;
        const double xs[3] = {xl, 0.5 * (xl + xr), xr};
        const double ys[3] = {yl, 0.5 * (yl + yr), yr};
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            m += sw[a] * sw[b] * weight.at2({xs[a], ys[b]});
        m *= area;
      }
      mass_cache_[node_id(ix, iy)] = m;
    }
  }
  return mass_cache_;
}

double GridGraph::total_mass() const {
  KahanSum s;
  for (double m : masses()) s.add(m);
  return s.value();
}

GridGraph build_grid(const SpaceHandle& space, Box2 box, double h, int stencil) {
  if (space.geometry != GeometryKind::Plane)
    throw std::invalid_argument("build_grid: requires a planar space");
  (void)primitive_offsets(stencil);  // validates the stencil order
  if (!(h > 0.0)) throw std::invalid_argument("build_grid: h must be > 0");
  if (!(box.width() > 0.0) || !(box.height() > 0.0))
    throw std::invalid_argument("build_grid: degenerate box");
  if (box.x0 < space.domain.x0 - 1e-12 || box.x1 > space.domain.x1 + 1e-12 ||
      box.y0 < space.domain.y0 - 1e-12 || box.y1 > space.domain.y1 + 1e-12)
    throw std::invalid_argument("build_grid: box outside the space domain");

  GridGraph g;
  g.h = h;
  g.stencil = stencil;
  g.weight = space.weight;
  g.measure = space.measure;
  g.nx = static_cast<int>(std::floor(box.width() / h + 1e-9)) + 1;
  g.ny = static_cast<int>(std::floor(box.height() / h + 1e-9)) + 1;
  if (g.nx < 4 || g.ny < 4)
    throw std::invalid_argument("build_grid: h too large (fewer than 4 nodes per side)");
  g.box = Box2{box.x0, box.y0, box.x0 + (g.nx - 1) * h, box.y0 + (g.ny - 1) * h};
  return g;
}

// ---------------------------------------------------------------------------
// Dijkstra
// ---------------------------------------------------------------------------

namespace {

// Where the weight vanishes (the exponential weight near its puncture), edge
// costs drop below one ulp of the accumulated distance and whole regions
// become exactly tied in double arithmetic.  Those ties are broken
// lexicographically by a second additive functional, the Euclidean path
// integral of |x|: among routes of equal rounded cost, the exact cost is
// smaller for the route that hugs the vanishing locus, and the secondary key
// prefers exactly that route.  Distance values are unaffected — only the
// traced paths through tie plateaus are.
struct Search {
  const GridGraph& g;
  std::vector<double> dist;
  std::vector<double> sec;
  std::vector<int32_t> parent;
  std::vector<uint8_t> settled;
  using Item = std::tuple<double, double, uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;

  explicit Search(const GridGraph& g_)
      : g(g_),
        dist(g_.node_count(), std::numeric_limits<double>::infinity()),
        sec(g_.node_count(), std::numeric_limits<double>::infinity()),
        parent(g_.node_count(), -1),
        settled(g_.node_count(), 0) {}

  void seed(uint32_t s) {
    dist[s] = 0.0;
    sec[s] = 0.0;
    heap.emplace(0.0, 0.0, s);
  }

  // Runs until the frontier exceeds `budget`, `stop` is settled (if not
  // npos), or the heap drains.  Returns the number of settled nodes.
  size_t run(double budget, uint32_t stop = UINT32_MAX) {
    size_t count = 0;
    const auto& offs = g.offsets();
    while (!heap.empty()) {
      const auto [du, su, u] = heap.top();
      heap.pop();
      if (settled[u]) continue;
      if (du > budget) {
        // Push it back so the frontier state stays consistent.
        heap.emplace(du, su, u);
        break;
      }
      settled[u] = 1;
      ++count;
      if (u == stop) break;
      const int ux = static_cast<int>(u) % g.nx, uy = static_cast<int>(u) / g.nx;
      const Vec2 pu = g.node_pos(u);
      for (auto [dx, dy] : offs) {
        const int vx = ux + dx, vy = uy + dy;
        if (vx < 0 || vx >= g.nx || vy < 0 || vy >= g.ny) continue;
        const uint32_t v = g.node_id(vx, vy);
        if (settled[v]) continue;
        const double w = g.edge_length(u, v);
        const double cand = du + w;
        if (cand > dist[v]) continue;
        const Vec2 pv = g.node_pos(v);
        const double scand =
            su + (pv - pu).norm() * 0.5 * (pu.norm() + pv.norm());
        if (cand < dist[v] || scand < sec[v]) {
          dist[v] = cand;
          sec[v] = scand;
          parent[v] = static_cast<int32_t>(u);
          heap.emplace(cand, scand, v);
        }
      }
    }
    return count;
  }

  DistanceField take() {
    DistanceField out;
    out.dist.resize(dist.size());
    for (size_t i = 0; i < dist.size(); ++i)
      out.dist[i] = settled[i] ? dist[i] : std::numeric_limits<double>::infinity();
    out.parent = std::move(parent);
    return out;
  }

  Polyline2 trace(uint32_t dst) const {
    Polyline2 path;
    int32_t cur = static_cast<int32_t>(dst);
    while (cur >= 0) {
      path.push_back(g.node_pos(static_cast<uint32_t>(cur)));
      cur = parent[cur];
    }
    std::reverse(path.begin(), path.end());
    return path;
  }
};

}  // namespace

DistanceField distance_field(const GridGraph& g, Vec2 src, double budget) {
  Search s(g);
  s.seed(g.nearest_node(src));
  s.run(budget);
  return s.take();
}

PathResult shortest_path(const GridGraph& g, Vec2 src, Vec2 dst) {
  const uint32_t a = g.nearest_node(src), b = g.nearest_node(dst);
  PathResult out;
  out.src_snap = g.snap_displacement(src);
  out.dst_snap = g.snap_displacement(dst);
  if (a == b) {
    out.path = {g.node_pos(a)};
    out.length = 0.0;
    return out;
  }
  Search s(g);
  s.seed(a);
  s.run(std::numeric_limits<double>::infinity(), b);
  if (!s.settled[b])
    throw std::runtime_error("shortest_path: endpoints are disconnected");
  out.path = s.trace(b);
  out.length = s.dist[b];
  return out;
}

std::vector<PathResult> geodesic_fan(const GridGraph& g, Vec2 p,
                                     const std::vector<Vec2>& targets) {
  Search s(g);
  s.seed(g.nearest_node(p));
  s.run(std::numeric_limits<double>::infinity());
  std::vector<PathResult> out;
  out.reserve(targets.size());
  for (Vec2 t : targets) {
    const uint32_t b = g.nearest_node(t);
    PathResult r;
    r.src_snap = g.snap_displacement(p);
    r.dst_snap = g.snap_displacement(t);
    if (!s.settled[b])
      throw std::runtime_error("geodesic_fan: target unreachable");
    r.path = s.trace(b);
    r.length = s.dist[b];
    out.push_back(std::move(r));
  }
  return out;
}

double curve_length(const SpaceHandle& space, const Polyline2& c) {
  if (space.geometry != GeometryKind::Plane)
    throw std::invalid_argument("curve_length: requires a planar space");
  for (Vec2 p : c)
    if (!space.domain.contains(p))
      throw std::domain_error("curve_length: polyline leaves the space domain");
  KahanSum s;
  for (size_t i = 1; i < c.size(); ++i)
    s.add(segment_length(space.weight, c[i - 1], c[i]));
  return s.value();
}

double radial_distance(const WeightField& f, Vec2 x) {
  return f.radial_primitive(x.norm());  // throws for non-radial fields
}

}  // namespace mslab
