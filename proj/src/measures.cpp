#include <mslab/measures.hpp>

#include <mslab/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>

namespace mslab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_lebesgue_unit(const SpaceHandle& s) {
  return s.is_plane() && s.weight.kind == WeightKind::Unit &&
         s.measure == MeasureKind::Lebesgue;
}

void require_plane(const SpaceHandle& s, const char* op) {
  if (!s.is_plane())
    throw std::invalid_argument(std::string(op) +
                                ": plane spaces only (surfaces use the mesh layer)");
}

// Largest t >= 0 with c + t u still inside box (c must be inside).
double ray_exit(Vec2 c, Vec2 u, const Box2& box) {
  double t = kInf;
  if (u.x > 1e-300) t = std::min(t, (box.x1 - c.x) / u.x);
  if (u.x < -1e-300) t = std::min(t, (box.x0 - c.x) / u.x);
  if (u.y > 1e-300) t = std::min(t, (box.y1 - c.y) / u.y);
  if (u.y < -1e-300) t = std::min(t, (box.y0 - c.y) / u.y);
  return std::max(t, 0.0);
}

// Euclidean radius at which the d-arclength along the ray from c reaches
// delta; throws if the ray leaves the domain first.
double ray_crossing(const WeightField& w, const Box2& domain, Vec2 c, Vec2 u,
                    double delta) {
  const double exit = ray_exit(c, u, domain);
  auto g = [&](double t) {
    return segment_length(w, c, Vec2{c.x + t * u.x, c.y + t * u.y}) - delta;
  };
  if (g(exit) < 0.0)
    throw std::domain_error("ball measure: ball reaches past the space domain");
  return bisect_root(g, 0.0, exit, std::max(exit * 1e-7, 1e-300));
}

// Star-shaped sublevel-set approximation of mu(B_d(c, delta)): per-ray
// crossing radii, sector masses by radial quadrature.
double star_measure(const SpaceHandle& s, Vec2 c, double delta, int rays) {
  const WeightField& w = s.weight;
  KahanSum mu;
  for (int k = 0; k < rays; ++k) {
    const double th = 2.0 * kPi * (k + 0.5) / rays;
    const Vec2 u{std::cos(th), std::sin(th)};
    const double tk = ray_crossing(w, s.domain, c, u, delta);
    if (!(tk > 0.0)) continue;
    auto f = [&](double t) { return w.at2(Vec2{c.x + t * u.x, c.y + t * u.y}) * t; };
    std::vector<double> knots;
    if (w.kind == WeightKind::ExpRadial) {
      const double tna = -c.dot(u);  // nearest approach to the origin
      if (tna > 0.0 && tna < tk) knots.push_back(tna);
    } else if (w.kind == WeightKind::Grushin && std::fabs(u.x) > 1e-300) {
      const double tax = -c.x / u.x;  // axis crossing
      if (tax > 0.0 && tax < tk) knots.push_back(tax);
    }
    mu.add((2.0 * kPi / rays) * integrate_split(f, 0.0, tk, knots, QuadTol{0.0, 1e-7}));
  }
  return mu.value();
}

// Sublevel-set integration of the distance field, growing the window until
// the ball is strictly interior.
double sublevel_ball(const SpaceHandle& s, Vec2 c, double r, const BallMeasureParams& p) {
  const Box2& dom = s.domain;
  double W = 0.0;
  for (int k = 0; k < 8; ++k) {
    const double th = 2.0 * kPi * (k + 0.5) / 8.0;
    W = std::max(W, ray_crossing(s.weight, dom, c, Vec2{std::cos(th), std::sin(th)}, r));
  }
  W *= 1.3;
  if (p.h > 0.0) W = std::max(W, 16.0 * p.h);
  for (int attempt = 0; attempt < 8; ++attempt) {
    const double h = p.h > 0.0 ? p.h : std::max(W / 128.0, 1e-9);
    auto extent = [&](double room) {
      return h * std::floor(std::min(W, std::max(room, 0.0)) / h);
    };
    const Box2 box{c.x - extent(c.x - dom.x0), c.y - extent(c.y - dom.y0),
                   c.x + extent(dom.x1 - c.x), c.y + extent(dom.y1 - c.y)};
    const GridGraph g = build_grid(s, box, h, p.stencil);
    const DistanceField df = distance_field(g, c, r * (1.0 + 1e-9));
    // If the sublevel set touches the window edge, grow the window — unless
    // that edge already sits on the space domain, in which case the ball
    // genuinely does not fit.
    bool grow = false;
    auto probe = [&](uint32_t id, bool domain_side) {
      if (!(df.dist[id] < r)) return;
      if (domain_side)
        throw std::domain_error("ball_measure: r exceeds the domain reach");
      grow = true;
    };
    const bool dl = g.box.x0 <= dom.x0 + 0.5 * h, dr = g.box.x1 >= dom.x1 - 0.5 * h;
    const bool db = g.box.y0 <= dom.y0 + 0.5 * h, dt = g.box.y1 >= dom.y1 - 0.5 * h;
    for (int ix = 0; ix < g.nx; ++ix) {
      probe(g.node_id(ix, 0), db);
      probe(g.node_id(ix, g.ny - 1), dt);
    }
    for (int iy = 0; iy < g.ny; ++iy) {
      probe(g.node_id(0, iy), dl);
      probe(g.node_id(g.nx - 1, iy), dr);
    }
    if (grow) {
      W *= 1.7;
      continue;
    }
    KahanSum m;
    const auto& mass = g.masses();
    for (int64_t i = 0; i < g.node_count(); ++i)
      if (df.dist[i] < r) m.add(mass[i]);
    return m.value();
  }
  throw std::runtime_error("ball_measure: sublevel window failed to stabilize");
}

std::pair<double, BallMeasureMethod> ball_measure_impl(const SpaceHandle& s, Vec3 x,
                                                       double r,
                                                       const BallMeasureParams& p) {
  if (!(r > 0.0)) throw std::invalid_argument("ball_measure: r must be > 0");
  if (!s.is_plane())
    return {surface_ball_area(*s.surface, x, r, s.domain),
            BallMeasureMethod::ClosedForm};
  if (std::fabs(x.z) > 1e-12)
    throw std::invalid_argument("ball_measure: plane spaces take z = 0 centers");
  const Vec2 c{x.x, x.y};
  if (!s.domain.contains(c))
    throw std::domain_error("ball_measure: center outside the space domain");
  if (!p.force_sublevel) {
    if (is_lebesgue_unit(s)) {
      if (c.x - r < s.domain.x0 || c.x + r > s.domain.x1 || c.y - r < s.domain.y0 ||
          c.y + r > s.domain.y1)
        throw std::domain_error("ball_measure: r exceeds the domain reach");
      return {kPi * r * r, BallMeasureMethod::ClosedForm};
    }
    if (s.weight.kind == WeightKind::ExpRadial &&
        s.measure == MeasureKind::WeightedArea && c.norm() < 1e-14) {
      if (!(r < 1.0))
        throw std::domain_error("ball_measure: r exceeds the domain reach");
      const double R = -1.0 / std::log(r);  // Euclidean radius of B_d(0, r)
      const double reach = std::min(std::min(s.domain.x1, -s.domain.x0),
                                    std::min(s.domain.y1, -s.domain.y0));
      if (R > reach)
        throw std::domain_error("ball_measure: r exceeds the domain reach");
      return {2.0 * kPi * r * r * (0.25 - 0.5 * std::log(r)),
              BallMeasureMethod::ClosedForm};
    }
  }
  return {sublevel_ball(s, c, r, p), BallMeasureMethod::SublevelIntegration};
}

}  // namespace

const char* to_string(BallMeasureMethod m) {
  switch (m) {
    case BallMeasureMethod::ClosedForm: return "closed-form";
    case BallMeasureMethod::SublevelIntegration: return "sublevel-integration";
    case BallMeasureMethod::SurfaceTriangulation: return "surface-triangulation";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Weighted area
// ---------------------------------------------------------------------------

double weighted_area(const WeightField& f, const Box2& box) {
  if (!(box.width() > 0.0) || !(box.height() > 0.0)) return 0.0;
  switch (f.kind) {
    case WeightKind::Unit:
      return box.width() * box.height();
    case WeightKind::Grushin: {
      const double left = std::max(0.0, std::min(box.x1, 0.0) - box.x0);
      const double x0 = std::max(box.x0, 0.0), x1 = std::max(box.x1, 0.0);
      const double right =
          x1 > x0 ? f.horizontal_primitive2(x1) - f.horizontal_primitive2(x0) : 0.0;
      return box.height() * (left + right);
    }
    case WeightKind::ExpRadial:
    default: {
      auto f2 = [&](double x, double y) { return f.at2(Vec2{x, y}); };
      return integrate_box(f2, box, QuadTol{0.0, 1e-8});
    }
  }
}

double weighted_area_disk(const WeightField& f, Vec2 center, double radius) {
  if (!(radius > 0.0)) return 0.0;
  if (f.kind == WeightKind::Unit) return kPi * radius * radius;
  if (f.symmetry() == Symmetry::Radial && center.norm() < 1e-14) {
    auto g = [&](double t) {
      const double w = f.profile(t);
      return w * w * t;
    };
    std::vector<double> knots{radius / 8.0};
    if (radius > 2.0 / 3.0) knots.push_back(2.0 / 3.0);  // mode of the exp profile
    return 2.0 * kPi * integrate_split(g, 0.0, radius, knots, QuadTol{0.0, 1e-9});
  }
  // Horizontal-strip decomposition; the strip integral is exact for the glued
  // Grushin weight and adaptive otherwise.
  auto strip = [&](double y) -> double {
    const double dy = y - center.y;
    const double w2 = radius * radius - dy * dy;
    if (w2 <= 0.0) return 0.0;
    const double w = std::sqrt(w2);
    const double x0 = center.x - w, x1 = center.x + w;
    if (f.kind == WeightKind::Grushin) {
      const double left = std::max(0.0, std::min(x1, 0.0) - x0);
      const double a = std::max(x0, 0.0), b = std::max(x1, 0.0);
      return left + (b > a ? f.horizontal_primitive2(b) - f.horizontal_primitive2(a)
                           : 0.0);
    }
    auto g = [&](double x) { return f.at2(Vec2{x, y}); };
    std::vector<double> knots;
    if (x0 < 0.0 && x1 > 0.0) knots.push_back(0.0);
    return integrate_split(g, x0, x1, knots, QuadTol{0.0, 1e-8});
  };
  return integrate(strip, center.y - radius, center.y + radius, QuadTol{0.0, 1e-7});
}

// ---------------------------------------------------------------------------
// Ball measures
// ---------------------------------------------------------------------------

double ball_measure(const SpaceHandle& s, Vec3 x, double r, const BallMeasureParams& p) {
  return ball_measure_impl(s, x, r, p).first;
}

BallMeasureTable ball_measure_table(const SpaceHandle& s, Vec3 x,
                                    const std::vector<double>& radii,
                                    const BallMeasureParams& p) {
  BallMeasureTable t;
  t.center = x;
  t.radii = radii;
  std::sort(t.radii.begin(), t.radii.end());
  t.radii.erase(std::unique(t.radii.begin(), t.radii.end()), t.radii.end());
  for (double r : t.radii) {
    auto [v, m] = ball_measure_impl(s, x, r, p);
    t.values.push_back(v);
    t.method = m;
  }
  return t;
}

BallMeasureTable ball_measure_table_mesh(const SurfaceMesh& m, Vec3 x,
                                         const std::vector<double>& radii) {
  BallMeasureTable t;
  t.center = x;
  t.radii = radii;
  std::sort(t.radii.begin(), t.radii.end());
  t.radii.erase(std::unique(t.radii.begin(), t.radii.end()), t.radii.end());
  t.method = BallMeasureMethod::SurfaceTriangulation;
  for (double r : t.radii) t.values.push_back(m.ball_mass(x, r));
  return t;
}

// ---------------------------------------------------------------------------
// Small-ball gauge
// ---------------------------------------------------------------------------

double small_ball_measure(const SpaceHandle& s, Vec2 m, double delta, int rays) {
  require_plane(s, "small_ball_measure");
  if (!(delta > 0.0)) return 0.0;
  if (is_lebesgue_unit(s)) return kPi * delta * delta;
  if (s.weight.kind == WeightKind::ExpRadial &&
      s.measure == MeasureKind::WeightedArea && m.norm() < 1e-14 && delta < 1.0)
    return 2.0 * kPi * delta * delta * (0.25 - 0.5 * std::log(delta));
  return star_measure(s, m, delta, rays);
}

double ball_gauge(const SpaceHandle& s, Vec2 m, double delta, int rays) {
  return 2.0 / std::sqrt(kPi) *
         std::sqrt(std::max(0.0, small_ball_measure(s, m, delta, rays)));
}

// ---------------------------------------------------------------------------
// Cover-content length
// ---------------------------------------------------------------------------

MuLengthEstimate mu_length(const SpaceHandle& s, const Polyline2& c,
                           std::vector<double> deltas, int rays) {
  require_plane(s, "mu_length");
  if (c.empty()) throw std::invalid_argument("mu_length: empty curve");
  if (deltas.empty()) throw std::invalid_argument("mu_length: need at least one delta");
  for (double d : deltas)
    if (!(d > 0.0)) throw std::invalid_argument("mu_length: deltas must be positive");
  std::sort(deltas.begin(), deltas.end(), std::greater<double>());
  deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());

  MuLengthEstimate out;
  out.curve = c;
  out.deltas = deltas;

  const WeightField& w = s.weight;
  std::vector<double> cum(c.size(), 0.0);
  for (size_t i = 0; i + 1 < c.size(); ++i)
    cum[i + 1] = cum[i] + segment_length(w, c[i], c[i + 1]);
  const double L = cum.back();

  for (const Vec2& p : c)
    if (deltas.front() > s.cover_radius(p) * (1.0 + 1e-12))
      throw std::domain_error(
          "mu_length: delta exceeds the admissible cover radius along the curve");

  // position on the curve at d-arclength t
  auto point_at = [&](double t) -> Vec2 {
    if (t <= 0.0) return c.front();
    if (t >= L) return c.back();
    size_t i = std::upper_bound(cum.begin(), cum.end(), t) - cum.begin();
    i = std::min(i, cum.size() - 1) - 1;
    const Vec2 a = c[i], b = c[i + 1];
    const double seg = cum[i + 1] - cum[i];
    if (!(seg > 0.0)) return a;
    const double target = std::min(t - cum[i], seg);
    double lam;
    if (w.kind == WeightKind::Unit) {
      lam = target / seg;
    } else if (target <= 0.0) {
      lam = 0.0;
    } else if (target >= seg) {
      lam = 1.0;
    } else {
      auto g = [&](double l) {
        return segment_length(w, a, Vec2{a.x + (b.x - a.x) * l, a.y + (b.y - a.y) * l}) -
               target;
      };
      lam = bisect_root(g, 0.0, 1.0, 1e-9);
    }
    return Vec2{a.x + (b.x - a.x) * lam, a.y + (b.y - a.y) * lam};
  };

  for (double d : deltas) {
    const double rho = d * (1.0 - 1e-3);  // covered arclength per ball, one side
    KahanSum content;
    if (L > 0.0) {
      const long n = static_cast<long>(std::ceil(L / (2.0 * rho)));
      for (long j = 0; j < n; ++j) {
        const double t = std::min((2.0 * j + 1.0) * rho, L);
        const Vec2 ctr = point_at(t);
        if (d > s.cover_radius(ctr) * (1.0 + 1e-12))
          throw std::domain_error(
              "mu_length: delta exceeds the admissible cover radius along the curve");
        content.add(ball_gauge(s, ctr, d, rays));
      }
    }
    out.contents.push_back(content.value());
  }

  const size_t n = out.contents.size();
  if (n >= 2) {
    const double d1 = deltas[n - 2], d2 = deltas[n - 1];  // d1 > d2
    const double c1 = out.contents[n - 2], c2 = out.contents[n - 1];
    out.extrapolated = (c2 * d1 - c1 * d2) / (d1 - d2);
  } else {
    out.extrapolated = out.contents.back();
  }
  return out;
}

// ---------------------------------------------------------------------------
// q-metric
// ---------------------------------------------------------------------------

namespace {

void q_run(const SpaceHandle& s, const GridGraph& g, uint32_t src, double budget,
           uint32_t stop, int rays, std::vector<double>& dist,
           std::vector<int32_t>& parent) {
  const int64_t n = g.node_count();
  std::vector<double> dd(n, kInf);
  std::vector<uint8_t> settled(n, 0);
  parent.assign(n, -1);
  using Item = std::pair<double, uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dd[src] = 0.0;
  heap.emplace(0.0, src);
  const bool fast = is_lebesgue_unit(s);
  const auto& offs = g.offsets();
  while (!heap.empty()) {
    const auto [du, u] = heap.top();
    heap.pop();
    if (settled[u]) continue;
    if (du > budget) break;
    settled[u] = 1;
    if (u == stop) break;
    const int ux = static_cast<int>(u) % g.nx, uy = static_cast<int>(u) / g.nx;
    for (auto [dx, dy] : offs) {
      const int vx = ux + dx, vy = uy + dy;
      if (vx < 0 || vx >= g.nx || vy < 0 || vy >= g.ny) continue;
      const uint32_t v = g.node_id(vx, vy);
      if (settled[v]) continue;
      const double sd = g.edge_length(u, v);
      const Vec2 mid = (g.node_pos(u) + g.node_pos(v)) * 0.5;
      if (0.5 * sd > s.cover_radius(mid) * (1.0 + 1e-12))
        throw std::runtime_error(
            "q-metric: grid too coarse (edge d-length exceeds the local cover radius)");
      const double cost = fast ? sd : ball_gauge(s, mid, 0.5 * sd, rays);
      if (du + cost < dd[v]) {
        dd[v] = du + cost;
        parent[v] = static_cast<int32_t>(u);
        heap.emplace(dd[v], v);
      }
    }
  }
  dist.assign(n, kInf);
  for (int64_t i = 0; i < n; ++i)
    if (settled[i]) dist[i] = dd[i];
}

}  // namespace

QMetricField q_metric_field(const SpaceHandle& s, const GridGraph& g, Vec2 source,
                            int rays, double budget) {
  require_plane(s, "q_metric_field");
  QMetricField f;
  f.source = source;
  q_run(s, g, g.nearest_node(source), budget, std::numeric_limits<uint32_t>::max(),
        rays, f.dist, f.parent);
  return f;
}

double q_distance(const SpaceHandle& s, const GridGraph& g, Vec2 x, Vec2 y, int rays) {
  require_plane(s, "q_distance");
  const uint32_t a = g.nearest_node(x), b = g.nearest_node(y);
  if (a == b) return 0.0;
  std::vector<double> dist;
  std::vector<int32_t> parent;
  q_run(s, g, a, kInf, b, rays, dist, parent);
  if (!(dist[b] < kInf))
    throw std::runtime_error("q_distance: targets not connected on the grid");
  return dist[b];
}

double hausdorff1_q(const SpaceHandle& s, const Polyline2& c, double fineness,
                    int rays) {
  require_plane(s, "hausdorff1_q");
  if (c.size() < 2) return 0.0;
  const double total = polyline_euclidean_length(c);
  if (!(total > 0.0)) return 0.0;
  if (fineness <= 0.0) fineness = total / 512.0;
  const bool fast = is_lebesgue_unit(s);
  KahanSum sum;
  for (size_t i = 0; i + 1 < c.size(); ++i) {
    const Vec2 a = c[i], b = c[i + 1];
    const double len = (b - a).norm();
    if (!(len > 0.0)) continue;
    const long n = std::max(1L, static_cast<long>(std::ceil(len / fineness)));
    for (long j = 0; j < n; ++j) {
      const Vec2 p{a.x + (b.x - a.x) * j / n, a.y + (b.y - a.y) * j / n};
      const Vec2 q{a.x + (b.x - a.x) * (j + 1) / n, a.y + (b.y - a.y) * (j + 1) / n};
      const double sd = segment_length(s.weight, p, q);
      const Vec2 mid = (p + q) * 0.5;
      if (0.5 * sd > s.cover_radius(mid) * (1.0 + 1e-12))
        throw std::domain_error(
            "hausdorff1_q: subdivision is coarser than the local cover radius");
      sum.add(fast ? sd : ball_gauge(s, mid, 0.5 * sd, rays));
    }
  }
  return sum.value();
}

}  // namespace mslab
