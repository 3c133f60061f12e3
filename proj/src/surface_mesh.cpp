#include <mslab/surface_mesh.hpp>

#include <mslab/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace mslab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

double triangle_area(Vec3 a, Vec3 b, Vec3 c) {
  const Vec3 u = b - a, v = c - a;
  const Vec3 w{u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z, u.x * v.y - u.y * v.x};
  return 0.5 * w.norm();
}

}  // namespace

double surface_ball_area(const SpikeSurface& s, Vec3 c, double R,
                         const Box2& plane_window) {
  if (!(R > 0.0)) throw std::invalid_argument("surface_ball_area: R must be > 0");
  KahanSum area;
  // Plane part: the footprint {|xy - c_xy| < sqrt(R^2 - c_z^2)} minus the
  // grafting-disk lenses.
  if (R > std::fabs(c.z)) {
    const double Rp = std::sqrt(R * R - c.z * c.z);
    const Vec2 cxy{c.x, c.y};
    if (cxy.x - Rp < plane_window.x0 || cxy.x + Rp > plane_window.x1 ||
        cxy.y - Rp < plane_window.y0 || cxy.y + Rp > plane_window.y1)
      throw std::domain_error("surface_ball_area: ball exceeds the plane window");
    area.add(kPi * Rp * Rp);
    for (int n = 1; n <= s.truncation; ++n)
      area.add(-disk_intersection_area(cxy, Rp, Vec2{s.t(n), 0.0}, s.r(n)));
  }
  // Spike pieces, prefiltered by bounding spheres.
  for (int n = 1; n <= s.truncation; ++n) {
    const double tn = s.t(n), rn = s.r(n), hn = s.h(n);
    const Vec3 bc{tn, 0.0, 0.5 * hn};
    const double br = std::sqrt(rn * rn + 0.25 * hn * hn);
    if ((c - bc).norm() >= R + br) continue;
    area.add(s.piece_area_in_ball(n, c, R));
  }
  return area.value();
}

// ---------------------------------------------------------------------------
// Mesh construction
// ---------------------------------------------------------------------------

namespace {

struct Builder {
  std::vector<Vec3> pos;
  std::vector<int32_t> piece;
  std::vector<double> mass;
  std::vector<std::pair<uint32_t, uint32_t>> edges;

  uint32_t add_node(Vec3 p, int32_t pc) {
    pos.push_back(p);
    piece.push_back(pc);
    mass.push_back(0.0);
    return static_cast<uint32_t>(pos.size() - 1);
  }
  void add_edge(uint32_t a, uint32_t b) {
    if (a == b) return;
    edges.emplace_back(std::min(a, b), std::max(a, b));
  }
};

}  // namespace

SurfaceMesh build_surface_mesh(const SpikeSurface& s, const SurfaceMeshOptions& opt) {
  if (!(opt.h > 0.0)) throw std::invalid_argument("build_surface_mesh: h must be > 0");
  SurfaceMesh mesh;
  mesh.surface = std::make_shared<SpikeSurface>(s);
  mesh.opt = opt;
  mesh.piece_mesh_area.assign(s.truncation + 1, 0.0);

  const double h = opt.h;
  const Box2 box = opt.box;
  const int nx = static_cast<int>(std::floor(box.width() / h + 1e-9)) + 1;
  const int ny = static_cast<int>(std::floor(box.height() / h + 1e-9)) + 1;
  if (nx < 4 || ny < 4)
    throw std::invalid_argument("build_surface_mesh: h too large for the window");

  // Partition the spikes: resolved / unresolved-in-window / outside.
  std::vector<char> is_resolved(s.truncation + 1, 0);
  mesh.omitted_piece_area = 0.0;
  for (int n = 1; n <= s.truncation; ++n) {
    const double tn = s.t(n), rn = s.r(n);
    const bool in_window = tn + rn > box.x0 && tn - rn < box.x1 &&
                           rn > box.y0 - rn && -rn < box.y1;  // spikes sit on y = 0
    if (!in_window) continue;
    const bool fully_inside = tn - rn - h >= box.x0 && tn + rn + h <= box.x1 &&
                              -rn - h >= box.y0 && rn + h <= box.y1;
    if (fully_inside && rn >= opt.resolve_factor * h) {
      is_resolved[n] = 1;
      mesh.resolved.push_back(n);
    } else {
      mesh.omitted_piece_area += s.piece_area(n);
    }
  }

  Builder b;

  // --- plane lattice ---
  std::vector<int32_t> plane_id(static_cast<size_t>(nx) * ny, -1);
  auto lattice_pos = [&](int ix, int iy) {
    return Vec2{box.x0 + ix * h, box.y0 + iy * h};
  };
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const Vec2 p = lattice_pos(ix, iy);
      bool removed = false;
      for (int n : mesh.resolved) {
        if ((p - Vec2{s.t(n), 0.0}).norm() < s.r(n)) {
          removed = true;
          break;
        }
      }
      if (removed) continue;
      const uint32_t id = b.add_node(Vec3{p.x, p.y, 0.0}, 0);
      plane_id[static_cast<size_t>(iy) * nx + ix] = static_cast<int32_t>(id);
    }
  }
  auto pid = [&](int ix, int iy) -> int32_t {
    if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) return -1;
    return plane_id[static_cast<size_t>(iy) * nx + ix];
  };
  // plane masses: cell area, subsampled near resolved disk rims
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const int32_t id = pid(ix, iy);
      if (id < 0) continue;
      const Vec2 p = lattice_pos(ix, iy);
      const double xl = std::max(p.x - 0.5 * h, box.x0), xr = std::min(p.x + 0.5 * h, box.x1);
      const double yl = std::max(p.y - 0.5 * h, box.y0), yr = std::min(p.y + 0.5 * h, box.y1);
      double m = (xr - xl) * (yr - yl);
      for (int n : mesh.resolved) {
        const Vec2 cn{s.t(n), 0.0};
        if ((p - cn).norm() < s.r(n) + 2.0 * h) {
          // Cell may straddle the removed-disk rim: subsample 8x8.
          int outside = 0;
          for (int a = 0; a < 8; ++a)
            for (int bb = 0; bb < 8; ++bb) {
              const Vec2 q{xl + (a + 0.5) / 8.0 * (xr - xl),
                           yl + (bb + 0.5) / 8.0 * (yr - yl)};
              if ((q - cn).norm() >= s.r(n)) ++outside;
            }
          m = (xr - xl) * (yr - yl) * outside / 64.0;
          break;
        }
      }
      b.mass[id] = m;
      mesh.piece_mesh_area[0] += m;
    }
  }
  // plane edges: 8-neighbor
  const int plane_offs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const int32_t u = pid(ix, iy);
      if (u < 0) continue;
      for (auto& o : plane_offs) {
        const int32_t v = pid(ix + o[0], iy + o[1]);
        if (v >= 0) b.add_edge(u, v);
      }
    }
  }

  // --- spike meshes ---
  for (int n : mesh.resolved) {
    const double tn = s.t(n), rn = s.r(n), hn = s.h(n);
    const int ntheta = std::clamp(static_cast<int>(std::ceil(2.0 * kPi * rn / h)),
                                  opt.min_theta, opt.max_theta);
    auto ring_point = [&](double rho, double z, int i) {
      const double th = 2.0 * kPi * i / ntheta;
      return Vec3{tn + rho * std::cos(th), rho * std::sin(th), z};
    };
    auto lump = [&](uint32_t a, uint32_t bb, uint32_t c) {
      const double A = triangle_area(b.pos[a], b.pos[bb], b.pos[c]);
      b.mass[a] += A / 3.0;
      b.mass[bb] += A / 3.0;
      b.mass[c] += A / 3.0;
      mesh.piece_mesh_area[n] += A;
    };
    auto connect_rings = [&](const std::vector<uint32_t>& lo, const std::vector<uint32_t>& hi) {
      for (int i = 0; i < ntheta; ++i) {
        const int j = (i + 1) % ntheta;
        const uint32_t a = lo[i], bb = lo[j], c = hi[i], d = hi[j];
        b.add_edge(a, bb);
        b.add_edge(c, d);
        b.add_edge(a, c);
        b.add_edge(bb, c);  // quad diagonal
        lump(a, bb, c);
        lump(bb, d, c);
      }
    };

    std::vector<uint32_t> rim(ntheta);  // z = 0 ring, stitched to the plane

    if (s.kind == SurfaceKind::Cones) {
      const double slant = std::hypot(rn, hn);
      const int m = std::clamp(static_cast<int>(std::ceil(slant / h)), 2, 20000);
      std::vector<std::vector<uint32_t>> rings(m);
      for (int jr = 0; jr < m; ++jr) {
        const double f = static_cast<double>(jr) / m;
        rings[jr].resize(ntheta);
        for (int i = 0; i < ntheta; ++i)
          rings[jr][i] = b.add_node(ring_point(rn * (1.0 - f), hn * f, i), n);
      }
      rim = rings[0];
      for (int jr = 0; jr + 1 < m; ++jr) connect_rings(rings[jr], rings[jr + 1]);
      const uint32_t apex = b.add_node(Vec3{tn, 0.0, hn}, n);
      for (int i = 0; i < ntheta; ++i) {
        const int j = (i + 1) % ntheta;
        b.add_edge(rings[m - 1][i], apex);
        b.add_edge(rings[m - 1][i], rings[m - 1][j]);
        lump(rings[m - 1][i], rings[m - 1][j], apex);
      }
    } else {
      // tube
      const int mt = std::clamp(static_cast<int>(std::ceil(hn / h)), 2, 20000);
      std::vector<std::vector<uint32_t>> rings(mt + 1);
      for (int jr = 0; jr <= mt; ++jr) {
        rings[jr].resize(ntheta);
        for (int i = 0; i < ntheta; ++i)
          rings[jr][i] = b.add_node(ring_point(rn, hn * jr / mt, i), n);
      }
      rim = rings[0];
      for (int jr = 0; jr < mt; ++jr) connect_rings(rings[jr], rings[jr + 1]);
      // cap: polar rings shrinking from the tube's top ring to a center node
      const int mc = std::clamp(static_cast<int>(std::ceil(rn / h)), 2, 64);
      std::vector<uint32_t> outer = rings[mt];
      for (int ir = mc - 1; ir >= 1; --ir) {
        std::vector<uint32_t> inner(ntheta);
        for (int i = 0; i < ntheta; ++i)
          inner[i] = b.add_node(ring_point(rn * ir / mc, hn, i), n);
        connect_rings(inner, outer);
        outer = inner;
      }
      const uint32_t center = b.add_node(Vec3{tn, 0.0, hn}, n);
      for (int i = 0; i < ntheta; ++i) {
        const int j = (i + 1) % ntheta;
        b.add_edge(outer[i], center);
        b.add_edge(outer[i], outer[j]);
        lump(outer[i], outer[j], center);
      }
    }

    // stitch the rim ring to nearby plane nodes
    for (uint32_t u : rim) {
      const Vec2 p{b.pos[u].x, b.pos[u].y};
      bool found = false;
      for (double reach : {1.6, 2.3, 3.2}) {
        const int cx = static_cast<int>(std::lround((p.x - box.x0) / h));
        const int cy = static_cast<int>(std::lround((p.y - box.y0) / h));
        const int w = static_cast<int>(std::ceil(reach)) + 1;
        for (int dy = -w; dy <= w; ++dy) {
          for (int dx = -w; dx <= w; ++dx) {
            const int32_t v = pid(cx + dx, cy + dy);
            if (v < 0) continue;
            const double dv = (Vec2{b.pos[v].x, b.pos[v].y} - p).norm();
            if (dv <= 1e-12) continue;  // lattice point exactly on the rim circle
            if (dv <= reach * h) {
              b.add_edge(u, static_cast<uint32_t>(v));
              found = true;
            }
          }
        }
        if (found) break;
      }
      if (!found)
        throw std::runtime_error("build_surface_mesh: failed to stitch a spike rim");
    }
  }

  // --- CSR ---
  std::sort(b.edges.begin(), b.edges.end());
  b.edges.erase(std::unique(b.edges.begin(), b.edges.end()), b.edges.end());
  const size_t N = b.pos.size();
  std::vector<uint32_t> deg(N, 0);
  for (auto [u, v] : b.edges) {
    ++deg[u];
    ++deg[v];
  }
  mesh.adj_start.assign(N + 1, 0);
  for (size_t i = 0; i < N; ++i) mesh.adj_start[i + 1] = mesh.adj_start[i] + deg[i];
  mesh.adj_node.resize(mesh.adj_start[N]);
  mesh.adj_len.resize(mesh.adj_start[N]);
  std::vector<uint32_t> cursor(mesh.adj_start.begin(), mesh.adj_start.end() - 1);
  for (auto [u, v] : b.edges) {
    const double len = (b.pos[u] - b.pos[v]).norm();
    mesh.adj_node[cursor[u]] = v;
    mesh.adj_len[cursor[u]++] = len;
    mesh.adj_node[cursor[v]] = u;
    mesh.adj_len[cursor[v]++] = len;
  }

  mesh.pos = std::move(b.pos);
  mesh.piece = std::move(b.piece);
  mesh.mass = std::move(b.mass);

  // --- xy spatial hash ---
  mesh.bcell_ = h;
  mesh.bx_ = nx + 1;
  mesh.by_ = ny + 1;
  const size_t B = static_cast<size_t>(mesh.bx_) * mesh.by_;
  std::vector<uint32_t> bucket_of(N);
  std::vector<uint32_t> count(B + 1, 0);
  for (size_t i = 0; i < N; ++i) {
    int bxi = static_cast<int>((mesh.pos[i].x - box.x0) / h + 0.5);
    int byi = static_cast<int>((mesh.pos[i].y - box.y0) / h + 0.5);
    bxi = std::clamp(bxi, 0, mesh.bx_ - 1);
    byi = std::clamp(byi, 0, mesh.by_ - 1);
    bucket_of[i] = static_cast<uint32_t>(byi) * mesh.bx_ + bxi;
    ++count[bucket_of[i] + 1];
  }
  for (size_t i = 0; i < B; ++i) count[i + 1] += count[i];
  mesh.bucket_start_ = count;
  mesh.bucket_node_.resize(N);
  std::vector<uint32_t> cur(count.begin(), count.end() - 1);
  for (size_t i = 0; i < N; ++i) mesh.bucket_node_[cur[bucket_of[i]]++] = static_cast<uint32_t>(i);

  return mesh;
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

uint32_t SurfaceMesh::nearest_node(Vec3 p) const {
  uint32_t best = 0;
  double bd = kInf;
  for (size_t i = 0; i < pos.size(); ++i) {
    const double d = (pos[i] - p).norm2();
    if (d < bd) {
      bd = d;
      best = static_cast<uint32_t>(i);
    }
  }
  return best;
}

double SurfaceMesh::total_mass() const {
  KahanSum s;
  for (double m : mass) s.add(m);
  return s.value();
}

std::vector<uint32_t> SurfaceMesh::nodes_in_ball(Vec3 c, double R) const {
  std::vector<uint32_t> out;
  const Box2& box = opt.box;
  const double h = bcell_;
  const int x0 = std::clamp(static_cast<int>((c.x - R - box.x0) / h), 0, bx_ - 1);
  const int x1 = std::clamp(static_cast<int>((c.x + R - box.x0) / h + 1.0), 0, bx_ - 1);
  const int y0 = std::clamp(static_cast<int>((c.y - R - box.y0) / h), 0, by_ - 1);
  const int y1 = std::clamp(static_cast<int>((c.y + R - box.y0) / h + 1.0), 0, by_ - 1);
  const double R2 = R * R;
  for (int by = y0; by <= y1; ++by) {
    for (int bx = x0; bx <= x1; ++bx) {
      const uint32_t bk = static_cast<uint32_t>(by) * bx_ + bx;
      for (uint32_t k = bucket_start_[bk]; k < bucket_start_[bk + 1]; ++k) {
        const uint32_t i = bucket_node_[k];
        if ((pos[i] - c).norm2() < R2) out.push_back(i);
      }
    }
  }
  return out;
}

double SurfaceMesh::ball_mass(Vec3 c, double R) const {
  KahanSum s;
  for (uint32_t i : nodes_in_ball(c, R)) s.add(mass[i]);
  return s.value();
}

MeshDistanceField mesh_distance_field(const SurfaceMesh& m, uint32_t src,
                                      MeshEdgeCost cost, double budget) {
  const size_t N = m.node_count();
  MeshDistanceField out;
  out.dist.assign(N, kInf);
  out.parent.assign(N, -1);
  std::vector<uint8_t> settled(N, 0);
  using Item = std::pair<double, uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  std::vector<double> dist(N, kInf);
  dist[src] = 0.0;
  heap.emplace(0.0, src);
  const double inv_sqrt_pi = 1.0 / std::sqrt(kPi);
  while (!heap.empty()) {
    const auto [du, u] = heap.top();
    heap.pop();
    if (settled[u]) continue;
    if (du > budget) break;
    settled[u] = 1;
    for (uint32_t e = m.adj_start[u]; e < m.adj_start[u + 1]; ++e) {
      const uint32_t v = m.adj_node[e];
      if (settled[v]) continue;
      double w = m.adj_len[e];
      if (cost == MeshEdgeCost::QGauge) {
        const Vec3 mid = (m.pos[u] + m.pos[v]) * 0.5;
        const double mass = surface_ball_area(*m.surface, mid, 0.5 * w, m.opt.plane_domain);
        w = 2.0 * inv_sqrt_pi * std::sqrt(std::max(mass, 0.0));
      }
      const double cand = du + w;
      if (cand < dist[v]) {
        dist[v] = cand;
        out.parent[v] = static_cast<int32_t>(u);
        heap.emplace(cand, v);
      }
    }
  }
  for (size_t i = 0; i < N; ++i) out.dist[i] = settled[i] ? dist[i] : kInf;
  return out;
}

std::vector<double> mesh_bottleneck_from(const SurfaceMesh& m, uint32_t src) {
  const size_t N = m.node_count();
  std::vector<double> best(N, -1.0);
  std::vector<uint8_t> done(N, 0);
  using Item = std::pair<double, uint32_t>;
  std::priority_queue<Item> heap;  // max-heap on the bottleneck value
  best[src] = m.pos[src].norm();
  heap.emplace(best[src], src);
  while (!heap.empty()) {
    const auto [bu, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (uint32_t e = m.adj_start[u]; e < m.adj_start[u + 1]; ++e) {
      const uint32_t v = m.adj_node[e];
      if (done[v]) continue;
      const double nb = std::min(bu, m.pos[v].norm());
      if (nb > best[v]) {
        best[v] = nb;
        heap.emplace(nb, v);
      }
    }
  }
  return best;
}

}  // namespace mslab
