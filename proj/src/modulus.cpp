#include <mslab/modulus.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <cstdio>
#include <cstdlib>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mslab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Nodes whose mass sits below kPinMass are metrically negligible (underflowed
// weights): charging them costs nothing, so their density is pinned at
// kFreeRho and they are excluded from the energy.  The energy so discarded is
// at most node_count * kPinMass * kFreeRho^2 ~ 1e-90.
constexpr double kPinMass = 1e-120;
constexpr double kFreeRho = 1e12;

double seg_point_dist(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.norm2();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + ab * t)).norm();
}

// ---------------------------------------------------------------------------
// Lattice classification shared by both solvers.
// ---------------------------------------------------------------------------

struct Lattice {
  GridGraph g;
  std::vector<uint8_t> mask;   // node lies in the domain region
  std::vector<uint8_t> plate;  // 0 interior, 1 = E / zeta1, 2 = F / zeta3
  bool overlap = false;        // some node satisfies both plate predicates
};

Lattice classify(const SpaceHandle& space, const CurveFamilySpec& spec, double h,
                 int stencil) {
  if (spec.kind == FamilyKind::SpanningRing)
    throw std::invalid_argument("modulus: spanning-ring families are not supported");
  const bool quad = spec.kind == FamilyKind::Quadrilateral;
  const RegionPred& pred_e = quad ? spec.zeta[0] : spec.in_E;
  const RegionPred& pred_f = quad ? spec.zeta[2] : spec.in_F;
  if (!pred_e || !pred_f)
    throw std::invalid_argument("modulus [" + spec.label +
                                "]: family spec is missing its plate sets");
  Lattice L{build_grid(space, spec.bounds, h, stencil), {}, {}, false};
  const size_t n = static_cast<size_t>(L.g.node_count());
  L.mask.assign(n, 1);
  L.plate.assign(n, 0);
  const double hh = L.g.h;
  size_t ne = 0, nf = 0, nz1 = 0, nz3 = 0;
  for (size_t id = 0; id < n; ++id) {
    const Vec2 p = L.g.node_pos(static_cast<uint32_t>(id));
    if (spec.in_domain && !spec.in_domain(p, hh)) {
      L.mask[id] = 0;
      continue;
    }
    const bool e = pred_e(p, hh), f = pred_f(p, hh);
    if (e && f) L.overlap = true;
    if (e) {
      L.plate[id] = 1;
      ++ne;
    } else if (f) {
      L.plate[id] = 2;
      ++nf;
    }
    if (quad) {
      if (spec.zeta[1] && spec.zeta[1](p, hh)) ++nz1;
      if (spec.zeta[3] && spec.zeta[3](p, hh)) ++nz3;
    }
  }
  if (ne == 0 || nf == 0 || (quad && spec.zeta[1] && nz1 == 0) ||
      (quad && spec.zeta[3] && nz3 == 0))
    throw std::invalid_argument("modulus [" + spec.label +
                                "]: a boundary arc resolves no lattice nodes");
  return L;
}

// ---------------------------------------------------------------------------
// Harmonic-energy solver: weighted 5-point Laplace, conductance per edge
// mu(edge cell) / s_e^2 with the cell clipped only transversally.
// ---------------------------------------------------------------------------

struct HarmEdge {
  uint32_t u, v;
  double c;
};

ModulusResult solve_harmonic(const SpaceHandle& space, const CurveFamilySpec& spec,
                             const ModulusParams& prm) {
  if (!space.is_plane())
    throw std::invalid_argument(
        "harmonic modulus requires a plane space (surfaces use mu_modulus_mesh)");
  Lattice L = classify(space, spec, prm.h, 8);
  const GridGraph& g = L.g;
  if (L.overlap)
    throw std::runtime_error("modulus [" + spec.label +
                             "]: plates touch at grid resolution");
  const double h = g.h;
  const int nx = g.nx, ny = g.ny;
  const size_t n = static_cast<size_t>(g.node_count());
  const bool lebesgue = space.measure == MeasureKind::Lebesgue;

  std::vector<HarmEdge> edges;
  edges.reserve(2 * n);
  auto try_edge = [&](int ix, int iy, bool horiz) {
    const uint32_t u = g.node_id(ix, iy);
    const uint32_t v = horiz ? g.node_id(ix + 1, iy) : g.node_id(ix, iy + 1);
    if (!L.mask[u] || !L.mask[v]) return;
    if (static_cast<int>(L.plate[u]) + static_cast<int>(L.plate[v]) == 3)
      throw std::runtime_error("modulus [" + spec.label +
                               "]: plates touch at grid resolution");
    // Edges interior to one plate carry no current; skipping them also keeps
    // overflowed conductances of metrically collapsed cells out of the energy.
    if (L.plate[u] != 0 && L.plate[u] == L.plate[v]) return;
    const Vec2 pu = g.node_pos(u), pv = g.node_pos(v);
    Box2 cell;
    if (horiz)
      cell = Box2{pu.x, std::max(pu.y - h / 2, g.box.y0), pv.x,
                  std::min(pu.y + h / 2, g.box.y1)};
    else
      cell = Box2{std::max(pu.x - h / 2, g.box.x0), pu.y,
                  std::min(pu.x + h / 2, g.box.x1), pv.y};
    const double cmass =
        lebesgue ? cell.width() * cell.height() : weighted_area(space.weight, cell);
    const double s = segment_length(space.weight, pu, pv);
    // A metrically collapsed edge (underflowed weight) carries no energy.
    if (!(s > 0.0) || !(cmass > 0.0)) return;
    edges.push_back({u, v, cmass / (s * s)});
  };
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      if (ix + 1 < nx) try_edge(ix, iy, true);
      if (iy + 1 < ny) try_edge(ix, iy, false);
    }

  std::vector<uint32_t> degree(n, 0);
  for (const HarmEdge& e : edges) {
    ++degree[e.u];
    ++degree[e.v];
  }

  // Unknowns: in-domain, off-plate, and actually wired to something.
  std::vector<int32_t> uidx(n, -1);
  size_t nu = 0;
  for (size_t id = 0; id < n; ++id)
    if (L.mask[id] && L.plate[id] == 0 && degree[id] > 0)
      uidx[id] = static_cast<int32_t>(nu++);

  // Quadrilaterals must form one conducting component touching the plates;
  // otherwise the system is singular (disconnected grid).
  if (spec.kind == FamilyKind::Quadrilateral) {
    std::vector<std::vector<uint32_t>> adj(n);
    for (const HarmEdge& e : edges) {
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
    std::vector<uint8_t> seen(n, 0);
    std::vector<uint32_t> stack;
    for (size_t id = 0; id < n; ++id)
      if (L.mask[id] && L.plate[id] != 0 && degree[id] > 0) {
        seen[id] = 1;
        stack.push_back(static_cast<uint32_t>(id));
      }
    while (!stack.empty()) {
      const uint32_t u = stack.back();
      stack.pop_back();
      for (uint32_t v : adj[u])
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
    }
    for (size_t id = 0; id < n; ++id)
      if (uidx[id] >= 0 && !seen[id])
        throw std::runtime_error("modulus [" + spec.label +
                                 "]: singular system (disconnected grid)");
  }

  // Assemble CSR over unknowns; Dirichlet neighbors fold into diag and b.
  std::vector<double> diag(nu, 0.0), b(nu, 0.0);
  std::vector<uint32_t> row_start(nu + 1, 0);
  for (const HarmEdge& e : edges) {
    const int32_t iu = uidx[e.u], iv = uidx[e.v];
    if (iu >= 0) {
      diag[iu] += e.c;
      if (iv >= 0)
        ++row_start[iu + 1];
      else if (L.plate[e.v] == 2)
        b[iu] += e.c;
    }
    if (iv >= 0) {
      diag[iv] += e.c;
      if (iu >= 0)
        ++row_start[iv + 1];
      else if (L.plate[e.u] == 2)
        b[iv] += e.c;
    }
  }
  for (size_t i = 0; i < nu; ++i) row_start[i + 1] += row_start[i];
  std::vector<uint32_t> col(row_start[nu]);
  std::vector<double> cval(row_start[nu]);
  {
    std::vector<uint32_t> cur(row_start.begin(), row_start.end() - 1);
    for (const HarmEdge& e : edges) {
      const int32_t iu = uidx[e.u], iv = uidx[e.v];
      if (iu >= 0 && iv >= 0) {
        col[cur[iu]] = static_cast<uint32_t>(iv);
        cval[cur[iu]++] = e.c;
        col[cur[iv]] = static_cast<uint32_t>(iu);
        cval[cur[iv]++] = e.c;
      }
    }
  }

  // Jacobi-preconditioned CG.
  std::vector<double> x(nu, 0.0), r(b), z(nu), p(nu), ap(nu);
  double bb = 0.0;
  for (double v : b) bb += v * v;
  int iters = 0;
  double rel = 0.0;
  if (bb > 0.0) {
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
      for (size_t i = 0; i < nu; ++i) {
        double acc = diag[i] * in[i];
        for (uint32_t k = row_start[i]; k < row_start[i + 1]; ++k)
          acc -= cval[k] * in[col[k]];
        out[i] = acc;
      }
    };
    double rz = 0.0;
    for (size_t i = 0; i < nu; ++i) {
      z[i] = r[i] / diag[i];
      rz += r[i] * z[i];
    }
    p = z;
    const int max_iters = std::max(2000, 50 * std::max(nx, ny));
    for (iters = 0; iters < max_iters; ++iters) {
      double rr = 0.0;
      for (size_t i = 0; i < nu; ++i) rr += r[i] * r[i];
      rel = std::sqrt(rr / bb);
      if (rel <= prm.cg_tol) break;
      apply(p, ap);
      double pap = 0.0;
      for (size_t i = 0; i < nu; ++i) pap += p[i] * ap[i];
      if (!(pap > 0.0)) break;  // numerically exhausted
      const double alpha = rz / pap;
      for (size_t i = 0; i < nu; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
      double rz2 = 0.0;
      for (size_t i = 0; i < nu; ++i) {
        z[i] = r[i] / diag[i];
        rz2 += r[i] * z[i];
      }
      const double beta = rz2 / rz;
      rz = rz2;
      for (size_t i = 0; i < nu; ++i) p[i] = z[i] + beta * p[i];
    }
  }

  auto value_at = [&](uint32_t id) -> double {
    if (L.plate[id] == 1) return 0.0;
    if (L.plate[id] == 2) return 1.0;
    const int32_t i = uidx[id];
    return i >= 0 ? x[i] : 0.0;
  };
  KahanSum energy;
  for (const HarmEdge& e : edges) {
    const double d = value_at(e.u) - value_at(e.v);
    energy.add(e.c * d * d);
  }

  ModulusResult res;
  res.value = energy.value();
  res.method = ModulusMethod::HarmonicEnergy;
  res.residual = rel;
  res.iterations = iters;
  res.nx = nx;
  res.ny = ny;
  res.grid_box = g.box;
  res.h = h;
  return res;
}

// ---------------------------------------------------------------------------
// Density solver: constraint generation over rho-shortest grid paths, dual
// coordinate ascent (projected, exact per-coordinate line search) on the
// active-set quadratic program.
// ---------------------------------------------------------------------------

struct DProblem {
  size_t n = 0;
  std::vector<double> mass;
  std::vector<uint8_t> mask;
  std::vector<uint32_t> estart, enode;
  std::vector<double> ecost;
  std::vector<uint32_t> srcs;    // the smaller plate
  std::vector<uint8_t> target;   // membership in the other plate
  bool overlap = false;
  std::string label;
  // lattice metadata for snapshots (absent for meshes)
  int nx = 0, ny = 0;
  Box2 gbox;
  double h = 0.0;
};

enum class CostKind { Conformal, MuGauge };

DProblem build_plane_problem(const SpaceHandle& space, const CurveFamilySpec& spec,
                             const ModulusParams& prm, CostKind ck) {
  if (!space.is_plane())
    throw std::invalid_argument(
        "plane modulus solver requires a plane space (surfaces use mu_modulus_mesh)");
  Lattice L = classify(space, spec, prm.h, prm.path_stencil);
  const GridGraph& g = L.g;
  DProblem P;
  P.n = static_cast<size_t>(g.node_count());
  P.mass = g.masses();
  P.mask = L.mask;
  P.overlap = L.overlap;
  P.label = spec.label;
  P.nx = g.nx;
  P.ny = g.ny;
  P.gbox = g.box;
  P.h = g.h;
  // Plates that share a lattice node make every density inadmissible; the
  // solver flags that immediately, so skip the (possibly expensive) edge-cost
  // precomputation.
  if (P.overlap) return P;

  const bool cost_is_length =
      ck == CostKind::Conformal ||
      (space.weight.kind == WeightKind::Unit && space.measure == MeasureKind::Lebesgue);

  std::vector<std::pair<int, int>> half;
  for (const auto& o : g.offsets())
    if (o.second > 0 || (o.second == 0 && o.first > 0)) half.push_back(o);

  auto for_each_pair = [&](auto&& fn) {
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix) {
        const uint32_t u = g.node_id(ix, iy);
        if (!L.mask[u]) continue;
        for (const auto& [dx, dy] : half) {
          const int jx = ix + dx, jy = iy + dy;
          if (jx < 0 || jx >= g.nx || jy < 0 || jy >= g.ny) continue;
          const uint32_t v = g.node_id(jx, jy);
          if (!L.mask[v]) continue;
          fn(u, v);
        }
      }
  };

  std::vector<uint32_t> degree(P.n, 0);
  for_each_pair([&](uint32_t u, uint32_t v) {
    ++degree[u];
    ++degree[v];
  });
  P.estart.assign(P.n + 1, 0);
  for (size_t i = 0; i < P.n; ++i) P.estart[i + 1] = P.estart[i] + degree[i];
  P.enode.resize(P.estart[P.n]);
  P.ecost.resize(P.estart[P.n]);
  std::vector<uint32_t> cur(P.estart.begin(), P.estart.end() - 1);
  for_each_pair([&](uint32_t u, uint32_t v) {
    const double s = g.edge_length(u, v);
    double c = s;
    if (!cost_is_length) {
      const Vec2 mid = (g.node_pos(u) + g.node_pos(v)) * 0.5;
      const double cr = space.cover_radius(mid);
      if (0.5 * s > cr * (1.0 + 1e-12))
        throw std::runtime_error(
            "mu modulus [" + spec.label + "]: grid too coarse for the ball gauge near (" +
            std::to_string(mid.x) + ", " + std::to_string(mid.y) + ")");
      c = ball_gauge(space, mid, 0.5 * s, prm.rays);
    }
    P.enode[cur[u]] = v;
    P.ecost[cur[u]++] = c;
    P.enode[cur[v]] = u;
    P.ecost[cur[v]++] = c;
  });

  std::vector<uint32_t> e_nodes, f_nodes;
  for (size_t id = 0; id < P.n; ++id) {
    if (L.plate[id] == 1) e_nodes.push_back(static_cast<uint32_t>(id));
    if (L.plate[id] == 2) f_nodes.push_back(static_cast<uint32_t>(id));
  }
  const bool e_smaller = e_nodes.size() <= f_nodes.size();
  P.srcs = e_smaller ? std::move(e_nodes) : std::move(f_nodes);
  const std::vector<uint32_t>& tgt = e_smaller ? f_nodes : e_nodes;
  P.target.assign(P.n, 0);
  for (uint32_t id : tgt) P.target[id] = 1;
  return P;
}

struct DenseOutcome {
  double value = 0.0;
  double slack = 0.0;
  double gap = 0.0;  // certified relative duality gap at exit
  int nconstraints = 0;
  bool impossible = false;
  double length_scale = 1.0;
  std::vector<double> rho;
};

struct Constraint {
  std::vector<std::pair<uint32_t, double>> sup;  // (node, trapezoid weight N)
  double gpp = 0.0;
  double lambda = 0.0;
};

// Multi-source rho-shortest search.  Settles targets in distance order into
// `hits`; stops once at least one target is settled and the frontier has
// passed `horizon` (every unsettled target is then at least that long).
// Returns the first settled target (or -1) and its rho-length.
int64_t rho_shortest(const DProblem& P, const std::vector<double>& rho,
                     std::vector<double>& dist, std::vector<int32_t>& parent,
                     std::vector<uint8_t>& done, double& length, double horizon,
                     std::vector<uint32_t>* hits) {
  dist.assign(P.n, kInf);
  parent.assign(P.n, -1);
  done.assign(P.n, 0);
  if (hits) hits->clear();
  using QE = std::pair<double, uint32_t>;
  std::priority_queue<QE, std::vector<QE>, std::greater<QE>> heap;
  for (uint32_t s : P.srcs) {
    dist[s] = 0.0;
    heap.push({0.0, s});
  }
  int64_t first = -1;
  length = kInf;
  while (!heap.empty()) {
    const auto [du, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    if (first >= 0 && du > horizon) break;
    done[u] = 1;
    if (P.target[u]) {
      if (first < 0) {
        first = u;
        length = du;
        if (!hits) break;
      }
      if (hits && du < horizon) hits->push_back(u);
    }
    for (uint32_t k = P.estart[u]; k < P.estart[u + 1]; ++k) {
      const uint32_t v = P.enode[k];
      if (done[v]) continue;
      const double w = du + 0.5 * (rho[u] + rho[v]) * P.ecost[k];
      if (w < dist[v]) {
        dist[v] = w;
        parent[v] = static_cast<int32_t>(u);
        heap.push({w, v});
      }
    }
  }
  return first;
}

DenseOutcome solve_density_core(const DProblem& P, const ModulusParams& prm) {
  DenseOutcome out;
  if (P.overlap) {
    // E and F share a lattice point: the constant curve joins them with zero
    // length, so no density is admissible and the modulus is +infinity.
    out.impossible = true;
    out.value = kInf;
    return out;
  }
  if (P.srcs.empty())
    throw std::invalid_argument("density modulus [" + P.label + "]: empty plate set");

  std::vector<uint8_t> pinned(P.n, 0);
  std::vector<double> rho(P.n, 0.0);
  for (size_t v = 0; v < P.n; ++v)
    if (P.mass[v] < kPinMass) {
      pinned[v] = 1;
      rho[v] = kFreeRho;
    }

  std::vector<Constraint> cons;
  std::vector<double> dist;
  std::vector<int32_t> parent;
  std::vector<uint8_t> done;

  auto edge_cost = [&](uint32_t u, uint32_t v) -> double {
    for (uint32_t k = P.estart[u]; k < P.estart[u + 1]; ++k)
      if (P.enode[k] == v) return P.ecost[k];
    return 0.0;
  };

  // Gauss-Seidel sweeps over the dual variables; exact per-coordinate line
  // search with projection onto lambda >= 0.  Returns the worst violation.
  double sum_lambda = 0.0;
  auto sweep = [&](int passes, double target_viol) -> double {
    double maxv = 0.0;
    for (int pass = 0; pass < passes; ++pass) {
      maxv = 0.0;
      for (Constraint& c : cons) {
        double len = 0.0;
        for (const auto& [v, nw] : c.sup) len += nw * rho[v];
        const double viol =
            c.lambda > 0.0 ? std::fabs(1.0 - len) : std::max(0.0, 1.0 - len);
        maxv = std::max(maxv, viol);
        const double nl = std::max(0.0, c.lambda + (1.0 - len) / c.gpp);
        const double dl = nl - c.lambda;
        if (dl != 0.0) {
          c.lambda = nl;
          sum_lambda += dl;
          for (const auto& [v, nw] : c.sup)
            if (!pinned[v]) rho[v] += dl * nw / (2.0 * P.mass[v]);
        }
      }
      if (maxv <= target_viol) break;
    }
    return maxv;
  };

  auto energy_of = [&]() -> double {
    KahanSum es;
    for (size_t v = 0; v < P.n; ++v)
      if (!pinned[v] && rho[v] != 0.0) es.add(P.mass[v] * rho[v] * rho[v]);
    return es.value();
  };

  // Per round: one multi-source search, then every node-disjoint violated
  // path from its tree becomes a constraint (distinct start nodes progress
  // independently), so families with a continuum of extremal curves charge a
  // whole front per search instead of one curve.
  std::vector<uint8_t> used(P.n, 0);
  std::vector<uint32_t> hits;
  bool converged = false;
  double plen = 0.0;
  while (true) {
    const int64_t tgt =
        rho_shortest(P, rho, dist, parent, done, plen, 1.0 - prm.tol, &hits);
    if (tgt < 0) {
      // No grid curve joins the plates: the family is empty and its modulus 0.
      out.rho = std::move(rho);
      out.nconstraints = static_cast<int>(cons.size());
      return out;
    }
    if (plen >= 1.0 - prm.tol) {
      converged = true;
      break;
    }
    // Certified value bracket.  Any lambda >= 0 supported on any curve subset
    // is dual-feasible, so sum(lambda) - energy bounds the optimum from below,
    // while the admissible rescaling rho/plen gives energy/plen^2 from above.
    // Near the optimum the value settles long before the worst-path slack
    // does, so a certified relative gap <= tol is also convergence.
    double gap = kInf;
    if (plen > 0.0) {
      const double en = energy_of();
      const double lower = sum_lambda - en;
      if (en > 0.0 && lower > 0.0) gap = (en / (plen * plen) - lower) / (en / (plen * plen));
      if (gap <= prm.tol) {
        converged = true;
        break;
      }
    }
    if (static_cast<int>(cons.size()) >= prm.max_constraints) break;

    std::fill(used.begin(), used.end(), 0);
    size_t added = 0;
    for (uint32_t hit : hits) {
      if (static_cast<int>(cons.size()) >= prm.max_constraints) break;
      std::vector<uint32_t> path;
      bool fresh = true;
      for (uint32_t v = hit;;) {
        if (used[v]) {
          fresh = false;
          break;
        }
        path.push_back(v);
        if (parent[v] < 0) break;
        v = static_cast<uint32_t>(parent[v]);
      }
      if (!fresh) continue;
      for (uint32_t v : path) used[v] = 1;

      const size_t m = path.size();  // >= 2: overlap was excluded above
      std::vector<double> s(m - 1);
      double raw = 0.0;
      for (size_t i = 0; i + 1 < m; ++i) {
        s[i] = edge_cost(path[i], path[i + 1]);
        raw += s[i];
      }
      if (!(raw > 0.0)) {
        // A connecting curve of zero length: admissibility is impossible.
        out.impossible = true;
        out.value = kInf;
        out.nconstraints = static_cast<int>(cons.size());
        return out;
      }

      Constraint c;
      c.sup.reserve(m);
      double gpp = 0.0, span_pinned = 0.0, len0 = 0.0;
      for (size_t i = 0; i < m; ++i) {
        const double nw =
            0.5 * ((i > 0 ? s[i - 1] : 0.0) + (i + 1 < m ? s[i] : 0.0));
        if (!(nw > 0.0)) continue;
        c.sup.push_back({path[i], nw});
        len0 += nw * rho[path[i]];
        if (pinned[path[i]])
          span_pinned += nw;
        else
          gpp += nw * nw / (2.0 * P.mass[path[i]]);
      }
      if (!(gpp > 0.0)) {
        // Every charged node is free: raise the free plateau until this curve
        // is admissible (costs no energy), instead of storing a constraint.
        const double need = std::max(0.0, 1.0 - len0) / span_pinned;
        for (const auto& [v, nw] : c.sup)
          if (pinned[v]) rho[v] += need;
        continue;
      }
      c.gpp = gpp;
      // Exact single-constraint dual step on arrival (batch paths are
      // node-disjoint, so arrivals within a round do not interact).
      c.lambda = std::max(0.0, (1.0 - len0) / gpp);
      sum_lambda += c.lambda;
      if (c.lambda > 0.0)
        for (const auto& [v, nw] : c.sup)
          if (!pinned[v]) rho[v] += c.lambda * nw / (2.0 * P.mass[v]);
      cons.push_back(std::move(c));
      ++added;
    }
    // Converge the active set before generating more curves; otherwise the
    // same corridors come back as near-duplicates round after round.
    const double v = sweep(600, prm.tol * 0.25);
    if (std::getenv("MSLAB_DENSITY_TRACE")) {
      const double en = energy_of();
      const double lo = sum_lambda - en;
      std::fprintf(stderr,
                   "  [density %s] round: cons=%zu added=%zu plen=%.6f viol=%.2e "
                   "upper=%.6f lower=%.6f\n",
                   P.label.c_str(), cons.size(), added, plen,
                   v, plen > 0.0 ? en / (plen * plen) : kInf, lo);
    }
  }

  sweep(2000, prm.tol * 0.25);

  const int64_t tgt =
      rho_shortest(P, rho, dist, parent, done, plen, 1.0 - prm.tol, nullptr);
  if (tgt < 0 || !(plen > 0.0) || !std::isfinite(plen))
    throw std::runtime_error("density modulus [" + P.label +
                             "]: failed to charge a generated curve");

  // Scale to exact admissibility over the generated family: rho/plen.
  const double en = energy_of();
  const double upper = en / (plen * plen);
  const double lower = sum_lambda - en;
  const double gap =
      en == 0.0 ? 0.0
                : (lower > 0.0 ? std::max(0.0, (upper - lower) / upper) : kInf);
  if (!converged && plen < 1.0 - prm.tol && gap > prm.tol)
    throw std::runtime_error(
        "density modulus [" + P.label + "]: constraint cap " +
        std::to_string(prm.max_constraints) + " reached with admissibility slack " +
        std::to_string(1.0 - plen) + " and certified value gap " +
        std::to_string(gap));

  out.value = upper;
  out.slack = std::max(0.0, 1.0 - plen);
  out.gap = gap;
  out.nconstraints = static_cast<int>(cons.size());
  out.length_scale = plen;
  out.rho = std::move(rho);
  return out;
}

ModulusResult pack_density(const DProblem& P, DenseOutcome&& o, bool keep) {
  ModulusResult r;
  r.value = o.value;
  r.method = ModulusMethod::DensityQp;
  // The solver's own convergence certificate: the relative width of the
  // [dual lower bound, admissible upper bound] value bracket.
  r.residual = o.gap;
  r.iterations = o.nconstraints;
  r.admissible_impossible = o.impossible;
  r.nx = P.nx;
  r.ny = P.ny;
  r.grid_box = P.gbox;
  r.h = P.h;
  if (keep && !o.impossible && !o.rho.empty()) {
    r.density.assign(P.n, -1.0);
    for (size_t v = 0; v < P.n; ++v)
      if (P.mask[v]) r.density[v] = o.rho[v] / o.length_scale;
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Factories.
// ---------------------------------------------------------------------------

CurveFamilySpec quad_box(Box2 box, bool dirichlet_vertical, std::string label) {
  // Strict one-lattice-step bands: robust against the lattice cropping the
  // high box edges by up to one h.
  RegionPred left = [box](Vec2 p, double h) { return p.x < box.x0 + h; };
  RegionPred right = [box](Vec2 p, double h) { return p.x > box.x1 - h; };
  RegionPred bottom = [box](Vec2 p, double h) { return p.y < box.y0 + h; };
  RegionPred top = [box](Vec2 p, double h) { return p.y > box.y1 - h; };
  CurveFamilySpec s;
  s.kind = FamilyKind::Quadrilateral;
  s.label = std::move(label);
  s.bounds = box;
  if (dirichlet_vertical) {
    s.zeta[0] = left;
    s.zeta[1] = bottom;
    s.zeta[2] = right;
    s.zeta[3] = top;
  } else {
    s.zeta[0] = bottom;
    s.zeta[1] = right;
    s.zeta[2] = top;
    s.zeta[3] = left;
  }
  return s;
}

CurveFamilySpec ring_annulus(Vec2 center, double r, double R, std::string label) {
  if (!(r > 0.0) || !(R > r))
    throw std::invalid_argument("ring_annulus: need 0 < r < R");
  CurveFamilySpec s;
  s.kind = FamilyKind::Ring;
  s.label = std::move(label);
  // A margin beyond R lets the outer plate be the exact circle |p - c| = R
  // (every connecting curve still first meets it there, so the value is the
  // annulus modulus); without it the plate would sit a lattice step inside.
  const double m = 1.03 * R;
  s.bounds = Box2{center.x - m, center.y - m, center.x + m, center.y + m};
  s.in_E = [center, r](Vec2 p, double) { return (p - center).norm() <= r; };
  s.in_F = [center, R](Vec2 p, double) { return (p - center).norm() >= R; };
  return s;
}

CurveFamilySpec ring_segments(Box2 bounds, Vec2 e0, Vec2 e1, Vec2 f0, Vec2 f1,
                              std::string label) {
  CurveFamilySpec s;
  s.kind = FamilyKind::Ring;
  s.label = std::move(label);
  s.bounds = bounds;
  s.in_E = [e0, e1](Vec2 p, double h) {
    return seg_point_dist(p, e0, e1) <= 0.5000001 * h;
  };
  s.in_F = [f0, f1](Vec2 p, double h) {
    return seg_point_dist(p, f0, f1) <= 0.5000001 * h;
  };
  return s;
}

// ---------------------------------------------------------------------------
// Public solvers.
// ---------------------------------------------------------------------------

const char* to_string(ModulusMethod m) {
  switch (m) {
    case ModulusMethod::HarmonicEnergy: return "harmonic-energy";
    case ModulusMethod::DensityQp: return "density-qp";
  }
  return "?";
}

ModulusResult modulus_quadrilateral(const SpaceHandle& space,
                                    const CurveFamilySpec& spec,
                                    const ModulusParams& p) {
  if (spec.kind != FamilyKind::Quadrilateral)
    throw std::invalid_argument("modulus_quadrilateral: spec kind must be quadrilateral");
  return solve_harmonic(space, spec, p);
}

ModulusResult modulus_ring(const SpaceHandle& space, const CurveFamilySpec& spec,
                           const ModulusParams& p) {
  if (spec.kind != FamilyKind::Ring)
    throw std::invalid_argument("modulus_ring: spec kind must be ring");
  return solve_harmonic(space, spec, p);
}

ModulusResult modulus_density(const SpaceHandle& space, const CurveFamilySpec& spec,
                              const ModulusParams& p) {
  DProblem P = build_plane_problem(space, spec, p, CostKind::Conformal);
  return pack_density(P, solve_density_core(P, p), p.keep_density);
}

MuModulusResult mu_modulus(const SpaceHandle& space, const CurveFamilySpec& spec,
                           const ModulusParams& p) {
  DProblem P = build_plane_problem(space, spec, p, CostKind::MuGauge);
  return pack_density(P, solve_density_core(P, p), p.keep_density);
}

MuModulusResult mu_modulus_mesh(const SurfaceMesh& m,
                                const std::function<bool(Vec3)>& in_E,
                                const std::function<bool(Vec3)>& in_F,
                                const ModulusParams& p) {
  if (!in_E || !in_F)
    throw std::invalid_argument("mu_modulus_mesh: null plate predicates");
  DProblem P;
  P.n = m.node_count();
  P.mass = m.mass;
  P.mask.assign(P.n, 1);
  P.estart = m.adj_start;
  P.enode = m.adj_node;
  P.ecost.assign(m.adj_node.size(), 0.0);
  P.label = "mesh";

  const double inv_sqrt_pi2 = 2.0 / std::sqrt(M_PI);
  for (uint32_t u = 0; u < P.n; ++u) {
    for (uint32_t k = P.estart[u]; k < P.estart[u + 1]; ++k) {
      const uint32_t v = P.enode[k];
      if (v < u) continue;  // cost computed once per undirected edge
      const double s = m.adj_len[k];
      const Vec3 mid = (m.pos[u] + m.pos[v]) * 0.5;
      if (0.5 * s > 0.5 * (1.0 + 1e-12))
        throw std::runtime_error("mu_modulus_mesh: edge exceeds the cover radius");
      const double area = surface_ball_area(*m.surface, mid, 0.5 * s, m.opt.plane_domain);
      const double c = inv_sqrt_pi2 * std::sqrt(std::max(0.0, area));
      P.ecost[k] = c;
      for (uint32_t k2 = P.estart[v]; k2 < P.estart[v + 1]; ++k2)
        if (P.enode[k2] == u) {
          P.ecost[k2] = c;
          break;
        }
    }
  }

  std::vector<uint32_t> e_nodes, f_nodes;
  for (uint32_t id = 0; id < P.n; ++id) {
    const bool e = in_E(m.pos[id]), f = in_F(m.pos[id]);
    if (e && f) P.overlap = true;
    if (e) e_nodes.push_back(id);
    else if (f) f_nodes.push_back(id);
  }
  if (e_nodes.empty() || f_nodes.empty())
    throw std::invalid_argument("mu_modulus_mesh: a plate resolves no mesh nodes");
  const bool e_smaller = e_nodes.size() <= f_nodes.size();
  P.srcs = e_smaller ? std::move(e_nodes) : std::move(f_nodes);
  const std::vector<uint32_t>& tgt = e_smaller ? f_nodes : e_nodes;
  P.target.assign(P.n, 0);
  for (uint32_t id : tgt) P.target[id] = 1;

  return pack_density(P, solve_density_core(P, p), p.keep_density);
}

MuModulusResult mu_modulus_mesh_dual(const SurfaceMesh& m,
                                     const std::function<bool(Vec3)>& in_E,
                                     const std::function<bool(Vec3)>& in_F,
                                     const ModulusParams& prm) {
  if (!in_E || !in_F)
    throw std::invalid_argument("mu_modulus_mesh_dual: null plate predicates");
  const size_t n = m.node_count();
  std::vector<uint8_t> plate(n, 0);
  size_t ne = 0, nf = 0;
  bool overlap = false;
  for (uint32_t id = 0; id < n; ++id) {
    const bool e = in_E(m.pos[id]), f = in_F(m.pos[id]);
    if (e && f) overlap = true;
    if (e) {
      plate[id] = 1;
      ++ne;
    } else if (f) {
      plate[id] = 2;
      ++nf;
    }
  }
  if (ne == 0 || nf == 0)
    throw std::invalid_argument(
        "mu_modulus_mesh_dual: a plate resolves no mesh nodes");
  MuModulusResult res;
  res.method = ModulusMethod::HarmonicEnergy;
  res.h = m.opt.h;
  if (overlap) {
    res.admissible_impossible = true;
    res.value = std::numeric_limits<double>::infinity();
    return res;
  }

  // Undirected edge list with conductance mass(edge cell)/s^2.  The edge
  // cell takes a mass share from both endpoints, doubled because the dual
  // cell of an edge spans both endpoint cells: on a flat 8-neighbor patch
  // this gives axis conductance 1/2 and diagonal 1/4, which dissipates
  // exactly the planar Dirichlet energy for every linear potential (and
  // reduces to the classical 5-point Laplacian on a 4-neighbor patch).
  struct DualEdge {
    uint32_t u, v;
    double c;
  };
  std::vector<DualEdge> edges;
  edges.reserve(m.adj_node.size() / 2);
  for (uint32_t u = 0; u < n; ++u) {
    const double du = m.adj_start[u + 1] - m.adj_start[u];
    for (uint32_t k = m.adj_start[u]; k < m.adj_start[u + 1]; ++k) {
      const uint32_t v = m.adj_node[k];
      if (v < u) continue;
      if (plate[u] && plate[v] && plate[u] != plate[v])
        throw std::runtime_error(
            "mu_modulus_mesh_dual: plates touch at mesh resolution");
      if (plate[u] && plate[u] == plate[v]) continue;  // no current in a plate
      const double s = m.adj_len[k];
      if (!(s > 0.0)) continue;
      const double dv = m.adj_start[v + 1] - m.adj_start[v];
      const double w = 2.0 * (m.mass[u] / du + m.mass[v] / dv);
      edges.push_back({u, v, w / (s * s)});
    }
  }

  std::vector<int32_t> uidx(n, -1);
  size_t nu = 0;
  for (uint32_t id = 0; id < n; ++id)
    if (!plate[id]) uidx[id] = static_cast<int32_t>(nu++);

  std::vector<double> diag(nu, 0.0), b(nu, 0.0);
  std::vector<uint32_t> row_start(nu + 1, 0);
  for (const DualEdge& e : edges) {
    const int32_t iu = uidx[e.u], iv = uidx[e.v];
    if (iu >= 0) {
      diag[iu] += e.c;
      if (iv >= 0)
        ++row_start[iu + 1];
      else if (plate[e.v] == 2)
        b[iu] += e.c;
    }
    if (iv >= 0) {
      diag[iv] += e.c;
      if (iu >= 0)
        ++row_start[iv + 1];
      else if (plate[e.u] == 2)
        b[iv] += e.c;
    }
  }
  for (size_t i = 0; i < nu; ++i) row_start[i + 1] += row_start[i];
  std::vector<uint32_t> col(row_start[nu]);
  std::vector<double> cval(row_start[nu]);
  {
    std::vector<uint32_t> cur(row_start.begin(), row_start.end() - 1);
    for (const DualEdge& e : edges) {
      const int32_t iu = uidx[e.u], iv = uidx[e.v];
      if (iu >= 0 && iv >= 0) {
        col[cur[iu]] = static_cast<uint32_t>(iv);
        cval[cur[iu]++] = e.c;
        col[cur[iv]] = static_cast<uint32_t>(iu);
        cval[cur[iv]++] = e.c;
      }
    }
  }

  // Jacobi-preconditioned CG (isolated unknowns keep diag 0; guard them).
  for (size_t i = 0; i < nu; ++i)
    if (!(diag[i] > 0.0)) diag[i] = 1.0;
  std::vector<double> x(nu, 0.0), r(b), z(nu), p(nu), ap(nu);
  double bb = 0.0;
  for (double v : b) bb += v * v;
  int iters = 0;
  double rel = 0.0;
  if (bb > 0.0) {
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
      for (size_t i = 0; i < nu; ++i) {
        double acc = diag[i] * in[i];
        for (uint32_t k = row_start[i]; k < row_start[i + 1]; ++k)
          acc -= cval[k] * in[col[k]];
        out[i] = acc;
      }
    };
    double rz = 0.0;
    for (size_t i = 0; i < nu; ++i) {
      z[i] = r[i] / diag[i];
      rz += r[i] * z[i];
    }
    p = z;
    const int max_iters =
        std::max(2000, static_cast<int>(60.0 * std::sqrt(double(nu))));
    for (iters = 0; iters < max_iters; ++iters) {
      double rr = 0.0;
      for (size_t i = 0; i < nu; ++i) rr += r[i] * r[i];
      rel = std::sqrt(rr / bb);
      if (rel <= prm.cg_tol) break;
      apply(p, ap);
      double pap = 0.0;
      for (size_t i = 0; i < nu; ++i) pap += p[i] * ap[i];
      if (!(pap > 0.0)) break;  // numerically exhausted
      const double alpha = rz / pap;
      for (size_t i = 0; i < nu; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
      double rz2 = 0.0;
      for (size_t i = 0; i < nu; ++i) {
        z[i] = r[i] / diag[i];
        rz2 += r[i] * z[i];
      }
      const double beta = rz2 / rz;
      rz = rz2;
      for (size_t i = 0; i < nu; ++i) p[i] = z[i] + beta * p[i];
    }
  }

  auto value_at = [&](uint32_t id) -> double {
    if (plate[id] == 1) return 0.0;
    if (plate[id] == 2) return 1.0;
    const int32_t i = uidx[id];
    return i >= 0 ? x[i] : 0.0;
  };
  KahanSum energy;
  for (const DualEdge& e : edges) {
    const double d = value_at(e.u) - value_at(e.v);
    energy.add(e.c * d * d);
  }
  res.value = energy.value();
  res.residual = rel;
  res.iterations = iters;
  return res;
}

// ---------------------------------------------------------------------------
// Analytic references.
// ---------------------------------------------------------------------------

double analytic_annulus(double r, double R) {
  if (!(r > 0.0) || !(R > r))
    throw std::invalid_argument("analytic_annulus: need 0 < r < R");
  return 2.0 * M_PI / std::log(R / r);
}

double teichmuller_upper_bound(double t) {
  // R_t < 2 r_t is equivalent to t < 1/2.
  if (!(t > 0.0) || !(t < 0.5))
    throw std::invalid_argument("teichmuller_upper_bound: valid for t in (0, 1/2)");
  const double rt = -1.0 / std::log(t / 2.0);
  const double Rt = -1.0 / std::log(t);
  return 2.0 * M_PI / std::log(rt / (Rt - rt));
}

}  // namespace mslab
