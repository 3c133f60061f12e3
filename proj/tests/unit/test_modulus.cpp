#include <doctest.h>

#include <mslab/modulus.hpp>
#include <mslab/spaces.hpp>
#include <mslab/surface_mesh.hpp>

#include <cmath>

using namespace mslab;

TEST_CASE("unit square quadrilateral modulus is 1") {
  const SpaceHandle s = make_example("euclidean");
  ModulusParams p;
  p.h = 1.0 / 64.0;
  const ModulusResult r = modulus_quadrilateral(s, quad_box({0, 0, 1, 1}, true, "sq"), p);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.method == ModulusMethod::HarmonicEnergy);
  CHECK_FALSE(r.admissible_impossible);
}

TEST_CASE("conjugate families of a rectangle are reciprocal") {
  const SpaceHandle s = make_example("euclidean");
  ModulusParams p;
  p.h = 1.0 / 128.0;
  const double mv = modulus_quadrilateral(s, quad_box({0, 0, 1, 0.5}, true, "v"), p).value;
  const double mh = modulus_quadrilateral(s, quad_box({0, 0, 1, 0.5}, false, "h"), p).value;
  CHECK(mv == doctest::Approx(0.5).epsilon(0.01));
  CHECK(mh == doctest::Approx(2.0).epsilon(0.01));
  CHECK(mv * mh == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("round annulus modulus matches the closed form") {
  const SpaceHandle s = make_example("euclidean");
  ModulusParams p;
  p.h = 1.0 / 64.0;
  const ModulusResult r = modulus_ring(s, ring_annulus({0, 0}, 0.5, 2.0, "ring"), p);
  CHECK(r.value == doctest::Approx(analytic_annulus(0.5, 2.0)).epsilon(0.02));

  CHECK(analytic_annulus(1.0, M_E) == doctest::Approx(2.0 * M_PI).epsilon(1e-12));
  CHECK_THROWS_AS(analytic_annulus(2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(analytic_annulus(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("serial annuli moduli add reciprocally") {
  const SpaceHandle s = make_example("euclidean");
  ModulusParams p;
  p.h = std::exp(2.0) / 96.0;
  const double a = modulus_ring(s, ring_annulus({0, 0}, 1.0, M_E, "a"), p).value;
  const double b = modulus_ring(s, ring_annulus({0, 0}, M_E, std::exp(2.0), "b"), p).value;
  const double ab = modulus_ring(s, ring_annulus({0, 0}, 1.0, std::exp(2.0), "ab"), p).value;
  // 1/Mod(A(1, e^2)) = 1/Mod(A(1, e)) + 1/Mod(A(e, e^2)) up to lattice error.
  CHECK(1.0 / ab == doctest::Approx(1.0 / a + 1.0 / b).epsilon(0.02));
}

TEST_CASE("teichmuller-style upper bound for separated continua") {
  // Strictly decreasing in t ...
  double prev = std::numeric_limits<double>::infinity();
  for (double t : {0.4, 0.2, 0.1, 0.01, 0.001}) {
    const double v = teichmuller_upper_bound(t);
    CHECK(v < prev);
    prev = v;
  }
  // ... with a frozen value reproduced by independent inline arithmetic.
  const double rt = -1.0 / std::log(0.001 / 2.0);
  const double Rt = -1.0 / std::log(0.001);
  CHECK(teichmuller_upper_bound(0.001) ==
        doctest::Approx(2.0 * M_PI / std::log(rt / (Rt - rt))).epsilon(1e-12));
  CHECK(teichmuller_upper_bound(0.001) == doctest::Approx(2.732821).epsilon(5e-7));
  CHECK_THROWS_AS(teichmuller_upper_bound(0.5), std::invalid_argument);
  CHECK_THROWS_AS(teichmuller_upper_bound(0.0), std::invalid_argument);
}

TEST_CASE("conformal weights leave quadrilateral moduli invariant") {
  ModulusParams p;
  p.h = 1.0 / 128.0;
  const CurveFamilySpec spec = quad_box({0.2, 0.15, 0.6, 0.4}, true, "inv");
  const double weighted = modulus_quadrilateral(make_example("exp-weight"), spec, p).value;
  const double flat = modulus_quadrilateral(make_example("euclidean"), spec, p).value;
  CHECK(weighted == doctest::Approx(flat).epsilon(0.05));
}

TEST_CASE("density solver brackets the harmonic value") {
  const SpaceHandle s = make_example("euclidean");
  ModulusParams p;
  p.h = 1.0 / 32.0;
  const ModulusResult sq = modulus_density(s, quad_box({0, 0, 1, 1}, true, "sq"), p);
  CHECK(sq.method == ModulusMethod::DensityQp);
  CHECK(sq.value == doctest::Approx(1.0).epsilon(0.02));

  ModulusParams pr;
  pr.h = M_E / 16.0;
  const CurveFamilySpec ring = ring_annulus({0, 0}, 1.0, M_E, "ring");
  const double dens = modulus_density(s, ring, pr).value;
  const double harm = modulus_ring(s, ring, pr).value;
  // At this coarse spacing both solvers carry O(h) discretization error with
  // no guaranteed ordering; they must agree with each other and the exact
  // 2 pi within loose bands.
  CHECK(dens == doctest::Approx(harm).epsilon(0.08));
  CHECK(dens == doctest::Approx(2.0 * M_PI).epsilon(0.12));
  CHECK(harm == doctest::Approx(2.0 * M_PI).epsilon(0.12));
}

TEST_CASE("impossible plate layouts are flagged") {
  const SpaceHandle s = make_example("euclidean");
  ModulusParams p;
  p.h = 1.0 / 24.0;
  // E and F overlap, so some "curve" degenerates to a point and no finite
  // density is admissible.
  CurveFamilySpec spec = ring_segments({-1, -1, 1, 1}, {-0.2, 0.0}, {0.3, 0.0},
                                       {0.0, -0.5}, {0.0, 0.5}, "overlap");
  const ModulusResult r = modulus_density(s, spec, p);
  CHECK(r.admissible_impossible);
}

TEST_CASE("mesh dual solver tracks the plane density solver") {
  const SpaceHandle s = make_example("spikes-cylinders");
  SurfaceMeshOptions opt;
  opt.h = 1.0 / 32.0;
  const SurfaceMesh mesh = build_surface_mesh(*s.surface, opt);
  const double t = 1.0 / 8.0;
  auto in_E = [t](Vec3 p) { return std::hypot(p.x, p.y) <= t && p.z == 0.0; };
  auto in_F = [t](Vec3 p) { return std::hypot(p.x, p.y) >= 8.0 * t && p.z == 0.0; };
  ModulusParams p;
  const double dual = mu_modulus_mesh_dual(mesh, in_E, in_F, p).value;
  const double dens = mu_modulus_mesh(mesh, in_E, in_F, p).value;
  CHECK(dual == doctest::Approx(dens).epsilon(0.15));

  // Determinism: the same call yields the same bits.
  CHECK(mu_modulus_mesh_dual(mesh, in_E, in_F, p).value == dual);
}

TEST_CASE("mesh dual solver converges on a flat annulus") {
  // A short-truncation cylinder surface is flat away from two tiny spikes;
  // ring plates centered at the origin then see an almost-Euclidean annulus,
  // whose modulus is 2 pi / log 4.
  const SpaceHandle s = make_example("spikes-cylinders:N=2");
  auto in_E = [](Vec3 p) { return std::hypot(p.x, p.y) <= 0.2 && p.z == 0.0; };
  auto in_F = [](Vec3 p) { return std::hypot(p.x, p.y) >= 0.8 && p.z == 0.0; };
  const double ref = 2.0 * M_PI / std::log(4.0);
  ModulusParams p;
  double err[2];
  int i = 0;
  for (double h : {1.0 / 32.0, 1.0 / 64.0}) {
    SurfaceMeshOptions opt;
    opt.h = h;
    const SurfaceMesh mesh = build_surface_mesh(*s.surface, opt);
    const double v = mu_modulus_mesh_dual(mesh, in_E, in_F, p).value;
    err[i++] = std::fabs(v / ref - 1.0);
  }
  CHECK(err[1] <= err[0] + 0.02);
  CHECK(err[1] <= 0.15);
}
