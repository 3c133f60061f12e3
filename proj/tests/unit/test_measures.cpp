#include <doctest.h>

#include <mslab/measures.hpp>
#include <mslab/spaces.hpp>
#include <mslab/surface_mesh.hpp>

#include <cmath>

using namespace mslab;

TEST_CASE("weighted areas integrate the squared weight exactly") {
  const SpaceHandle euc = make_example("euclidean");
  CHECK(weighted_area(euc.weight, {-0.5, 0.0, 1.5, 1.0}) ==
        doctest::Approx(2.0).epsilon(1e-12));

  // Across the Grushin axis: 0.5 * 1 (unit side) + int_0^0.5 t^{-1/2} dt.
  const SpaceHandle gr = make_example("grushin-glued");
  CHECK(weighted_area(gr.weight, {-0.5, 0.0, 0.5, 1.0}) ==
        doctest::Approx(0.5 + 2.0 * std::sqrt(0.5)).epsilon(1e-9));

  // Centered disk under the exponential weight: the 1-D radial reduction
  // agrees with the closed-form ball area 2 pi r^2 (1/4 - log(r)/2).
  const SpaceHandle ex = make_example("exp-weight");
  const double r = std::exp(-2.0);
  CHECK(weighted_area_disk(ex.weight, {0, 0}, 0.5) ==
        doctest::Approx(2.0 * M_PI * r * r * (0.25 + 1.0)).epsilon(1e-7));
}

TEST_CASE("ball measures route to the right method") {
  const SpaceHandle euc = make_example("euclidean");
  CHECK(ball_measure(euc, {0.2, -0.1, 0}, 0.3) ==
        doctest::Approx(M_PI * 0.09).epsilon(1e-12));

  BallMeasureParams p;
  p.force_sublevel = true;
  const double sub = ball_measure(euc, {0.2, -0.1, 0}, 0.3, p);
  CHECK(sub == doctest::Approx(M_PI * 0.09).epsilon(0.02));

  const SpaceHandle ex = make_example("exp-weight");
  const double rr = std::exp(-3.0);
  const double closed = ball_measure(ex, {0, 0, 0}, rr);
  CHECK(closed == doctest::Approx(2.0 * M_PI * rr * rr * (0.25 + 1.5)).epsilon(1e-9));
  const double cross = ball_measure(ex, {0, 0, 0}, rr, p);
  CHECK(cross == doctest::Approx(closed).epsilon(0.02));

  CHECK_THROWS_AS(ball_measure(euc, {0, 0, 0}, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(ball_measure(euc, {0, 0, 1.0}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(ball_measure(ex, {0, 0, 0}, 0.9), std::domain_error);
}

TEST_CASE("ball measure tables are sorted and method-tagged") {
  const SpaceHandle s = make_example("spikes-cones");
  const BallMeasureTable t = ball_measure_table(s, {0, 0, 0}, {0.25, 0.0625, 0.125});
  REQUIRE(t.radii.size() == 3);
  CHECK(t.radii[0] < t.radii[1]);
  CHECK(t.radii[1] < t.radii[2]);
  // Spike-surface tables integrate the exact piecewise geometry.
  CHECK(t.method == BallMeasureMethod::ClosedForm);
  for (double v : t.values) CHECK(v > 0.0);
  CHECK(std::string(to_string(BallMeasureMethod::SurfaceTriangulation)) ==
        "surface-triangulation");
}

TEST_CASE("mesh ball masses approximate the exact-geometry ones") {
  const SpaceHandle s = make_example("spikes-cones");
  SurfaceMeshOptions opt;
  opt.h = 1.0 / 96.0;
  const SurfaceMesh mesh = build_surface_mesh(*s.surface, opt);
  const std::vector<double> radii{0.25, 0.125};
  const BallMeasureTable exact = ball_measure_table(s, {0, 0, 0}, radii);
  const BallMeasureTable lumped = ball_measure_table_mesh(mesh, {0, 0, 0}, radii);
  REQUIRE(exact.radii == lumped.radii);
  for (size_t i = 0; i < exact.values.size(); ++i)
    CHECK(lumped.values[i] == doctest::Approx(exact.values[i]).epsilon(0.05));
}

TEST_CASE("gauge identity and small-ball consistency") {
  const SpaceHandle euc = make_example("euclidean");
  const double mu = small_ball_measure(euc, {0.3, 0.3}, 0.05);
  CHECK(mu == doctest::Approx(M_PI * 0.0025).epsilon(1e-9));
  CHECK(ball_gauge(euc, {0.3, 0.3}, 0.05) ==
        doctest::Approx(2.0 / std::sqrt(M_PI) * std::sqrt(mu)).epsilon(1e-12));
  // For Lebesgue measure the gauge of a delta-ball is exactly its diameter.
  CHECK(ball_gauge(euc, {0.3, 0.3}, 0.05) == doctest::Approx(0.1).epsilon(1e-12));

  const SpaceHandle ex = make_example("exp-weight");
  const double delta = 0.01;
  const double star = small_ball_measure(ex, {0.4, 0.0}, delta);
  const double sub = ball_measure(ex, {0.4, 0.0, 0.0}, delta,
                                  BallMeasureParams{0.0, 16, true});
  CHECK(star == doctest::Approx(sub).epsilon(0.05));
}

TEST_CASE("q-distance reduces to arclength for Lebesgue measure") {
  const SpaceHandle s = make_example("euclidean");
  GridGraph g = build_grid(s, {-0.25, -0.25, 1.0, 0.625}, 1.0 / 128.0, 16);
  const Vec2 a{0, 0}, b{0.75, 0.375};
  CHECK(q_distance(s, g, a, b) == doctest::Approx((a - b).norm()).epsilon(1e-12));

  const QMetricField f = q_metric_field(s, g, a);
  CHECK(f.dist[g.nearest_node(b)] == doctest::Approx((a - b).norm()).epsilon(1e-12));

  // A lattice too coarse for the local cover radii is rejected.
  const SpaceHandle ex = make_example("exp-weight");
  GridGraph coarse = build_grid(ex, {-1.2, -1.2, 1.2, 1.2}, 0.3, 16);
  CHECK_THROWS_AS(q_metric_field(ex, coarse, {0.0, 0.0}), std::runtime_error);
}

TEST_CASE("cover-content length recovers H^1 on segments") {
  const SpaceHandle s = make_example("euclidean");
  const Polyline2 seg{{-0.3, -0.2}, {0.5, 0.4}};  // length exactly 1
  const MuLengthEstimate est = mu_length(s, seg, {0.02, 0.01, 0.005});
  REQUIRE(est.contents.size() == 3);
  CHECK(est.deltas[0] > est.deltas[1]);
  CHECK(est.extrapolated == doctest::Approx(1.0).epsilon(0.02));

  CHECK(hausdorff1_q(s, seg) == doctest::Approx(1.0).epsilon(0.02));

  CHECK_THROWS_AS(mu_length(s, {}, {0.01}), std::invalid_argument);
  CHECK_THROWS_AS(mu_length(s, seg, {}), std::invalid_argument);
  CHECK_THROWS_AS(mu_length(s, seg, {-0.1}), std::invalid_argument);
}
