#include <doctest.h>

#include <mslab/geodesics.hpp>
#include <mslab/spaces.hpp>

#include <cmath>

using namespace mslab;

TEST_CASE("grid distances are exact along stencil directions") {
  const SpaceHandle s = make_example("euclidean");
  GridGraph g = build_grid(s, {-0.25, -0.25, 1.25, 1.25}, 1.0 / 64.0, 8);
  CHECK(shortest_path(g, {0, 0}, {1, 0}).length == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(shortest_path(g, {0, 0}, {1, 1}).length ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("direction quantization shrinks with richer stencils") {
  const SpaceHandle s = make_example("euclidean");
  // Off-stencil direction, endpoints on the lattice so no snap error.
  const Vec2 a{0, 0}, b{0.7, 0.1};
  const double ref = b.norm();
  double d[3];
  int i = 0;
  for (int k : {8, 16, 32}) {
    GridGraph g = build_grid(s, {-0.1, -0.1, 0.9, 0.2}, 0.01, k);
    d[i++] = shortest_path(g, a, b).length;
  }
  // Upper bounds that tighten monotonically.
  CHECK(d[0] >= ref);
  CHECK(d[1] >= ref);
  CHECK(d[2] >= ref);
  CHECK(d[0] >= d[1]);
  CHECK(d[1] >= d[2]);
  CHECK(d[1] <= ref * 1.03);
  CHECK(d[2] <= ref * 1.015);
}

TEST_CASE("radial distance law for the exponential weight") {
  const SpaceHandle s = make_example("exp-weight");
  CHECK(radial_distance(s.weight, {0.5, 0.0}) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK(radial_distance(make_example("euclidean").weight, {0.3, 0.4}) ==
        doctest::Approx(0.5).epsilon(1e-12));

  // The grid reproduces it: radial segments integrate exactly.
  GridGraph g = build_grid(s, {-0.55, -0.55, 0.55, 0.55}, 1.0 / 640.0, 16);
  const double v = shortest_path(g, {0, 0}, {0.5, 0}).length;
  CHECK(v == doctest::Approx(std::exp(-2.0)).epsilon(1e-6));
}

TEST_CASE("fan distances agree with individual searches") {
  const SpaceHandle s = make_example("exp-weight");
  GridGraph g = build_grid(s, {-0.6, -0.6, 0.6, 0.6}, 1.0 / 128.0, 16);
  const Vec2 src{0.3, 0.0};
  const std::vector<Vec2> targets{{-0.5, 0.0}, {0.0, 0.5}, {0.5, 0.2}, {-0.3, -0.4}};
  const std::vector<PathResult> fan = geodesic_fan(g, src, targets);
  REQUIRE(fan.size() == targets.size());
  for (size_t i = 0; i < targets.size(); ++i) {
    const PathResult one = shortest_path(g, src, targets[i]);
    CHECK(fan[i].length == doctest::Approx(one.length).epsilon(1e-12));
    CHECK(fan[i].path.size() >= 1);
  }
}

TEST_CASE("distance fields respect the search budget") {
  const SpaceHandle s = make_example("euclidean");
  GridGraph g = build_grid(s, {-1, -1, 1, 1}, 1.0 / 32.0, 16);
  const DistanceField full = distance_field(g, {0, 0});
  const DistanceField part = distance_field(g, {0, 0}, 0.5);
  bool some_inf = false;
  for (uint32_t id = 0; id < g.node_count(); ++id) {
    if (std::isinf(part.dist[id])) {
      some_inf = true;
      CHECK(full.dist[id] > 0.5 - 1e-9);
    } else {
      CHECK(part.dist[id] == doctest::Approx(full.dist[id]).epsilon(1e-12));
    }
  }
  CHECK(some_inf);
}

TEST_CASE("grid construction validates its inputs") {
  const SpaceHandle euc = make_example("euclidean");
  CHECK_THROWS_AS(build_grid(euc, {-20, -1, 1, 1}, 0.01, 16),
                  std::invalid_argument);  // outside the domain
  CHECK_THROWS_AS(build_grid(euc, {0, 0, 0.1, 0.1}, 0.05, 16),
                  std::invalid_argument);  // fewer than 4 nodes per side
  CHECK_THROWS_AS(build_grid(euc, {-1, -1, 1, 1}, 0.01, 12),
                  std::invalid_argument);  // unknown stencil
  CHECK_THROWS_AS(build_grid(make_example("spikes-cones"), {-1, -1, 1, 1}, 0.01, 16),
                  std::invalid_argument);  // surfaces are meshed, not gridded
}

TEST_CASE("snapping stays within a cell") {
  const SpaceHandle s = make_example("euclidean");
  GridGraph g = build_grid(s, {-1, -1, 1, 1}, 1.0 / 32.0, 16);
  const Vec2 p{0.123, -0.456};
  const double snap = g.snap_displacement(p);
  CHECK(snap <= g.h / std::sqrt(2.0) + 1e-12);
  CHECK((g.node_pos(g.nearest_node(p)) - p).norm() ==
        doctest::Approx(snap).epsilon(1e-12));
}

TEST_CASE("degenerate queries") {
  const SpaceHandle s = make_example("euclidean");
  GridGraph g = build_grid(s, {-1, -1, 1, 1}, 1.0 / 32.0, 16);
  const PathResult same = shortest_path(g, {0.2, 0.2}, {0.2, 0.2});
  CHECK(same.length == 0.0);
  CHECK(same.path.size() == 1);
}

TEST_CASE("curve length integrates the weight along polylines") {
  const SpaceHandle euc = make_example("euclidean");
  const Polyline2 c{{0, 0}, {0.3, 0.4}, {0.6, 0.0}};
  CHECK(curve_length(euc, c) ==
        doctest::Approx(polyline_euclidean_length(c)).epsilon(1e-12));

  const SpaceHandle gr = make_example("grushin-glued");
  // Horizontal crossing of the singular axis uses the exact primitive.
  const Polyline2 seg{{-0.25, 0.0}, {0.75, 0.0}};
  CHECK(curve_length(gr, seg) ==
        doctest::Approx(0.25 + (4.0 / 3.0) * std::pow(0.75, 0.75)).epsilon(1e-12));
}
