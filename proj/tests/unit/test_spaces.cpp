#include <doctest.h>

#include <mslab/reports.hpp>
#include <mslab/spaces.hpp>

#include <cmath>

using namespace mslab;

TEST_CASE("example registry builds the five spaces") {
  const SpaceHandle euc = make_example("euclidean");
  CHECK(euc.name == "euclidean");
  CHECK(euc.is_plane());
  CHECK(euc.weight.kind == WeightKind::Unit);
  CHECK(euc.measure == MeasureKind::Lebesgue);

  const SpaceHandle exp = make_example("exp-weight");
  CHECK(exp.weight.kind == WeightKind::ExpRadial);
  CHECK(exp.measure == MeasureKind::WeightedArea);

  const SpaceHandle gr = make_example("grushin-glued");
  CHECK(gr.weight.kind == WeightKind::Grushin);
  CHECK(gr.weight.beta == doctest::Approx(0.25));

  const SpaceHandle gr3 = make_example("grushin-glued:beta=0.3");
  CHECK(gr3.weight.beta == doctest::Approx(0.3));

  const SpaceHandle cones = make_example("spikes-cones");
  CHECK_FALSE(cones.is_plane());
  CHECK(cones.measure == MeasureKind::SurfaceHausdorff2);
  REQUIRE(cones.surface);
  CHECK(cones.surface->truncation == 12);

  const SpaceHandle cyl = make_example("spikes-cylinders:N=5");
  REQUIRE(cyl.surface);
  CHECK(cyl.surface->truncation == 5);
}

TEST_CASE("example registry rejects bad requests") {
  CHECK_THROWS_AS(make_example("nosuch"), std::invalid_argument);
  CHECK_THROWS_AS(make_example("grushin-glued:beta=0.6"), std::invalid_argument);
  CHECK_THROWS_AS(make_example("grushin-glued:beta=0"), std::invalid_argument);
}

TEST_CASE("weights evaluate to their defining formulas") {
  const SpaceHandle exp = make_example("exp-weight");
  CHECK(exp.weight.at({0.5, 0.0}) ==
        doctest::Approx(std::exp(-2.0) / 0.25).epsilon(1e-12));
  CHECK(exp.weight.at({0.0, 0.0}) == 0.0);

  const SpaceHandle gr = make_example("grushin-glued");
  CHECK(gr.weight.at({0.5, 3.0}) ==
        doctest::Approx(std::pow(0.5, -0.25)).epsilon(1e-12));
  CHECK(gr.weight.at({-1.0, 0.0}) == 1.0);

  CHECK(weight_at(exp, {0.5, 0.0}) == exp.weight.at({0.5, 0.0}));
  CHECK_THROWS_AS(weight_at(exp, {5.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(weight_at(make_example("spikes-cones"), {0.5, 0.5}),
                  std::invalid_argument);
}

TEST_CASE("weight primitives match hand integration") {
  const SpaceHandle exp = make_example("exp-weight");
  // integral of e^{-1/t}/t^2 is e^{-1/t}
  CHECK(exp.weight.radial_primitive(0.5) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-14));

  const SpaceHandle gr = make_example("grushin-glued");
  // integral of t^{-1/4} from 0 to x is (4/3) x^{3/4}
  CHECK(gr.weight.horizontal_primitive(0.75) ==
        doctest::Approx((4.0 / 3.0) * std::pow(0.75, 0.75)).epsilon(1e-14));
  // left of the axis the weight is 1
  CHECK(gr.weight.horizontal_primitive(-0.5) == doctest::Approx(-0.5));
  // squared weight integrates t^{-1/2} to 2 sqrt(t)
  CHECK(gr.weight.horizontal_primitive2(0.81) - gr.weight.horizontal_primitive2(0.0) ==
        doctest::Approx(2.0 * 0.9).epsilon(1e-12));
}

TEST_CASE("admissible cover radii") {
  const SpaceHandle euc = make_example("euclidean");
  CHECK(euc.cover_radius({3.0, -2.0}) == doctest::Approx(1.0));

  const SpaceHandle exp = make_example("exp-weight");
  CHECK(exp.cover_radius({0.5, 0.0}) == doctest::Approx(0.1));
  CHECK(exp.cover_radius({0.1, 0.0}) == doctest::Approx(0.05));

  CHECK(make_example("grushin-glued").cover_radius({0.2, 0.2}) ==
        doctest::Approx(0.5));
  CHECK(make_example("spikes-cylinders").cover_radius3({0, 0, 0}) ==
        doctest::Approx(0.5));
}

TEST_CASE("spike tables follow the dyadic design") {
  const SpikeSurface& cones = *make_example("spikes-cones").surface;
  CHECK(cones.t(3) == doctest::Approx(std::exp2(-3.0)));
  CHECK(cones.h(3) == doctest::Approx(std::exp2(-1.5)));
  CHECK(cones.r(3) == doctest::Approx(std::exp2(-6.5)));

  const SpikeSurface& cyl = *make_example("spikes-cylinders").surface;
  CHECK(cyl.h(3) == doctest::Approx(std::exp2(-3.0)));
  CHECK(cyl.r(3) == doctest::Approx(std::exp2(-8.0)));

  // Lateral cone area pi r sqrt(h^2 + r^2), removed disk pi r^2.
  const double r2 = cones.r(2), h2 = cones.h(2);
  CHECK(cones.piece_area(2) ==
        doctest::Approx(M_PI * r2 * std::hypot(h2, r2)).epsilon(1e-12));
  CHECK(cones.removed_disk_area(2) == doctest::Approx(M_PI * r2 * r2));

  // Cylinder with cap: 2 pi r h + pi r^2.
  const double rc = cyl.r(2), hc = cyl.h(2);
  CHECK(cyl.piece_area(2) ==
        doctest::Approx(2.0 * M_PI * rc * hc + M_PI * rc * rc).epsilon(1e-12));

  CHECK(cyl.tail_area_bound() >= 0.0);
}

TEST_CASE("surface membership and ambient distances") {
  const SpaceHandle s = make_example("spikes-cones");
  const SpikeSurface& surf = *s.surface;

  // Cone apex of spike n sits at (t_n, 0, h_n).
  const Vec3 apex{surf.t(2), 0.0, surf.h(2)};
  CHECK(surf.on_surface(apex, 1e-9));
  CHECK(surf.surface_offset(apex) <= 1e-12);

  // A plane point away from every spike foot.
  CHECK(surf.on_surface({0.7, 0.7, 0.0}, 1e-9));
  CHECK_FALSE(surf.on_surface({0.0, 0.0, 5.0}, 1e-3));

  // Two plane points: ambient (chordal) distance equals the Euclidean one.
  CHECK(ambient_distance(surf, {0.7, 0.7, 0.0}, {0.7, -0.7, 0.0}) ==
        doctest::Approx(1.4).epsilon(1e-9));
  CHECK_THROWS_AS(ambient_distance(surf, {0.0, 0.0, 5.0}, {0.7, 0.7, 0.0}),
                  std::domain_error);
}

TEST_CASE("cone area near an apex scales like a disk sector") {
  const SpaceHandle s = make_example("spikes-cones");
  const SpikeSurface& surf = *s.surface;
  const int n = 3;
  const Vec3 apex{surf.t(n), 0.0, surf.h(n)};
  // Lateral area within chordal radius a of the apex is ~ pi (r/ell) a^2,
  // so a(s)/s^2 must be stable under halving s.
  const double a1 = surf.piece_area_in_ball(n, apex, surf.r(n) / 4.0);
  const double a2 = surf.piece_area_in_ball(n, apex, surf.r(n) / 8.0);
  CHECK(a1 > 0.0);
  CHECK(a1 / a2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("descriptors are valid JSON naming the example") {
  for (const char* id :
       {"euclidean", "exp-weight", "spikes-cones", "spikes-cylinders",
        "grushin-glued"}) {
    const SpaceHandle s = make_example(id);
    const ordered_json j = ordered_json::parse(s.descriptor_json());
    CHECK(j.at("name").get<std::string>() == id);
  }
}
