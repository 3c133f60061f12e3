#include <doctest.h>

#include <mslab/checkers.hpp>
#include <mslab/modulus.hpp>
#include <mslab/reports.hpp>
#include <mslab/spaces.hpp>

#include <cmath>

using namespace mslab;

TEST_CASE("ball-mass comparison passes on the plane with a modest constant") {
  const SpaceHandle s = make_example("euclidean");
  const ImmReport r = check_imm(s, 2.0, {});
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.feasible_c > 1.0);
  CHECK(r.feasible_c <= 3.9);  // 2 sqrt(pi) plus sampling slack
  REQUIRE_FALSE(r.triples.empty());

  // Feasibility certificate: every sampled triple obeys the two-sided
  // sandwich the constant claims.
  const double lo = 1.0 / (r.feasible_c * r.feasible_c);
  const double hi = r.feasible_c * r.feasible_c * r.feasible_c;
  for (const ImmTriple& t : r.triples) {
    REQUIRE(t.q_yz > 0.0);
    const double scale = t.q_yz * t.q_yz;
    CHECK(t.mu_ball >= lo * scale * (1.0 - 1e-9));
    CHECK(t.mu_ball <= hi * scale * (1.0 + 1e-9));
  }
}

TEST_CASE("ball-mass comparison holds on the cylinder surface at the origin") {
  const ImmReport r = check_imm(make_example("spikes-cylinders"), 2.0, {});
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.feasible_c > 1.0);
  CHECK(r.feasible_c < 10.0);
}

TEST_CASE("upper regularity: plane passes, exponential weight blows up at 0") {
  const RegularityReport euc = check_upper_regularity(make_example("euclidean"), {});
  CHECK(euc.verdict == Verdict::Pass);
  CHECK(euc.c_upper == doctest::Approx(M_PI).epsilon(0.05));

  const RegularityReport ex = check_upper_regularity(make_example("exp-weight"), {});
  CHECK(ex.verdict == Verdict::Fail);
  REQUIRE_FALSE(ex.witness.empty());
  CHECK(ex.witness.front().x.norm() <= 1e-9);   // the blow-up sits at 0
  CHECK(ex.witness_slope < -0.15);              // mu(B)/r^2 grows as r -> 0

  const RegularityReport gr = check_upper_regularity(make_example("grushin-glued"), {});
  CHECK(gr.verdict == Verdict::Fail);
  REQUIRE_FALSE(gr.witness.empty());
  CHECK(std::fabs(gr.witness.front().x.x) <= 1e-9);  // on the gluing axis

  const RegularityReport cones = check_upper_regularity(make_example("spikes-cones"), {});
  CHECK(cones.verdict == Verdict::Pass);
  CHECK(cones.c_upper > M_PI);   // spikes add area
  CHECK(cones.c_upper <= 4.0);
}

TEST_CASE("linear local connectedness verdicts per example") {
  const std::vector<double> lambdas{1.25, 1.5, 2.0, 3.0};

  const LlcReport euc = check_llc(make_example("euclidean"), lambdas, 0.02, 0.6, {});
  CHECK(euc.cond1 == Verdict::Pass);
  CHECK(euc.cond2 == Verdict::Pass);
  CHECK(euc.passing_lambda == doctest::Approx(1.25));

  const LlcReport cyl = check_llc(make_example("spikes-cylinders"), lambdas,
                                  0.06, 0.25, {});
  CHECK(cyl.cond1 == Verdict::Pass);
  CHECK(cyl.cond2 == Verdict::Pass);
  CHECK(cyl.passing_lambda <= 2.0);

  const LlcReport cones = check_llc(make_example("spikes-cones"), lambdas,
                                    0.06, 0.25, {});
  CHECK(cones.cond2 == Verdict::Fail);
  REQUIRE_FALSE(cones.witnesses.empty());
  bool has_reverified = false;
  for (const LlcWitness& w : cones.witnesses) {
    CHECK(w.condition == 2);
    CHECK(w.forced_radius > 0.0);
    CHECK(w.lambda_threshold > 1.0);
    has_reverified = has_reverified || w.reverified;
  }
  CHECK(has_reverified);
  // Conservatism note: connectivity is only certified on the discrete model.
  CHECK(cones.note.find("discrete model") != std::string::npos);
}

TEST_CASE("interior modulus estimates stay bounded below on the cylinders") {
  const LoewnerTable t = estimate_loewner(
      make_example("spikes-cylinders"), {0, 0}, {1.0},
      {1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0}, {});
  CHECK(t.verdict == Verdict::Pass);
  REQUIRE(t.rows.size() == 4);
  CHECK(t.phi_min >= 2.0);
  CHECK(t.phi_min <= 3.0);
  CHECK(t.variation < 1.5);
  // The isotonic envelope is nonincreasing in t by construction.
  for (size_t i = 1; i < t.rows.size(); ++i)
    CHECK(t.rows[i].phi_hat <= t.rows[i - 1].phi_hat + 1e-12);
}

TEST_CASE("separated continua rows: distance pinned, modulus under the bound") {
  const std::vector<SeparatedRow> rows =
      loewner_failure_rows(make_example("exp-weight"), {0.1, 0.01, 0.001});
  REQUIRE(rows.size() == 3);
  for (const SeparatedRow& r : rows) {
    CHECK(r.relative_distance == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.mod > 0.0);
    CHECK(r.mod <= r.bound * 1.1);
    CHECK(r.bound == doctest::Approx(teichmuller_upper_bound(r.t)).epsilon(1e-12));
  }
  CHECK(rows[1].mod <= rows[0].mod + 1e-9);
  CHECK(rows[2].mod <= rows[1].mod + 1e-9);
  CHECK(rows[2].bound == doctest::Approx(2.732821).epsilon(1e-4));
}

TEST_CASE("ring modulus decay toward the exponential puncture") {
  const std::vector<double> radii{0.25, 0.125, 0.0625, 0.03125};
  const DecaySeries d = check_reciprocality_decay(make_example("exp-weight"),
                                                  {0, 0}, 0.5, radii, {}, 0.10);
  CHECK(d.verdict == Verdict::Pass);
  REQUIRE(d.values.size() == radii.size());
  for (size_t i = 1; i < d.values.size(); ++i)
    CHECK(d.values[i] <= d.values[i - 1] * 1.02);
  CHECK(d.values.front() == doctest::Approx(8.841487).epsilon(0.02));

  CHECK_THROWS_AS(check_reciprocality_decay(make_example("exp-weight"), {0, 0},
                                            0.1, {0.25, 0.125}, {}, 0.10),
                  std::invalid_argument);
}

TEST_CASE("distortion: exponential weight is MQC but not quasisymmetric at 0") {
  const DistortionReport r = distortion_ratio(make_example("exp-weight"), {0, 0},
                                              {0.2, 0.1, 0.05}, {});
  CHECK(r.mqc_verdict == Verdict::Pass);
  CHECK(r.qs_verdict == Verdict::Fail);
  bool checked = false;
  for (const QsTriple& t : r.triples) {
    CHECK(t.source_ratio <= 2.0 + 1e-9);
    if (std::fabs(t.t - 0.1) <= 1e-12) {
      // Collinear witness triple: the image ratio is exactly e^{1/(2t)}.
      CHECK(t.image_ratio == doctest::Approx(std::exp(5.0)).epsilon(1e-9));
      checked = true;
    }
  }
  CHECK(checked);
}

TEST_CASE("distortion: glued Grushin chart blows up at the prescribed rate") {
  const DistortionReport r = distortion_ratio(
      make_example("grushin-glued"), {0, 0},
      {0.25, 0.125, 0.0625, 0.03125, 0.015625}, {});
  CHECK(r.mqc_verdict == Verdict::Fail);
  CHECK(r.qs_verdict == Verdict::Pass);
  REQUIRE(r.rows.size() == 5);
  // H(0, r) ~ r^{-beta} / (1 - beta) as r -> 0.
  for (const DistortionRow& row : r.rows) {
    if (row.r > 0.04) continue;
    const double ref = std::pow(row.r, -0.25) / 0.75;
    CHECK(row.H == doctest::Approx(ref).epsilon(0.15));
  }
  CHECK(r.rows.back().H > r.rows.front().H);
}

TEST_CASE("identical runs serialize to identical reports") {
  const SpaceHandle s = make_example("euclidean");
  const std::string a = dump_json(to_json(check_imm(s, 2.0, {})));
  const std::string b = dump_json(to_json(check_imm(s, 2.0, {})));
  CHECK(a == b);
}
