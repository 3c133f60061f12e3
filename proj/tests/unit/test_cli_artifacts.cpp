#include <doctest.h>

#include <mslab/checkers.hpp>
#include <mslab/measures.hpp>
#include <mslab/reports.hpp>
#include <mslab/spaces.hpp>
#include <mslab/svg.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace mslab;

namespace {

size_t count_occurrences(const std::string& hay, const std::string& needle) {
  size_t n = 0;
  for (size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size()))
    ++n;
  return n;
}

std::string first_line(const std::string& s) {
  return s.substr(0, s.find('\n'));
}

}  // namespace

TEST_CASE("numbers format compactly and deterministically") {
  CHECK(format_num(2.0) == "2");
  CHECK(format_num(1.0 / 3.0) == "0.333333333333");
  CHECK(format_num(-0.5) == "-0.5");
  CHECK(format_num(1e-9) == "1e-09");
}

TEST_CASE("report JSON carries verdicts and witnesses") {
  const SpaceHandle s = make_example("euclidean");
  const ImmReport imm = check_imm(s, 2.0, {});
  const ordered_json j = to_json(imm);
  CHECK(j.contains("checker"));
  CHECK(j.contains("verdict"));
  CHECK(j.contains("witnesses"));
  const std::string v = j.at("verdict").get<std::string>();
  CHECK((v == "pass" || v == "fail" || v == "inconclusive"));

  const std::string dumped = dump_json(j);
  CHECK(dumped.back() == '\n');
  CHECK(ordered_json::parse(dumped) == j);  // round-trips

  // Dumping twice gives identical bytes.
  CHECK(dump_json(to_json(imm)) == dumped);
}

TEST_CASE("CSV tables start with their contract headers") {
  const SpaceHandle euc = make_example("euclidean");

  const ImmReport imm = check_imm(euc, 2.0, {});
  CHECK(first_line(to_csv(imm)) ==
        "x1,x2,x3,r,y1,y2,y3,z1,z2,z3,mu_ball,q_yz,ratio");
  CHECK(count_occurrences(to_csv(imm), "\n") == imm.triples.size() + 1);

  const RegularityReport reg = check_upper_regularity(euc, {});
  CHECK(first_line(to_csv(reg)) == "x1,x2,x3,r,mu_ball,ratio");

  const LlcReport llc = check_llc(euc, {1.25, 1.5}, 0.05, 0.4, {});
  CHECK(first_line(to_csv(llc)) == "x1,x2,x3,r,min_lambda1,min_lambda2");

  const std::vector<SeparatedRow> rows =
      loewner_failure_rows(make_example("exp-weight"), {0.1, 0.01});
  CHECK(first_line(to_csv(rows)) == "t,relative_distance,mod,bound");
  CHECK(count_occurrences(to_csv(rows), "\n") == rows.size() + 1);

  DecaySeries d;
  d.radii = {0.25, 0.125};
  d.values = {2.0, 1.0};
  CHECK(first_line(to_csv(d)) == "r,mod");

  LoewnerTable t;
  t.rows.push_back({1.0, 0.1, 0.1, 2.0, 2.0});
  CHECK(first_line(to_csv(t)) == "T,s,t,mod,phi_hat");

  const DistortionReport dist =
      distortion_ratio(euc, {0.2, 0.2}, {0.25, 0.125}, {});
  CHECK(first_line(to_csv(dist)) == "r,sup_d,inf_d,H");
  CHECK(first_line(to_csv_triples(dist)) == "t,source_ratio,image_ratio");

  BallMeasureTable b;
  b.radii = {0.1};
  b.values = {0.5};
  CHECK(first_line(to_csv(b)) == "r,mu");
}

TEST_CASE("fan figures are fixed-viewport standalone SVG") {
  const SpaceHandle s = make_example("euclidean");
  const FanFigure fan = figure_fan(s, {0.3, 0.0}, 6, 1.0, 1.0 / 64.0, 16,
                                   nullptr, /*control=*/true);
  REQUIRE(fan.paths.size() == 6);
  // Control mode draws straight chords whose lengths are plain Euclidean.
  for (size_t i = 0; i < fan.paths.size(); ++i) {
    const double ref = (fan.targets[i] - Vec2{0.3, 0.0}).norm();
    CHECK(fan.paths[i].length == doctest::Approx(ref).epsilon(1e-12));
  }

  const std::string svg = fan_svg(fan);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("viewBox=\"0 0 800 800\"") != std::string::npos);
  CHECK(svg.find("xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);
  CHECK(count_occurrences(svg, "<polyline") == 6);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("http://") == svg.find("http://www.w3.org/2000/svg"));  // no external fetches
}

TEST_CASE("a fan to the source itself degenerates to a dot") {
  const SpaceHandle s = make_example("euclidean");
  const Vec2 src{0.3, 0.0};
  const FanFigure fan = figure_fan(s, src, 1, 1.0, 1.0 / 64.0, 16, &src, true);
  REQUIRE(fan.paths.size() == 1);
  CHECK(fan.paths[0].length == 0.0);
  const std::string svg = fan_svg(fan);
  CHECK(count_occurrences(svg, "<polyline") == 0);
  CHECK(count_occurrences(svg, "<circle") >= 2);  // target ring + the dot
}

TEST_CASE("fan construction validates its inputs") {
  const SpaceHandle s = make_example("euclidean");
  CHECK_THROWS_AS(figure_fan(s, {0, 0}, 0, 1.0, 0.01, 16, nullptr, false),
                  std::invalid_argument);
  CHECK_THROWS_AS(figure_fan(s, {0, 0}, 8, 1.0, -0.01, 16, nullptr, false),
                  std::invalid_argument);
}

TEST_CASE("write_file round-trips and reports unwritable paths") {
  const std::string path = "test_artifact_roundtrip.tmp";
  write_file(path, "alpha,beta\n1,2\n");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "alpha,beta\n1,2\n");
  std::remove(path.c_str());

  CHECK_THROWS_AS(write_file("no_such_dir/x/y.json", "{}"), std::runtime_error);
}

TEST_CASE("verify-style labels match the verdict enum") {
  CHECK(std::string(to_string(Verdict::Pass)) == "pass");
  CHECK(std::string(to_string(Verdict::Fail)) == "fail");
  CHECK(std::string(to_string(Verdict::Inconclusive)) == "inconclusive");
}
