#include <mslab/reports.hpp>

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mslab {

std::string format_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

ordered_json json_point(Vec2 p) { return ordered_json::array({p.x, p.y}); }

ordered_json json_point(Vec3 p) { return ordered_json::array({p.x, p.y, p.z}); }

namespace {

std::string csv_row(const std::vector<double>& cells) {
  std::string line;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += format_num(cells[i]);
  }
  line += '\n';
  return line;
}

ordered_json triple_json(const ImmTriple& t) {
  ordered_json j;
  j["x"] = json_point(t.x);
  j["r"] = t.r;
  j["y"] = json_point(t.y);
  j["z"] = json_point(t.z);
  j["mu_ball"] = t.mu_ball;
  j["q_yz"] = t.q_yz;
  j["ratio"] = t.ratio;
  return j;
}

ordered_json regularity_row_json(const RegularityRow& r) {
  ordered_json j;
  j["x"] = json_point(r.x);
  j["r"] = r.r;
  j["mu_ball"] = r.mu_ball;
  j["ratio"] = r.ratio;
  return j;
}

}  // namespace

ordered_json to_json(const ImmReport& r) {
  ordered_json j;
  j["checker"] = "imm";
  j["space"] = r.space;
  j["verdict"] = to_string(r.verdict);
  j["lambda"] = r.lambda;
  j["feasible_c"] = r.feasible_c;
  ordered_json triples = ordered_json::array();
  for (const auto& t : r.triples) triples.push_back(triple_json(t));
  j["triples"] = std::move(triples);
  // The extremal triples act as the witnesses of the sampled constant: the
  // tightest ratio on each side of 1.
  ordered_json wit = ordered_json::array();
  const ImmTriple* lo = nullptr;
  const ImmTriple* hi = nullptr;
  for (const auto& t : r.triples) {
    if (!hi || t.ratio > hi->ratio) hi = &t;
    if (!lo || t.ratio < lo->ratio) lo = &t;
  }
  if (hi) wit.push_back(triple_json(*hi));
  if (lo && lo != hi) wit.push_back(triple_json(*lo));
  j["witnesses"] = std::move(wit);
  j["note"] = r.note;
  return j;
}

std::string to_csv(const ImmReport& r) {
  std::string out = "x1,x2,x3,r,y1,y2,y3,z1,z2,z3,mu_ball,q_yz,ratio\n";
  for (const auto& t : r.triples)
    out += csv_row({t.x.x, t.x.y, t.x.z, t.r, t.y.x, t.y.y, t.y.z, t.z.x, t.z.y,
                    t.z.z, t.mu_ball, t.q_yz, t.ratio});
  return out;
}

ordered_json to_json(const RegularityReport& r) {
  ordered_json j;
  j["checker"] = "upper-regularity";
  j["space"] = r.space;
  j["verdict"] = to_string(r.verdict);
  j["c_upper"] = r.c_upper;
  j["witness_slope"] = r.witness_slope;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) rows.push_back(regularity_row_json(row));
  j["rows"] = std::move(rows);
  ordered_json wit = ordered_json::array();
  for (const auto& row : r.witness) wit.push_back(regularity_row_json(row));
  j["witnesses"] = std::move(wit);
  j["note"] = r.note;
  return j;
}

std::string to_csv(const RegularityReport& r) {
  std::string out = "x1,x2,x3,r,mu_ball,ratio\n";
  for (const auto& row : r.rows)
    out += csv_row({row.x.x, row.x.y, row.x.z, row.r, row.mu_ball, row.ratio});
  return out;
}

ordered_json to_json(const LlcReport& r) {
  ordered_json j;
  j["checker"] = "llc";
  j["space"] = r.space;
  // The aggregated verdict: both conditions must pass.
  const Verdict agg = (r.cond1 == Verdict::Fail || r.cond2 == Verdict::Fail)
                          ? Verdict::Fail
                          : (r.cond1 == Verdict::Pass && r.cond2 == Verdict::Pass)
                                ? Verdict::Pass
                                : Verdict::Inconclusive;
  j["verdict"] = to_string(agg);
  j["condition1"] = to_string(r.cond1);
  j["condition2"] = to_string(r.cond2);
  j["lambdas"] = r.lambdas;
  j["scale_min"] = r.scale_min;
  j["scale_max"] = r.scale_max;
  j["passing_lambda"] = r.passing_lambda;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.scale_rows) {
    ordered_json jr;
    jr["x"] = json_point(row.x);
    jr["r"] = row.r;
    jr["min_lambda1"] = row.min_lambda1;
    jr["min_lambda2"] = row.min_lambda2;
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  ordered_json wit = ordered_json::array();
  for (const auto& w : r.witnesses) {
    ordered_json jw;
    jw["x"] = json_point(w.x);
    jw["r"] = w.r;
    jw["y"] = json_point(w.y);
    jw["z"] = json_point(w.z);
    jw["condition"] = w.condition;
    jw["forced_radius"] = w.forced_radius;
    jw["lambda_threshold"] = w.lambda_threshold;
    jw["reverified"] = w.reverified;
    wit.push_back(std::move(jw));
  }
  j["witnesses"] = std::move(wit);
  j["note"] = r.note;
  return j;
}

std::string to_csv(const LlcReport& r) {
  std::string out = "x1,x2,x3,r,min_lambda1,min_lambda2\n";
  for (const auto& row : r.scale_rows)
    out += csv_row({row.x.x, row.x.y, row.x.z, row.r, row.min_lambda1,
                    row.min_lambda2});
  return out;
}

ordered_json to_json(const LoewnerTable& r) {
  ordered_json j;
  j["checker"] = "loewner";
  j["space"] = r.space;
  j["verdict"] = to_string(r.verdict);
  j["x"] = json_point(r.x);
  j["r_x"] = r.r_x;
  j["phi_min"] = r.phi_min;
  j["variation"] = r.variation;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json jr;
    jr["T"] = row.T;
    jr["s"] = row.s;
    jr["t"] = row.t;
    jr["mod"] = row.mod;
    jr["phi_hat"] = row.phi_hat;
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  j["witnesses"] = ordered_json::array();
  j["note"] = r.note;
  return j;
}

std::string to_csv(const LoewnerTable& r) {
  std::string out = "T,s,t,mod,phi_hat\n";
  for (const auto& row : r.rows)
    out += csv_row({row.T, row.s, row.t, row.mod, row.phi_hat});
  return out;
}

ordered_json to_json(const std::string& space, const std::vector<SeparatedRow>& rows) {
  ordered_json j;
  j["checker"] = "loewner-failure";
  j["space"] = space;
  // Fails (in the sense of refuting a uniform lower bound) when some modulus
  // drops under its annulus majorant; the rows themselves are the witnesses.
  j["verdict"] = "pass";
  ordered_json jr = ordered_json::array();
  ordered_json wit = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json one;
    one["t"] = row.t;
    one["relative_distance"] = row.relative_distance;
    one["mod"] = row.mod;
    one["bound"] = row.bound;
    jr.push_back(one);
    wit.push_back(std::move(one));
  }
  j["rows"] = std::move(jr);
  j["witnesses"] = std::move(wit);
  return j;
}

std::string to_csv(const std::vector<SeparatedRow>& rows) {
  std::string out = "t,relative_distance,mod,bound\n";
  for (const auto& row : rows)
    out += csv_row({row.t, row.relative_distance, row.mod, row.bound});
  return out;
}

ordered_json to_json(const DecaySeries& r) {
  ordered_json j;
  j["checker"] = "reciprocality-decay";
  j["space"] = r.space;
  j["verdict"] = to_string(r.verdict);
  j["x"] = json_point(r.x);
  j["R"] = r.R;
  j["radii"] = r.radii;
  j["values"] = r.values;
  j["threshold"] = r.threshold;
  j["witnesses"] = ordered_json::array();
  j["note"] = r.note;
  return j;
}

std::string to_csv(const DecaySeries& r) {
  std::string out = "r,mod\n";
  for (size_t i = 0; i < r.radii.size(); ++i)
    out += csv_row({r.radii[i], r.values[i]});
  return out;
}

ordered_json to_json(const DistortionReport& r) {
  ordered_json j;
  j["checker"] = "distortion";
  j["space"] = r.space;
  // Headline verdict: the infinitesimal sup/inf control.
  j["verdict"] = to_string(r.mqc_verdict);
  j["mqc_verdict"] = to_string(r.mqc_verdict);
  j["qs_verdict"] = to_string(r.qs_verdict);
  j["x"] = json_point(r.x);
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json jr;
    jr["r"] = row.r;
    jr["sup_d"] = row.sup_d;
    jr["inf_d"] = row.inf_d;
    jr["H"] = row.H;
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  ordered_json trip = ordered_json::array();
  ordered_json wit = ordered_json::array();
  for (const auto& t : r.triples) {
    ordered_json jt;
    jt["t"] = t.t;
    jt["x"] = json_point(t.x);
    jt["y"] = json_point(t.y);
    jt["z"] = json_point(t.z);
    jt["source_ratio"] = t.source_ratio;
    jt["image_ratio"] = t.image_ratio;
    trip.push_back(jt);
    if (r.qs_verdict == Verdict::Fail) wit.push_back(std::move(jt));
  }
  j["triples"] = std::move(trip);
  j["witnesses"] = std::move(wit);
  j["note"] = r.note;
  return j;
}

std::string to_csv(const DistortionReport& r) {
  std::string out = "r,sup_d,inf_d,H\n";
  for (const auto& row : r.rows)
    out += csv_row({row.r, row.sup_d, row.inf_d, row.H});
  return out;
}

std::string to_csv_triples(const DistortionReport& r) {
  std::string out = "t,source_ratio,image_ratio\n";
  for (const auto& t : r.triples)
    out += csv_row({t.t, t.source_ratio, t.image_ratio});
  return out;
}

ordered_json to_json(const ModulusResult& r) {
  ordered_json j;
  j["value"] = r.value;
  j["method"] = to_string(r.method);
  j["residual"] = r.residual;
  j["iterations"] = r.iterations;
  j["admissible_impossible"] = r.admissible_impossible;
  j["h"] = r.h;
  j["nx"] = r.nx;
  j["ny"] = r.ny;
  return j;
}

ordered_json to_json(const BallMeasureTable& t) {
  ordered_json j;
  j["center"] = json_point(t.center);
  j["method"] = to_string(t.method);
  j["radii"] = t.radii;
  j["values"] = t.values;
  return j;
}

std::string to_csv(const BallMeasureTable& t) {
  std::string out = "r,mu\n";
  for (size_t i = 0; i < t.radii.size(); ++i)
    out += csv_row({t.radii[i], t.values[i]});
  return out;
}

ordered_json to_json(const MuLengthEstimate& e) {
  ordered_json j;
  j["deltas"] = e.deltas;
  j["contents"] = e.contents;
  j["extrapolated"] = e.extrapolated;
  return j;
}

std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace mslab
