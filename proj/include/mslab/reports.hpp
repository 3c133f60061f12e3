#pragma once

#include <mslab/checkers.hpp>
#include <mslab/measures.hpp>
#include <mslab/modulus.hpp>

#include <json.hpp>

#include <string>
#include <vector>

namespace mslab {

// ---------------------------------------------------------------------------
// Report serialization.
//
// Every checker report serializes to a JSON object with a `verdict` field in
// {"pass", "fail", "inconclusive"} and a `witnesses` array (empty when the
// verdict needs none), plus the numeric tables; tables also serialize to CSV
// companions.  Key order is fixed (ordered_json) and numbers are emitted by
// the shortest round-trip rule, so a fixed input yields byte-identical
// output — the reproducibility contract of the command-line front end.
// ---------------------------------------------------------------------------

using ordered_json = nlohmann::ordered_json;

// %.12g, the precision used in CSV cells and human-readable lines.
std::string format_num(double v);

ordered_json json_point(Vec2 p);
ordered_json json_point(Vec3 p);

ordered_json to_json(const ImmReport& r);
ordered_json to_json(const RegularityReport& r);
ordered_json to_json(const LlcReport& r);
ordered_json to_json(const LoewnerTable& r);
ordered_json to_json(const std::string& space, const std::vector<SeparatedRow>& rows);
ordered_json to_json(const DecaySeries& r);
ordered_json to_json(const DistortionReport& r);
ordered_json to_json(const ModulusResult& r);
ordered_json to_json(const BallMeasureTable& t);
ordered_json to_json(const MuLengthEstimate& e);

std::string to_csv(const ImmReport& r);
std::string to_csv(const RegularityReport& r);
std::string to_csv(const LlcReport& r);
std::string to_csv(const LoewnerTable& r);
std::string to_csv(const std::vector<SeparatedRow>& rows);
std::string to_csv(const DecaySeries& r);
std::string to_csv(const DistortionReport& r);       // scale rows
std::string to_csv_triples(const DistortionReport& r);  // probe triples
std::string to_csv(const BallMeasureTable& t);

// 2-space indented dump with a trailing newline.
std::string dump_json(const ordered_json& j);

// Writes content atomically enough for our purposes (single stream, flush,
// close); throws std::runtime_error when the file cannot be opened.
void write_file(const std::string& path, const std::string& content);

}  // namespace mslab
