#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpsurf/diagnostics.hpp"
#include "hpsurf/estimation.hpp"
#include "hpsurf/simulator.hpp"

namespace hpsurf::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// CSV with a header row and a `score` column (other columns ignored).
std::vector<double> read_scores_csv(std::istream& in);
/// JSON lines, one object with a numeric `score` field per line.
std::vector<double> read_scores_jsonl(std::istream& in);
/// Dispatches on the extension (.jsonl / .ndjson, otherwise CSV).
/// Throws InputError on missing files, parse failures or no scores.
std::vector<double> read_scores_file(const std::string& path);

/// CSV with `group` and `score` columns; groups keep first-seen order.
GroupedScores read_grouped_csv(std::istream& in);
GroupedScores read_grouped_file(const std::string& path);

/// Document header shared by every command output.
Json document(const std::string& command, std::uint64_t seed);

Json to_json(const NoisyQuadraticDistribution& d);
NoisyQuadraticDistribution distribution_from_json(const Json& j);
Json to_json(const FitResult& fit);
FitResult fit_from_json(const Json& j);

Json to_json(const SyntheticSurface& s);
SyntheticSurface surface_from_json(const Json& j);

Json to_json(const SearchDistribution& d);
SearchDistribution search_distribution_from_json(const Json& j);

Json read_json_file(const std::string& path);

/// Writes `text` to path, or to stdout when path is empty or "-".
void write_output(const std::string& path, const std::string& text);

/// Shortest round-tripping decimal form.
std::string format_double(double x);

}  // namespace hpsurf::io
