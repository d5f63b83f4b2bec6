#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "pairinfer/pipeline.hpp"

namespace pairinfer {

inline constexpr int kSummarySchemaVersion = 1;

/// A published figure that the closed forms do not reproduce, with both values.
struct Discrepancy {
  std::string id;
  std::string description;
  double published = 0.0;
  double computed = 0.0;
};

/// The conflicts between the quoted analytical numbers and what their
/// formulas give on the bundled counts.
std::vector<Discrepancy> discrepancy_ledger(const ResultsBundle& bundle);

/// Machine-readable summary. Every number is rounded to six significant digits.
nlohmann::ordered_json build_summary(const ResultsBundle& bundle);

/// Human-readable report rendered from the summary, so that every number in
/// it also appears there.
std::string render_report(const nlohmann::ordered_json& summary);

/// Delimited artifacts keyed by file name, in write order.
std::vector<std::pair<std::string, std::string>> render_tables(const ResultsBundle& bundle);

/// Checks the directory is writable, writes every table and report.txt, then
/// summary.json last. Returns the file names written.
std::vector<std::string> emit_report(const ResultsBundle& bundle, const std::filesystem::path& dir);

}  // namespace pairinfer
