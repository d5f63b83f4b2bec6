#include <algorithm>
#include <cmath>
#include <filesystem>
#include <regex>

#include "doctest.h"
#include "json.hpp"
#include "pairinfer/dataset.hpp"
#include "pairinfer/error.hpp"
#include "pairinfer/io.hpp"
#include "pairinfer/pipeline.hpp"
#include "pairinfer/report.hpp"

#ifndef PAIRINFER_DATA_DIR
#error "PAIRINFER_DATA_DIR must point at the bundled data"
#endif

using namespace pairinfer;
namespace fs = std::filesystem;

namespace {

const fs::path kData = PAIRINFER_DATA_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pairinfer_test_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig small_run(const fs::path& out) {
  RunConfig cfg;
  cfg.models = {ModelKind::nongender, ModelKind::gender};
  cfg.input = kData / "mwanza_gender.json";
  cfg.output_dir = out;
  cfg.default_surfaces = false;
  cfg.surfaces = {{ModelKind::nongender, {"lambda", 0.0005, 0.01, 11}, {"tau", 0.001, 0.3, 11}}};
  cfg.profile_points = 21;
  cfg.ellipse_points = 16;
  return cfg;
}

void collect_numbers(const nlohmann::ordered_json& j, std::vector<double>& out) {
  if (j.is_number()) {
    out.push_back(j.get<double>());
  } else if (j.is_structured()) {
    for (const auto& v : j) collect_numbers(v, out);
  } else if (j.is_string()) {
    // Numbers embedded in notes.
    const std::string s = j.get<std::string>();
    const std::regex num(R"([-+]?\d+(\.\d+)?([eE][-+]?\d+)?)");
    for (auto it = std::sregex_iterator(s.begin(), s.end(), num); it != std::sregex_iterator(); ++it) {
      out.push_back(std::stod(it->str()));
    }
  }
}

}  // namespace

TEST_SUITE("cli-io") {

TEST_CASE("bundled datasets") {
  const Dataset d = parse_dataset(kData / "mwanza.json");
  CHECK(d.times() == std::vector<double>{0.0, 2.0});
  CHECK(d.counts(0) == PairCounts{1742, 43, 17});
  CHECK(d.counts(1) == PairCounts{1721, 58, 23});
  CHECK_FALSE(d.provenance().empty());

  const Dataset g = parse_dataset(kData / "mwanza_gender.json");
  REQUIRE(g.is_gendered());
  CHECK(g.gender_counts(0) == GenderPairCounts{1742, 22, 21, 17});
  CHECK(g.gender_counts(1) == GenderPairCounts{1721, 33, 25, 23});

  const Dataset c = parse_dataset(kData / "mwanza.csv");
  CHECK(c.counts(1) == PairCounts{1721, 58, 23});
  CHECK(c.provenance() == d.provenance());

  CHECK(d.counts(0) == mwanza_dataset().counts(0));
  CHECK(g.gender_counts(1) == mwanza_gender_dataset().gender_counts(1));
}

TEST_CASE("dataset errors name the failure") {
  const std::string bad_sum = R"({"schema_version": 1, "model": "nongender", "observations": [
    {"time": 0, "counts": {"SS": 10, "SI": 2, "II": 1}},
    {"time": 2.5, "counts": {"SS": 9, "SI": 2, "II": 1}}]})";
  try {
    parse_dataset_text(bad_sum, DatasetFormat::json, "bad.json");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    const std::string what = e.what();
    CHECK(what.find("bad.json") != std::string::npos);
    CHECK(what.find("2.5") != std::string::npos);
  }

  const std::string single = R"({"schema_version": 1, "observations": [{"time": 0, "counts": {"SS": 1, "SI": 0, "II": 0}}]})";
  try {
    parse_dataset_text(single, DatasetFormat::json);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("at least two observation times required") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_dataset_text("time,SS,SI,II\n0,10,2,1\n0,10,2,1\n", DatasetFormat::csv), ParseError);
  try {
    parse_dataset_text("time,SS,SI,II\n0,10,2,1\n2,x,2,1\n", DatasetFormat::csv, "t.csv");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("t.csv:3") != std::string::npos);
  }
  try {
    parse_dataset_text(R"({"schema_version": 1, "observations": [{"time": 0, "counts": {"SS": 1, "SI": 0}}]})",
                       DatasetFormat::json);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("observations[0].counts") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_dataset_text("{not json", DatasetFormat::json), ParseError);
  CHECK_THROWS_AS(parse_dataset(kData / "does_not_exist.json"), IoError);
}

TEST_CASE("round trip through both formats") {
  const fs::path dir = scratch("roundtrip");
  fs::create_directories(dir);
  for (const Dataset& d : {mwanza_dataset(), mwanza_gender_dataset(),
                           Dataset({0.0, 0.5, 1.75}, std::vector<PairCounts>{{50, 5, 1}, {48, 6, 2}, {45, 7, 4}})}) {
    for (const char* ext : {".json", ".csv"}) {
      const fs::path p = dir / (std::string("d") + ext);
      write_dataset(d, p);
      const Dataset back = parse_dataset(p);
      REQUIRE(back.size() == d.size());
      CHECK(back.kind() == d.kind());
      CHECK(back.times() == d.times());
      CHECK(back.provenance() == d.provenance());
      for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(back.counts(i) == d.counts(i));
        if (d.is_gendered()) CHECK(back.gender_counts(i) == d.gender_counts(i));
      }
      // Emitting the parsed copy reproduces the same text.
      CHECK(format_dataset(back, detect_format(p, "")) == read_text_file(p));
    }
  }
  fs::remove_all(dir);
}

TEST_CASE("six significant digits") {
  CHECK(fmt6(0.0030328) == "0.0030328");
  CHECK(fmt6(16.9512345) == "16.9512");
  CHECK(fmt6(1.0) == "1");
  CHECK(fmt6(NAN) == "nan");
  CHECK(fmt6(-0.0) == "0");
}

TEST_CASE("report emission, absent validation and determinism") {
  const fs::path a = scratch("report_a");
  const fs::path b = scratch("report_b");
  const auto files_a = emit_report(run_pipeline(small_run(a)), a);
  const auto files_b = emit_report(run_pipeline(small_run(b)), b);
  REQUIRE(files_a == files_b);
  for (const char* f : {"estimates.csv", "infections.csv", "report.txt", "summary.json"}) {
    CHECK(fs::exists(a / f));
  }
  CHECK_FALSE(fs::exists(a / "validation.csv"));
  for (const auto& f : files_a) CHECK(read_text_file(a / f) == read_text_file(b / f));

  const auto summary = nlohmann::ordered_json::parse(read_text_file(a / "summary.json"));
  CHECK(summary["validation"]["emitted"] == false);
  const auto& ng = summary["fits"]["nongender"]["parameters"];
  CHECK(ng[0]["mle"].get<double>() == doctest::Approx(0.003032).epsilon(1e-3));
  CHECK(std::abs(ng[1]["mle"].get<double>() - 0.056) < 0.005);
  CHECK(std::abs(summary["infections"]["nongender"]["rows"][1]["infections_per_year"].get<double>() - 2.4) < 0.1);

  std::vector<double> known;
  collect_numbers(summary, known);
  const std::string report = read_text_file(a / "report.txt");
  const std::regex num(R"([-+]?\d+(\.\d+)?([eE][-+]?\d+)?)");
  int checked = 0;
  for (auto it = std::sregex_iterator(report.begin(), report.end(), num); it != std::sregex_iterator(); ++it) {
    const double v = std::stod(it->str());
    bool found = false;
    for (double k : known) {
      if (std::abs(k - v) <= 1e-9 * std::max(1.0, std::abs(k))) {
        found = true;
        break;
      }
    }
    INFO("report number " << it->str());
    CHECK(found);
    ++checked;
  }
  CHECK(checked > 20);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("validation records are written when requested") {
  const fs::path out = scratch("validation");
  RunConfig cfg = small_run(out);
  cfg.models = {ModelKind::nongender};
  cfg.input = kData / "mwanza.json";
  cfg.profiles = false;
  cfg.ellipses = false;
  cfg.surfaces.clear();
  ValidationConfig v;
  v.truth_axes = {{0.003}, {0.05}};
  v.replicates = 3;
  v.seed = 8;
  cfg.validation = v;
  const auto bundle = run_pipeline(cfg);
  emit_report(bundle, out);
  const std::string csv = read_text_file(out / "validation.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  fs::remove_all(out);
}

TEST_CASE("unwritable output directory fails before writing") {
  const fs::path base = scratch("unwritable");
  fs::create_directories(base);
  write_text_file(base / "plain_file", "x");
  const fs::path out = base / "plain_file" / "sub";
  RunConfig cfg = small_run(out);
  cfg.models = {ModelKind::nongender};
  const auto bundle = run_pipeline(cfg);
  CHECK_THROWS_AS(emit_report(bundle, out), IoError);
  CHECK_THROWS_AS(ensure_writable_directory(base / "plain_file"), IoError);
  CHECK_FALSE(fs::exists(base / "summary.json"));
  fs::remove_all(base);
}

TEST_CASE("manifest parsing") {
  const RunConfig cfg = parse_manifest(kData / "manifest.json");
  CHECK(cfg.models.size() == 2);
  CHECK(cfg.levels == std::vector<double>{0.67, 0.95});
  CHECK(cfg.fit.seed == 20021);
  REQUIRE(cfg.validation.has_value());
  CHECK(cfg.validation->replicates == 50);
  CHECK(cfg.input == kData / "mwanza_gender.json");

  const fs::path dir = scratch("manifest");
  fs::create_directories(dir);
  write_text_file(dir / "m.json", R"({"schema_version": 1, "levels": [0.95, 1.5]})");
  CHECK_THROWS_AS(parse_manifest(dir / "m.json").validate(), ConfigError);
  write_text_file(dir / "m.json", R"({"schema_version": 1, "levels": "high"})");
  CHECK_THROWS_AS(parse_manifest(dir / "m.json"), ParseError);
  fs::remove_all(dir);
}

}  // TEST_SUITE
