#include "pairinfer/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pairinfer/error.hpp"

namespace pairinfer {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(trim(field));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParseError(where + ": expected a number, got '" + text + "'");
  }
  if (used != text.size()) throw ParseError(where + ": expected a number, got '" + text + "'");
  return v;
}

std::int64_t parse_count(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw ParseError(where + ": expected an integer count, got '" + text + "'");
  }
  if (used != text.size()) throw ParseError(where + ": expected an integer count, got '" + text + "'");
  return v;
}

std::int64_t json_count(const json& counts, const char* key, const std::string& where) {
  if (!counts.contains(key)) throw ParseError(where + ".counts: missing field \"" + key + "\"");
  const json& v = counts.at(key);
  if (!v.is_number_integer()) throw ParseError(where + ".counts." + key + ": expected an integer count");
  return v.get<std::int64_t>();
}

Dataset parse_json(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": malformed JSON: " + e.what());
  }
  if (!doc.is_object()) throw ParseError(source + ": top level must be an object");
  if (!doc.contains("schema_version")) throw ParseError(source + ": missing field \"schema_version\"");
  if (!doc["schema_version"].is_number_integer() || doc["schema_version"].get<int>() != kDatasetSchemaVersion) {
    throw ParseError(source + ": schema_version must be " + std::to_string(kDatasetSchemaVersion));
  }
  if (!doc.contains("observations") || !doc["observations"].is_array()) {
    throw ParseError(source + ": field \"observations\" must be an array");
  }

  const json& obs = doc["observations"];
  bool gendered = false;
  if (doc.contains("model")) {
    if (!doc["model"].is_string()) throw ParseError(source + ": field \"model\" must be a string");
    try {
      gendered = parse_model_kind(doc["model"].get<std::string>()) == ModelKind::gender;
    } catch (const Error& e) {
      throw ParseError(source + ": field \"model\": " + e.what());
    }
  } else if (!obs.empty() && obs[0].is_object() && obs[0].contains("counts") && obs[0]["counts"].is_object()) {
    gendered = obs[0]["counts"].contains("IS");
  }
  std::string provenance;
  if (doc.contains("provenance")) {
    if (!doc["provenance"].is_string()) throw ParseError(source + ": field \"provenance\" must be a string");
    provenance = doc["provenance"].get<std::string>();
  }

  std::vector<double> times;
  std::vector<PairCounts> plain;
  std::vector<GenderPairCounts> split_counts;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const std::string where = source + ": observations[" + std::to_string(i) + "]";
    const json& o = obs[i];
    if (!o.is_object()) throw ParseError(where + ": expected an object");
    if (!o.contains("time") || !o["time"].is_number()) throw ParseError(where + ".time: expected a number");
    if (!o.contains("counts") || !o["counts"].is_object()) throw ParseError(where + ".counts: expected an object");
    const json& c = o["counts"];
    times.push_back(o["time"].get<double>());
    if (gendered) {
      split_counts.push_back({json_count(c, "SS", where), json_count(c, "IS", where), json_count(c, "SI", where),
                              json_count(c, "II", where)});
    } else {
      if (c.contains("IS")) throw ParseError(where + ".counts: \"IS\" given for a non-gendered model");
      plain.push_back({json_count(c, "SS", where), json_count(c, "SI", where), json_count(c, "II", where)});
    }
  }
  try {
    if (gendered) return Dataset(std::move(times), std::move(split_counts), provenance);
    return Dataset(std::move(times), std::move(plain), provenance);
  } catch (const ParseError& e) {
    throw ParseError(source + ": " + e.what());
  }
}

Dataset parse_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::string provenance;
  std::vector<std::string> header;
  int header_line = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const std::string body = trim(t.substr(1));
      if (body.rfind("provenance:", 0) == 0) provenance = trim(body.substr(11));
      continue;
    }
    header = split(t, ',');
    header_line = line_no;
    break;
  }
  if (header.empty()) throw ParseError(source + ": missing header row time,SS,SI,II[,IS]");

  int col_time = -1, col_ss = -1, col_si = -1, col_ii = -1, col_is = -1;
  for (std::size_t k = 0; k < header.size(); ++k) {
    const std::string& h = header[k];
    const int idx = static_cast<int>(k);
    if (h == "time") col_time = idx;
    else if (h == "SS") col_ss = idx;
    else if (h == "SI") col_si = idx;
    else if (h == "II") col_ii = idx;
    else if (h == "IS") col_is = idx;
    else throw ParseError(source + ":" + std::to_string(header_line) + ": unknown column '" + h + "'");
  }
  if (col_time < 0 || col_ss < 0 || col_si < 0 || col_ii < 0) {
    throw ParseError(source + ":" + std::to_string(header_line) + ": header must contain time,SS,SI,II");
  }
  const bool gendered = col_is >= 0;

  std::vector<double> times;
  std::vector<PairCounts> plain;
  std::vector<GenderPairCounts> split_counts;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto fields = split(t, ',');
    if (fields.size() != header.size()) {
      throw ParseError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    const auto field = [&](int col) { return fields[static_cast<std::size_t>(col)]; };
    times.push_back(parse_number(field(col_time), where + " (time)"));
    const auto ss = parse_count(field(col_ss), where + " (SS)");
    const auto si = parse_count(field(col_si), where + " (SI)");
    const auto ii = parse_count(field(col_ii), where + " (II)");
    if (gendered) {
      split_counts.push_back({ss, parse_count(field(col_is), where + " (IS)"), si, ii});
    } else {
      plain.push_back({ss, si, ii});
    }
  }
  try {
    if (gendered) return Dataset(std::move(times), std::move(split_counts), provenance);
    return Dataset(std::move(times), std::move(plain), provenance);
  } catch (const ParseError& e) {
    throw ParseError(source + ": " + e.what());
  }
}

}  // namespace

std::string fmt6(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

DatasetFormat detect_format(const fs::path& path, const std::string& text) {
  const std::string ext = path.extension().string();
  if (ext == ".json") return DatasetFormat::json;
  if (ext == ".csv") return DatasetFormat::csv;
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    return ch == '{' ? DatasetFormat::json : DatasetFormat::csv;
  }
  return DatasetFormat::csv;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void ensure_writable_directory(const fs::path& dir) {
  std::error_code ec;
  if (fs::exists(dir, ec) && !fs::is_directory(dir, ec)) throw IoError(dir.string() + " exists and is not a directory");
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const fs::path probe = dir / ".write_probe";
  {
    std::ofstream out(probe, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("output directory " + dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

Dataset parse_dataset_text(const std::string& text, DatasetFormat format, const std::string& source) {
  return format == DatasetFormat::json ? parse_json(text, source) : parse_csv(text, source);
}

Dataset parse_dataset(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw IoError("dataset file not found: " + path.string());
  const std::string text = read_text_file(path);
  return parse_dataset_text(text, detect_format(path, text), path.string());
}

std::string format_dataset(const Dataset& data, DatasetFormat format) {
  const bool gendered = data.is_gendered();
  if (format == DatasetFormat::json) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = kDatasetSchemaVersion;
    doc["model"] = std::string(to_string(data.kind()));
    doc["provenance"] = data.provenance();
    auto obs = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < data.size(); ++i) {
      nlohmann::ordered_json o;
      o["time"] = data.times()[i];
      nlohmann::ordered_json c;
      if (gendered) {
        const auto& g = data.gender_counts(i);
        c["SS"] = g.ss;
        c["IS"] = g.is;
        c["SI"] = g.si;
        c["II"] = g.ii;
      } else {
        const auto p = data.counts(i);
        c["SS"] = p.ss;
        c["SI"] = p.si;
        c["II"] = p.ii;
      }
      o["counts"] = c;
      obs.push_back(o);
    }
    doc["observations"] = obs;
    return doc.dump(2) + "\n";
  }

  std::ostringstream os;
  if (!data.provenance().empty()) os << "# provenance: " << data.provenance() << "\n";
  os << (gendered ? "time,SS,IS,SI,II\n" : "time,SS,SI,II\n");
  for (std::size_t i = 0; i < data.size(); ++i) {
    os << exact(data.times()[i]);
    if (gendered) {
      const auto& g = data.gender_counts(i);
      os << ',' << g.ss << ',' << g.is << ',' << g.si << ',' << g.ii << '\n';
    } else {
      const auto p = data.counts(i);
      os << ',' << p.ss << ',' << p.si << ',' << p.ii << '\n';
    }
  }
  return os.str();
}

void write_dataset(const Dataset& data, const fs::path& path) {
  const DatasetFormat format = path.extension() == ".csv" ? DatasetFormat::csv : DatasetFormat::json;
  write_text_file(path, format_dataset(data, format));
}

}  // namespace pairinfer
