#pragma once

#include <filesystem>
#include <string>

#include "pairinfer/dataset.hpp"

namespace pairinfer {

inline constexpr int kDatasetSchemaVersion = 1;

enum class DatasetFormat { json, csv };

/// Format from the extension (.json, .csv); anything else is sniffed from
/// the first non-blank character.
DatasetFormat detect_format(const std::filesystem::path& path, const std::string& text);

/// Reads a dataset document. The JSON form is
///   {"schema_version": 1, "model": "nongender"|"gender", "provenance": "...",
///    "observations": [{"time": t, "counts": {"SS": .., "SI": .., "II": ..[, "IS": ..]}}]}
/// and the CSV form has the header time,SS,SI,II with an optional IS column.
/// With IS present the dataset is gendered; SI is then the female-infected count.
/// Errors are ParseError naming the line or field, IoError for unreadable files.
Dataset parse_dataset(const std::filesystem::path& path);
Dataset parse_dataset_text(const std::string& text, DatasetFormat format, const std::string& source = "<input>");

std::string format_dataset(const Dataset& data, DatasetFormat format);
void write_dataset(const Dataset& data, const std::filesystem::path& path);

/// Six significant digits, "%.6g", with "nan" / "inf" spelled out.
std::string fmt6(double value);

/// Writes via a sibling temporary file and rename.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

/// Creates `dir` if needed and probes it with a scratch file. IoError when
/// the directory cannot be written.
void ensure_writable_directory(const std::filesystem::path& dir);

}  // namespace pairinfer
