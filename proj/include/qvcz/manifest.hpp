#pragma once
#include <string>
#include <vector>

#include "qvcz/config.hpp"

namespace qvcz {

/// Written alongside every CLI output; re-running the recorded command line
/// reproduces the data outputs bitwise (given the same build).
struct RunManifest {
  std::string tool_version;
  std::string timestamp; ///< ISO-8601 UTC
  std::string subcommand;
  std::vector<std::string> argv;
  PhysicalConfig config;
  DerivedParams derived{};
  std::vector<std::string> outputs;

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
};

void write_manifest(const std::string& path, const RunManifest& manifest);
RunManifest load_manifest(const std::string& path);

std::string iso_timestamp_utc();

/// Formats a double with enough digits to round-trip exactly.
std::string format_double(double v);

/// Minimal CSV assembly; fields are written verbatim (no quoting needed for
/// the schemas used here).
class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& fields);
  const std::string& text() const { return text_; }
  void write(const std::string& path) const;

private:
  std::size_t columns_;
  std::string text_;
};

} // namespace qvcz
