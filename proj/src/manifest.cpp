#include "qvcz/manifest.hpp"

#include "qvcz/errors.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qvcz/version.hpp"

namespace qvcz {

std::string iso_timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["tool"] = "qvcz";
  j["tool_version"] = tool_version.empty() ? kVersion : tool_version;
  j["timestamp"] = timestamp;
  j["subcommand"] = subcommand;
  j["argv"] = argv;
  j["config"] = nlohmann::json::parse(config_to_json(config));
  j["derived"] = {{"n_bar", derived.n_bar},
                  {"wavenumber_per_m", derived.wavenumber},
                  {"i0", derived.intensity_i0},
                  {"nu", derived.nu}};
  j["outputs"] = outputs;
  return j.dump(2);
}

RunManifest RunManifest::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  RunManifest m;
  m.tool_version = j.at("tool_version").get<std::string>();
  m.timestamp = j.at("timestamp").get<std::string>();
  m.subcommand = j.at("subcommand").get<std::string>();
  m.argv = j.at("argv").get<std::vector<std::string>>();
  m.config = parse_config_json(j.at("config").dump());
  m.derived = derive_params(m.config);
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  return m;
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("write_manifest: cannot open " + path);
  }
  out << manifest.to_json() << "\n";
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("load_manifest: cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return RunManifest::from_json(ss.str());
}

CsvWriter::CsvWriter(std::vector<std::string> header)
    : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

void CsvWriter::add_row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) {
    throw std::logic_error("CsvWriter: column count mismatch");
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) text_ += ',';
    text_ += fields[i];
  }
  text_ += '\n';
}

void CsvWriter::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("CsvWriter: cannot open " + path);
  }
  out << text_;
}

} // namespace qvcz
