#pragma once

/// @file report.hpp
/// @brief Run reports (stable-order JSON), RFC 4180 CSV series and file output.

#include "collar/analysis.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace collar {

inline constexpr const char* kVersion = "0.1.0";

/// Raised for filesystem failures (exit code 3 at the CLI).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

struct RunReport {
  std::string command;
  std::string config_echo;
  std::vector<CertificateRecord> checks;
  Json details = Json::object();
  std::vector<std::string> series_files;
  std::vector<std::string> warnings;

  bool pass() const;
  void add(CertificateRecord r) { checks.push_back(std::move(r)); }
};

/// Deterministic report body. Wall-clock time is kept out of it on purpose.
Json report_to_json(const RunReport& report);
std::string report_text(const RunReport& report);

Json record_to_json(const CertificateRecord& r);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> row);
  void add_row(const std::vector<double>& row);
  std::string str() const;

  static std::string quote(const std::string& field);
  /// Shortest representation that reads back to the same double.
  static std::string number(double v);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Creates parent directories as needed. Throws IoError.
void write_file(const std::string& path, const std::string& content);

}  // namespace collar
