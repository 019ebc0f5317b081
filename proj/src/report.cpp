#include "collar/report.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

namespace collar {

bool RunReport::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

Json record_to_json(const CertificateRecord& r) {
  Json j;
  j["name"] = r.name;
  j["value"] = r.value;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  return j;
}

Json report_to_json(const RunReport& report) {
  Json j;
  j["version"] = std::string("collar ") + kVersion;
  j["command"] = report.command;
  j["pass"] = report.pass();
  j["config"] = report.config_echo;
  Json checks = Json::array();
  for (const auto& c : report.checks) checks.push_back(record_to_json(c));
  j["checks"] = checks;
  j["details"] = report.details;
  j["series"] = report.series_files;
  j["warnings"] = report.warnings;
  return j;
}

std::string report_text(const RunReport& report) { return report_to_json(report).dump(2) + "\n"; }

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw std::invalid_argument("csv row width differs from header");
  rows_.push_back(std::move(row));
}

void CsvTable::add_row(const std::vector<double>& row) {
  std::vector<std::string> cells;
  cells.reserve(row.size());
  for (double v : row) cells.push_back(number(v));
  add_row(std::move(cells));
}

std::string CsvTable::quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string CsvTable::number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += quote(cells[i]);
    }
    out += "\r\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const fs::path p(path);
  if (p.has_parent_path()) {
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + p.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace collar
