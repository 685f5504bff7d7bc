#include "obstacle/csv.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace obstacle {

std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void CsvWriter::provenance(const Provenance& p) {
  comment("scenario=" + p.scenario + " hash=" + p.scenario_hash + " seed=" + std::to_string(p.seed));
  if (!p.units.empty()) comment("units: " + p.units);
}

void CsvWriter::comment(const std::string& line) { os_ << "# " << line << '\n'; }

void CsvWriter::header(const std::vector<std::string>& columns) { cells(columns); }

void CsvWriter::row(std::initializer_list<double> values) {
  row(std::vector<double>(values));
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os_ << ',';
    os_ << format_number(values[i]);
  }
  os_ << '\n';
}

void CsvWriter::cells(const std::vector<std::string>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os_ << ',';
    os_ << values[i];
  }
  os_ << '\n';
}

}  // namespace obstacle
