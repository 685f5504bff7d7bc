#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

namespace obstacle {

/// Where a table came from; written as leading comment lines.
struct Provenance {
  std::string scenario;
  std::string scenario_hash;
  std::uint64_t seed = 0;
  std::string units;
};

/// Minimal CSV emitter. Numbers use 17 significant digits so that tables
/// round-trip exactly.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void provenance(const Provenance& p);
  void comment(const std::string& line);
  void header(const std::vector<std::string>& columns);
  void row(std::initializer_list<double> values);
  void row(const std::vector<double>& values);
  /// Row of preformatted cells.
  void cells(const std::vector<std::string>& values);

 private:
  std::ostream& os_;
};

std::string format_number(double v);

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace obstacle
