#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace lod {

/// Locale-independent decimal rendering with 12 significant digits.
std::string format_number(double value);

/// Shortest decimal string that parses back to the same double.
std::string format_exact(double value);

/// Parses a double in the "C" locale; throws std::invalid_argument on junk.
double parse_number(std::string_view text);

/// Minimal CSV emitter: one header row, then rows of cells.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header);

  CsvWriter& cell(double value);
  CsvWriter& cell(long long value);
  CsvWriter& cell(std::string_view text);
  void end_row();

 private:
  std::ostream& out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

}  // namespace lod
