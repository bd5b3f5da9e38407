#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dataset.hpp"

namespace gevreg {

struct ColumnSpec {
  std::string response;
  std::vector<std::string> predictors;
  bool intercept = true;
};

void validate_column_spec(const ColumnSpec& spec);

/// Comma-delimited text with a header row; LF or CRLF line endings.
[[nodiscard]] Dataset parse_csv(const std::string& text, const ColumnSpec& spec);
[[nodiscard]] Dataset read_csv(const std::string& path, const ColumnSpec& spec);

/// Writes the response followed by every non-intercept column, LF endings,
/// reals with 17 significant digits.
void write_csv(std::ostream& out, const Dataset& data);
[[nodiscard]] std::string to_csv(const Dataset& data);

/// Column spec that reads back what write_csv produced.
[[nodiscard]] ColumnSpec column_spec_of(const Dataset& data);

}  // namespace gevreg
