#include "data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>

#include <fmt/format.h>

#include "errors.hpp"

namespace gevreg {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  for (;;) {
    const auto comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool parse_real(std::string_view cell, double& out) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc{} && ptr == cell.data() + cell.size() && std::isfinite(out);
}

}  // namespace

void validate_column_spec(const ColumnSpec& spec) {
  if (spec.response.empty()) throw Error(ErrorKind::Schema, "no response column given");
  std::set<std::string> names{spec.response};
  for (const auto& p : spec.predictors) {
    if (p == spec.response) {
      throw Error(ErrorKind::Schema, fmt::format("column '{}' is both response and predictor", p));
    }
    if (!names.insert(p).second) throw Error(ErrorKind::Schema, fmt::format("predictor '{}' listed twice", p));
  }
  if (spec.intercept && names.count(kInterceptName)) {
    throw Error(ErrorKind::Schema, fmt::format("column name '{}' is reserved for the intercept", kInterceptName));
  }
  if (!spec.intercept && spec.predictors.empty()) {
    throw Error(ErrorKind::Schema, "model without intercept needs at least one predictor");
  }
}

Dataset parse_csv(const std::string& text, const ColumnSpec& spec) {
  validate_column_spec(spec);
  std::string_view body = text;
  if (body.substr(0, 3) == "\xEF\xBB\xBF") body.remove_prefix(3);
  const auto lines = split_lines(body);
  if (lines.empty()) throw Error(ErrorKind::Schema, "empty file: no header row");

  const auto header = split_fields(lines[0]);
  auto locate = [&](const std::string& name) {
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (trim(header[k]) == name) return k;
    }
    throw Error(ErrorKind::Schema, fmt::format("missing column '{}'", name));
  };
  const std::size_t response_col = locate(spec.response);
  std::vector<std::size_t> predictor_cols;
  for (const auto& p : spec.predictors) predictor_cols.push_back(locate(p));

  std::vector<double> y;
  std::vector<std::vector<double>> columns(spec.predictors.size());
  for (std::size_t line_no = 1; line_no < lines.size(); ++line_no) {
    const std::size_t row = line_no;  // 1-based data row
    const auto fields = split_fields(lines[line_no]);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::Parse, fmt::format("row {} (line {}): expected {} fields, found {}", row,
                                                line_no + 1, header.size(), fields.size()));
    }
    const auto response_cell = trim(fields[response_col]);
    double value = 0.0;
    if (!parse_real(response_cell, value) || (value != 0.0 && value != 1.0)) {
      throw Error(ErrorKind::Parse, fmt::format("row {} (line {}): response '{}' is '{}', expected 0 or 1", row,
                                                line_no + 1, spec.response, response_cell));
    }
    y.push_back(value);
    for (std::size_t k = 0; k < predictor_cols.size(); ++k) {
      const auto cell = trim(fields[predictor_cols[k]]);
      if (cell.empty()) {
        throw Error(ErrorKind::Parse, fmt::format("row {} (line {}), column '{}': empty cell", row, line_no + 1,
                                                  spec.predictors[k]));
      }
      if (!parse_real(cell, value)) {
        throw Error(ErrorKind::Parse, fmt::format("row {} (line {}), column '{}': '{}' is not a finite number",
                                                  row, line_no + 1, spec.predictors[k], cell));
      }
      columns[k].push_back(value);
    }
  }
  if (y.empty()) throw Error(ErrorKind::Schema, "file has a header but no data rows");
  return make_dataset(std::move(y), columns, spec.predictors, spec.intercept, spec.response);
}

Dataset read_csv(const std::string& path, const ColumnSpec& spec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open '{}'", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), spec);
}

void write_csv(std::ostream& out, const Dataset& data) {
  const Eigen::Index first = data.has_intercept ? 1 : 0;
  out << data.response_name;
  for (Eigen::Index j = first; j < data.cols(); ++j) out << ',' << data.column_names[static_cast<std::size_t>(j)];
  out << '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    out << (data.y[i] == 1.0 ? '1' : '0');
    for (Eigen::Index j = first; j < data.cols(); ++j) out << ',' << fmt::format("{:.17g}", data.X(i, j));
    out << '\n';
  }
}

std::string to_csv(const Dataset& data) {
  std::ostringstream out;
  write_csv(out, data);
  return out.str();
}

ColumnSpec column_spec_of(const Dataset& data) {
  ColumnSpec spec;
  spec.response = data.response_name;
  spec.intercept = data.has_intercept;
  for (std::size_t j = data.has_intercept ? 1 : 0; j < data.column_names.size(); ++j) {
    spec.predictors.push_back(data.column_names[j]);
  }
  return spec;
}

}  // namespace gevreg
