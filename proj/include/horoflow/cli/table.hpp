#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace horoflow::cli {

using Cell = std::variant<std::int64_t, std::uint64_t, double, std::string>;

// Column-named rows written as CSV (17 significant digits, '.' decimal, LF)
// or as JSON lines with the same fields and the same digits.
class Table {
 public:
  explicit Table(std::vector<std::string> columns = {}) : columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  void add_row(std::vector<Cell> row);

  void write_csv(std::ostream& out) const;
  void write_jsonl(std::ostream& out) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

// printf("%.17g") with the C locale's '.'; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double x);

}  // namespace horoflow::cli
