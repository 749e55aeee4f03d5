#include "horoflow/cli/table.hpp"

#include <cmath>
#include <cstdio>

#include "horoflow/errors.hpp"

namespace horoflow::cli {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

template <class Format>
std::string render(const Cell& cell, Format&& text) {
  return std::visit(
      [&](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, std::string>) return text(v);
        else if constexpr (std::is_same_v<V, double>) return format_double(v);
        else return std::to_string(v);
      },
      cell);
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) throw InputError("Table: row width does not match the header");
  rows_.push_back(std::move(row));
}

void Table::write_csv(std::ostream& out) const {
  for (std::size_t j = 0; j < columns_.size(); ++j) out << (j ? "," : "") << csv_field(columns_[j]);
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << render(row[j], csv_field);
    out << '\n';
  }
}

void Table::write_jsonl(std::ostream& out) const {
  for (const auto& row : rows_) {
    out << '{';
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::string value;
      if (const double* d = std::get_if<double>(&row[j]); d && !std::isfinite(*d)) value = "null";
      else value = render(row[j], json_string);
      out << (j ? "," : "") << json_string(columns_[j]) << ':' << value;
    }
    out << "}\n";
  }
}

}  // namespace horoflow::cli
