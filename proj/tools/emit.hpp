#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace secbeam::cli {

using cell = std::variant<double, long long, std::string>;

/// Column-ordered result table.
struct result_table {
  std::vector<std::string> columns;
  std::vector<std::vector<cell>> rows;

  void add(std::vector<cell> row) { rows.push_back(std::move(row)); }
};

enum class output_format { csv, json };

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string cell_text(const cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

inline void write_csv(std::ostream& out, const result_table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
    out << '\n';
  }
}

/// JSON array of objects.  Doubles carry the same 9-digit value as the CSV.
inline void write_json(std::ostream& out, const result_table& t) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) {
      const auto& c = row[i];
      if (const auto* d = std::get_if<double>(&c)) obj[t.columns[i]] = std::stod(format_double(*d));
      else if (const auto* n = std::get_if<long long>(&c)) obj[t.columns[i]] = *n;
      else obj[t.columns[i]] = std::get<std::string>(c);
    }
    arr.push_back(std::move(obj));
  }
  out << arr.dump(2) << '\n';
}

inline void emit(std::ostream& out, const result_table& t, output_format f) {
  if (f == output_format::json) write_json(out, t);
  else write_csv(out, t);
}

}  // namespace secbeam::cli
