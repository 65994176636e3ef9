#pragma once

// Row-oriented result table and its CSV / JSON serializations.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bridgelab/lab/config.hpp"

namespace bridgelab::lab {

using Cell = std::variant<double, std::int64_t, std::string>;

class ExperimentRecord {
 public:
  explicit ExperimentRecord(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw std::invalid_argument("a record needs at least one column");
  }

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size())
      throw std::invalid_argument("row has " + std::to_string(row.size()) + " cells, expected " +
                                  std::to_string(columns_.size()));
    for (const auto& c : row)
      if (const double* d = std::get_if<double>(&c); d && !std::isfinite(*d))
        throw std::invalid_argument("non-finite value in record");
    rows_.push_back(std::move(row));
  }

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
      if (columns_[i] == name) return i;
    throw std::out_of_range("no column '" + name + "'");
  }

  double number(std::size_t row, const std::string& name) const {
    const auto& c = rows_.at(row).at(column(name));
    if (const double* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    throw std::invalid_argument("column '" + name + "' is not numeric");
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_csv(const ExperimentRecord& r) {
  std::string out;
  for (std::size_t i = 0; i < r.columns().size(); ++i) {
    if (i) out += ',';
    out += r.columns()[i];
  }
  out += '\n';
  for (const auto& row : r.rows()) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::visit(
          [&out](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) out += format_double(v);
            else if constexpr (std::is_same_v<T, std::int64_t>) out += std::to_string(v);
            else out += v;
          },
          row[i]);
    }
    out += '\n';
  }
  return out;
}

inline std::string to_json(const ExperimentRecord& r) {
  nlohmann::json j;
  j["columns"] = r.columns();
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows()) {
    auto jr = nlohmann::json::array();
    for (const auto& c : row) std::visit([&jr](const auto& v) { jr.push_back(v); }, c);
    j["rows"].push_back(std::move(jr));
  }
  return j.dump(2) + "\n";
}

inline std::string serialize(const ExperimentRecord& r, OutputFormat f) {
  return f == OutputFormat::csv ? to_csv(r) : to_json(r);
}

}  // namespace bridgelab::lab
