#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace condmean::cli {

struct Empty {};
using Cell = std::variant<Empty, double, std::int64_t, std::uint64_t, bool, std::string>;

/// Rows of named columns; absent values are Empty (blank in CSV, null in JSON).
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  void add(std::vector<Cell> row);

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

struct Series {
  std::string name;  ///< file becomes plot_<name>.csv
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<double, double>> points;
};

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite.
std::string format_double(double v);
std::string format_cell(const Cell& c);
nlohmann::json cell_json(const Cell& c);

/// RFC-4180 field quoting.
std::string csv_field(const std::string& s);

struct OutputHeader {
  std::string command;
  std::uint64_t seed = 0;
  std::string config_hash;  ///< 16 hex digits
  std::string version;

  std::string comment() const;  ///< "condmean <version> command=... seed=... config=..."
};

std::string render_csv(const OutputHeader& h, const Table& t);
std::string render_json(const OutputHeader& h, const nlohmann::json& config,
                        const Table& t, const nlohmann::json& summary);
std::string render_plot_csv(const OutputHeader& h, const Series& s);
std::string render_svg(const OutputHeader& h, const Series& s);

/// FNV-1a, 64 bit.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace condmean::cli
