#include "condmean/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace condmean::cli {

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns_.size())
    throw std::logic_error("table row has the wrong number of cells");
  rows_.push_back(std::move(row));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

struct CellText {
  std::string operator()(Empty) const { return {}; }
  std::string operator()(double v) const { return format_double(v); }
  std::string operator()(std::int64_t v) const { return std::to_string(v); }
  std::string operator()(std::uint64_t v) const { return std::to_string(v); }
  std::string operator()(bool v) const { return v ? "true" : "false"; }
  std::string operator()(const std::string& v) const { return v; }
};

struct CellJson {
  nlohmann::json operator()(Empty) const { return nullptr; }
  nlohmann::json operator()(double v) const {
    if (std::isfinite(v)) return v;
    return format_double(v);
  }
  nlohmann::json operator()(std::int64_t v) const { return v; }
  nlohmann::json operator()(std::uint64_t v) const { return v; }
  nlohmann::json operator()(bool v) const { return v; }
  nlohmann::json operator()(const std::string& v) const { return v; }
};

}  // namespace

std::string format_cell(const Cell& c) { return std::visit(CellText{}, c); }
nlohmann::json cell_json(const Cell& c) { return std::visit(CellJson{}, c); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string OutputHeader::comment() const {
  return "condmean " + version + " command=" + command + " seed=" + std::to_string(seed) +
         " config=" + config_hash;
}

namespace {

std::string csv_row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_field(fields[i]);
  }
  line += "\r\n";
  return line;
}

}  // namespace

std::string render_csv(const OutputHeader& h, const Table& t) {
  std::string out = "# " + h.comment() + "\r\n";
  out += csv_row(t.columns());
  for (const auto& row : t.rows()) {
    std::vector<std::string> fields;
    fields.reserve(row.size());
    for (const Cell& c : row) fields.push_back(format_cell(c));
    out += csv_row(fields);
  }
  return out;
}

std::string render_json(const OutputHeader& h, const nlohmann::json& config,
                        const Table& t, const nlohmann::json& summary) {
  nlohmann::json doc;
  doc["tool"] = "condmean";
  doc["version"] = h.version;
  doc["command"] = h.command;
  doc["seed"] = h.seed;
  doc["config_hash"] = h.config_hash;
  doc["config"] = config;
  doc["summary"] = summary;
  nlohmann::json records = nlohmann::json::array();
  for (const auto& row : t.rows()) {
    nlohmann::json rec = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) rec[t.columns()[i]] = cell_json(row[i]);
    records.push_back(std::move(rec));
  }
  doc["records"] = std::move(records);
  return doc.dump(2) + "\n";
}

std::string render_plot_csv(const OutputHeader& h, const Series& s) {
  std::string out = "# " + h.comment() + " series=" + s.name + "\r\n";
  out += csv_row({s.x_label, s.y_label});
  for (const auto& [x, y] : s.points) out += csv_row({format_double(x), format_double(y)});
  return out;
}

std::string render_svg(const OutputHeader& h, const Series& s) {
  constexpr double width = 640, height = 400, margin = 48;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& [x, y] : s.points) {
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  if (!(x1 > x0)) { x0 -= 0.5; x1 += 0.5; }
  if (!(y1 > y0)) { y0 -= 0.5; y1 += 0.5; }
  auto px = [&](double x) { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); };
  auto py = [&](double y) {
    return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin);
  };
  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!-- " + h.comment() +
                    " series=" + s.name + " -->\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\">\n";
  svg += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  svg += "<line x1=\"48\" y1=\"352\" x2=\"592\" y2=\"352\" stroke=\"black\"/>\n";
  svg += "<line x1=\"48\" y1=\"48\" x2=\"48\" y2=\"352\" stroke=\"black\"/>\n";
  svg += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  bool first = true;
  for (const auto& [x, y] : s.points) {
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    if (!first) svg += ' ';
    first = false;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f,%.2f", px(x), py(y));
    svg += buf;
  }
  svg += "\"/>\n";
  char label[256];
  std::snprintf(label, sizeof label,
                "<text x=\"48\" y=\"380\" font-size=\"12\">%s: %s .. %s</text>\n",
                s.x_label.c_str(), format_double(x0).c_str(), format_double(x1).c_str());
  svg += label;
  std::snprintf(label, sizeof label,
                "<text x=\"48\" y=\"32\" font-size=\"12\">%s: %s .. %s</text>\n",
                s.y_label.c_str(), format_double(y0).c_str(), format_double(y1).c_str());
  svg += label;
  svg += "</svg>\n";
  return svg;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace condmean::cli
