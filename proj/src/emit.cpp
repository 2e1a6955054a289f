#include "sboi/errors.hpp"
#include "sboi/scan.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace sboi::scan {

namespace {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string json_number(double x) {
  return std::isfinite(x) ? format_number(x) : "\"" + format_number(x) + "\"";
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw ConfigError("format: expected \"csv\" or \"json\", got \"" + std::string(name) + "\"");
}

std::string render(const ResultTable& table, Format format) {
  std::string out;
  if (format == Format::csv) {
    out += "# tool_version: " + table.tool_version + "\n";
    out += "# scenario: " + table.scenario.dump() + "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) out += ',';
      out += table.columns[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += ',';
        out += format_number(row[c]);
      }
      out += '\n';
    }
    return out;
  }
  // Rows are written by hand so every value keeps 17 significant digits.
  out += "{\n  \"tool_version\": " + nlohmann::json(table.tool_version).dump() + ",\n";
  out += "  \"scenario\": " + table.scenario.dump() + ",\n";
  out += "  \"columns\": " + nlohmann::json(table.columns).dump() + ",\n";
  out += "  \"rows\": [";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out += r ? ",\n    [" : "\n    [";
    for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
      if (c) out += ", ";
      out += json_number(table.rows[r][c]);
    }
    out += ']';
  }
  out += table.rows.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

void emit(const ResultTable& table, Format format, const std::filesystem::path& path) {
  const std::string text = render(table, format);
  if (path == "-") {
    std::cout << text << std::flush;
    if (!std::cout) throw IoError("failed writing to standard output");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace sboi::scan
