#pragma once

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cpsphere::cli {

inline constexpr std::string_view kCsvMagic = "# cp-sphere v1";

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// %.16e, i.e. 17 significant digits: enough for an exact round trip.
inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

/// `# cp-sphere v1 columns=a,b,c` followed by one line per row.
inline void write_csv(std::ostream &out, const Table &table) {
  out << kCsvMagic << " columns=";
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto &row : table.rows) {
    if (row.size() != table.columns.size())
      throw std::logic_error("CSV row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

inline void emit_csv(const Table &table, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open '" + path + "' for writing: " +
                             std::strerror(errno));
  write_csv(out, table);
  out.flush();
  if (!out)
    throw std::runtime_error("write to '" + path + "' failed: " + std::strerror(errno));
}

namespace detail {

inline std::vector<std::string> split_commas(const std::string &line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ','))
    out.push_back(field);
  return out;
}

} // namespace detail

inline Table read_csv(std::istream &in) {
  std::string header;
  if (!std::getline(in, header) || header.rfind(kCsvMagic, 0) != 0)
    throw std::runtime_error("not a cp-sphere v1 CSV file");
  const std::string tag = " columns=";
  const auto pos = header.find(tag, kCsvMagic.size());
  if (pos == std::string::npos)
    throw std::runtime_error("CSV header lacks a column list");
  Table table;
  table.columns = detail::split_commas(header.substr(pos + tag.size()));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    const auto fields = detail::split_commas(line);
    if (fields.size() != table.columns.size())
      throw std::runtime_error("CSV row has " + std::to_string(fields.size()) +
                               " fields, expected " +
                               std::to_string(table.columns.size()));
    std::vector<double> row;
    for (const auto &f : fields) {
      char *end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (end == f.c_str() || *end != '\0')
        throw std::runtime_error("bad CSV number '" + f + "'");
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

} // namespace cpsphere::cli
