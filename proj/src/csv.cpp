// Apache License, Version 2.0, refer to LICENSE.txt

#include "bpddp/csv.hpp"

#include <fstream>
#include <sstream>

#include "bpddp/archive.hpp"
#include "bpddp/errors.hpp"

namespace bpddp {

namespace {

void write_meta(std::ofstream& out,
                const std::vector<std::pair<std::string, std::string>>& meta) {
  for (const auto& [k, v] : meta) out << "# " << k << " " << v << "\n";
}

bool read_meta_line(const std::string& line,
                    std::vector<std::pair<std::string, std::string>>& meta) {
  if (line.empty() || line[0] != '#') return false;
  std::istringstream ss(line.substr(1));
  std::string key;
  ss >> key;
  std::string value;
  std::getline(ss, value);
  if (!value.empty() && value.front() == ' ') value.erase(0, 1);
  if (!key.empty()) meta.emplace_back(key, value);
  return true;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_cell(const std::string& cell, const std::string& path, int line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw IoError(path + ":" + std::to_string(line_no) +
                  ": not a number: " + cell);
  }
}

}  // namespace

void SeriesCsv::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  write_meta(out, meta);
  out << "series_id,value\n";
  for (int i = 0; i < 2; ++i) {
    for (double v : series[i])
      out << (i + 1) << "," << format_double(v) << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

SeriesCsv SeriesCsv::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file: " + path.string());
  SeriesCsv csv;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (read_meta_line(line, csv.meta)) continue;
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "series_id,value")
        throw IoError(path.string() + ":" + std::to_string(line_no) +
                      ": expected header series_id,value");
      header_seen = true;
      continue;
    }
    const auto cells = split_csv(line);
    if (cells.size() != 2)
      throw IoError(path.string() + ":" + std::to_string(line_no) +
                    ": expected two columns");
    const double id = parse_cell(cells[0], path.string(), line_no);
    if (id != 1.0 && id != 2.0)
      throw IoError(path.string() + ":" + std::to_string(line_no) +
                    ": series_id must be 1 or 2");
    csv.series[static_cast<int>(id) - 1].push_back(
        parse_cell(cells[1], path.string(), line_no));
  }
  if (!header_seen)
    throw IoError(path.string() + ": missing header series_id,value");
  return csv;
}

void PairedSeriesCsv::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  write_meta(out, meta);
  out << "date,series1,series2\n";
  for (std::size_t t = 0; t < series[0].size(); ++t) {
    out << (t < dates.size() ? dates[t] : std::to_string(t)) << ","
        << format_double(series[0][t]) << "," << format_double(series[1][t])
        << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

PairedSeriesCsv PairedSeriesCsv::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file: " + path.string());
  PairedSeriesCsv csv;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (read_meta_line(line, csv.meta)) continue;
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "date,series1,series2")
        throw IoError(path.string() + ":" + std::to_string(line_no) +
                      ": expected header date,series1,series2");
      header_seen = true;
      continue;
    }
    const auto cells = split_csv(line);
    if (cells.size() != 3)
      throw IoError(path.string() + ":" + std::to_string(line_no) +
                    ": expected three columns");
    csv.dates.push_back(cells[0]);
    csv.series[0].push_back(parse_cell(cells[1], path.string(), line_no));
    csv.series[1].push_back(parse_cell(cells[2], path.string(), line_no));
  }
  if (!header_seen)
    throw IoError(path.string() + ": missing header date,series1,series2");
  return csv;
}

}  // namespace bpddp
