// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace bpddp {

/// Two-column dataset (series_id, value) with `#`-prefixed metadata lines.
struct SeriesCsv {
  std::vector<std::pair<std::string, std::string>> meta;
  std::array<std::vector<double>, 2> series;

  void write(const std::filesystem::path& path) const;
  static SeriesCsv read(const std::filesystem::path& path);
};

/// Three-column dataset (date, series1, series2); dates kept verbatim.
struct PairedSeriesCsv {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> dates;
  std::array<std::vector<double>, 2> series;

  void write(const std::filesystem::path& path) const;
  static PairedSeriesCsv read(const std::filesystem::path& path);
};

}  // namespace bpddp
