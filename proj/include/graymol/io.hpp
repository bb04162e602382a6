#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace graymol {

/// Deterministic shortest-round-trip double formatting (no locale effects).
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // trim to the shortest representation that round-trips
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[32];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

struct CsvColumn {
  std::string name;
  const std::vector<double>* data;
};

inline void write_csv(const std::filesystem::path& path,
                      const std::vector<CsvColumn>& columns) {
  if (columns.empty()) throw std::invalid_argument("no columns");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  for (std::size_t c = 0; c < columns.size(); ++c)
    out << (c ? "," : "") << columns[c].name;
  out << "\n";
  const std::size_t rows = columns[0].data->size();
  for (const auto& c : columns)
    if (c.data->size() != rows)
      throw std::invalid_argument("column length mismatch");
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << (c ? "," : "") << format_double((*columns[c].data)[r]);
    out << "\n";
  }
}

/// Reads a two-column CSV (optional header, comment lines starting with #).
inline void read_two_column_csv(const std::filesystem::path& path,
                                std::vector<double>& col1,
                                std::vector<double>& col2) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open input file: " + path.string());
  col1.clear();
  col2.clear();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double a, b;
    if (ss >> a >> b) {
      col1.push_back(a);
      col2.push_back(b);
    }
    // non-numeric rows (headers) are skipped
  }
}

/// Reads a frames manifest: rows of (time_s, path), path relative to the
/// manifest's directory unless absolute.
struct FrameEntry {
  double time_s;
  std::filesystem::path path;
};

inline std::vector<FrameEntry> read_frames_manifest(
    const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in)
    throw std::runtime_error("cannot open input file: " +
                             manifest_path.string());
  std::vector<FrameEntry> frames;
  const auto base = manifest_path.parent_path();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    const std::string first = line.substr(0, comma);
    std::string second = line.substr(comma + 1);
    char* end = nullptr;
    const double t = std::strtod(first.c_str(), &end);
    if (end == first.c_str()) continue;  // header row
    while (!second.empty() && (second.back() == '\r' || second.back() == ' '))
      second.pop_back();
    while (!second.empty() && second.front() == ' ') second.erase(0, 1);
    std::filesystem::path p(second);
    frames.push_back({t, p.is_absolute() ? p : base / p});
  }
  return frames;
}

}  // namespace graymol
