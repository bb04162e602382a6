#pragma once

#include <json.hpp>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace graymol {

#ifndef GRAYMOL_VERSION
#define GRAYMOL_VERSION "0.0.0"
#endif

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot checksum " + path.string());
  char buf[1 << 16];
  std::uint64_t h = 0xcbf29ce484222325ULL;
  while (in) {
    in.read(buf, sizeof(buf));
    h = fnv1a64(buf, std::size_t(in.gcount()), h);
  }
  char hex[20];
  std::snprintf(hex, sizeof(hex), "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return hex;
}

/// Run provenance record: written (without checksums) before the run starts
/// and finalized with output checksums and the end timestamp afterwards.
class RunManifest {
 public:
  RunManifest(std::filesystem::path dir, nlohmann::ordered_json config_snapshot,
              std::uint64_t seed)
      : path_(std::move(dir)) {
    std::filesystem::create_directories(path_);
    path_ /= "manifest.json";
    doc_["code_version"] = GRAYMOL_VERSION;
    doc_["config"] = std::move(config_snapshot);
    doc_["seed"] = seed;
    doc_["started_utc"] = now_iso();
    doc_["finished_utc"] = nullptr;
    doc_["outputs"] = nlohmann::ordered_json::object();
    write();
  }

  /// Registers an emitted file; checksums are computed at finalize time.
  void add_output(const std::filesystem::path& file) {
    outputs_.push_back(file);
  }

  void finalize() {
    for (const auto& f : outputs_)
      doc_["outputs"][f.filename().string()] = file_checksum(f);
    doc_["finished_utc"] = now_iso();
    write();
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  static std::string now_iso() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }

  void write() const {
    std::ofstream out(path_, std::ios::binary);
    out << doc_.dump(2) << "\n";
  }

  std::filesystem::path path_;
  nlohmann::ordered_json doc_;
  std::vector<std::filesystem::path> outputs_;
};

}  // namespace graymol
