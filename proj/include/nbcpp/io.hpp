#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace nbcpp::io {

// round-trip-exact decimal form of a double, stable across runs
std::string format_double(double v);

std::uint64_t fnv1a(const std::string& s);

// Output directory contract: an INCOMPLETE marker exists while a run is in
// flight and is removed by finalize(); the resolved configuration (plus
// version and config hash) is echoed next to the payloads.
class OutputDir {
 public:
  explicit OutputDir(const std::filesystem::path& path);
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const {
    return path_ / name;
  }
  void write_config(nlohmann::json resolved, std::uint64_t config_hash);
  void write_text(const std::string& name, const std::string& content) const;
  void write_json(const std::string& name, const nlohmann::json& j) const;
  void finalize();  // removes the INCOMPLETE marker
  bool finalized() const { return finalized_; }

 private:
  std::filesystem::path path_;
  bool finalized_ = false;
};

// canonical string for hashing a resolved config (sorted keys via nlohmann)
std::uint64_t config_hash(const nlohmann::json& resolved);

struct CsvWriter {
  std::string buf;
  explicit CsvWriter(const std::vector<std::string>& header);
  void field(const std::string& s);
  void field(double v);
  void field(std::int64_t v);
  void end_row();

 private:
  bool first_ = true;
};

}  // namespace nbcpp::io
