#include "nbcpp/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace nbcpp::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t config_hash(const nlohmann::json& resolved) {
  return fnv1a(resolved.dump());
}

OutputDir::OutputDir(const std::filesystem::path& path) : path_(path) {
  std::filesystem::create_directories(path_);
  std::ofstream marker(path_ / "INCOMPLETE");
  if (!marker) throw std::runtime_error("cannot write to " + path_.string());
  marker << "run in progress or aborted\n";
}

void OutputDir::write_config(nlohmann::json resolved,
                             std::uint64_t config_hash_value) {
  resolved["config_hash"] =
      "0x" + [&] {
        char b[20];
        std::snprintf(b, sizeof(b), "%016llx",
                      static_cast<unsigned long long>(config_hash_value));
        return std::string(b);
      }();
  write_json("resolved_config.json", resolved);
}

void OutputDir::write_text(const std::string& name,
                           const std::string& content) const {
  std::ofstream f(path_ / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + name);
  f << content;
}

void OutputDir::write_json(const std::string& name,
                           const nlohmann::json& j) const {
  write_text(name, j.dump(2) + "\n");
}

void OutputDir::finalize() {
  std::filesystem::remove(path_ / "INCOMPLETE");
  finalized_ = true;
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) buf += ',';
    buf += header[i];
  }
  buf += '\n';
}

void CsvWriter::field(const std::string& s) {
  if (!first_) buf += ',';
  buf += s;
  first_ = false;
}
void CsvWriter::field(double v) { field(format_double(v)); }
void CsvWriter::field(std::int64_t v) { field(std::to_string(v)); }
void CsvWriter::end_row() {
  buf += '\n';
  first_ = true;
}

}  // namespace nbcpp::io
