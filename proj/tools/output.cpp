#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "glcorner/error.hpp"
#include "glcorner/version.hpp"

namespace glc::cli {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(long long v) { return std::to_string(v); }

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Artifacts::Artifacts(std::string subcommand, std::string config_text, std::filesystem::path dir)
    : subcommand_(std::move(subcommand)), dir_(std::move(dir)) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config_text)));
  hash_ = buf;
}

void Artifacts::csv(const std::string& name, const Table& table) {
  std::ostringstream out;
  out << "# subcommand: " << subcommand_ << "\n"
      << "# config-hash: " << hash_ << "\n"
      << "# version: " << kVersion << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  files_.emplace_back(name, out.str());
}

void Artifacts::json(const std::string& name, nlohmann::ordered_json doc) {
  nlohmann::ordered_json j;
  j["subcommand"] = subcommand_;
  j["config_hash"] = hash_;
  j["version"] = kVersion;
  for (auto it = doc.begin(); it != doc.end(); ++it) j[it.key()] = it.value();
  files_.emplace_back(name, j.dump(2) + "\n");
}

void Artifacts::text(const std::string& name, const std::string& content) {
  files_.emplace_back(name, content);
}

std::vector<std::filesystem::path> Artifacts::commit() const {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  require(!ec, ErrorKind::kInvalidParameter, "cannot create output directory " + dir_.string());
  std::vector<std::filesystem::path> written;
  for (const auto& [name, content] : files_) {
    const auto path = dir_ / name;
    const auto tmp = dir_ / (name + ".tmp");
    {
      std::ofstream f(tmp, std::ios::binary);
      f << content;
      require(static_cast<bool>(f), ErrorKind::kInvalidParameter, "cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    require(!ec, ErrorKind::kInvalidParameter, "cannot rename into " + path.string());
    written.push_back(path);
  }
  return written;
}

}  // namespace glc::cli
