#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace glc::cli {

/// Fixed 17-significant-digit rendering, so equal doubles print equal text.
std::string num(double v);
std::string num(long long v);
inline std::string num(int v) { return num(static_cast<long long>(v)); }
inline std::string num(std::size_t v) { return num(static_cast<long long>(v)); }
inline std::string flag(bool b) { return b ? "1" : "0"; }

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

std::uint64_t fnv1a(const std::string& text);

/// Collects every artifact of one invocation and writes them together at the
/// end, so a failed run leaves no partial files.
class Artifacts {
 public:
  Artifacts(std::string subcommand, std::string config_text, std::filesystem::path dir);

  const std::string& hash() const { return hash_; }
  void csv(const std::string& name, const Table& table);
  void json(const std::string& name, nlohmann::ordered_json doc);
  void text(const std::string& name, const std::string& content);
  /// Writes each file through a temporary name and renames it into place.
  std::vector<std::filesystem::path> commit() const;

 private:
  std::string subcommand_;
  std::string hash_;
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

}  // namespace glc::cli
