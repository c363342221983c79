#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gaitpipe {

/// Flat `key = value` document. '#' starts a comment; `key: value` is also
/// accepted. Later keys overwrite earlier ones.
class KeyValueDoc {
public:
  static KeyValueDoc parse(std::istream& in, const std::string& origin = "<stream>");
  static KeyValueDoc load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<long long> get_int(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;
  /// Whitespace- or comma-separated numbers.
  std::optional<std::vector<double>> get_doubles(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

/// Strict double parse of the whole token; nullopt on trailing junk.
std::optional<double> parse_double(std::string_view token);

}  // namespace gaitpipe
