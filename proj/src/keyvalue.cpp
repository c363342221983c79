#include "gaitpipe/keyvalue.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "gaitpipe/error.hpp"

namespace gaitpipe {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::optional<double> parse_double(std::string_view token) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end || token.empty()) return std::nullopt;
  return v;
}

KeyValueDoc KeyValueDoc::parse(std::istream& in, const std::string& origin) {
  KeyValueDoc doc;
  doc.origin_ = origin;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string t = trim(line);
    if (t.empty() || t.front() == '[') continue;
    auto sep = t.find_first_of("=:");
    std::string key;
    std::string value;
    if (sep != std::string::npos) {
      key = trim(std::string_view(t).substr(0, sep));
      value = trim(std::string_view(t).substr(sep + 1));
    } else {
      auto ws = t.find_first_of(" \t");
      if (ws == std::string::npos) {
        throw Error(ErrorCode::FormatError, origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
      }
      key = t.substr(0, ws);
      value = trim(std::string_view(t).substr(ws));
    }
    if (key.empty()) throw Error(ErrorCode::FormatError, origin + ":" + std::to_string(lineno) + ": empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    doc.values_[key] = value;
  }
  return doc;
}

KeyValueDoc KeyValueDoc::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return parse(in, path.string());
}

std::optional<std::string> KeyValueDoc::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> KeyValueDoc::get_double(const std::string& key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  auto d = parse_double(*v);
  if (!d) throw Error(ErrorCode::FormatError, origin_ + ": key '" + key + "' is not a number");
  return d;
}

std::optional<long long> KeyValueDoc::get_int(const std::string& key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    throw Error(ErrorCode::FormatError, origin_ + ": key '" + key + "' is not an integer");
  }
  return out;
}

std::optional<bool> KeyValueDoc::get_bool(const std::string& key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw Error(ErrorCode::FormatError, origin_ + ": key '" + key + "' is not a boolean");
}

std::optional<std::vector<double>> KeyValueDoc::get_doubles(const std::string& key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  std::string s = *v;
  for (char& c : s) {
    if (c == ',' || c == '[' || c == ']') c = ' ';
  }
  std::istringstream ss(s);
  std::vector<double> out;
  std::string tok;
  while (ss >> tok) {
    auto d = parse_double(tok);
    if (!d) throw Error(ErrorCode::FormatError, origin_ + ": key '" + key + "' has non-numeric entry '" + tok + "'");
    out.push_back(*d);
  }
  return out;
}

}  // namespace gaitpipe
