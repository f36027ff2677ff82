#pragma once

#include <filesystem>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace rydsim {

using nlohmann::json;

// Bad or missing configuration; the message starts with the key path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what) {}
};

// A view on one object of the run configuration. Reads fill in defaults, so
// after a command has parsed its options the document is the fully resolved
// configuration. Every key read is recorded; leftovers are reported as unknown.
class Node {
 public:
  Node(json* value, std::string path, std::shared_ptr<std::set<std::string>> seen,
       std::filesystem::path base_dir);

  bool has(const std::string& key) const;
  Node child(const std::string& key);  // created empty when missing

  template <class T>
  T get(const std::string& key, const T& fallback) {
    json& v = slot(key);
    if (v.is_null()) v = fallback;
    return as<T>(key, v);
  }

  template <class T>
  T require(const std::string& key) {
    if (!has(key)) throw ConfigError(path_of(key), "required key is missing");
    return as<T>(key, slot(key));
  }

  // Angular frequency in rad/us from `key_mhz` (times 2 pi) or `key_khz`.
  double frequency(const std::string& key, double fallback_rad);
  std::vector<double> frequencies(const std::string& key, const std::vector<double>& fallback_rad);

  // Existing file, resolved against the config file's directory and written
  // back as an absolute path so the snapshot does not depend on the cwd.
  std::filesystem::path file(const std::string& key);

  // One of `choices`.
  std::string choice(const std::string& key, const std::string& fallback, const std::vector<std::string>& choices);

  const std::string& path() const { return path_; }
  std::string path_of(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  json& slot(const std::string& key);

  template <class T>
  T as(const std::string& key, const json& v) const {
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_of(key), "unexpected value " + v.dump());
    }
  }

  json* value_;
  std::string path_;
  std::shared_ptr<std::set<std::string>> seen_;
  std::filesystem::path base_dir_;
};

// The whole document plus bookkeeping.
class Config {
 public:
  // Empty path means an empty configuration (every key at its default).
  static Config load(const std::string& path);

  Node root();
  // Throws ConfigError naming the first key no command has read.
  void check_unused() const;
  const json& document() const { return doc_; }
  json& document() { return doc_; }

 private:
  json doc_ = json::object();
  std::shared_ptr<std::set<std::string>> seen_ = std::make_shared<std::set<std::string>>();
  std::filesystem::path base_dir_ = ".";
};

}  // namespace rydsim
