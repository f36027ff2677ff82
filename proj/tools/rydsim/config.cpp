#include "config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace rydsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void find_unused(const json& v, const std::string& path, const std::set<std::string>& seen) {
  if (!v.is_object()) return;
  for (const auto& [key, child] : v.items()) {
    const std::string p = path.empty() ? key : path + "." + key;
    if (!seen.count(p)) throw ConfigError(p, "unknown key");
    find_unused(child, p, seen);
  }
}

}  // namespace

Node::Node(json* value, std::string path, std::shared_ptr<std::set<std::string>> seen, std::filesystem::path base_dir)
    : value_(value), path_(std::move(path)), seen_(std::move(seen)), base_dir_(std::move(base_dir)) {
  if (!value_->is_object()) throw ConfigError(path_, "expected an object, got " + value_->dump());
}

bool Node::has(const std::string& key) const {
  seen_->insert(path_of(key));
  return value_->contains(key) && !(*value_)[key].is_null();
}

json& Node::slot(const std::string& key) {
  seen_->insert(path_of(key));
  return (*value_)[key];
}

Node Node::child(const std::string& key) {
  json& v = slot(key);
  if (v.is_null()) v = json::object();
  return Node(&v, path_of(key), seen_, base_dir_);
}

double Node::frequency(const std::string& key, double fallback_rad) {
  const bool in_mhz = has(key + "_mhz");
  const bool in_khz = has(key + "_khz");
  if (in_mhz && in_khz) throw ConfigError(path_of(key + "_mhz"), "also given as " + key + "_khz");
  if (in_khz) return kTwoPi * 1e-3 * get<double>(key + "_khz", 0.0);
  return kTwoPi * get<double>(key + "_mhz", fallback_rad / kTwoPi);
}

std::vector<double> Node::frequencies(const std::string& key, const std::vector<double>& fallback_rad) {
  const bool in_mhz = has(key + "_mhz");
  const bool in_khz = has(key + "_khz");
  if (in_mhz && in_khz) throw ConfigError(path_of(key + "_mhz"), "also given as " + key + "_khz");
  std::vector<double> out;
  if (in_khz) {
    out = get<std::vector<double>>(key + "_khz", {});
    for (double& x : out) x *= kTwoPi * 1e-3;
    return out;
  }
  std::vector<double> fb;
  for (double x : fallback_rad) fb.push_back(x / kTwoPi);
  out = get<std::vector<double>>(key + "_mhz", fb);
  for (double& x : out) x *= kTwoPi;
  return out;
}

std::filesystem::path Node::file(const std::string& key) {
  std::filesystem::path p = require<std::string>(key);
  if (p.is_relative()) p = base_dir_ / p;
  std::error_code ec;
  if (!std::filesystem::is_regular_file(p, ec)) throw ConfigError(path_of(key), "cannot open '" + p.string() + "'");
  p = std::filesystem::weakly_canonical(p, ec);
  (*value_)[key] = p.string();
  return p;
}

std::string Node::choice(const std::string& key, const std::string& fallback, const std::vector<std::string>& choices) {
  const std::string v = get<std::string>(key, fallback);
  for (const auto& c : choices)
    if (v == c) return v;
  std::string list;
  for (const auto& c : choices) list += (list.empty() ? "" : ", ") + c;
  throw ConfigError(path_of(key), "'" + v + "' is not one of " + list);
}

Config Config::load(const std::string& path) {
  Config c;
  if (path.empty()) return c;
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  try {
    c.doc_ = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("parse error: ") + e.what());
  }
  if (!c.doc_.is_object()) throw ConfigError("--config", "top level must be an object");
  c.base_dir_ = std::filesystem::absolute(path).parent_path();
  return c;
}

Node Config::root() { return Node(&doc_, "", seen_, base_dir_); }

void Config::check_unused() const { find_unused(doc_, "", *seen_); }

}  // namespace rydsim
