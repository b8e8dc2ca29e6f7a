#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

namespace descent::cli {
namespace {

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string where(const std::string& section, const std::string& key) {
  return section.empty() ? "key '" + key + "'" : "key '" + key + "' in [" + section + "]";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

double parse_number(const std::string& text, const std::string& at) {
  const std::string t = trim(text);
  if (t == "inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError(at + ": '" + text + "' is not a number");
  return v;
}

std::vector<double> parse_numbers(const std::string& text, const std::string& at) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, at));
  if (out.empty()) throw ConfigError(at + ": empty list");
  return out;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

Config Config::parse(const std::string& text, const std::string& name) {
  Config c;
  c.name_ = name;
  c.hash_ = fnv1a(text);
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, c.tree_);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(name + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  return c;
}

std::optional<std::string> Config::raw(const std::string& section, const std::string& key) const {
  const auto* node = &tree_;
  if (!section.empty()) {
    auto s = tree_.get_child_optional(section);
    if (!s) return std::nullopt;
    node = &*s;
  }
  auto v = node->get_optional<std::string>(boost::property_tree::ptree::path_type(key, '\0'));
  if (!v) return std::nullopt;
  return *v;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return raw(section, key).has_value();
}

std::string Config::text(const std::string& section, const std::string& key,
                         std::optional<std::string> fallback) const {
  if (auto v = raw(section, key)) return *v;
  if (fallback) return *fallback;
  throw ConfigError(name_ + ": missing " + where(section, key));
}

double Config::number(const std::string& section, const std::string& key,
                      std::optional<double> fallback) const {
  if (auto v = raw(section, key)) return parse_number(*v, name_ + ": " + where(section, key));
  if (fallback) return *fallback;
  throw ConfigError(name_ + ": missing " + where(section, key));
}

double Config::positive(const std::string& section, const std::string& key,
                        std::optional<double> fallback) const {
  const double v = number(section, key, fallback);
  if (!(v > 0)) throw ConfigError(name_ + ": " + where(section, key) + " must be positive");
  return v;
}

std::size_t Config::count(const std::string& section, const std::string& key,
                          std::optional<std::size_t> fallback) const {
  const double v =
      number(section, key, fallback ? std::optional<double>(static_cast<double>(*fallback))
                                    : std::nullopt);
  if (!(v >= 1) || v != std::floor(v) || v > 1e12)
    throw ConfigError(name_ + ": " + where(section, key) + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key,
                                    std::optional<std::vector<double>> fallback) const {
  if (auto v = raw(section, key)) return parse_numbers(*v, name_ + ": " + where(section, key));
  if (fallback) return *fallback;
  throw ConfigError(name_ + ": missing " + where(section, key));
}

bool Config::flag(const std::string& section, const std::string& key, bool fallback) const {
  const auto v = raw(section, key);
  if (!v) return fallback;
  const std::string t = trim(*v);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(name_ + ": " + where(section, key) + ": '" + *v + "' is not a boolean");
}

DriftModel Config::model() const {
  const std::string sec = tree_.get_child_optional("model") ? "model" : "";
  const std::string family = trim(text(sec, "family"));
  const std::string at = name_ + ": " + where(sec, "coefficients");
  try {
    if (family == "power_law" || family == "PowerLaw") {
      const auto c = numbers(sec, "coefficients");
      if (c.size() != 2) throw ConfigError(at + ": power_law takes 'c, a'");
      return DriftModel::power_law(c[0], c[1], number(sec, "x_floor", 0.0));
    }
    if (family == "exp_poly" || family == "ExpPoly") return DriftModel::exp_poly(numbers(sec, "coefficients"));
    if (family == "custom" || family == "Custom")
      return DriftModel::custom(numbers(sec, "knots"), numbers(sec, "values"));
  } catch (const DomainError& e) {
    throw ConfigError(name_ + ": model: " + e.what());
  }
  throw ConfigError(name_ + ": " + where(sec, "family") + ": unknown family '" + family + "'");
}

std::vector<std::string> Config::echo() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : tree_) {
    if (v.empty()) {
      out.push_back(k + "=" + v.data());
      continue;
    }
    for (const auto& [k2, v2] : v) out.push_back(k + "." + k2 + "=" + v2.data());
  }
  return out;
}

}  // namespace descent::cli
