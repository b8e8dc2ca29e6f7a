#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "descent/model.hpp"

namespace descent::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// INI-style run configuration. Model keys (family, coefficients, x_floor,
/// knots, values) live at the top level or in [model]; every command reads
/// its own section.
class Config {
 public:
  static Config load(const std::string& path);
  static Config parse(const std::string& text, const std::string& name = "<string>");

  bool has(const std::string& section, const std::string& key) const;
  std::string text(const std::string& section, const std::string& key,
                   std::optional<std::string> fallback = std::nullopt) const;
  double number(const std::string& section, const std::string& key,
                std::optional<double> fallback = std::nullopt) const;
  double positive(const std::string& section, const std::string& key,
                  std::optional<double> fallback = std::nullopt) const;
  std::size_t count(const std::string& section, const std::string& key,
                    std::optional<std::size_t> fallback = std::nullopt) const;
  std::vector<double> numbers(const std::string& section, const std::string& key,
                              std::optional<std::vector<double>> fallback = std::nullopt) const;
  bool flag(const std::string& section, const std::string& key, bool fallback) const;

  DriftModel model() const;
  /// FNV-1a of the raw file bytes.
  std::uint64_t hash() const noexcept { return hash_; }
  /// "section.key=value" for every entry, in file order.
  std::vector<std::string> echo() const;

 private:
  std::optional<std::string> raw(const std::string& section, const std::string& key) const;
  boost::property_tree::ptree tree_;
  std::string name_;
  std::uint64_t hash_ = 0;
};

double parse_number(const std::string& text, const std::string& where);
std::vector<double> parse_numbers(const std::string& text, const std::string& where);

}  // namespace descent::cli
