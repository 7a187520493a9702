#pragma once

// Flat key-value configuration files with dotted section prefixes:
//
//     # transit experiment
//     model.kind   = duality
//     model.lambda = 0.25
//     background.bx = 1.0
//     run.scheme   = leapfrog
//
// All physical numbers are in c = 1, eps0 = 1 units.

#include <nled/errors.hpp>
#include <nled/lagrangian.hpp>

#include <map>
#include <string>
#include <vector>

namespace nled {

class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  long get_long(const std::string& key, long fallback) const;
  /// whitespace- or comma-separated list of reals
  std::vector<double> get_doubles(const std::string& key) const;

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

/// Build a Lagrangian model from the keys <section>.kind, <section>.kappa,
/// <section>.lambda, <section>.poly (tail coefficients a2 a3 ...),
/// <section>.c1, <section>.c2.
LagrangianModel model_from_config(const Config& cfg, const std::string& section);

}  // namespace nled
