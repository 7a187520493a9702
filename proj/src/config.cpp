#include <nled/config.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nled {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("config: key '" + key + "' is not a number: '" + v + "'");
  return x;
}

}  // namespace

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) +
                        " has no '=': '" + t + "'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config: line " + std::to_string(lineno) + " has empty key");
    cfg.kv_[key] = value;
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

std::string Config::require_string(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("config: missing required key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : to_double(key, it->second);
}

double Config::require_double(const std::string& key) const {
  return to_double(key, require_string(key));
}

long Config::get_long(const std::string& key, long fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const double x = to_double(key, it->second);
  const long l = static_cast<long>(x);
  if (static_cast<double>(l) != x)
    throw ConfigError("config: key '" + key + "' must be an integer");
  return l;
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  const auto it = kv_.find(key);
  if (it == kv_.end()) return out;
  std::string v = it->second;
  for (char& c : v)
    if (c == ',') c = ' ';
  std::istringstream ss(v);
  std::string tok;
  while (ss >> tok) out.push_back(to_double(key, tok));
  return out;
}

LagrangianModel model_from_config(const Config& cfg, const std::string& section) {
  const std::string kind = cfg.get_string(section + ".kind", "maxwell");
  if (kind == "maxwell") return LagrangianModel::maxwell();
  if (kind == "bi" || kind == "born-infeld" || kind == "borninfeld")
    return LagrangianModel::born_infeld(cfg.require_double(section + ".kappa"));
  if (kind == "duality")
    return LagrangianModel::duality_family(cfg.require_double(section + ".lambda"));
  if (kind == "family")
    return LagrangianModel::general_family(
        cfg.require_double(section + ".lambda"), cfg.get_doubles(section + ".poly"),
        cfg.get_double(section + ".c1", 0.0), cfg.get_double(section + ".c2", 0.0));
  throw ConfigError("config: unknown model kind '" + kind +
                    "' (expected maxwell | bi | duality | family)");
}

}  // namespace nled
