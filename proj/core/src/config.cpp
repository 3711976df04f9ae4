#include "fracstep/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace fracstep {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", lineno);
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("empty section name", lineno);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", lineno);
    cfg.data_[section][key] = Entry{value, lineno};
  }
  return cfg;
}

const Config::Entry* Config::find(const std::string& section, const std::string& key) const {
  const auto sit = data_.find(section);
  if (sit == data_.end()) return nullptr;
  const auto kit = sit->second.find(key);
  if (kit == sit->second.end()) return nullptr;
  return &kit->second;
}

const Config::Entry& Config::require(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError("missing required key in section [" + section + "]", -1, key);
  return *e;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
  return require(section, key).value;
}

std::string Config::get_string_or(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

double Config::get_real(const std::string& section, const std::string& key) const {
  const Entry& e = require(section, key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("expected a real number, got '" + e.value + "'", e.line, key);
  }
}

double Config::get_real_or(const std::string& section, const std::string& key,
                           double fallback) const {
  return has(section, key) ? get_real(section, key) : fallback;
}

int Config::get_int(const std::string& section, const std::string& key) const {
  const Entry& e = require(section, key);
  try {
    std::size_t pos = 0;
    const int v = std::stoi(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("expected an integer, got '" + e.value + "'", e.line, key);
  }
}

int Config::get_int_or(const std::string& section, const std::string& key, int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

bool Config::get_bool_or(const std::string& section, const std::string& key,
                         bool fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::string v;
  for (char c : e->value) v += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("expected a boolean, got '" + e->value + "'", e->line, key);
}

std::vector<double> Config::get_real_list_or(const std::string& section, const std::string& key,
                                             const std::vector<double>& fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::vector<double> out;
  for (const std::string& tok : split_list(e->value)) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError("expected a comma-separated list of reals, got '" + e->value + "'",
                        e->line, key);
    }
  }
  return out;
}

std::vector<int> Config::get_int_list_or(const std::string& section, const std::string& key,
                                         const std::vector<int>& fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::vector<int> out;
  for (const std::string& tok : split_list(e->value)) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stoi(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError("expected a comma-separated list of integers, got '" + e->value + "'",
                        e->line, key);
    }
  }
  return out;
}

std::vector<std::string> Config::sections() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : data_) out.push_back(name);
  return out;
}

}  // namespace fracstep
