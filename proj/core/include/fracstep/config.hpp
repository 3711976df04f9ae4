#pragma once

#include <map>
#include <string>
#include <vector>

#include "fracstep/errors.hpp"

namespace fracstep {

// Flat key-value configuration text with [section] headers and '#' comments.
// Lookups throw ConfigError carrying the offending line/field.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const;
  double get_real(const std::string& section, const std::string& key) const;
  double get_real_or(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key) const;
  int get_int_or(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_real_list_or(const std::string& section, const std::string& key,
                                       const std::vector<double>& fallback) const;
  std::vector<int> get_int_list_or(const std::string& section, const std::string& key,
                                   const std::vector<int>& fallback) const;

  std::vector<std::string> sections() const;

 private:
  struct Entry {
    std::string value;
    int line = -1;
  };
  const Entry* find(const std::string& section, const std::string& key) const;
  const Entry& require(const std::string& section, const std::string& key) const;

  std::map<std::string, std::map<std::string, Entry>> data_;
};

}  // namespace fracstep
