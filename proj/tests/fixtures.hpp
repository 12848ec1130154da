#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace toruslab::testing {

inline std::map<std::string, std::string> load_fixtures() {
  std::ifstream in(std::string(TORUSLAB_FIXTURES) + "/regression_values.txt");
  if (!in) throw std::runtime_error("cannot open regression fixtures");
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key, value;
    ls >> key >> value;
    out[key] = value;
  }
  return out;
}

inline const std::string& fixture(const std::string& key) {
  static const auto table = load_fixtures();
  const auto it = table.find(key);
  if (it == table.end()) throw std::runtime_error("missing fixture " + key);
  return it->second;
}

}  // namespace toruslab::testing
