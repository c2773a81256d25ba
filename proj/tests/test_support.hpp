#pragma once

#include <cstdlib>
#include <string>

#include "holocheck/io.hpp"

namespace hctest {

inline std::string data_dir() {
  if (const char* env = std::getenv("HOLOCHECK_DATA")) return env;
  return "data";
}

inline std::string data_file(const std::string& rel) { return data_dir() + "/" + rel; }

inline holocheck::CircleFamily load_family(const std::string& name) {
  return holocheck::load_family_file(data_file("families/" + name));
}

inline holocheck::FunctionSpec load_function(const std::string& name) {
  return holocheck::load_function_file(data_file("functions/" + name));
}

}  // namespace hctest
