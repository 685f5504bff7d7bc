#pragma once

#include <string>

#include "obstacle/scenario.hpp"

namespace testing_util {

inline std::string scenario_path(const std::string& name) {
  return std::string(OBSTACLE_SOURCE_DIR) + "/scenarios/" + name + ".cfg";
}

inline obstacle::Scenario scenario(const std::string& name) {
  return obstacle::load_scenario(scenario_path(name));
}

}  // namespace testing_util
