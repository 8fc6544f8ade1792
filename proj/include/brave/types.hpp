#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace brave {

// One grid coordinate per axis, componentwise in [0, size).
using GridState = std::vector<int>;

// One discrete value per sub-action dimension. CoNE uses 2*dims binary
// sub-actions: pair (2i, 2i+1) holds the +/- motion primitives of axis i.
using ActionVector = std::vector<int>;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PlanningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TreeLookupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainingError : std::runtime_error {
  TrainingError(const std::string& msg, long step)
      : std::runtime_error(msg + " (step " + std::to_string(step) + ")"),
        step(step) {}
  long step;
};

}  // namespace brave
