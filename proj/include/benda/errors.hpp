#pragma once

#include <stdexcept>
#include <string>

namespace benda {

// Error taxonomy shared by the library and the CLI. The CLI maps these to
// process exit codes: ConfigError -> 2, BlowUpError -> 3, IoError -> 4.

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Elliptic right-hand side violates a solvability condition (e.g. a Neumann
// Poisson rhs with nonzero mean).
struct CompatibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite value detected inside a time step. `stage` names the substage
// that produced it; `step` is the 0-based step index, or -1 when thrown
// below the driver loop.
struct BlowUpError : std::runtime_error {
  BlowUpError(std::string stage_, long step_, const std::string& msg)
      : std::runtime_error(msg), stage(std::move(stage_)), step(step_) {}
  std::string stage;
  long step = -1;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace benda
