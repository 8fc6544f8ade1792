#pragma once

/**
 * Combinatorial Navigation Environment (CoNE).
 *
 * A deterministic D-dimensional grid. Each action is a length-2D binary
 * vector of motion primitives; primitives (2i, 2i+1) move axis i by +1/-1
 * and cancel when both are active. The agent starts at a fixed origin and
 * seeks a goal cell; interior pit cells end the episode with a large
 * penalty. All functions here are pure: no shared mutable state.
 */

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "brave/types.hpp"

namespace brave {

enum class TerminalKind { none, goal, pit, horizon };

const char* to_string(TerminalKind kind);

struct EnvConfig {
  int dims = 2;
  int size = 5;
  std::set<GridState> pits;
  GridState start;
  GridState goal;
  int horizon = 100;
  std::int64_t seed = 0;

  int action_dim() const { return 2 * dims; }
  bool operator==(const EnvConfig&) const = default;
};

struct StepOutcome {
  GridState next_state;
  double reward = 0.0;
  bool terminal = false;
  TerminalKind terminal_kind = TerminalKind::none;
};

double euclidean(const GridState& a, const GridState& b);

// Reward for landing in a pit: -10 * rho(start, goal).
double pit_reward(const EnvConfig& cfg);

// Throws ConfigError unless start/goal/pits satisfy the environment
// invariants (start != goal, neither in pits, pits strictly interior,
// all coordinates inside the grid).
void validate(const EnvConfig& cfg);

bool in_bounds(const EnvConfig& cfg, const GridState& s);
bool is_interior(const EnvConfig& cfg, const GridState& s);
bool is_pit(const EnvConfig& cfg, const GridState& s);

// Horizon used by generated configs: 100 steps for dims <= 8, 200 above.
int default_horizon(int dims);

// Net per-axis motion of an action: component i is action[2i] - action[2i+1].
// Throws std::invalid_argument when the action length is not 2*dims.
std::vector<int> displacement(const ActionVector& action, int dims);

// Returns the fixed start state.
GridState reset(const EnvConfig& cfg);

// One transition. Movement clamps to the grid per axis; goal is checked
// before pits; the horizon fires when this step is the last allowed one.
StepOutcome step(const EnvConfig& cfg, const GridState& state,
                 const ActionVector& action, int steps_taken);

// Random instance with start at the all-zeros corner, goal at the opposite
// corner, and `num_pits` pits sampled uniformly without replacement from the
// interior (non-boundary) cells. Deterministic given rng_seed.
EnvConfig random_environment_with_pit_count(int dims, int size, int num_pits,
                                            std::uint64_t rng_seed);

// Same, with the pit count given as a fraction of the interior cell count.
EnvConfig random_environment(int dims, int size, double pit_fraction,
                             std::uint64_t rng_seed);

// JSON round-trip with fixed keys: dims, size, pits, start, goal, horizon,
// seed. env_from_json throws FormatError on malformed input.
std::string env_to_json(const EnvConfig& cfg);
EnvConfig env_from_json(const std::string& text);

// Mixed-radix state indexing (axis 0 most significant); shared by the
// planner and the value-iteration oracle.
std::size_t state_count(const EnvConfig& cfg);
std::size_t state_index(const EnvConfig& cfg, const GridState& s);
GridState state_from_index(const EnvConfig& cfg, std::size_t index);

// All 3^D per-axis displacements in {-1,0,1}^D, lexicographic order.
std::vector<std::vector<int>> all_displacements(int dims);

// Lexicographically smallest action realizing a displacement:
// +1 -> (1,0), -1 -> (0,1), 0 -> (0,0) per axis.
ActionVector canonical_action(const std::vector<int>& disp);

}  // namespace brave
