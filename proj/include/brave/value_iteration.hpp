#pragma once

/**
 * Exact dynamic-programming solver for small CoNE instances. Computes
 * per-state optimal values (max over actions) and a greedy policy by value
 * iteration on the deterministic MDP; the horizon is not modeled, so the
 * result upper-bounds episodic returns. Used as a reference oracle.
 */

#include <cstddef>
#include <vector>

#include "brave/cone_env.hpp"
#include "brave/types.hpp"

namespace brave {

struct ValueIterationResult {
  // Indexed by state_index(). Terminal cells (goal, pits) hold 0; states
  // that cannot reach the goal hold `unreachable_value`.
  std::vector<double> values;
  std::vector<ActionVector> greedy;  // all-defaults on terminal/unreachable
  int sweeps = 0;
  double final_delta = 0.0;
  double unreachable_value = 0.0;
};

// Throws ConfigError when |S| * |A| exceeds the enumeration guard (1e7).
ValueIterationResult value_iteration(const EnvConfig& cfg, double gamma = 1.0,
                                     double tol = 1e-10, int max_sweeps = 100000);

// One Jacobi sweep applied to `values`; returns the sup-norm change.
// Exposed so convergence ("one more sweep changes nothing") is testable.
double value_iteration_sweep(const EnvConfig& cfg, double gamma,
                             std::vector<double>& values,
                             double unreachable_value);

struct GreedyRollout {
  double undiscounted_return = 0.0;
  int steps = 0;
  TerminalKind outcome = TerminalKind::none;
  int pit_entries = 0;
  std::vector<GridState> path;
};

// Rolls the greedy policy out from the start state under the real
// environment dynamics (horizon included).
GreedyRollout rollout_greedy(const EnvConfig& cfg, const ValueIterationResult& vi);

}  // namespace brave
