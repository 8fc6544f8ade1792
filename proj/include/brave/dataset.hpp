#pragma once

/**
 * Offline dataset generation and storage.
 *
 * Datasets are rolled out by a stochastic shortest-path behavior policy:
 * with probability p_opt the planner's optimal action is taken, otherwise a
 * uniformly random valid action. Episodes are recorded as SARSA tuples and
 * serialized to a compact little-endian binary format (magic "BRVE").
 */

#include <cstdint>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "brave/cone_env.hpp"
#include "brave/types.hpp"

namespace brave {

struct Transition {
  GridState state;
  ActionVector action;
  double reward = 0.0;
  GridState next_state;
  ActionVector next_action;  // all-defaults when terminal
  bool terminal = false;

  bool operator==(const Transition&) const = default;
};

struct Dataset {
  EnvConfig env;
  std::vector<Transition> transitions;
  // Episode index ranges [begin, end) into `transitions`.
  std::vector<std::pair<std::size_t, std::size_t>> episodes;

  bool operator==(const Dataset&) const = default;
};

// Exact shortest-path planner over the joint-action transition graph:
// unit step cost, pit cells impassable, clamped motion. Without pits the
// metric is Chebyshev distance and queries are answered in closed form;
// with pits a breadth-first distance field from the goal is built once
// (guarded against oversized state spaces).
class ShortestPathPlanner {
 public:
  explicit ShortestPathPlanner(const EnvConfig& cfg);

  // Steps to the goal, or -1 when unreachable.
  int distance_to_goal(const GridState& s) const;

  // An action on a minimum-cost path; ties resolved to the
  // lexicographically smallest action vector. Throws PlanningError when no
  // path exists or `s` is the goal.
  ActionVector optimal_action(const GridState& s) const;

 private:
  EnvConfig cfg_;
  bool chebyshev_ = false;
  std::vector<int> dist_;  // by state_index, -1 unreachable, empty in chebyshev mode
  std::vector<std::vector<int>> disps_;
};

// Convenience wrapper that builds a planner per call.
ActionVector astar_optimal_action(const EnvConfig& cfg, const GridState& state);

// Valid actions are those whose unclamped displacement stays inside the
// grid; pit-entering actions are valid so failures appear in the data.
bool is_valid_action(const EnvConfig& cfg, const GridState& s,
                     const ActionVector& a);
std::uint64_t valid_action_count(const EnvConfig& cfg, const GridState& s);
ActionVector sample_valid_action(const EnvConfig& cfg, const GridState& s,
                                 std::mt19937_64& rng);

// Rolls out `episodes` episodes from the start state. Deterministic given
// rng_seed; episode e uses a seed derived from (rng_seed, e), so results are
// independent of any parallel scheduling of episodes.
Dataset generate(const EnvConfig& cfg, int episodes, double p_opt,
                 std::uint64_t rng_seed);

// Deduplicated set of executed action vectors.
std::set<ActionVector> unique_actions(const Dataset& ds);

std::vector<std::uint8_t> serialize(const Dataset& ds);
Dataset deserialize(const std::vector<std::uint8_t>& bytes);
void save(const Dataset& ds, const std::string& path);
Dataset load(const std::string& path);

}  // namespace brave
