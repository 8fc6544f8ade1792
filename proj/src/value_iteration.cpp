#include "brave/value_iteration.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace brave {

namespace {

constexpr double kUnreachable = -1e30;

struct Tables {
  std::size_t n = 0;
  std::size_t goal_idx = 0;
  std::vector<std::uint8_t> terminal;   // goal or pit
  std::vector<std::uint8_t> reachable;  // can reach the goal
  std::vector<std::vector<int>> disps;
};

Tables build_tables(const EnvConfig& cfg) {
  Tables t;
  t.n = state_count(cfg);
  t.goal_idx = state_index(cfg, cfg.goal);
  t.terminal.assign(t.n, 0);
  t.terminal[t.goal_idx] = 1;
  for (const GridState& p : cfg.pits) t.terminal[state_index(cfg, p)] = 1;
  t.disps = all_displacements(cfg.dims);

  // Reachability by BFS from the goal; edges are symmetric.
  t.reachable.assign(t.n, 0);
  t.reachable[t.goal_idx] = 1;
  std::deque<std::size_t> queue{t.goal_idx};
  GridState next(cfg.dims);
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    const GridState s = state_from_index(cfg, cur);
    for (const std::vector<int>& disp : t.disps) {
      bool ok = true;
      for (int i = 0; i < cfg.dims; ++i) {
        next[i] = s[i] + disp[i];
        if (next[i] < 0 || next[i] >= cfg.size) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      const std::size_t ni = state_index(cfg, next);
      if (!t.reachable[ni] && !t.terminal[ni]) {
        t.reachable[ni] = 1;
        queue.push_back(ni);
      }
    }
  }
  return t;
}

double backup(const EnvConfig& cfg, double gamma,
              const std::vector<double>& values, const GridState& s,
              const std::vector<int>& disp, GridState& next) {
  for (int i = 0; i < cfg.dims; ++i) {
    next[i] = std::clamp(s[i] + disp[i], 0, cfg.size - 1);
  }
  if (next == cfg.goal) return 10.0;
  if (is_pit(cfg, next)) return pit_reward(cfg);
  const double r = -euclidean(next, cfg.goal);
  return r + gamma * values[state_index(cfg, next)];
}

}  // namespace

double value_iteration_sweep(const EnvConfig& cfg, double gamma,
                             std::vector<double>& values,
                             double unreachable_value) {
  const Tables t = build_tables(cfg);
  std::vector<double> fresh = values;
  GridState next(cfg.dims);
  double delta = 0.0;
  for (std::size_t idx = 0; idx < t.n; ++idx) {
    if (t.terminal[idx]) continue;
    if (!t.reachable[idx]) {
      fresh[idx] = unreachable_value;
      continue;
    }
    const GridState s = state_from_index(cfg, idx);
    double best = std::numeric_limits<double>::lowest();
    for (const std::vector<int>& disp : t.disps) {
      best = std::max(best, backup(cfg, gamma, values, s, disp, next));
    }
    delta = std::max(delta, std::abs(best - values[idx]));
    fresh[idx] = best;
  }
  values.swap(fresh);
  return delta;
}

ValueIterationResult value_iteration(const EnvConfig& cfg, double gamma,
                                     double tol, int max_sweeps) {
  validate(cfg);
  const double pairs = static_cast<double>(state_count(cfg)) *
                       std::pow(2.0, static_cast<double>(cfg.action_dim()));
  if (pairs > 1e7) {
    throw ConfigError("state-action space too large to enumerate");
  }

  const Tables t = build_tables(cfg);
  ValueIterationResult res;
  res.unreachable_value = kUnreachable;
  res.values.assign(t.n, 0.0);
  for (std::size_t idx = 0; idx < t.n; ++idx) {
    if (!t.terminal[idx] && !t.reachable[idx]) res.values[idx] = kUnreachable;
  }

  std::vector<double> fresh(t.n);
  GridState next(cfg.dims);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    fresh = res.values;
    double delta = 0.0;
    for (std::size_t idx = 0; idx < t.n; ++idx) {
      if (t.terminal[idx] || !t.reachable[idx]) continue;
      const GridState s = state_from_index(cfg, idx);
      double best = std::numeric_limits<double>::lowest();
      for (const std::vector<int>& disp : t.disps) {
        best = std::max(best, backup(cfg, gamma, res.values, s, disp, next));
      }
      delta = std::max(delta, std::abs(best - res.values[idx]));
      fresh[idx] = best;
    }
    res.values.swap(fresh);
    res.final_delta = delta;
    res.sweeps = sweep + 1;
    if (delta < tol) break;
  }

  // Greedy policy; ties resolve to the lexicographically smallest action.
  res.greedy.assign(t.n, ActionVector(static_cast<std::size_t>(cfg.action_dim()), 0));
  for (std::size_t idx = 0; idx < t.n; ++idx) {
    if (t.terminal[idx] || !t.reachable[idx]) continue;
    const GridState s = state_from_index(cfg, idx);
    double best = std::numeric_limits<double>::lowest();
    ActionVector best_action;
    bool found = false;
    for (const std::vector<int>& disp : t.disps) {
      const double val = backup(cfg, gamma, res.values, s, disp, next);
      ActionVector a = canonical_action(disp);
      if (!found || val > best || (val == best && a < best_action)) {
        best = val;
        best_action = std::move(a);
        found = true;
      }
    }
    res.greedy[idx] = best_action;
  }
  return res;
}

GreedyRollout rollout_greedy(const EnvConfig& cfg, const ValueIterationResult& vi) {
  GreedyRollout out;
  GridState s = reset(cfg);
  out.path.push_back(s);
  for (int t = 0; t < cfg.horizon; ++t) {
    const ActionVector& a = vi.greedy[state_index(cfg, s)];
    const StepOutcome o = step(cfg, s, a, t);
    out.undiscounted_return += o.reward;
    ++out.steps;
    out.path.push_back(o.next_state);
    if (o.terminal_kind == TerminalKind::pit) ++out.pit_entries;
    if (o.terminal) {
      out.outcome = o.terminal_kind;
      break;
    }
    s = o.next_state;
  }
  return out;
}

}  // namespace brave
