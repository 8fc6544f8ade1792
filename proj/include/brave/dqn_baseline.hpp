#pragma once

/**
 * Flat Q-network baseline constrained to the dataset's action set. One
 * output per unique observed action; the argmax is restricted to that set
 * and training uses the same behavior-regularized TD target as the tree
 * model, without branch-value propagation.
 */

#include <cstdint>
#include <vector>

#include "brave/brave_core.hpp"
#include "brave/dataset.hpp"
#include "brave/mlp.hpp"
#include "brave/value_model.hpp"

namespace brave {

class ConstrainedDqn {
 public:
  ConstrainedDqn(const Dataset& ds, const std::vector<int>& hidden_sizes,
                 double learning_rate, std::uint64_t seed);

  // Lexicographically sorted unique actions; output j scores actions_[j].
  const std::vector<ActionVector>& actions() const { return actions_; }

  std::vector<double> q_values(const GridState& s) const;
  // Greedy over the action set (ties -> lowest index).
  ActionVector act(const GridState& s) const;

  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }

  // Same schedule and log schema as the tree model's training loop.
  std::vector<LogRow> train(const BraveConfig& cfg, const TrainOptions& opts,
                            const std::function<std::pair<double, double>(
                                long step, const ConstrainedDqn&)>& eval_hook);

 private:
  int action_index(const ActionVector& a) const;

  const Dataset& ds_;
  std::vector<ActionVector> actions_;
  double learning_rate_;
  Mlp net_;
};

}  // namespace brave
