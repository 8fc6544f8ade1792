#pragma once

/**
 * Branch value estimation over a sparsified action tree.
 *
 * A value network assigns every tree node a scalar q plus one branch value
 * per child; greedy traversal descends the best branch until the node's own
 * q dominates, giving an approximate argmax over the combinatorial action
 * space in a linear number of evaluations. Training regresses the node at a
 * sampled action onto a behavior-regularized TD target and propagates that
 * target up the tree into the branch-value outputs, with errors nearer the
 * root amplified by a depth penalty. Beam search widens the traversal at
 * inference time.
 */

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "brave/action_tree.hpp"
#include "brave/cone_env.hpp"
#include "brave/dataset.hpp"
#include "brave/types.hpp"
#include "brave/value_model.hpp"

namespace brave {

enum class PenaltyNorm { L1, L2 };

struct BraveConfig {
  double alpha = 1.0;   // weight of the TD leaf term in the total loss
  double lambda = 1.0;  // scales the bracketed (r + gamma q') target term
  double delta = 1.0;   // depth penalty on propagated branch errors
  double gamma = 0.99;
  int beam_width = 10;
  PenaltyNorm penalty_norm = PenaltyNorm::L1;
};

// Per-node value estimate: q for the node's own action plus one branch
// value per child slot (fixed width m_max; callers mask unused slots).
struct NodeEval {
  double q = 0.0;
  std::vector<double> v;
};

using NodeEvalFn = std::function<NodeEval(int node_id)>;

struct TraversalResult {
  ActionVector chosen;
  int chosen_node = -1;
  int chosen_node_depth = 0;
  int visited = 0;
  double q_of_chosen = 0.0;
};

// Greedy descent from the root: stop when q >= max of the unmasked branch
// values (or at a leaf), otherwise follow the argmax branch (ties -> lowest
// child value). Total function; evaluates at most N+1 nodes.
TraversalResult traverse_greedy(const ActionTree& tree, const NodeEvalFn& eval);

struct BeamResult {
  ActionVector chosen;
  int chosen_node = -1;
  int chosen_node_depth = 0;
  int visited = 0;
  double q_of_chosen = 0.0;
};

// Level-synchronous beam: the frontier keeps the top-W children ranked by
// the branch value of the edge leading to them; every evaluated node's q is
// recorded and the best q wins (ties -> shallowest, then lexicographically
// smallest action).
BeamResult beam_search(const ActionTree& tree, const NodeEvalFn& eval,
                       int beam_width);
ActionVector beam_select(const ActionTree& tree, const NodeEvalFn& eval,
                         int beam_width);

double action_norm(const ActionVector& a, const ActionVector& b,
                   PenaltyNorm norm);

// Behavior-regularized TD target:
//   Y = lambda * (r + gamma * q_next) - ||a_hat - a_next||
// with the bootstrap and the penalty both zeroed on terminal transitions.
double td_target(double r, double q_next, const ActionVector& a_hat,
                 const ActionVector& a_next, bool terminal,
                 const BraveConfig& cfg);

struct LossBreakdown {
  double td_component = 0.0;     // (q_leaf - Y)^2, unweighted
  double brave_component = 0.0;  // sum of parent branch terms
  double total = 0.0;            // (alpha*td + brave) / levels
  int levels = 0;                // final value of the upward-pass counter d
};

// Value-only loss for a given leaf and target: regress the leaf q onto y0,
// then walk upward accumulating ((v[i] - Y) * delta * d)^2 per parent while
// propagating Y through max(q, branch values). Used directly by stub-based
// tests; the model-backed overloads below feed it network evaluations.
LossBreakdown brave_loss_values(const ActionTree& tree, int leaf_node, double y0,
                                double delta, double alpha, const NodeEvalFn& eval);

// Full per-transition loss. Traverses the target network on the next state
// for the TD target, then runs the upward pass with the online network.
// When `grad` is non-null, d(total)/d(theta) is accumulated into it; the
// propagated targets are treated as constants (semi-gradient). When
// `frozen_params` is non-null the propagation values are computed from that
// parameter snapshot instead of the live online parameters, which makes the
// objective a plain function of theta for finite-difference checks.
LossBreakdown brave_loss_grad(const ActionTree& tree, const Transition& tr,
                              const EnvConfig& env, const ValueModel& model,
                              const BraveConfig& cfg, std::vector<double>* grad,
                              const std::vector<double>* frozen_params = nullptr);
LossBreakdown brave_loss(const ActionTree& tree, const Transition& tr,
                         const EnvConfig& env, const ValueModel& model,
                         const BraveConfig& cfg);

// Evaluator backed by the model for a fixed state.
NodeEvalFn make_model_evaluator(const ActionTree& tree, const ValueModel& model,
                                const std::vector<double>& state_features,
                                bool use_target);

TraversalResult traverse_greedy_model(const ActionTree& tree, const ValueModel& model,
                                      const GridState& state, int grid_size,
                                      bool use_target);
BeamResult beam_select_model(const ActionTree& tree, const ValueModel& model,
                             const GridState& state, int grid_size, int beam_width);

struct TrainOptions {
  long steps = 20000;
  int batch_size = 256;
  int target_sync_interval = 100;
  int eval_interval = 100;
  std::uint64_t seed = 0;
};

struct LogRow {
  long step = 0;
  double total_loss = 0.0;
  double td_loss = 0.0;
  double brave_loss = 0.0;
  double eval_return_mean = 0.0;
  double eval_return_std = 0.0;
};

// Called on the evaluation schedule; returns (return mean, return std).
using EvalHook = std::function<std::pair<double, double>(long step, const ValueModel&)>;

// Minibatch gradient descent on the total objective with hard target syncs.
// Logs one row per evaluation point carrying interval-mean losses.
// Deterministic given opts.seed. Throws TrainingError on non-finite loss.
std::vector<LogRow> train(const Dataset& ds, const ActionTree& tree,
                          ValueModel& model, const BraveConfig& cfg,
                          const TrainOptions& opts, const EvalHook& eval_hook);

}  // namespace brave
