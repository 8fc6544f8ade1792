#include "brave/brave_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "brave/rng.hpp"

namespace brave {

namespace {

constexpr double kLowest = std::numeric_limits<double>::lowest();

// Max over unmasked branch values; argmax ties resolve to the lowest child
// value.
std::pair<double, int> masked_max(const std::vector<double>& v,
                                  const std::vector<std::uint8_t>& mask) {
  double best = kLowest;
  int arg = -1;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (mask[j] && v[j] > best) {
      best = v[j];
      arg = static_cast<int>(j);
    }
  }
  return {best, arg};
}

}  // namespace

TraversalResult traverse_greedy(const ActionTree& tree, const NodeEvalFn& eval) {
  TraversalResult res;
  int cur = tree.root();
  for (;;) {
    const NodeEval e = eval(cur);
    ++res.visited;
    const TreeNode& n = tree.node(cur);
    const auto [vmax, varg] = masked_max(e.v, n.child_mask);
    if (varg < 0 || e.q >= vmax) {
      res.chosen = n.action;
      res.chosen_node = cur;
      res.chosen_node_depth = n.depth;
      res.q_of_chosen = e.q;
      return res;
    }
    cur = tree.child(cur, varg);
  }
}

BeamResult beam_search(const ActionTree& tree, const NodeEvalFn& eval,
                       int beam_width) {
  if (beam_width < 1) throw ConfigError("beam width must be >= 1");
  BeamResult res;
  bool have_best = false;
  double best_q = kLowest;

  std::vector<int> frontier{tree.root()};
  std::vector<std::pair<double, int>> candidates;  // (edge branch value, node)
  while (!frontier.empty()) {
    candidates.clear();
    for (int id : frontier) {
      const NodeEval e = eval(id);
      ++res.visited;
      const TreeNode& n = tree.node(id);
      const bool better =
          !have_best || e.q > best_q ||
          (e.q == best_q && (n.depth < res.chosen_node_depth ||
                             (n.depth == res.chosen_node_depth && n.action < res.chosen)));
      if (better) {
        have_best = true;
        best_q = e.q;
        res.chosen = n.action;
        res.chosen_node = id;
        res.chosen_node_depth = n.depth;
        res.q_of_chosen = e.q;
      }
      for (const auto& [value, child] : n.children) {
        candidates.emplace_back(e.v[static_cast<std::size_t>(value)], child);
      }
    }
    // Stable sort keeps frontier order, then ascending child value, on ties.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    const std::size_t keep =
        std::min(candidates.size(), static_cast<std::size_t>(beam_width));
    frontier.clear();
    for (std::size_t i = 0; i < keep; ++i) frontier.push_back(candidates[i].second);
  }
  return res;
}

ActionVector beam_select(const ActionTree& tree, const NodeEvalFn& eval,
                         int beam_width) {
  return beam_search(tree, eval, beam_width).chosen;
}

double action_norm(const ActionVector& a, const ActionVector& b, PenaltyNorm norm) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i] - b[i]);
    acc += (norm == PenaltyNorm::L1) ? std::abs(d) : d * d;
  }
  return (norm == PenaltyNorm::L1) ? acc : std::sqrt(acc);
}

double td_target(double r, double q_next, const ActionVector& a_hat,
                 const ActionVector& a_next, bool terminal,
                 const BraveConfig& cfg) {
  if (terminal) return cfg.lambda * r;
  return cfg.lambda * (r + cfg.gamma * q_next) -
         action_norm(a_hat, a_next, cfg.penalty_norm);
}

LossBreakdown brave_loss_values(const ActionTree& tree, int leaf_node, double y0,
                                double delta, double alpha, const NodeEvalFn& eval) {
  LossBreakdown out;
  const NodeEval leaf = eval(leaf_node);
  out.td_component = (leaf.q - y0) * (leaf.q - y0);

  double y = y0;
  int d = 1;
  int cur = leaf_node;
  std::vector<double> v_local;
  while (tree.parent(cur) >= 0) {
    const int p = tree.parent(cur);
    const TreeNode& pn = tree.node(p);
    const NodeEval pe = eval(p);
    const int i = tree.node(cur).action[static_cast<std::size_t>(pn.depth)];
    const double err = (pe.v[static_cast<std::size_t>(i)] - y) * delta * static_cast<double>(d);
    out.brave_component += err * err;
    v_local = pe.v;
    v_local[static_cast<std::size_t>(i)] = y;
    y = std::max(pe.q, masked_max(v_local, pn.child_mask).first);
    cur = p;
    ++d;
  }
  out.levels = d;
  out.total = (alpha * out.td_component + out.brave_component) / static_cast<double>(d);
  return out;
}

NodeEvalFn make_model_evaluator(const ActionTree& tree, const ValueModel& model,
                                const std::vector<double>& state_features,
                                bool use_target) {
  return [&tree, &model, state_features, use_target](int node_id) {
    const std::vector<double> input =
        model.make_input(state_features, tree.node_action(node_id));
    const std::vector<double> raw =
        use_target ? model.net().run_target(input) : model.net().run(input);
    NodeEval e;
    e.q = raw[0];
    e.v.assign(raw.begin() + 1, raw.end());
    return e;
  };
}

TraversalResult traverse_greedy_model(const ActionTree& tree, const ValueModel& model,
                                      const GridState& state, int grid_size,
                                      bool use_target) {
  const std::vector<double> feat = normalize_state(state, grid_size);
  return traverse_greedy(tree, make_model_evaluator(tree, model, feat, use_target));
}

BeamResult beam_select_model(const ActionTree& tree, const ValueModel& model,
                             const GridState& state, int grid_size, int beam_width) {
  const std::vector<double> feat = normalize_state(state, grid_size);
  return beam_search(tree, make_model_evaluator(tree, model, feat, /*use_target=*/false),
                     beam_width);
}

LossBreakdown brave_loss_grad(const ActionTree& tree, const Transition& tr,
                              const EnvConfig& env, const ValueModel& model,
                              const BraveConfig& cfg, std::vector<double>* grad,
                              const std::vector<double>* frozen_params) {
  const int leaf = tree.locate(tr.action);
  const std::vector<double> feat = normalize_state(tr.state, env.size);

  // TD target from the target network and its traversal on the next state.
  double y0;
  if (tr.terminal) {
    y0 = td_target(tr.reward, 0.0, tr.action, tr.action, true, cfg);
  } else {
    const std::vector<double> feat_next = normalize_state(tr.next_state, env.size);
    const TraversalResult hat =
        traverse_greedy(tree, make_model_evaluator(tree, model, feat_next, true));
    y0 = td_target(tr.reward, hat.q_of_chosen, hat.chosen, tr.next_action, false, cfg);
  }

  const int levels = tree.num_dims() + 1;
  const double inv = 1.0 / static_cast<double>(levels);

  LossBreakdown out;
  out.levels = levels;

  Mlp::Cache cache;
  std::vector<double> dout(static_cast<std::size_t>(model.config().output_dim()));
  const Mlp& net = model.net();

  // Leaf term: alpha * (q - Y)^2.
  net.run_cached(model.make_input(feat, tree.node_action(leaf)), cache);
  const double q_leaf = cache.acts.back()[0];
  out.td_component = (q_leaf - y0) * (q_leaf - y0);
  if (grad) {
    std::fill(dout.begin(), dout.end(), 0.0);
    dout[0] = cfg.alpha * 2.0 * (q_leaf - y0) * inv;
    net.backward(cache, dout, *grad);
  }

  // Upward pass: one parent evaluation per level. Propagated targets are
  // constants; only the indexed branch-value prediction carries gradient.
  double y = y0;
  int d = 1;
  int cur = leaf;
  std::vector<double> v_prop;
  while (tree.parent(cur) >= 0) {
    const int p = tree.parent(cur);
    const TreeNode& pn = tree.node(p);
    const int i = tree.node(cur).action[static_cast<std::size_t>(pn.depth)];

    net.run_cached(model.make_input(feat, pn.action), cache);
    const std::vector<double>& raw = cache.acts.back();
    const double pred_vi = raw[static_cast<std::size_t>(1 + i)];

    const double scale = cfg.delta * static_cast<double>(d);
    const double err = (pred_vi - y) * scale;
    out.brave_component += err * err;
    if (grad) {
      std::fill(dout.begin(), dout.end(), 0.0);
      dout[static_cast<std::size_t>(1 + i)] = 2.0 * (pred_vi - y) * scale * scale * inv;
      net.backward(cache, dout, *grad);
    }

    // Propagation values: live outputs, or the frozen snapshot when the
    // caller wants the objective to depend on theta only through the
    // prediction terms.
    double prop_q;
    if (frozen_params) {
      const std::vector<double> frozen =
          net.run_with(*frozen_params, model.make_input(feat, pn.action));
      prop_q = frozen[0];
      v_prop.assign(frozen.begin() + 1, frozen.end());
    } else {
      prop_q = raw[0];
      v_prop.assign(raw.begin() + 1, raw.end());
    }
    v_prop[static_cast<std::size_t>(i)] = y;
    y = std::max(prop_q, masked_max(v_prop, pn.child_mask).first);
    cur = p;
    ++d;
  }

  out.total = (cfg.alpha * out.td_component + out.brave_component) * inv;
  return out;
}

LossBreakdown brave_loss(const ActionTree& tree, const Transition& tr,
                         const EnvConfig& env, const ValueModel& model,
                         const BraveConfig& cfg) {
  return brave_loss_grad(tree, tr, env, model, cfg, nullptr);
}

std::vector<LogRow> train(const Dataset& ds, const ActionTree& tree,
                          ValueModel& model, const BraveConfig& cfg,
                          const TrainOptions& opts, const EvalHook& eval_hook) {
  if (ds.transitions.empty()) throw ConfigError("dataset is empty");
  if (opts.batch_size < 1) throw ConfigError("batch size must be positive");

  std::vector<LogRow> log;
  if (opts.steps <= 0) return log;

  std::mt19937_64 rng = make_rng(opts.seed ^ 0x7261696e627276ull);
  std::vector<double> grad(model.num_parameters(), 0.0);

  double sum_total = 0.0, sum_td = 0.0, sum_brave = 0.0;
  long since_eval = 0;

  for (long step = 1; step <= opts.steps; ++step) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double batch_total = 0.0, batch_td = 0.0, batch_brave = 0.0;
    for (int b = 0; b < opts.batch_size; ++b) {
      const std::size_t idx =
          static_cast<std::size_t>(rng_below(rng, ds.transitions.size()));
      const LossBreakdown l =
          brave_loss_grad(tree, ds.transitions[idx], ds.env, model, cfg, &grad);
      batch_total += l.total;
      batch_td += l.td_component;
      batch_brave += l.brave_component;
    }
    const double scale = 1.0 / static_cast<double>(opts.batch_size);
    if (!std::isfinite(batch_total)) {
      throw TrainingError("non-finite loss", step);
    }
    model.apply_step(grad, scale, step);
    if (opts.target_sync_interval > 0 && step % opts.target_sync_interval == 0) {
      model.sync_target();
    }

    sum_total += batch_total * scale;
    sum_td += batch_td * scale;
    sum_brave += batch_brave * scale;
    ++since_eval;

    if (opts.eval_interval > 0 && step % opts.eval_interval == 0) {
      LogRow row;
      row.step = step;
      row.total_loss = sum_total / static_cast<double>(since_eval);
      row.td_loss = sum_td / static_cast<double>(since_eval);
      row.brave_loss = sum_brave / static_cast<double>(since_eval);
      if (eval_hook) {
        const auto [mean, stdd] = eval_hook(step, model);
        row.eval_return_mean = mean;
        row.eval_return_std = stdd;
      } else {
        row.eval_return_mean = std::numeric_limits<double>::quiet_NaN();
        row.eval_return_std = std::numeric_limits<double>::quiet_NaN();
      }
      log.push_back(row);
      sum_total = sum_td = sum_brave = 0.0;
      since_eval = 0;
    }
  }
  return log;
}

}  // namespace brave
