#include "brave/dqn_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "brave/rng.hpp"

namespace brave {

namespace {

std::vector<ActionVector> sorted_unique_actions(const Dataset& ds) {
  const std::set<ActionVector> uniq = unique_actions(ds);
  return {uniq.begin(), uniq.end()};
}

}  // namespace

ConstrainedDqn::ConstrainedDqn(const Dataset& ds, const std::vector<int>& hidden_sizes,
                               double learning_rate, std::uint64_t seed)
    : ds_(ds),
      actions_(sorted_unique_actions(ds)),
      learning_rate_(learning_rate),
      net_(ds.env.dims, hidden_sizes, static_cast<int>(actions_.size()), seed) {}

int ConstrainedDqn::action_index(const ActionVector& a) const {
  const auto it = std::lower_bound(actions_.begin(), actions_.end(), a);
  if (it == actions_.end() || *it != a) {
    throw TreeLookupError("action not in the dataset action set");
  }
  return static_cast<int>(it - actions_.begin());
}

std::vector<double> ConstrainedDqn::q_values(const GridState& s) const {
  return net_.run(normalize_state(s, ds_.env.size));
}

ActionVector ConstrainedDqn::act(const GridState& s) const {
  const std::vector<double> q = q_values(s);
  const std::size_t best =
      static_cast<std::size_t>(std::max_element(q.begin(), q.end()) - q.begin());
  return actions_[best];
}

std::vector<LogRow> ConstrainedDqn::train(
    const BraveConfig& cfg, const TrainOptions& opts,
    const std::function<std::pair<double, double>(long, const ConstrainedDqn&)>&
        eval_hook) {
  if (ds_.transitions.empty()) throw ConfigError("dataset is empty");

  std::vector<LogRow> log;
  if (opts.steps <= 0) return log;

  std::mt19937_64 rng = make_rng(opts.seed ^ 0x64716e62617365ull);
  std::vector<double> grad(net_.num_parameters(), 0.0);
  Mlp::Cache cache;
  std::vector<double> dout(actions_.size(), 0.0);

  double sum_loss = 0.0;
  long since_eval = 0;

  for (long step = 1; step <= opts.steps; ++step) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double batch_loss = 0.0;
    for (int b = 0; b < opts.batch_size; ++b) {
      const std::size_t idx =
          static_cast<std::size_t>(rng_below(rng, ds_.transitions.size()));
      const Transition& tr = ds_.transitions[idx];

      double y;
      if (tr.terminal) {
        y = td_target(tr.reward, 0.0, tr.action, tr.action, true, cfg);
      } else {
        const std::vector<double> qn =
            net_.run_target(normalize_state(tr.next_state, ds_.env.size));
        const std::size_t best = static_cast<std::size_t>(
            std::max_element(qn.begin(), qn.end()) - qn.begin());
        y = td_target(tr.reward, qn[best], actions_[best], tr.next_action, false, cfg);
      }

      net_.run_cached(normalize_state(tr.state, ds_.env.size), cache);
      const int ai = action_index(tr.action);
      const double pred = cache.acts.back()[static_cast<std::size_t>(ai)];
      batch_loss += (pred - y) * (pred - y);
      std::fill(dout.begin(), dout.end(), 0.0);
      dout[static_cast<std::size_t>(ai)] = 2.0 * (pred - y);
      net_.backward(cache, dout, grad);
    }
    const double scale = 1.0 / static_cast<double>(opts.batch_size);
    if (!std::isfinite(batch_loss)) {
      throw TrainingError("non-finite loss", step);
    }
    net_.adam_step(grad, scale, learning_rate_, step);
    if (opts.target_sync_interval > 0 && step % opts.target_sync_interval == 0) {
      net_.sync_target();
    }

    sum_loss += batch_loss * scale;
    ++since_eval;
    if (opts.eval_interval > 0 && step % opts.eval_interval == 0) {
      LogRow row;
      row.step = step;
      row.total_loss = sum_loss / static_cast<double>(since_eval);
      row.td_loss = row.total_loss;
      row.brave_loss = 0.0;
      if (eval_hook) {
        const auto [mean, stdd] = eval_hook(step, *this);
        row.eval_return_mean = mean;
        row.eval_return_std = stdd;
      } else {
        row.eval_return_mean = std::numeric_limits<double>::quiet_NaN();
        row.eval_return_std = std::numeric_limits<double>::quiet_NaN();
      }
      log.push_back(row);
      sum_loss = 0.0;
      since_eval = 0;
    }
  }
  return log;
}

}  // namespace brave
