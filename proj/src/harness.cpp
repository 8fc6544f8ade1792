#include "brave/harness.hpp"

#include <cmath>
#include <fstream>
#include <thread>

#include <json.hpp>

namespace brave {

EvalStats evaluate_policy(const EnvConfig& cfg, const PolicyFn& policy, int episodes) {
  if (episodes < 1) throw ConfigError("episodes must be positive");
  EvalStats stats;
  std::vector<double> returns;
  returns.reserve(static_cast<std::size_t>(episodes));
  for (int e = 0; e < episodes; ++e) {
    GridState s = reset(cfg);
    double ret = 0.0;
    TerminalKind kind = TerminalKind::none;
    for (int t = 0; t < cfg.horizon; ++t) {
      const ActionVector a = policy(s);
      const StepOutcome out = step(cfg, s, a, t);
      ret += out.reward;
      if (out.terminal) {
        kind = out.terminal_kind;
        break;
      }
      s = out.next_state;
    }
    returns.push_back(ret);
    if (kind == TerminalKind::goal) stats.goal_rate += 1.0;
    if (kind == TerminalKind::pit) stats.pit_rate += 1.0;
    if (kind == TerminalKind::horizon) stats.horizon_rate += 1.0;
  }
  const double n = static_cast<double>(episodes);
  for (double r : returns) stats.mean += r;
  stats.mean /= n;
  double var = 0.0;
  for (double r : returns) var += (r - stats.mean) * (r - stats.mean);
  stats.stdd = std::sqrt(var / n);
  stats.goal_rate /= n;
  stats.pit_rate /= n;
  stats.horizon_rate /= n;
  return stats;
}

PolicyFn beam_policy(const ActionTree& tree, const ValueModel& model,
                     const EnvConfig& cfg, int beam_width) {
  return [&tree, &model, &cfg, beam_width](const GridState& s) {
    return beam_select_model(tree, model, s, cfg.size, beam_width).chosen;
  };
}

namespace {

void finish_seed(SeedResult& r) {
  if (!r.log.empty()) {
    r.final_return_mean = r.log.back().eval_return_mean;
    r.final_return_std = r.log.back().eval_return_std;
  }
}

void aggregate(RunSummary& summary) {
  const double n = static_cast<double>(summary.seeds.size());
  if (n == 0) return;
  for (const SeedResult& r : summary.seeds) summary.final_mean += r.final_return_mean;
  summary.final_mean /= n;
  double var = 0.0;
  for (const SeedResult& r : summary.seeds) {
    var += (r.final_return_mean - summary.final_mean) *
           (r.final_return_mean - summary.final_mean);
  }
  summary.final_std = std::sqrt(var / n);
}

void run_parallel(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const int workers = std::min<int>(jobs, static_cast<int>(count));
  // Static round-robin split keeps each seed's work independent of the
  // schedule.
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = static_cast<std::size_t>(w); i < count;
           i += static_cast<std::size_t>(workers)) {
        fn(i);
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace

RunSummary run_brave_experiment(const Dataset& ds, const ExperimentSpec& spec,
                                int jobs, std::vector<ValueModel>* final_models) {
  if (spec.seeds.empty()) throw ConfigError("at least one seed required");
  const std::vector<int> dims(static_cast<std::size_t>(ds.env.action_dim()), 2);
  const ActionTree tree = ActionTree::build_sparsified(dims, unique_actions(ds));

  RunSummary summary;
  summary.seeds.resize(spec.seeds.size());
  std::vector<ValueModel> models;
  models.reserve(spec.seeds.size());
  for (std::size_t i = 0; i < spec.seeds.size(); ++i) {
    ModelConfig mc;
    mc.state_dim = ds.env.dims;
    mc.action_dim = ds.env.action_dim();
    mc.hidden_sizes = spec.hidden_sizes;
    mc.m_max = tree.m_max();
    mc.learning_rate = spec.learning_rate;
    mc.seed = spec.seeds[i];
    models.emplace_back(mc);
  }

  run_parallel(spec.seeds.size(), jobs, [&](std::size_t i) {
    SeedResult& r = summary.seeds[i];
    r.seed = spec.seeds[i];
    ValueModel& model = models[i];
    TrainOptions opts = spec.train_opts;
    opts.seed = spec.seeds[i];
    const EvalHook hook = [&](long, const ValueModel& m) {
      const EvalStats st = evaluate_policy(
          ds.env, beam_policy(tree, m, ds.env, spec.brave.beam_width),
          spec.eval_episodes);
      return std::make_pair(st.mean, st.stdd);
    };
    r.log = train(ds, tree, model, spec.brave, opts, hook);
    finish_seed(r);
    r.final_stats = evaluate_policy(
        ds.env, beam_policy(tree, model, ds.env, spec.brave.beam_width),
        spec.eval_episodes);
  });

  aggregate(summary);
  if (final_models) *final_models = std::move(models);
  return summary;
}

RunSummary run_dqn_experiment(const Dataset& ds, const ExperimentSpec& spec, int jobs) {
  if (spec.seeds.empty()) throw ConfigError("at least one seed required");

  RunSummary summary;
  summary.seeds.resize(spec.seeds.size());
  run_parallel(spec.seeds.size(), jobs, [&](std::size_t i) {
    SeedResult& r = summary.seeds[i];
    r.seed = spec.seeds[i];
    ConstrainedDqn dqn(ds, spec.hidden_sizes, spec.learning_rate, spec.seeds[i]);
    TrainOptions opts = spec.train_opts;
    opts.seed = spec.seeds[i];
    const auto hook = [&](long, const ConstrainedDqn& d) {
      const EvalStats st = evaluate_policy(
          ds.env, [&d](const GridState& s) { return d.act(s); }, spec.eval_episodes);
      return std::make_pair(st.mean, st.stdd);
    };
    r.log = dqn.train(spec.brave, opts, hook);
    finish_seed(r);
    r.final_stats = evaluate_policy(
        ds.env, [&dqn](const GridState& s) { return dqn.act(s); }, spec.eval_episodes);
  });

  aggregate(summary);
  return summary;
}

void write_csv(const std::vector<LogRow>& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open for writing: " + path);
  out << "step,total_loss,td_loss,brave_loss,eval_return_mean,eval_return_std\n";
  out.precision(17);
  for (const LogRow& row : log) {
    out << row.step << ',' << row.total_loss << ',' << row.td_loss << ','
        << row.brave_loss << ',' << row.eval_return_mean << ','
        << row.eval_return_std << '\n';
  }
  if (!out) throw FormatError("write failed: " + path);
}

std::string summary_to_json(const RunSummary& summary) {
  nlohmann::json j;
  j["final_mean"] = summary.final_mean;
  j["final_std"] = summary.final_std;
  nlohmann::json seeds = nlohmann::json::array();
  for (const SeedResult& r : summary.seeds) {
    nlohmann::json s;
    s["seed"] = r.seed;
    s["final_return_mean"] = r.final_return_mean;
    s["final_return_std"] = r.final_return_std;
    s["goal_rate"] = r.final_stats.goal_rate;
    s["pit_rate"] = r.final_stats.pit_rate;
    s["horizon_rate"] = r.final_stats.horizon_rate;
    seeds.push_back(s);
  }
  j["seeds"] = seeds;
  return j.dump(2);
}

}  // namespace brave
