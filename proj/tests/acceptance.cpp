// Acceptance suite: runs the end-to-end criteria and prints one line per
// criterion. Invoke with criterion names (e.g. `acceptance T3 T4`) or with
// no arguments to run everything. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "brave/brave_core.hpp"
#include "brave/dataset.hpp"
#include "brave/dqn_baseline.hpp"
#include "brave/harness.hpp"
#include "brave/rng.hpp"
#include "brave/value_iteration.hpp"
#include "oracles.hpp"

using namespace brave;

namespace {

// Hyperparameters for the training criteria. Sized so each run finishes in
// minutes on one CPU core; everything the criteria pin (dataset size,
// p_opt, step count, seed counts, thresholds) is set at the call sites.
ExperimentSpec training_spec(std::vector<std::uint64_t> seeds) {
  ExperimentSpec spec;
  spec.hidden_sizes = {64, 64};
  spec.learning_rate = 3e-4;
  spec.train_opts.steps = 20000;
  spec.train_opts.batch_size = 64;
  spec.train_opts.target_sync_interval = 100;
  spec.train_opts.eval_interval = 100;
  spec.eval_episodes = 2;
  spec.seeds = std::move(seeds);
  spec.brave.beam_width = 10;
  return spec;
}

struct SharedRuns {
  std::optional<Dataset> t9_data;
  std::optional<RunSummary> t9_brave;

  const Dataset& t9_dataset() {
    if (!t9_data) {
      const EnvConfig env = random_environment_with_pit_count(4, 5, 5, 21);
      t9_data = generate(env, 500, 0.1, 9);
    }
    return *t9_data;
  }

  const RunSummary& t9_brave_runs() {
    if (!t9_brave) {
      t9_brave = run_brave_experiment(t9_dataset(), training_spec({1, 2, 3}));
    }
    return *t9_brave;
  }
};

SharedRuns shared;

bool t1_2d_reproduction(std::ostream& out) {
  const EnvConfig env = random_environment(2, 5, 0.0, 7);
  const Dataset ds = generate(env, 500, 0.1, 7);
  const RunSummary run = run_brave_experiment(ds, training_spec({1, 2, 3, 4, 5}));

  const ValueIterationResult vi = value_iteration(env);
  const double optimal = vi.values[state_index(env, env.start)];
  out << "final mean return " << run.final_mean << " +/- " << run.final_std
      << " over 5 seeds (threshold 1.0, optimal " << optimal << ")";
  return run.final_mean >= 1.0 && run.final_mean <= optimal + 1e-9;
}

bool t2_3d_reproduction(std::ostream& out) {
  const EnvConfig env = random_environment(3, 5, 0.0, 11);
  const Dataset ds = generate(env, 500, 0.1, 11);
  const RunSummary run = run_brave_experiment(ds, training_spec({1, 2, 3, 4, 5}));

  const ValueIterationResult vi = value_iteration(env);
  const double optimal = vi.values[state_index(env, env.start)];
  out << "final mean return " << run.final_mean << " +/- " << run.final_std
      << " over 5 seeds (window -0.4 +/- 1.5, optimal " << optimal << ")";
  return std::abs(run.final_mean - (-0.4)) <= 1.5 &&
         run.final_mean <= optimal + 1e-9;
}

bool t3_traversal_oracle(std::ostream& out) {
  std::mt19937_64 rng = make_rng(103);
  int exact = 0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    const int n = 2 + static_cast<int>(rng_below(rng, 5));  // N in [2,6]
    const ActionTree tree = testing::random_binary_tree(n, 48, rng);
    const testing::ConsistentStub stub = testing::make_consistent_stub(tree, rng);
    const TraversalResult res =
        traverse_greedy(tree, testing::table_evaluator(stub.table));
    if (res.chosen == testing::exhaustive_argmax_action(tree, stub.table)) ++exact;
  }
  out << exact << "/" << trials << " exact argmax actions";
  return exact == trials;
}

bool t4_loss_oracle(std::ostream& out) {
  std::mt19937_64 rng = make_rng(104);
  const double deltas[] = {0.0, 0.5, 1.0, 2.0};
  double worst = 0.0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    const int n = 1 + static_cast<int>(rng_below(rng, 6));
    const int card = 2 + static_cast<int>(rng_below(rng, 2));  // binary or ternary
    std::vector<int> dims(static_cast<std::size_t>(n), card);
    std::set<ActionVector> actions;
    const std::size_t want = 1 + rng_below(rng, 24);
    for (std::size_t k = 0; k < want; ++k) {
      ActionVector a(static_cast<std::size_t>(n));
      for (int& x : a) x = static_cast<int>(rng_below(rng, card));
      actions.insert(std::move(a));
    }
    const ActionTree tree = ActionTree::build_sparsified(dims, actions);

    std::map<int, NodeEval> table;
    for (int id = 0; id < tree.num_nodes(); ++id) {
      NodeEval e;
      e.q = 12.0 * rng_unit(rng) - 6.0;
      e.v.resize(static_cast<std::size_t>(tree.m_max()));
      for (double& x : e.v) x = 12.0 * rng_unit(rng) - 6.0;
      table[id] = std::move(e);
    }
    const NodeEvalFn eval = testing::table_evaluator(table);
    const std::vector<ActionVector> leaves = tree.leaf_actions();
    const int leaf = tree.locate(leaves[rng_below(rng, leaves.size())]);
    const double y0 = 10.0 * rng_unit(rng) - 5.0;
    const double delta = deltas[rng_below(rng, 4)];

    const double bottom_up = brave_loss_values(tree, leaf, y0, delta, 1.0, eval).total;
    const double top_down =
        testing::top_down_loss_reference(tree, leaf, y0, delta, 1.0, eval);
    worst = std::max(worst, std::abs(bottom_up - top_down) /
                                std::max({std::abs(bottom_up),
                                          std::abs(top_down), 1e-12}));
  }
  out << "max relative error " << worst << " over " << trials
      << " stub configurations (tolerance 1e-6)";
  return worst < 1e-6;
}

bool t5_gradient_check(std::ostream& out) {
  // Toy model over a 3-dimensional binary action tree, hidden sizes [8,8].
  EnvConfig env;
  env.dims = 2;
  env.size = 5;
  env.start = {0, 0};
  env.goal = {4, 4};
  env.horizon = 100;

  std::mt19937_64 rng = make_rng(105);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    std::set<ActionVector> actions;
    while (actions.size() < 4) {
      ActionVector a(3);
      for (int& x : a) x = static_cast<int>(rng_below(rng, 2));
      actions.insert(std::move(a));
    }
    const ActionTree tree = ActionTree::build_sparsified({2, 2, 2}, actions);

    ModelConfig mc;
    mc.state_dim = 2;
    mc.action_dim = 3;
    mc.hidden_sizes = {8, 8};
    mc.m_max = tree.m_max();
    mc.seed = 100 + static_cast<std::uint64_t>(trial);
    ValueModel model(mc);

    const std::vector<ActionVector> leaves = tree.leaf_actions();
    Transition tr;
    tr.state = {static_cast<int>(rng_below(rng, 5)), static_cast<int>(rng_below(rng, 5))};
    tr.next_state = {static_cast<int>(rng_below(rng, 5)),
                     static_cast<int>(rng_below(rng, 5))};
    tr.action = leaves[rng_below(rng, leaves.size())];
    tr.next_action = leaves[rng_below(rng, leaves.size())];
    tr.reward = 4.0 * rng_unit(rng) - 2.0;
    tr.terminal = false;

    BraveConfig cfg;
    cfg.delta = 1.0;
    cfg.alpha = 0.8;

    const std::vector<double> frozen = model.parameters();
    std::vector<double> analytic(model.num_parameters(), 0.0);
    brave_loss_grad(tree, tr, env, model, cfg, &analytic, &frozen);

    ValueModel probe(mc);
    const auto loss = [&](const std::vector<double>& params) {
      probe.parameters() = params;
      return brave_loss_grad(tree, tr, env, probe, cfg, nullptr, &frozen).total;
    };
    const std::vector<double> numeric =
        testing::finite_difference_grad(loss, model.parameters(), 1e-5);
    worst = std::max(worst, testing::max_relative_error(analytic, numeric));
  }
  out << "max relative gradient error " << worst << " (tolerance 1e-4)";
  return worst < 1e-4;
}

bool t6_beam_properties(std::ostream& out) {
  std::mt19937_64 rng = make_rng(106);
  int greedy_matches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng_below(rng, 5));
    const ActionTree tree = testing::random_binary_tree(n, 40, rng);
    const testing::ConsistentStub stub = testing::make_consistent_stub(tree, rng);
    const NodeEvalFn eval = testing::table_evaluator(stub.table);
    if (beam_search(tree, eval, 1).chosen == traverse_greedy(tree, eval).chosen) {
      ++greedy_matches;
    }
  }

  int exhaustive_matches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng_below(rng, 5));
    const ActionTree tree = testing::random_binary_tree(n, 40, rng);
    std::map<int, NodeEval> table;
    for (int id = 0; id < tree.num_nodes(); ++id) {
      table[id] = {20.0 * rng_unit(rng) - 10.0,
                   {20.0 * rng_unit(rng) - 10.0, 20.0 * rng_unit(rng) - 10.0}};
    }
    const BeamResult res =
        beam_search(tree, testing::table_evaluator(table), tree.num_leaves());
    if (res.chosen == testing::exhaustive_argmax_action(tree, table)) {
      ++exhaustive_matches;
    }
  }
  out << "W=1 greedy match " << greedy_matches << "/100, wide-beam argmax "
      << exhaustive_matches << "/100";
  return greedy_matches == 100 && exhaustive_matches == 100;
}

bool t7_data_integrity(std::ostream& out) {
  int episodes_checked = 0;
  for (const auto& [dims, frac, env_seed, data_seed] :
       {std::tuple{2, 0.3, 4ull, 123ull}, std::tuple{3, 0.2, 8ull, 77ull}}) {
    const EnvConfig cfg = random_environment(dims, 5, frac, env_seed);
    const Dataset ds = generate(cfg, 150, 0.1, data_seed);

    for (const auto& [begin, end] : ds.episodes) {
      GridState s = reset(cfg);
      for (std::size_t i = begin; i < end; ++i) {
        const Transition& tr = ds.transitions[i];
        const StepOutcome o = step(cfg, s, tr.action, static_cast<int>(i - begin));
        if (tr.state != s || o.reward != tr.reward || o.terminal != tr.terminal ||
            o.next_state != tr.next_state) {
          out << "replay mismatch";
          return false;
        }
        if (i + 1 < end && (tr.next_state != ds.transitions[i + 1].state ||
                            tr.next_action != ds.transitions[i + 1].action)) {
          out << "SARSA chain broken";
          return false;
        }
        s = o.next_state;
      }
      ++episodes_checked;
    }

    const std::vector<std::uint8_t> bytes = serialize(ds);
    if (serialize(deserialize(bytes)) != bytes) {
      out << "save/load round trip not bit-identical";
      return false;
    }
    if (deserialize(bytes) != ds) {
      out << "save/load round trip lost fields";
      return false;
    }
  }
  out << episodes_checked << " episodes replayed exactly; round trips bit-identical";
  return true;
}

bool t8_vi_oracle(std::ostream& out) {
  const EnvConfig env = random_environment_with_pit_count(2, 5, 5, 13);
  const ValueIterationResult vi = value_iteration(env);
  std::vector<double> values = vi.values;
  const double extra = value_iteration_sweep(env, 1.0, values, vi.unreachable_value);
  const GreedyRollout roll = rollout_greedy(env, vi);
  out << "converged in " << vi.sweeps << " sweeps (delta " << vi.final_delta
      << ", extra sweep " << extra << "); greedy outcome "
      << to_string(roll.outcome) << " with " << roll.pit_entries
      << " pit entries, return " << roll.undiscounted_return;
  return vi.final_delta < 1e-10 && extra < 1e-10 &&
         roll.outcome == TerminalKind::goal && roll.pit_entries == 0;
}

bool t9_baseline_separation(std::ostream& out) {
  const Dataset& ds = shared.t9_dataset();
  const RunSummary& brave_runs = shared.t9_brave_runs();
  const RunSummary dqn_runs = run_dqn_experiment(ds, training_spec({1, 2, 3}));

  int wins = 0;
  std::ostringstream detail;
  for (std::size_t i = 0; i < brave_runs.seeds.size(); ++i) {
    const double b = brave_runs.seeds[i].final_return_mean;
    const double d = dqn_runs.seeds[i].final_return_mean;
    if (b > d) ++wins;
    detail << (i ? ", " : "") << "seed " << brave_runs.seeds[i].seed << ": " << b
           << " vs " << d;
  }
  out << wins << "/3 seeds favor the tree model (" << detail.str() << ")";
  return wins >= 2;
}

bool t10_depth_penalty_direction(std::ostream& out) {
  const Dataset& ds = shared.t9_dataset();
  const RunSummary& with_penalty = shared.t9_brave_runs();  // delta = 1

  ExperimentSpec spec = training_spec({1, 2, 3});
  spec.brave.delta = 0.0;
  const RunSummary without_penalty = run_brave_experiment(ds, spec);

  int wins = 0;
  std::ostringstream detail;
  for (std::size_t i = 0; i < with_penalty.seeds.size(); ++i) {
    const double d1 = with_penalty.seeds[i].final_return_mean;
    const double d0 = without_penalty.seeds[i].final_return_mean;
    if (d1 >= d0) ++wins;
    detail << (i ? ", " : "") << "seed " << with_penalty.seeds[i].seed << ": " << d1
           << " vs " << d0;
  }
  out << wins << "/3 seeds favor delta=1 over delta=0 (" << detail.str() << ")";
  return wins >= 2;
}

struct Criterion {
  const char* name;
  const char* title;
  std::function<bool(std::ostream&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"T1", "2-D pit-free reproduction", t1_2d_reproduction},
      {"T2", "3-D pit-free reproduction", t2_3d_reproduction},
      {"T3", "traversal oracle", t3_traversal_oracle},
      {"T4", "loss oracle", t4_loss_oracle},
      {"T5", "gradient check", t5_gradient_check},
      {"T6", "beam properties", t6_beam_properties},
      {"T7", "environment/dataset integrity", t7_data_integrity},
      {"T8", "value-iteration oracle sanity", t8_vi_oracle},
      {"T9", "baseline separation", t9_baseline_separation},
      {"T10", "depth-penalty direction", t10_depth_penalty_direction},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted;
  for (int i = 1; i < argc; ++i) wanted.emplace_back(argv[i]);

  int failures = 0;
  int ran = 0;
  for (const Criterion& c : criteria()) {
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), c.name) == wanted.end()) {
      continue;
    }
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    std::ostringstream detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail << "exception: " << e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%s] %s — %s: %s (%.1fs)\n", ok ? "PASS" : "FAIL", c.name,
                c.title, detail.str().c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (ran == 0) {
    std::fprintf(stderr, "no matching criteria; known: T1..T10\n");
    return 2;
  }
  return failures;
}
