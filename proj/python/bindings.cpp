#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "brave/brave_core.hpp"
#include "brave/dataset.hpp"
#include "brave/dqn_baseline.hpp"
#include "brave/harness.hpp"
#include "brave/value_iteration.hpp"

namespace py = pybind11;
using namespace brave;

PYBIND11_MODULE(brave_rl, m) {
  m.doc() = "Offline RL in combinatorial action spaces: tree-guided value "
            "estimation, the CoNE gridworld, dataset tooling, and oracles.";

  // ---- environment -------------------------------------------------------
  py::enum_<TerminalKind>(m, "TerminalKind")
      .value("none", TerminalKind::none)
      .value("goal", TerminalKind::goal)
      .value("pit", TerminalKind::pit)
      .value("horizon", TerminalKind::horizon);

  py::class_<EnvConfig>(m, "EnvConfig")
      .def(py::init<>())
      .def_readwrite("dims", &EnvConfig::dims)
      .def_readwrite("size", &EnvConfig::size)
      .def_property(
          "pits",
          [](const EnvConfig& cfg) {
            return std::vector<GridState>(cfg.pits.begin(), cfg.pits.end());
          },
          [](EnvConfig& cfg, const std::vector<GridState>& pits) {
            cfg.pits = std::set<GridState>(pits.begin(), pits.end());
          })
      .def_readwrite("start", &EnvConfig::start)
      .def_readwrite("goal", &EnvConfig::goal)
      .def_readwrite("horizon", &EnvConfig::horizon)
      .def_readwrite("seed", &EnvConfig::seed)
      .def("__eq__", [](const EnvConfig& a, const EnvConfig& b) { return a == b; });

  py::class_<StepOutcome>(m, "StepOutcome")
      .def_readonly("next_state", &StepOutcome::next_state)
      .def_readonly("reward", &StepOutcome::reward)
      .def_readonly("terminal", &StepOutcome::terminal)
      .def_readonly("terminal_kind", &StepOutcome::terminal_kind);

  m.def("displacement", &displacement, py::arg("action"), py::arg("dims"));
  m.def("step", &step, py::arg("cfg"), py::arg("state"), py::arg("action"),
        py::arg("steps_taken"));
  m.def("reset", &reset, py::arg("cfg"));
  m.def("random_environment", &random_environment, py::arg("dims"), py::arg("size"),
        py::arg("pit_fraction"), py::arg("rng_seed"));
  m.def("random_environment_with_pit_count", &random_environment_with_pit_count,
        py::arg("dims"), py::arg("size"), py::arg("num_pits"), py::arg("rng_seed"));
  m.def("env_to_json", &env_to_json);
  m.def("env_from_json", &env_from_json);
  m.def("validate", &validate);
  m.def("pit_reward", &pit_reward);

  // ---- dataset -------------------------------------------------------------
  py::class_<Transition>(m, "Transition")
      .def(py::init<>())
      .def_readwrite("state", &Transition::state)
      .def_readwrite("action", &Transition::action)
      .def_readwrite("reward", &Transition::reward)
      .def_readwrite("next_state", &Transition::next_state)
      .def_readwrite("next_action", &Transition::next_action)
      .def_readwrite("terminal", &Transition::terminal);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init<>())
      .def_readwrite("env", &Dataset::env)
      .def_readwrite("transitions", &Dataset::transitions)
      .def_readwrite("episodes", &Dataset::episodes)
      .def("__len__", [](const Dataset& ds) { return ds.transitions.size(); })
      .def("__eq__", [](const Dataset& a, const Dataset& b) { return a == b; });

  m.def("generate", &generate, py::arg("cfg"), py::arg("episodes"), py::arg("p_opt"),
        py::arg("rng_seed"));
  m.def("unique_actions", [](const Dataset& ds) {
    const std::set<ActionVector> uniq = unique_actions(ds);
    return std::vector<ActionVector>(uniq.begin(), uniq.end());
  });
  m.def("save_dataset", &save, py::arg("dataset"), py::arg("path"));
  m.def("load_dataset", &load, py::arg("path"));
  m.def("astar_optimal_action", &astar_optimal_action, py::arg("cfg"),
        py::arg("state"));
  m.def("is_valid_action", &is_valid_action);
  m.def("valid_action_count", &valid_action_count);

  // ---- action tree -----------------------------------------------------------
  py::class_<ActionTree>(m, "ActionTree")
      .def_static("build_full", &ActionTree::build_full, py::arg("dims"))
      .def_static("build_sparsified",
                  py::overload_cast<const std::vector<int>&,
                                    const std::vector<ActionVector>&>(
                      &ActionTree::build_sparsified),
                  py::arg("dims"), py::arg("actions"))
      .def_property_readonly("num_nodes", &ActionTree::num_nodes)
      .def_property_readonly("num_leaves", &ActionTree::num_leaves)
      .def_property_readonly("m_max", &ActionTree::m_max)
      .def_property_readonly("sparsified", &ActionTree::sparsified)
      .def("root", &ActionTree::root)
      .def("parent", &ActionTree::parent)
      .def("children", &ActionTree::children)
      .def("node_action", &ActionTree::node_action)
      .def("locate", &ActionTree::locate)
      .def("leaf_actions", &ActionTree::leaf_actions);

  // ---- value model --------------------------------------------------------------
  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_readwrite("state_dim", &ModelConfig::state_dim)
      .def_readwrite("action_dim", &ModelConfig::action_dim)
      .def_readwrite("hidden_sizes", &ModelConfig::hidden_sizes)
      .def_readwrite("m_max", &ModelConfig::m_max)
      .def_readwrite("learning_rate", &ModelConfig::learning_rate)
      .def_readwrite("seed", &ModelConfig::seed);

  py::class_<ModelOutput>(m, "ModelOutput")
      .def_readonly("q", &ModelOutput::q)
      .def_readonly("v", &ModelOutput::v)
      .def_readonly("mask", &ModelOutput::mask)
      .def("masked_vmax", &ModelOutput::masked_vmax)
      .def("masked_argmax", &ModelOutput::masked_argmax);

  m.def("normalize_state", &normalize_state, py::arg("state"), py::arg("grid_size"));

  py::class_<ValueModel>(m, "ValueModel")
      .def(py::init<const ModelConfig&>())
      .def_property_readonly("config", &ValueModel::config)
      .def("forward", &ValueModel::forward, py::arg("state_features"),
           py::arg("action"), py::arg("mask"))
      .def("forward_target", &ValueModel::forward_target)
      .def("sync_target", &ValueModel::sync_target)
      .def("num_parameters", &ValueModel::num_parameters)
      .def("parameters",
           [](const ValueModel& m_) { return m_.parameters(); })
      .def("set_parameters",
           [](ValueModel& m_, const std::vector<double>& theta) {
             if (theta.size() != m_.num_parameters()) {
               throw std::invalid_argument("parameter count mismatch");
             }
             m_.parameters() = theta;
           })
      .def("save", &ValueModel::save)
      .def_static("load", &ValueModel::load);

  // ---- core algorithm ---------------------------------------------------------
  py::enum_<PenaltyNorm>(m, "PenaltyNorm")
      .value("L1", PenaltyNorm::L1)
      .value("L2", PenaltyNorm::L2);

  py::class_<BraveConfig>(m, "BraveConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &BraveConfig::alpha)
      .def_readwrite("lambda_", &BraveConfig::lambda)
      .def_readwrite("delta", &BraveConfig::delta)
      .def_readwrite("gamma", &BraveConfig::gamma)
      .def_readwrite("beam_width", &BraveConfig::beam_width)
      .def_readwrite("penalty_norm", &BraveConfig::penalty_norm);

  py::class_<TraversalResult>(m, "TraversalResult")
      .def_readonly("chosen", &TraversalResult::chosen)
      .def_readonly("chosen_node_depth", &TraversalResult::chosen_node_depth)
      .def_readonly("visited", &TraversalResult::visited)
      .def_readonly("q_of_chosen", &TraversalResult::q_of_chosen);

  py::class_<BeamResult>(m, "BeamResult")
      .def_readonly("chosen", &BeamResult::chosen)
      .def_readonly("chosen_node_depth", &BeamResult::chosen_node_depth)
      .def_readonly("visited", &BeamResult::visited)
      .def_readonly("q_of_chosen", &BeamResult::q_of_chosen);

  py::class_<LossBreakdown>(m, "LossBreakdown")
      .def_readonly("td_component", &LossBreakdown::td_component)
      .def_readonly("brave_component", &LossBreakdown::brave_component)
      .def_readonly("total", &LossBreakdown::total)
      .def_readonly("levels", &LossBreakdown::levels);

  py::class_<TrainOptions>(m, "TrainOptions")
      .def(py::init<>())
      .def_readwrite("steps", &TrainOptions::steps)
      .def_readwrite("batch_size", &TrainOptions::batch_size)
      .def_readwrite("target_sync_interval", &TrainOptions::target_sync_interval)
      .def_readwrite("eval_interval", &TrainOptions::eval_interval)
      .def_readwrite("seed", &TrainOptions::seed);

  py::class_<LogRow>(m, "LogRow")
      .def_readonly("step", &LogRow::step)
      .def_readonly("total_loss", &LogRow::total_loss)
      .def_readonly("td_loss", &LogRow::td_loss)
      .def_readonly("brave_loss", &LogRow::brave_loss)
      .def_readonly("eval_return_mean", &LogRow::eval_return_mean)
      .def_readonly("eval_return_std", &LogRow::eval_return_std);

  m.def("td_target", &td_target, py::arg("r"), py::arg("q_next"), py::arg("a_hat"),
        py::arg("a_next"), py::arg("terminal"), py::arg("cfg"));
  m.def("traverse_greedy", &traverse_greedy_model, py::arg("tree"), py::arg("model"),
        py::arg("state"), py::arg("grid_size"), py::arg("use_target") = true);
  m.def("beam_select", &beam_select_model, py::arg("tree"), py::arg("model"),
        py::arg("state"), py::arg("grid_size"), py::arg("beam_width"));
  m.def("brave_loss", &brave_loss, py::arg("tree"), py::arg("transition"),
        py::arg("env"), py::arg("model"), py::arg("cfg"));
  m.def(
      "train",
      [](const Dataset& ds, const ActionTree& tree, ValueModel& model,
         const BraveConfig& cfg, const TrainOptions& opts, int eval_episodes) {
        EvalHook hook;
        if (eval_episodes > 0) {
          hook = [&ds, &tree, &cfg, eval_episodes](long, const ValueModel& m_) {
            const EvalStats st = evaluate_policy(
                ds.env, beam_policy(tree, m_, ds.env, cfg.beam_width), eval_episodes);
            return std::make_pair(st.mean, st.stdd);
          };
        }
        return train(ds, tree, model, cfg, opts, hook);
      },
      py::arg("dataset"), py::arg("tree"), py::arg("model"), py::arg("cfg"),
      py::arg("opts"), py::arg("eval_episodes") = 0,
      py::call_guard<py::gil_scoped_release>());

  // ---- harness -------------------------------------------------------------------
  py::class_<EvalStats>(m, "EvalStats")
      .def_readonly("mean", &EvalStats::mean)
      .def_readonly("stdd", &EvalStats::stdd)
      .def_readonly("goal_rate", &EvalStats::goal_rate)
      .def_readonly("pit_rate", &EvalStats::pit_rate)
      .def_readonly("horizon_rate", &EvalStats::horizon_rate);

  m.def(
      "evaluate_beam_policy",
      [](const Dataset& ds, const ActionTree& tree, const ValueModel& model,
         int beam_width, int episodes) {
        return evaluate_policy(ds.env, beam_policy(tree, model, ds.env, beam_width),
                               episodes);
      },
      py::arg("dataset"), py::arg("tree"), py::arg("model"), py::arg("beam_width"),
      py::arg("episodes"));

  py::class_<ValueIterationResult>(m, "ValueIterationResult")
      .def_readonly("values", &ValueIterationResult::values)
      .def_readonly("greedy", &ValueIterationResult::greedy)
      .def_readonly("sweeps", &ValueIterationResult::sweeps)
      .def_readonly("final_delta", &ValueIterationResult::final_delta)
      .def_readonly("unreachable_value", &ValueIterationResult::unreachable_value);

  py::class_<GreedyRollout>(m, "GreedyRollout")
      .def_readonly("undiscounted_return", &GreedyRollout::undiscounted_return)
      .def_readonly("steps", &GreedyRollout::steps)
      .def_readonly("outcome", &GreedyRollout::outcome)
      .def_readonly("pit_entries", &GreedyRollout::pit_entries);

  m.def("value_iteration", &value_iteration, py::arg("cfg"), py::arg("gamma") = 1.0,
        py::arg("tol") = 1e-10, py::arg("max_sweeps") = 100000);
  m.def("rollout_greedy", &rollout_greedy, py::arg("cfg"), py::arg("vi"));
  m.def("state_index", &state_index, py::arg("cfg"), py::arg("state"));
}
