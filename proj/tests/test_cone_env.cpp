#include <doctest.h>

#include <cmath>

#include "brave/cone_env.hpp"
#include "brave/rng.hpp"
#include "oracles.hpp"

using namespace brave;

namespace {

EnvConfig basic_2d() {
  EnvConfig cfg;
  cfg.dims = 2;
  cfg.size = 5;
  cfg.start = {0, 0};
  cfg.goal = {4, 4};
  cfg.horizon = 100;
  return cfg;
}

}  // namespace

TEST_CASE("displacement composes primitives per axis") {
  CHECK(displacement({1, 0, 0, 0}, 2) == std::vector<int>{1, 0});
  // Opposing primitives cancel.
  CHECK(displacement({1, 1, 0, 0}, 2) == std::vector<int>{0, 0});
  CHECK(displacement({1, 0, 1, 0, 1, 0}, 3) == std::vector<int>{1, 1, 1});
  CHECK_THROWS_AS(displacement({1, 0}, 2), std::invalid_argument);
}

TEST_CASE("displacement negates under primitive-pair swap") {
  std::mt19937_64 rng = make_rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int dims = 1 + static_cast<int>(rng_below(rng, 6));
    ActionVector a(static_cast<std::size_t>(2 * dims));
    for (int& x : a) x = static_cast<int>(rng_below(rng, 2));
    ActionVector swapped(a.size());
    for (int i = 0; i < dims; ++i) {
      swapped[2 * i] = a[2 * i + 1];
      swapped[2 * i + 1] = a[2 * i];
    }
    const std::vector<int> d = displacement(a, dims);
    std::vector<int> neg = displacement(swapped, dims);
    for (int& x : neg) x = -x;
    CHECK(d == neg);
  }
}

TEST_CASE("step rewards: goal, pit, and distance") {
  EnvConfig cfg = basic_2d();
  cfg.pits.insert({2, 2});

  SUBCASE("pit entry pays -10 * rho(start, goal)") {
    const StepOutcome out = step(cfg, {1, 1}, {1, 0, 1, 0}, 0);
    CHECK(out.terminal);
    CHECK(out.terminal_kind == TerminalKind::pit);
    CHECK(out.reward == doctest::Approx(-10.0 * std::sqrt(32.0)).epsilon(1e-12));
  }
  SUBCASE("goal entry pays +10") {
    const StepOutcome out = step(cfg, {3, 4}, {1, 0, 0, 0}, 5);
    CHECK(out.next_state == GridState{4, 4});
    CHECK(out.reward == 10.0);
    CHECK(out.terminal_kind == TerminalKind::goal);
  }
  SUBCASE("ordinary move pays -rho(next, goal)") {
    const StepOutcome out = step(cfg, {0, 0}, {1, 0, 0, 0}, 0);
    CHECK(out.next_state == GridState{1, 0});
    CHECK(out.reward == doctest::Approx(-euclidean({1, 0}, {4, 4})));
    CHECK_FALSE(out.terminal);
  }
}

TEST_CASE("clamping keeps corner moves in place") {
  EnvConfig cfg = basic_2d();
  cfg.goal = {3, 3};
  const StepOutcome out = step(cfg, {4, 4}, {1, 0, 1, 0}, 0);
  CHECK(out.next_state == GridState{4, 4});
  CHECK(out.reward == doctest::Approx(-std::sqrt(2.0)));
}

TEST_CASE("step matches an exhaustive transition table on the 3x3 grid") {
  EnvConfig cfg;
  cfg.dims = 2;
  cfg.size = 3;
  cfg.start = {0, 0};
  cfg.goal = {2, 2};
  cfg.pits.insert({1, 1});
  cfg.horizon = 50;

  // Independent re-derivation of the transition rule.
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 3; ++y) {
      const GridState s{x, y};
      for (const ActionVector& a : testing::enumerate_actions(4)) {
        const StepOutcome out = step(cfg, s, a, 0);
        const int nx = std::clamp(x + a[0] - a[1], 0, 2);
        const int ny = std::clamp(y + a[2] - a[3], 0, 2);
        CHECK(out.next_state == GridState{nx, ny});
        if (nx == 2 && ny == 2) {
          CHECK(out.reward == 10.0);
          CHECK(out.terminal_kind == TerminalKind::goal);
        } else if (nx == 1 && ny == 1) {
          CHECK(out.reward ==
                doctest::Approx(-10.0 * std::sqrt(8.0)).epsilon(1e-12));
          CHECK(out.terminal_kind == TerminalKind::pit);
        } else {
          const double dx = nx - 2;
          const double dy = ny - 2;
          CHECK(out.reward == doctest::Approx(-std::sqrt(dx * dx + dy * dy)));
          CHECK_FALSE(out.terminal);
        }
      }
    }
  }
}

TEST_CASE("horizon fires on the last permitted step") {
  EnvConfig cfg = basic_2d();
  cfg.horizon = 3;
  const StepOutcome out = step(cfg, {0, 0}, {1, 0, 0, 0}, 2);
  CHECK(out.terminal);
  CHECK(out.terminal_kind == TerminalKind::horizon);
  CHECK_THROWS_AS(step(cfg, {0, 0}, {1, 0, 0, 0}, 3), std::invalid_argument);
}

TEST_CASE("reset returns the fixed start and is idempotent") {
  EnvConfig cfg = basic_2d();
  CHECK(reset(cfg) == GridState{0, 0});
  EnvConfig cfg3;
  cfg3.dims = 3;
  cfg3.size = 5;
  cfg3.start = {2, 1, 3};
  cfg3.goal = {4, 4, 4};
  CHECK(reset(cfg3) == GridState{2, 1, 3});
  CHECK(reset(cfg3) == reset(cfg3));
}

TEST_CASE("random_environment pit sampling") {
  SUBCASE("zero fraction gives no pits") {
    const EnvConfig cfg = random_environment(2, 5, 0.0, 3);
    CHECK(cfg.pits.empty());
    CHECK(cfg.start == GridState{0, 0});
    CHECK(cfg.goal == GridState{4, 4});
  }
  SUBCASE("fraction one fills the whole interior") {
    const EnvConfig cfg = random_environment(2, 5, 1.0, 3);
    CHECK(cfg.pits.size() == 9);
    for (const GridState& p : cfg.pits) CHECK(is_interior(cfg, p));
  }
  SUBCASE("same seed, same pits") {
    const EnvConfig a = random_environment(3, 5, 0.4, 12345);
    const EnvConfig b = random_environment(3, 5, 0.4, 12345);
    CHECK(a == b);
    const EnvConfig c = random_environment(3, 5, 0.4, 54321);
    CHECK(a.pits != c.pits);
  }
  SUBCASE("demanding too many pits fails") {
    CHECK_THROWS_AS(random_environment_with_pit_count(2, 5, 10, 1), ConfigError);
  }
}

TEST_CASE("generated environments keep the boundary clear and connected") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const EnvConfig cfg = random_environment(2, 5, 0.9, seed);
    for (const GridState& p : cfg.pits) CHECK(is_interior(cfg, p));
    CHECK(testing::bfs_distance_to_goal(cfg, cfg.start) > 0);
  }
}

TEST_CASE("step outcomes are deterministic and bounded") {
  const EnvConfig cfg = random_environment(3, 5, 0.3, 9);
  std::mt19937_64 rng = make_rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    GridState s(3);
    for (int& c : s) c = static_cast<int>(rng_below(rng, 5));
    if (is_pit(cfg, s) || s == cfg.goal) continue;
    ActionVector a(6);
    for (int& x : a) x = static_cast<int>(rng_below(rng, 2));
    const StepOutcome o1 = step(cfg, s, a, 0);
    const StepOutcome o2 = step(cfg, s, a, 0);
    CHECK(o1.next_state == o2.next_state);
    CHECK(o1.reward == o2.reward);
    CHECK(o1.terminal_kind == o2.terminal_kind);
    CHECK(in_bounds(cfg, o1.next_state));
    CHECK(o1.reward <= 10.0);
    CHECK((o1.terminal == (o1.terminal_kind != TerminalKind::none)));
  }
}

// With a short horizon the pit penalty really is below every successful
// return: enumerate all goal-reaching trajectories on a 3x3 grid and compare.
TEST_CASE("pit penalty undercuts all successful returns at proof scale") {
  EnvConfig cfg;
  cfg.dims = 2;
  cfg.size = 3;
  cfg.start = {0, 0};
  cfg.goal = {2, 2};
  cfg.pits.insert({1, 1});
  cfg.horizon = 6;

  const double penalty = pit_reward(cfg);
  const std::vector<ActionVector> actions = testing::enumerate_actions(4);
  constexpr double kNoSuccess = std::numeric_limits<double>::max();

  // Worst return over all goal-reaching continuations from (s, t), by
  // dynamic programming over the full trajectory tree.
  std::map<std::pair<GridState, int>, double> memo;
  std::function<double(const GridState&, int)> worst =
      [&](const GridState& s, int t) -> double {
    if (t >= cfg.horizon) return kNoSuccess;
    const auto key = std::make_pair(s, t);
    if (const auto it = memo.find(key); it != memo.end()) return it->second;
    double w = kNoSuccess;
    for (const ActionVector& a : actions) {
      const StepOutcome out = step(cfg, s, a, t);
      if (out.terminal_kind == TerminalKind::goal) {
        w = std::min(w, out.reward);
      } else if (!out.terminal) {
        const double tail = worst(out.next_state, t + 1);
        if (tail != kNoSuccess) w = std::min(w, out.reward + tail);
      }
    }
    memo[key] = w;
    return w;
  };
  const double worst_success = worst(cfg.start, 0);
  CHECK(worst_success < kNoSuccess);
  CHECK(penalty < worst_success);
}

TEST_CASE("environment JSON round-trips with fixed keys") {
  EnvConfig cfg = random_environment(2, 5, 0.3, 77);
  const std::string text = env_to_json(cfg);
  CHECK(text.find("\"dims\"") != std::string::npos);
  CHECK(text.find("\"size\"") != std::string::npos);
  CHECK(text.find("\"pits\"") != std::string::npos);
  CHECK(text.find("\"start\"") != std::string::npos);
  CHECK(text.find("\"goal\"") != std::string::npos);
  CHECK(text.find("\"horizon\"") != std::string::npos);
  CHECK(text.find("\"seed\"") != std::string::npos);
  CHECK(env_from_json(text) == cfg);
  CHECK_THROWS_AS(env_from_json("{\"dims\": 2}"), FormatError);
  CHECK_THROWS_AS(env_from_json("not json"), FormatError);
}

TEST_CASE("config invariants are enforced") {
  EnvConfig cfg = basic_2d();
  cfg.pits.insert({0, 1});  // boundary cell
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = basic_2d();
  cfg.goal = cfg.start;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = basic_2d();
  cfg.start = {0, 9};
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}
