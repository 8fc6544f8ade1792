#include <doctest.h>

#include <algorithm>

#include "brave/action_tree.hpp"
#include "brave/rng.hpp"
#include "oracles.hpp"

using namespace brave;

TEST_CASE("full tree over three ternary dimensions") {
  const ActionTree tree = ActionTree::build_full({3, 3, 3});
  CHECK(tree.num_leaves() == 27);
  CHECK(tree.m_max() == 3);
  CHECK(tree.children(tree.root()).size() == 3);
  for (const auto& [value, child] : tree.children(tree.root())) {
    CHECK(tree.children(child).size() == 3);
  }
  // Path root -> a1=1 -> a2=2 carries [1,2,0]: defaults fill the rest.
  const int n1 = tree.child(tree.root(), 1);
  const int n2 = tree.child(n1, 2);
  CHECK(tree.node_action(n2) == ActionVector{1, 2, 0});
  CHECK(tree.node(n2).depth == 2);
  CHECK_FALSE(tree.is_leaf(n2));
}

TEST_CASE("tiny full trees") {
  const ActionTree tree = ActionTree::build_full({2});
  CHECK(tree.num_nodes() == 3);
  CHECK(tree.num_leaves() == 2);
  CHECK(tree.parent(tree.root()) == -1);

  const ActionTree t22 = ActionTree::build_full({2, 2});
  const int d1 = t22.child(t22.root(), 1);
  CHECK(t22.node_action(d1) == ActionVector{1, 0});
  CHECK_THROWS_AS(ActionTree::build_full(std::vector<int>(30, 2)), ConfigError);
}

TEST_CASE("sparsified tree merges shared prefixes") {
  const ActionTree tree =
      ActionTree::build_sparsified({2, 2}, std::vector<ActionVector>{{0, 0}, {1, 0}});
  CHECK(tree.num_leaves() == 2);
  CHECK(tree.children(tree.root()).size() == 2);
  for (const auto& [value, child] : tree.children(tree.root())) {
    const auto& kids = tree.children(child);
    REQUIRE(kids.size() == 1);
    CHECK(kids[0].first == 0);
  }
  CHECK_THROWS_AS(ActionTree::build_sparsified({2, 2}, std::set<ActionVector>{}),
                  ConfigError);
}

TEST_CASE("sparsifying on the complete set matches the full tree") {
  const std::vector<int> dims{2, 2, 2, 2};
  const ActionTree full = ActionTree::build_full(dims);
  const ActionTree sparse = ActionTree::build_sparsified(
      dims, testing::enumerate_actions(4));
  CHECK(full.num_nodes() == sparse.num_nodes());
  CHECK(full.leaf_actions() == sparse.leaf_actions());
}

TEST_CASE("sparsified trees contain exactly the given actions") {
  std::mt19937_64 rng = make_rng(17);
  std::set<ActionVector> actions;
  while (actions.size() < 100) {
    ActionVector a(8);
    for (int& x : a) x = static_cast<int>(rng_below(rng, 2));
    actions.insert(std::move(a));
  }
  const ActionTree tree = ActionTree::build_sparsified(std::vector<int>(8, 2), actions);
  const std::vector<ActionVector> leaves = tree.leaf_actions();
  CHECK(std::set<ActionVector>(leaves.begin(), leaves.end()) == actions);
  CHECK(tree.num_leaves() == 100);

  // Every stored action is locatable and spells itself.
  for (const ActionVector& a : actions) {
    const int leaf = tree.locate(a);
    CHECK(tree.node_action(leaf) == a);
    CHECK(tree.node(leaf).depth == 8);
  }
}

TEST_CASE("construction is order-independent") {
  std::mt19937_64 rng = make_rng(3);
  std::vector<ActionVector> actions;
  for (int i = 0; i < 40; ++i) {
    ActionVector a(6);
    for (int& x : a) x = static_cast<int>(rng_below(rng, 2));
    actions.push_back(std::move(a));
  }
  const ActionTree forward = ActionTree::build_sparsified(std::vector<int>(6, 2), actions);
  std::reverse(actions.begin(), actions.end());
  const ActionTree reversed = ActionTree::build_sparsified(std::vector<int>(6, 2), actions);
  REQUIRE(forward.num_nodes() == reversed.num_nodes());
  for (int id = 0; id < forward.num_nodes(); ++id) {
    CHECK(forward.node_action(id) == reversed.node_action(id));
    CHECK(forward.node(id).children == reversed.node(id).children);
    CHECK(forward.node(id).child_mask == reversed.node(id).child_mask);
  }
}

TEST_CASE("locate rejects actions outside the tree") {
  const ActionTree tree =
      ActionTree::build_sparsified({2, 2}, std::vector<ActionVector>{{1, 1}});
  const int leaf = tree.locate({1, 1});
  CHECK(tree.node(leaf).depth == 2);
  CHECK_THROWS_AS(tree.locate({0, 1}), TreeLookupError);
  CHECK_THROWS_AS(tree.locate({1, 1, 0}), TreeLookupError);
}

TEST_CASE("structural invariants hold on random trees") {
  std::mt19937_64 rng = make_rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng_below(rng, 5));
    const ActionTree tree = testing::random_binary_tree(n, 40, rng);
    int prefix_bound = 1 + n * tree.num_leaves();
    CHECK(tree.num_nodes() <= prefix_bound);
    for (int id = 0; id < tree.num_nodes(); ++id) {
      const TreeNode& node = tree.node(id);
      CHECK(node.depth <= n);
      // Mask and child list agree.
      int mask_bits = 0;
      for (std::uint8_t m : node.child_mask) mask_bits += m;
      CHECK(mask_bits == static_cast<int>(node.children.size()));
      CHECK(std::is_sorted(node.children.begin(), node.children.end()));
      if (node.depth == n) CHECK(node.children.empty());
      if (id != tree.root()) {
        const TreeNode& parent = tree.node(node.parent);
        // Child differs from parent exactly at the parent's depth, or not
        // at all when it picked the default value.
        for (int k = 0; k < n; ++k) {
          if (k == parent.depth) continue;
          CHECK(node.action[static_cast<std::size_t>(k)] ==
                parent.action[static_cast<std::size_t>(k)]);
        }
      }
    }
  }
}
