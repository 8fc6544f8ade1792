#pragma once

/**
 * Prefix tree over discrete action vectors.
 *
 * Every node carries a complete action: the sub-action values fixed along
 * the path from the root plus the default value (0) for all dimensions not
 * yet assigned. A node at depth k assigns dimension k-1; depth-N nodes are
 * leaves, so any leaf is reached in at most N levels. Sparsified trees
 * contain exactly a given action set as depth-N paths with shared prefixes
 * merged. Trees are immutable after construction; concurrent read-only
 * traversal is safe.
 */

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "brave/types.hpp"

namespace brave {

struct TreeNode {
  ActionVector action;  // complete, defaults filled
  int depth = 0;        // 0 = root
  int parent = -1;
  // (sub-action value, node id), ascending by value.
  std::vector<std::pair<int, int>> children;
  // child_mask[v] != 0 iff a child with sub-action value v exists;
  // length m_max at every node.
  std::vector<std::uint8_t> child_mask;
};

class ActionTree {
 public:
  // Complete tree with prod(dims) leaves; guarded beyond 2^20 leaves.
  static ActionTree build_full(const std::vector<int>& dims);

  // Prefix tree containing exactly `actions` as depth-N paths. The result
  // is canonical: insertion order of the input set never matters.
  static ActionTree build_sparsified(const std::vector<int>& dims,
                                     const std::set<ActionVector>& actions);
  static ActionTree build_sparsified(const std::vector<int>& dims,
                                     const std::vector<ActionVector>& actions);

  int root() const { return 0; }
  const TreeNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  const ActionVector& node_action(int id) const { return node(id).action; }
  int parent(int id) const { return node(id).parent; }
  const std::vector<std::pair<int, int>>& children(int id) const {
    return node(id).children;
  }
  // Child with sub-action value `value`, or -1.
  int child(int id, int value) const;
  bool is_leaf(int id) const { return node(id).depth == num_dims(); }

  // Leaf whose root-to-leaf path spells `action`. Throws TreeLookupError
  // when the action is not in the tree (dataset/tree mismatch).
  int locate(const ActionVector& action) const;

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_leaves() const { return num_leaves_; }
  int num_dims() const { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  int m_max() const { return m_max_; }
  bool sparsified() const { return sparsified_; }

  // All depth-N actions, in tree (lexicographic) order.
  std::vector<ActionVector> leaf_actions() const;

 private:
  ActionTree(std::vector<int> dims, bool sparsified);
  int add_child(int parent_id, int value);
  void insert(const ActionVector& action);

  std::vector<int> dims_;
  int m_max_ = 0;
  bool sparsified_ = false;
  int num_leaves_ = 0;
  std::vector<TreeNode> nodes_;
};

}  // namespace brave
