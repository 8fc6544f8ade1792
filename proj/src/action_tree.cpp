#include "brave/action_tree.hpp"

#include <algorithm>

namespace brave {

ActionTree::ActionTree(std::vector<int> dims, bool sparsified)
    : dims_(std::move(dims)), sparsified_(sparsified) {
  if (dims_.empty()) throw ConfigError("at least one sub-action dimension required");
  for (int c : dims_) {
    if (c < 1) throw ConfigError("sub-action cardinalities must be >= 1");
  }
  m_max_ = *std::max_element(dims_.begin(), dims_.end());
  TreeNode root;
  root.action.assign(dims_.size(), 0);
  root.child_mask.assign(static_cast<std::size_t>(m_max_), 0);
  nodes_.push_back(std::move(root));
}

int ActionTree::add_child(int parent_id, int value) {
  TreeNode child;
  const TreeNode& p = node(parent_id);
  child.action = p.action;
  child.action[static_cast<std::size_t>(p.depth)] = value;
  child.depth = p.depth + 1;
  child.parent = parent_id;
  child.child_mask.assign(static_cast<std::size_t>(m_max_), 0);
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(std::move(child));

  TreeNode& parent = nodes_[static_cast<std::size_t>(parent_id)];
  auto it = std::lower_bound(
      parent.children.begin(), parent.children.end(), value,
      [](const std::pair<int, int>& c, int v) { return c.first < v; });
  parent.children.insert(it, {value, id});
  parent.child_mask[static_cast<std::size_t>(value)] = 1;
  return id;
}

int ActionTree::child(int id, int value) const {
  const TreeNode& n = node(id);
  if (value < 0 || value >= m_max_ || !n.child_mask[static_cast<std::size_t>(value)]) {
    return -1;
  }
  auto it = std::lower_bound(
      n.children.begin(), n.children.end(), value,
      [](const std::pair<int, int>& c, int v) { return c.first < v; });
  return it->second;
}

void ActionTree::insert(const ActionVector& action) {
  if (action.size() != dims_.size()) {
    throw ConfigError("action length does not match sub-action dimensions");
  }
  int cur = root();
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    const int value = action[k];
    if (value < 0 || value >= dims_[k]) {
      throw ConfigError("sub-action value outside its set");
    }
    int next = child(cur, value);
    if (next < 0) next = add_child(cur, value);
    cur = next;
  }
  ++num_leaves_;
}

ActionTree ActionTree::build_full(const std::vector<int>& dims) {
  double leaves = 1.0;
  for (int c : dims) leaves *= static_cast<double>(c);
  if (leaves > static_cast<double>(1 << 20)) {
    throw ConfigError("full tree would exceed 2^20 leaves");
  }
  ActionTree tree(dims, /*sparsified=*/false);
  // Enumerate the full product in lexicographic order.
  ActionVector cur(dims.size(), 0);
  const std::size_t total = static_cast<std::size_t>(leaves);
  for (std::size_t n = 0; n < total; ++n) {
    tree.insert(cur);
    for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
      if (++cur[static_cast<std::size_t>(i)] < dims[static_cast<std::size_t>(i)]) break;
      cur[static_cast<std::size_t>(i)] = 0;
    }
  }
  return tree;
}

ActionTree ActionTree::build_sparsified(const std::vector<int>& dims,
                                        const std::set<ActionVector>& actions) {
  if (actions.empty()) throw ConfigError("cannot sparsify on an empty action set");
  ActionTree tree(dims, /*sparsified=*/true);
  for (const ActionVector& a : actions) tree.insert(a);
  return tree;
}

ActionTree ActionTree::build_sparsified(const std::vector<int>& dims,
                                        const std::vector<ActionVector>& actions) {
  return build_sparsified(dims, std::set<ActionVector>(actions.begin(), actions.end()));
}

int ActionTree::locate(const ActionVector& action) const {
  if (action.size() != dims_.size()) {
    throw TreeLookupError("action length does not match tree dimensions");
  }
  int cur = root();
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    const int next = child(cur, action[k]);
    if (next < 0) throw TreeLookupError("action not present in tree");
    cur = next;
  }
  return cur;
}

std::vector<ActionVector> ActionTree::leaf_actions() const {
  std::vector<ActionVector> out;
  out.reserve(static_cast<std::size_t>(num_leaves_));
  // Children are value-sorted, so a DFS yields lexicographic order.
  std::vector<int> stack{root()};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const TreeNode& n = node(id);
    if (n.depth == num_dims()) {
      out.push_back(n.action);
      continue;
    }
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
      stack.push_back(it->second);
    }
  }
  return out;
}

}  // namespace brave
