#ifndef TAGPARSE_TREE_HPP
#define TAGPARSE_TREE_HPP

#include <string>
#include <utility>
#include <vector>

#include "tagparse/util.hpp"

namespace tagparse {

// Constituent tree node. Internal nodes carry a nonterminal (or PoS tag at
// preterminals); leaves carry the word form in `label` and have no children.
struct TreeNode {
  std::string label;
  std::vector<TreeNode> children;

  TreeNode() = default;
  explicit TreeNode(std::string lab) : label(std::move(lab)) {}
  TreeNode(std::string lab, std::vector<TreeNode> kids)
      : label(std::move(lab)), children(std::move(kids)) {}

  bool is_leaf() const { return children.empty(); }
  bool is_preterminal() const { return children.size() == 1 && children[0].is_leaf(); }

  bool operator==(const TreeNode&) const = default;
};

using ConstituentTree = TreeNode;

inline void collect_leaves(const TreeNode& node, std::vector<std::string>& forms,
                           std::vector<std::string>& tags) {
  if (node.is_preterminal()) {
    tags.push_back(node.label);
    forms.push_back(node.children[0].label);
    return;
  }
  for (const auto& child : node.children) collect_leaves(child, forms, tags);
}

inline std::vector<std::string> leaf_forms(const TreeNode& t) {
  std::vector<std::string> forms, tags;
  collect_leaves(t, forms, tags);
  return forms;
}

inline std::vector<std::string> preterminal_tags(const TreeNode& t) {
  std::vector<std::string> forms, tags;
  collect_leaves(t, forms, tags);
  return tags;
}

inline size_t leaf_count(const TreeNode& node) {
  if (node.is_leaf()) return 1;
  size_t n = 0;
  for (const auto& child : node.children) n += leaf_count(child);
  return n;
}

// Splits `+`-joined labels on non-preterminal internal nodes back into
// nested unary chains (the inverse of chain collapsing).
inline TreeNode expand_unary_chains(const TreeNode& node, char sep = '+') {
  if (node.is_leaf() || node.is_preterminal()) return node;
  std::vector<TreeNode> kids;
  kids.reserve(node.children.size());
  for (const auto& child : node.children) kids.push_back(expand_unary_chains(child, sep));

  if (node.label.find(sep) == std::string::npos)
    return TreeNode(node.label, std::move(kids));
  auto parts = util::split(node.label, sep);
  TreeNode out(parts.back(), std::move(kids));
  for (size_t i = parts.size() - 1; i-- > 0;)
    out = TreeNode(parts[i], std::vector<TreeNode>{std::move(out)});
  return out;
}

}  // namespace tagparse

#endif
