#ifndef TAGPARSE_CONST_CODEC_HPP
#define TAGPARSE_CONST_CODEC_HPP

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tagparse/tree.hpp"
#include "tagparse/util.hpp"

namespace tagparse {

// Per-word constituent label. `n` holds the number of tree levels shared
// with the next word: absolute for the first word, delta against the
// previous value for the rest. `nonterminal` is the lowest nonterminal the
// two words share; `unary_chain` the `+`-joined chain sitting directly over
// this word's preterminal, if any. The last word of a sentence gets a
// distinguished end-of-sentence label that carries only `unary_chain`.
struct ConstLabel {
  bool eos = false;
  int n = 0;
  std::string nonterminal;
  std::string unary_chain;

  bool operator==(const ConstLabel&) const = default;
};

struct ConstCodecOptions {
  char chain_sep = '+';
  char field_sep = '@';
  std::string eos_mark = "EOS";
  // Root used when a sentence decodes with no usable nonterminal at all.
  std::string fallback_nonterminal = "S";
};

struct ConstRepairStats {
  int clamped_depths = 0;
  int label_conflicts = 0;
  int empty_levels = 0;
  int fallback_labels = 0;

  int total() const { return clamped_depths + label_conflicts + empty_levels + fallback_labels; }
};

inline std::string serialize_const_label(const ConstLabel& l,
                                         const ConstCodecOptions& opts = {}) {
  std::string out;
  if (l.eos) {
    out = opts.eos_mark;
  } else {
    out = std::to_string(l.n);
    out += opts.field_sep;
    out += l.nonterminal;
  }
  if (!l.unary_chain.empty()) {
    out += opts.field_sep;
    out += l.unary_chain;
  }
  return out;
}

inline std::optional<ConstLabel> parse_const_label(const std::string& text,
                                                   const ConstCodecOptions& opts = {}) {
  auto parts = util::split(text, opts.field_sep);
  ConstLabel l;
  if (parts[0] == opts.eos_mark) {
    if (parts.size() > 2) return std::nullopt;
    l.eos = true;
    if (parts.size() == 2) l.unary_chain = parts[1];
    return l;
  }
  if (parts.size() < 2 || parts.size() > 3) return std::nullopt;
  auto n = util::parse_int(parts[0]);
  if (!n || parts[1].empty()) return std::nullopt;
  l.n = static_cast<int>(*n);
  l.nonterminal = parts[1];
  if (parts.size() == 3) l.unary_chain = parts[2];
  return l;
}

// Merges every chain of single-child internal nodes into one node labeled
// with the top-to-bottom chain joined by the separator. Chains stop above
// preterminals, so PoS tags are never merged. Idempotent.
inline TreeNode collapse_unary_chains(const TreeNode& node, char sep = '+') {
  if (node.is_leaf() || node.is_preterminal()) return node;
  std::string label = node.label;
  const TreeNode* cur = &node;
  while (cur->children.size() == 1 && !cur->children[0].is_leaf() &&
         !cur->children[0].is_preterminal()) {
    cur = &cur->children[0];
    label += sep;
    label += cur->label;
  }
  std::vector<TreeNode> kids;
  kids.reserve(cur->children.size());
  for (const auto& child : cur->children) kids.push_back(collapse_unary_chains(child, sep));
  return TreeNode(std::move(label), std::move(kids));
}

namespace detail {

struct ConstLeafInfo {
  std::vector<const TreeNode*> ancestors;  // nodes with >= 2 children, root first
  std::string unary_chain;
  std::string tag;
  std::string form;
};

inline void collect_const_leaves(const TreeNode& node,
                                 std::vector<const TreeNode*>& path,
                                 std::vector<ConstLeafInfo>& out) {
  if (node.is_preterminal()) {
    out.push_back({path, "", node.label, node.children[0].label});
    return;
  }
  if (node.children.size() == 1 && node.children[0].is_preterminal()) {
    const TreeNode& pret = node.children[0];
    out.push_back({path, node.label, pret.label, pret.children[0].label});
    return;
  }
  path.push_back(&node);
  for (const auto& child : node.children) collect_const_leaves(child, path, out);
  path.pop_back();
}

}  // namespace detail

// The linearization: one label per word. The input is chain-collapsed first,
// so the round trip lands on collapse_unary_chains(tree).
inline std::vector<ConstLabel> encode_constituents(const TreeNode& tree,
                                                   const ConstCodecOptions& opts = {}) {
  if (tree.is_leaf()) throw std::invalid_argument("cannot encode a bare leaf");
  TreeNode collapsed = collapse_unary_chains(tree, opts.chain_sep);

  std::vector<detail::ConstLeafInfo> leaves;
  std::vector<const TreeNode*> path;
  detail::collect_const_leaves(collapsed, path, leaves);
  if (leaves.empty()) throw std::invalid_argument("tree has no leaves");

  size_t n = leaves.size();
  std::vector<ConstLabel> labels(n);
  int prev = 0;
  for (size_t i = 0; i + 1 < n; ++i) {
    const auto& a = leaves[i].ancestors;
    const auto& b = leaves[i + 1].ancestors;
    size_t common = 0;
    while (common < a.size() && common < b.size() && a[common] == b[common]) ++common;
    int abs_depth = static_cast<int>(common);
    labels[i].n = abs_depth - prev;
    labels[i].nonterminal = a[common - 1]->label;
    labels[i].unary_chain = leaves[i].unary_chain;
    prev = abs_depth;
  }
  labels[n - 1].eos = true;
  labels[n - 1].unary_chain = leaves[n - 1].unary_chain;
  return labels;
}

namespace detail {

struct ConstBuildNode {
  std::string label;
  bool labeled = false;
  std::vector<long> kids;  // >= 0: pool index; < 0: ~(leaf position)
};

inline std::vector<TreeNode> materialize_const(const std::vector<ConstBuildNode>& pool,
                                               long id,
                                               const std::vector<TreeNode>& leaf_subtrees,
                                               ConstRepairStats& stats) {
  const ConstBuildNode& bn = pool[static_cast<size_t>(id)];
  std::vector<TreeNode> kids;
  for (long k : bn.kids) {
    if (k < 0) {
      kids.push_back(leaf_subtrees[static_cast<size_t>(~k)]);
    } else {
      auto sub = materialize_const(pool, k, leaf_subtrees, stats);
      for (auto& s : sub) kids.push_back(std::move(s));
    }
  }
  if (!bn.labeled) {
    // empty intermediate level: drop it and hand the children up
    ++stats.empty_levels;
    return kids;
  }
  return {TreeNode(bn.label, std::move(kids))};
}

}  // namespace detail

// Rebuilds a tree from any label sequence. Encoder output decodes exactly;
// arbitrary sequences are repaired: depths below 1 are clamped, conflicting
// nonterminal predictions keep the first one, unlabeled intermediate levels
// are deleted.
inline TreeNode decode_constituents(const std::vector<ConstLabel>& labels,
                                    const std::vector<std::string>& words,
                                    const std::vector<std::string>& tags,
                                    const ConstCodecOptions& opts = {},
                                    ConstRepairStats* stats_out = nullptr) {
  if (labels.empty()) throw std::invalid_argument("cannot decode an empty label sequence");
  if (labels.size() != words.size() || labels.size() != tags.size())
    throw std::invalid_argument("labels, words and tags must have equal length");

  ConstRepairStats stats;
  size_t n = labels.size();

  auto make_leaf_subtree = [&](size_t i) {
    TreeNode pret(tags[i], std::vector<TreeNode>{TreeNode(words[i])});
    if (!labels[i].unary_chain.empty())
      return TreeNode(labels[i].unary_chain, std::vector<TreeNode>{std::move(pret)});
    return pret;
  };

  if (n == 1) {
    TreeNode leaf = make_leaf_subtree(0);
    TreeNode tree = leaf;
    if (labels[0].unary_chain.empty()) {
      if (!labels[0].eos && !labels[0].nonterminal.empty()) {
        tree = TreeNode(labels[0].nonterminal, std::vector<TreeNode>{std::move(leaf)});
      } else {
        ++stats.fallback_labels;
        tree = TreeNode(opts.fallback_nonterminal, std::vector<TreeNode>{std::move(leaf)});
      }
    }
    if (stats_out) *stats_out = stats;
    return tree;
  }

  // Absolute depths via prefix sum; positions whose label carries no usable
  // (n, c) — stray EOS forms, empty nonterminals — act as (+1, fallback).
  std::vector<int> abs_depth(n - 1);
  std::vector<std::string> nts(n - 1);
  int prev = 0;
  for (size_t i = 0; i + 1 < n; ++i) {
    int delta;
    if (labels[i].eos || labels[i].nonterminal.empty()) {
      ++stats.fallback_labels;
      delta = 1;
      nts[i] = opts.fallback_nonterminal;
    } else {
      delta = labels[i].n;
      nts[i] = labels[i].nonterminal;
    }
    int d = prev + delta;
    if (d < 1) {
      ++stats.clamped_depths;
      d = 1;
    }
    abs_depth[i] = d;
    prev = d;
  }

  std::vector<detail::ConstBuildNode> pool;
  std::vector<long> open;  // pool ids, root first
  std::vector<TreeNode> leaf_subtrees(n);
  prev = 0;
  for (size_t i = 0; i < n; ++i) {
    leaf_subtrees[i] = make_leaf_subtree(i);
    int cur = i + 1 < n ? abs_depth[i] : 0;
    int attach = std::max(prev, cur);
    while (static_cast<int>(open.size()) < attach) {
      long id = static_cast<long>(pool.size());
      pool.push_back({});
      if (!open.empty()) pool[static_cast<size_t>(open.back())].kids.push_back(id);
      open.push_back(id);
    }
    pool[static_cast<size_t>(open[attach - 1])].kids.push_back(~static_cast<long>(i));
    if (i + 1 < n) {
      auto& target = pool[static_cast<size_t>(open[cur - 1])];
      if (!target.labeled) {
        target.label = nts[i];
        target.labeled = true;
      } else if (target.label != nts[i]) {
        ++stats.label_conflicts;
      }
    }
    while (static_cast<int>(open.size()) > cur) open.pop_back();
    prev = cur;
  }

  auto roots = detail::materialize_const(pool, 0, leaf_subtrees, stats);
  TreeNode tree = roots.size() == 1 ? std::move(roots[0])
                                    : TreeNode(opts.fallback_nonterminal, std::move(roots));
  if (stats_out) *stats_out = stats;
  return tree;
}

// Structural well-formedness check used by decode fuzzing and the CLI:
// single labeled root, every internal node labeled and nonempty, leaves in
// sentence order, each word under its own preterminal.
inline std::optional<std::string> validate_constituents(const TreeNode& tree,
                                                        const std::vector<std::string>& words) {
  if (tree.is_leaf()) return "root is a bare leaf";
  if (tree.label.empty()) return "root has an empty label";

  std::vector<std::string> forms;
  std::string err;
  auto walk = [&](auto&& self, const TreeNode& node) -> bool {
    if (node.label.empty()) {
      err = "internal node with empty label";
      return false;
    }
    if (node.is_preterminal()) {
      forms.push_back(node.children[0].label);
      return true;
    }
    if (node.children.empty()) {
      err = "internal node '" + node.label + "' with zero children";
      return false;
    }
    for (const auto& child : node.children) {
      if (child.is_leaf()) {
        err = "word '" + child.label + "' not under a preterminal";
        return false;
      }
      if (!self(self, child)) return false;
    }
    return true;
  };
  if (!walk(walk, tree)) return err;
  if (forms != words) return "leaf sequence does not match the sentence";
  return std::nullopt;
}

}  // namespace tagparse

#endif
