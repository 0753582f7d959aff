#ifndef TAGPARSE_DEP_CODEC_HPP
#define TAGPARSE_DEP_CODEC_HPP

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tagparse/conllu.hpp"
#include "tagparse/util.hpp"

namespace tagparse {

// PoS-offset head encoding: the head of a word is the `offset`-th closest
// word to the right with tag `head_pos` (offset > 0), or the |offset|-th
// closest to the left (offset < 0). The virtual root is position 0 and
// carries a reserved sentinel tag, so a root word encodes as (-1, sentinel).
struct DepLabel {
  int offset = 0;  // never 0 in a well-formed label
  std::string head_pos;
  std::string relation;

  bool operator==(const DepLabel&) const = default;
};

struct DepCodecOptions {
  char field_sep = '@';
  std::string root_pos = "ROOT";
  std::string root_relation = "root";
  std::string fallback_relation = "dep";
};

struct DepRepairStats {
  int invalid_heads = 0;   // unresolvable offsets attached to the root
  int created_roots = 0;   // no token selected the dummy root
  int extra_roots = 0;     // additional root selections demoted to children
  int cycles_broken = 0;

  int total() const { return invalid_heads + created_roots + extra_roots + cycles_broken; }
};

inline constexpr int kInvalidHead = -1;

inline std::string serialize_dep_label(const DepLabel& l, const DepCodecOptions& opts = {}) {
  std::string out = std::to_string(l.offset);
  out += opts.field_sep;
  out += l.head_pos;
  out += opts.field_sep;
  out += l.relation;
  return out;
}

inline std::optional<DepLabel> parse_dep_label(const std::string& text,
                                               const DepCodecOptions& opts = {}) {
  auto parts = util::split(text, opts.field_sep);
  if (parts.size() != 3) return std::nullopt;
  auto o = util::parse_int(parts[0]);
  if (!o || *o == 0 || parts[1].empty() || parts[2].empty()) return std::nullopt;
  return DepLabel{static_cast<int>(*o), parts[1], parts[2]};
}

inline std::optional<std::string> validate_dependencies(const DependencySentence& sent) {
  size_t n = sent.size();
  if (n == 0) return "empty sentence";
  if (sent.heads.size() != n || sent.deprels.size() != n)
    return "heads/deprels length does not match token count";
  int roots = 0;
  for (size_t i = 0; i < n; ++i) {
    if (sent.heads[i] < 0 || sent.heads[i] > static_cast<int>(n))
      return "head index out of range at token " + std::to_string(i + 1);
    if (sent.heads[i] == static_cast<int>(i) + 1)
      return "token " + std::to_string(i + 1) + " is its own head";
    if (sent.heads[i] == 0) ++roots;
  }
  if (roots != 1) return "expected exactly one root, found " + std::to_string(roots);
  // walk up from each token; a chain longer than n means a cycle
  for (size_t i = 0; i < n; ++i) {
    int cur = static_cast<int>(i) + 1;
    for (size_t steps = 0; cur != 0; ++steps) {
      if (steps > n) return "cycle through token " + std::to_string(i + 1);
      cur = sent.heads[cur - 1];
    }
  }
  return std::nullopt;
}

// Total over valid trees, projective or not.
inline std::vector<DepLabel> encode_dependencies(const DependencySentence& sent,
                                                 const DepCodecOptions& opts = {}) {
  if (auto err = validate_dependencies(sent))
    throw std::invalid_argument("not a valid dependency tree: " + *err);
  size_t n = sent.size();
  std::vector<DepLabel> labels(n);
  for (size_t i = 0; i < n; ++i) {
    int pos = static_cast<int>(i) + 1;
    int head = sent.heads[i];
    DepLabel& l = labels[i];
    l.relation = sent.deprels[i];
    if (head == 0) {
      l.offset = -1;
      l.head_pos = opts.root_pos;
      continue;
    }
    l.head_pos = sent.tokens[head - 1].pos;
    int count = 0;
    if (head > pos) {
      for (int j = pos + 1; j <= head; ++j)
        if (sent.tokens[j - 1].pos == l.head_pos) ++count;
      l.offset = count;
    } else {
      for (int j = pos - 1; j >= head; --j)
        if (sent.tokens[j - 1].pos == l.head_pos) ++count;
      l.offset = -count;
    }
  }
  return labels;
}

// Every directed cycle of the head function, each as its ascending token
// index list; cycles ordered by smallest member. heads[i] == 0 terminates.
inline std::vector<std::vector<int>> detect_cycles(const std::vector<int>& heads) {
  int n = static_cast<int>(heads.size());
  for (int h : heads)
    if (h < 0 || h > n) throw std::invalid_argument("head index out of range");
  std::vector<std::vector<int>> cycles;
  enum { white, gray, black };
  std::vector<int> state(static_cast<size_t>(n) + 1, white);
  state[0] = black;
  for (int start = 1; start <= n; ++start) {
    if (state[start] != white) continue;
    std::vector<int> chain;
    int cur = start;
    while (cur != 0 && state[cur] == white) {
      state[cur] = gray;
      chain.push_back(cur);
      cur = heads[cur - 1];
    }
    if (cur != 0 && state[cur] == gray) {
      auto it = std::find(chain.begin(), chain.end(), cur);
      std::vector<int> cycle(it, chain.end());
      std::sort(cycle.begin(), cycle.end());
      cycles.push_back(std::move(cycle));
    }
    for (int v : chain) state[v] = black;
  }
  std::sort(cycles.begin(), cycles.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return cycles;
}

// Postprocessing that turns any candidate head assignment into a
// single-rooted acyclic tree:
//   1. no root selected -> first token with the root relation, else the
//      first token; several roots -> the first stays, the rest become its
//      children.
//   2. unresolvable heads attach to that root.
//   3. while cycles remain, the smallest token index on any cycle is
//      reattached to the root.
inline DependencySentence repair_tree(const std::vector<std::string>& words,
                                      const std::vector<std::string>& tags,
                                      std::vector<int> heads,
                                      std::vector<std::string> deprels,
                                      const DepCodecOptions& opts = {},
                                      DepRepairStats* stats_out = nullptr) {
  size_t n = words.size();
  if (n == 0) throw std::invalid_argument("cannot repair an empty sentence");
  if (tags.size() != n || heads.size() != n || deprels.size() != n)
    throw std::invalid_argument("words, tags, heads and deprels must have equal length");
  DepRepairStats stats;

  for (size_t i = 0; i < n; ++i) {
    if (heads[i] > static_cast<int>(n) || heads[i] == static_cast<int>(i) + 1 || heads[i] < -1)
      heads[i] = kInvalidHead;
    if (deprels[i].empty()) deprels[i] = opts.fallback_relation;
  }

  int root = 0;
  for (size_t i = 0; i < n; ++i) {
    if (heads[i] == 0) {
      if (root == 0) {
        root = static_cast<int>(i) + 1;
      } else {
        heads[i] = root;
        ++stats.extra_roots;
      }
    }
  }
  if (root == 0) {
    for (size_t i = 0; i < n && root == 0; ++i)
      if (deprels[i] == opts.root_relation) root = static_cast<int>(i) + 1;
    if (root == 0) root = 1;
    heads[root - 1] = 0;
    ++stats.created_roots;
  }

  for (size_t i = 0; i < n; ++i) {
    if (heads[i] == kInvalidHead) {
      heads[i] = root;
      ++stats.invalid_heads;
    }
  }

  while (true) {
    auto cycles = detect_cycles(heads);
    if (cycles.empty()) break;
    int first = cycles.front().front();
    heads[first - 1] = root;
    ++stats.cycles_broken;
  }

  DependencySentence out;
  out.heads = std::move(heads);
  out.deprels = std::move(deprels);
  out.tokens.reserve(n);
  for (size_t i = 0; i < n; ++i)
    out.tokens.push_back({static_cast<int>(i) + 1, words[i], tags[i]});
  if (stats_out) *stats_out = stats;
  return out;
}

// Resolves each (offset, pos) against the tag sequence (virtual root at
// position 0 carries the sentinel tag), then repairs.
inline DependencySentence decode_dependencies(const std::vector<DepLabel>& labels,
                                              const std::vector<std::string>& words,
                                              const std::vector<std::string>& tags,
                                              const DepCodecOptions& opts = {},
                                              DepRepairStats* stats_out = nullptr) {
  if (labels.empty()) throw std::invalid_argument("cannot decode an empty label sequence");
  if (labels.size() != words.size() || labels.size() != tags.size())
    throw std::invalid_argument("labels, words and tags must have equal length");
  int n = static_cast<int>(labels.size());

  auto tag_at = [&](int j) -> const std::string& {
    return j == 0 ? opts.root_pos : tags[static_cast<size_t>(j) - 1];
  };

  std::vector<int> heads(static_cast<size_t>(n), kInvalidHead);
  std::vector<std::string> deprels(static_cast<size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const DepLabel& l = labels[static_cast<size_t>(i) - 1];
    deprels[static_cast<size_t>(i) - 1] =
        l.relation.empty() ? opts.fallback_relation : l.relation;
    if (l.offset == 0) continue;
    int remaining = std::abs(l.offset);
    if (l.offset > 0) {
      for (int j = i + 1; j <= n; ++j) {
        if (tag_at(j) == l.head_pos && --remaining == 0) {
          heads[static_cast<size_t>(i) - 1] = j;
          break;
        }
      }
    } else {
      for (int j = i - 1; j >= 0; --j) {
        if (tag_at(j) == l.head_pos && --remaining == 0) {
          heads[static_cast<size_t>(i) - 1] = j;
          break;
        }
      }
    }
  }
  return repair_tree(words, tags, std::move(heads), std::move(deprels), opts, stats_out);
}

}  // namespace tagparse

#endif
