#ifndef TAGPARSE_METRICS_HPP
#define TAGPARSE_METRICS_HPP

#include <algorithm>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tagparse/conllu.hpp"
#include "tagparse/tree.hpp"
#include "tagparse/util.hpp"

namespace tagparse {

struct MatchCounts {
  long long match = 0, gold = 0, pred = 0;

  MatchCounts& operator+=(const MatchCounts& o) {
    match += o.match;
    gold += o.gold;
    pred += o.pred;
    return *this;
  }
  double precision() const { return pred == 0 ? 0.0 : 100.0 * match / pred; }
  double recall() const { return gold == 0 ? 0.0 : 100.0 * match / gold; }
  double f1() const {
    double p = precision(), r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
};

// evalb-style scoring parameters. Deleted preterminals remove their words
// from the sentence (shifting span indices); deleted internal labels are
// spliced out. The equivalence map rewrites labels before comparison.
struct EvalParams {
  std::set<std::string> delete_labels = {"TOP", ",", ":", "``", "''", "."};
  std::map<std::string, std::string> equivalent_labels = {{"PRT", "ADVP"}};
  int span_length_tail = 10;   // lengths >= tail share one bucket
  int displacement_tail = 10;  // |displacement| >= tail shares the signed tail bucket
  bool exclude_punct = false;  // dep scoring: skip tokens whose gold relation is punct
  char chain_sep = '+';

  std::string map_label(const std::string& label) const {
    auto it = equivalent_labels.find(label);
    return it == equivalent_labels.end() ? label : it->second;
  }
};

// Parameter file: `DELETE_LABEL X`, `EQ_LABEL FROM TO`, `SPAN_LENGTH_TAIL n`,
// `DISPLACEMENT_TAIL n`, `EXCLUDE_PUNCT 0|1`; `#` comments. A file replaces
// the default label sets entirely.
inline EvalParams read_eval_params(std::istream& is) {
  EvalParams params;
  params.delete_labels.clear();
  params.equivalent_labels.clear();
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), '=', ' ');
    auto fields = util::split_ws(line);
    if (fields.empty()) continue;
    const std::string& key = fields[0];
    auto want = [&](size_t k) {
      if (fields.size() != k + 1)
        throw format_error(key + " expects " + std::to_string(k) + " argument(s) at line " +
                           std::to_string(lineno));
    };
    if (key == "DELETE_LABEL") {
      want(1);
      params.delete_labels.insert(fields[1]);
    } else if (key == "EQ_LABEL") {
      want(2);
      params.equivalent_labels[fields[1]] = fields[2];
    } else if (key == "SPAN_LENGTH_TAIL") {
      want(1);
      params.span_length_tail = static_cast<int>(*util::parse_int(fields[1]));
    } else if (key == "DISPLACEMENT_TAIL") {
      want(1);
      params.displacement_tail = static_cast<int>(*util::parse_int(fields[1]));
    } else if (key == "EXCLUDE_PUNCT") {
      want(1);
      params.exclude_punct = fields[1] != "0";
    } else {
      throw format_error("unknown parameter '" + key + "' at line " + std::to_string(lineno));
    }
  }
  return params;
}

inline EvalParams parse_eval_params(const std::string& text) {
  std::istringstream is(text);
  return read_eval_params(is);
}

struct Span {
  std::string label;
  int start = 0, end = 0;  // 1-based, inclusive

  auto operator<=>(const Span&) const = default;
};

namespace detail {

inline void extract_spans_walk(const TreeNode& node, const EvalParams& params,
                               bool uppermost_only, int& next_word, std::vector<Span>& out) {
  if (node.is_preterminal()) {
    if (!params.delete_labels.count(node.label)) ++next_word;
    return;
  }
  int start = next_word + 1;
  for (const auto& child : node.children)
    extract_spans_walk(child, params, uppermost_only, next_word, out);
  int end = next_word;
  if (end < start) return;  // covered only deleted words
  if (params.delete_labels.count(node.label)) return;
  for (const auto& part : util::split(node.label, params.chain_sep)) {
    if (params.delete_labels.count(part)) continue;
    out.push_back({params.map_label(part), start, end});
    if (uppermost_only) break;
  }
}

}  // namespace detail

// One (label, start, end) per surviving internal node, with collapsed
// `X+Y` chains contributing every component (or only the uppermost when
// requested, the per-label breakdown regime). Sorted multiset.
inline std::vector<Span> extract_spans(const TreeNode& tree, const EvalParams& params = {},
                                       bool uppermost_only = false, int* n_words = nullptr) {
  std::vector<Span> out;
  int next_word = 0;
  detail::extract_spans_walk(tree, params, uppermost_only, next_word, out);
  if (n_words) *n_words = next_word;
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

inline long long count_matches(const std::vector<Span>& gold, const std::vector<Span>& pred) {
  long long match = 0;
  auto g = gold.begin();
  auto p = pred.begin();
  while (g != gold.end() && p != pred.end()) {
    if (*g < *p)
      ++g;
    else if (*p < *g)
      ++p;
    else {
      ++match;
      ++g;
      ++p;
    }
  }
  return match;
}

}  // namespace detail

struct BracketScore {
  MatchCounts total;       // all spans, all chain components
  MatchCounts whole_span;  // spans covering the entire sentence
  std::map<int, MatchCounts> per_length;          // whole-sentence spans excluded
  std::map<std::string, MatchCounts> per_label;   // uppermost-only, whole-sentence excluded

  double precision() const { return total.precision(); }
  double recall() const { return total.recall(); }
  double f1() const { return total.f1(); }
};

inline BracketScore bracketing_score(const std::vector<ConstituentTree>& gold,
                                     const std::vector<ConstituentTree>& pred,
                                     const EvalParams& params = {}, int jobs = 1) {
  if (gold.size() != pred.size())
    throw std::invalid_argument("corpus size mismatch: gold has " + std::to_string(gold.size()) +
                                " trees, predicted has " + std::to_string(pred.size()));

  struct SentenceStats {
    BracketScore score;
    int gold_words = 0, pred_words = 0;
  };
  auto stats = util::parallel_map(gold.size(), jobs, [&](size_t idx) {
    SentenceStats s;
    auto gspans = extract_spans(gold[idx], params, false, &s.gold_words);
    auto pspans = extract_spans(pred[idx], params, false, &s.pred_words);
    if (s.gold_words != s.pred_words) return s;  // reported by the sequential pass below

    BracketScore& b = s.score;
    b.total.gold = static_cast<long long>(gspans.size());
    b.total.pred = static_cast<long long>(pspans.size());
    b.total.match = detail::count_matches(gspans, pspans);

    int n = s.gold_words;
    auto is_whole = [n](const Span& sp) { return sp.start == 1 && sp.end == n; };
    std::vector<Span> gin, pin;
    for (const auto& sp : gspans) {
      if (is_whole(sp)) {
        ++b.whole_span.gold;
        continue;
      }
      gin.push_back(sp);
      ++b.per_length[std::min(sp.end - sp.start + 1, params.span_length_tail)].gold;
    }
    for (const auto& sp : pspans) {
      if (is_whole(sp)) {
        ++b.whole_span.pred;
        continue;
      }
      pin.push_back(sp);
      ++b.per_length[std::min(sp.end - sp.start + 1, params.span_length_tail)].pred;
    }
    {
      auto g = gin.begin();
      auto p = pin.begin();
      while (g != gin.end() && p != pin.end()) {
        if (*g < *p)
          ++g;
        else if (*p < *g)
          ++p;
        else {
          ++b.per_length[std::min(g->end - g->start + 1, params.span_length_tail)].match;
          ++g;
          ++p;
        }
      }
    }
    b.whole_span.match = b.total.match - detail::count_matches(gin, pin);

    auto gup = extract_spans(gold[idx], params, true);
    auto pup = extract_spans(pred[idx], params, true);
    std::vector<Span> gu, pu;
    for (const auto& sp : gup)
      if (!is_whole(sp)) {
        gu.push_back(sp);
        ++b.per_label[sp.label].gold;
      }
    for (const auto& sp : pup)
      if (!is_whole(sp)) {
        pu.push_back(sp);
        ++b.per_label[sp.label].pred;
      }
    {
      auto g = gu.begin();
      auto p = pu.begin();
      while (g != gu.end() && p != pu.end()) {
        if (*g < *p)
          ++g;
        else if (*p < *g)
          ++p;
        else {
          ++b.per_label[g->label].match;
          ++g;
          ++p;
        }
      }
    }
    return s;
  });

  BracketScore out;
  for (size_t idx = 0; idx < stats.size(); ++idx) {
    const auto& s = stats[idx];
    if (s.gold_words != s.pred_words)
      throw std::invalid_argument("word count mismatch in sentence " + std::to_string(idx + 1) +
                                  " after deletion: gold " + std::to_string(s.gold_words) +
                                  ", predicted " + std::to_string(s.pred_words));
    out.total += s.score.total;
    out.whole_span += s.score.whole_span;
    for (const auto& [k, v] : s.score.per_length) out.per_length[k] += v;
    for (const auto& [k, v] : s.score.per_label) out.per_label[k] += v;
  }
  return out;
}

struct AttachmentScore {
  long long total = 0, head_correct = 0, both_correct = 0;

  double uas() const { return total == 0 ? 0.0 : 100.0 * head_correct / total; }
  double las() const { return total == 0 ? 0.0 : 100.0 * both_correct / total; }
};

namespace detail {

inline void check_aligned(const std::vector<DependencySentence>& gold,
                          const std::vector<DependencySentence>& pred) {
  if (gold.size() != pred.size())
    throw std::invalid_argument("corpus size mismatch: gold has " + std::to_string(gold.size()) +
                                " sentences, predicted has " + std::to_string(pred.size()));
  for (size_t i = 0; i < gold.size(); ++i)
    if (gold[i].size() != pred[i].size())
      throw std::invalid_argument("token count mismatch in sentence " + std::to_string(i + 1) +
                                  ": gold " + std::to_string(gold[i].size()) + ", predicted " +
                                  std::to_string(pred[i].size()));
}

inline bool scored_token(const DependencySentence& gold, size_t i, const EvalParams& params) {
  return !(params.exclude_punct && gold.deprels[i] == "punct");
}

}  // namespace detail

inline AttachmentScore attachment_score(const std::vector<DependencySentence>& gold,
                                        const std::vector<DependencySentence>& pred,
                                        const EvalParams& params = {}) {
  detail::check_aligned(gold, pred);
  AttachmentScore out;
  for (size_t s = 0; s < gold.size(); ++s) {
    for (size_t i = 0; i < gold[s].size(); ++i) {
      if (!detail::scored_token(gold[s], i, params)) continue;
      ++out.total;
      if (gold[s].heads[i] == pred[s].heads[i]) {
        ++out.head_correct;
        if (gold[s].deprels[i] == pred[s].deprels[i]) ++out.both_correct;
      }
    }
  }
  return out;
}

// Signed head - dependent distance, clamped into the tail buckets; an arc
// counts as matched only when both head and relation are correct.
inline std::map<int, MatchCounts> displacement_f1(const std::vector<DependencySentence>& gold,
                                                  const std::vector<DependencySentence>& pred,
                                                  const EvalParams& params = {}) {
  detail::check_aligned(gold, pred);
  std::map<int, MatchCounts> out;
  auto bucket = [&](int head, int dep) {
    int d = head - dep;
    return std::clamp(d, -params.displacement_tail, params.displacement_tail);
  };
  for (size_t s = 0; s < gold.size(); ++s) {
    for (size_t i = 0; i < gold[s].size(); ++i) {
      if (!detail::scored_token(gold[s], i, params)) continue;
      int pos = static_cast<int>(i) + 1;
      int gb = bucket(gold[s].heads[i], pos);
      int pb = bucket(pred[s].heads[i], pos);
      ++out[gb].gold;
      ++out[pb].pred;
      if (gold[s].heads[i] == pred[s].heads[i] && gold[s].deprels[i] == pred[s].deprels[i])
        ++out[gb].match;
    }
  }
  return out;
}

// Per-relation F1. By default a match needs head and relation both correct;
// label_only relaxes it to the relation alone.
inline std::map<std::string, MatchCounts> relation_f1(const std::vector<DependencySentence>& gold,
                                                      const std::vector<DependencySentence>& pred,
                                                      const EvalParams& params = {},
                                                      bool label_only = false) {
  detail::check_aligned(gold, pred);
  std::map<std::string, MatchCounts> out;
  for (size_t s = 0; s < gold.size(); ++s) {
    for (size_t i = 0; i < gold[s].size(); ++i) {
      if (!detail::scored_token(gold[s], i, params)) continue;
      ++out[gold[s].deprels[i]].gold;
      ++out[pred[s].deprels[i]].pred;
      if (gold[s].deprels[i] == pred[s].deprels[i] &&
          (label_only || gold[s].heads[i] == pred[s].heads[i]))
        ++out[gold[s].deprels[i]].match;
    }
  }
  return out;
}

}  // namespace tagparse

#endif
