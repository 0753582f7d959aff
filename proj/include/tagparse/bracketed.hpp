#ifndef TAGPARSE_BRACKETED_HPP
#define TAGPARSE_BRACKETED_HPP

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tagparse/tree.hpp"
#include "tagparse/util.hpp"

namespace tagparse {

namespace detail {

struct BracketToken {
  enum Kind { open, close, atom } kind;
  std::string text;
  int line;
};

inline std::vector<BracketToken> tokenize_brackets(std::istream& is) {
  std::vector<BracketToken> tokens;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    size_t i = 0;
    while (i < line.size()) {
      char c = line[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (c == '(') {
        tokens.push_back({BracketToken::open, "(", lineno});
        ++i;
      } else if (c == ')') {
        tokens.push_back({BracketToken::close, ")", lineno});
        ++i;
      } else {
        size_t start = i;
        while (i < line.size() && line[i] != '(' && line[i] != ')' &&
               !std::isspace(static_cast<unsigned char>(line[i])))
          ++i;
        tokens.push_back({BracketToken::atom, line.substr(start, i - start), lineno});
      }
    }
  }
  return tokens;
}

inline TreeNode parse_bracket_node(const std::vector<BracketToken>& tokens, size_t& pos) {
  const BracketToken& open = tokens[pos];
  ++pos;  // consume '('
  std::string label;
  if (pos < tokens.size() && tokens[pos].kind == BracketToken::atom) {
    label = tokens[pos].text;
    ++pos;
  }
  std::vector<TreeNode> children;
  while (pos < tokens.size() && tokens[pos].kind != BracketToken::close) {
    if (tokens[pos].kind == BracketToken::open) {
      children.push_back(parse_bracket_node(tokens, pos));
    } else {
      children.push_back(TreeNode(tokens[pos].text));
      ++pos;
    }
  }
  if (pos >= tokens.size())
    throw format_error("unbalanced brackets: '(' at line " + std::to_string(open.line) +
                       " is never closed");
  ++pos;  // consume ')'
  if (children.empty())
    throw format_error("node with zero children at line " + std::to_string(open.line));
  if (label.empty()) {
    // PTB-style anonymous wrapper: ( (S ...) )
    if (children.size() == 1 && !children[0].is_leaf()) return children[0];
    throw format_error("unlabeled node at line " + std::to_string(open.line));
  }
  return TreeNode(std::move(label), std::move(children));
}

}  // namespace detail

inline std::vector<ConstituentTree> read_bracketed(std::istream& is) {
  auto tokens = detail::tokenize_brackets(is);
  std::vector<ConstituentTree> trees;
  size_t pos = 0;
  while (pos < tokens.size()) {
    if (tokens[pos].kind != detail::BracketToken::open)
      throw format_error("expected '(' at line " + std::to_string(tokens[pos].line) +
                         ", got '" + tokens[pos].text + "'");
    trees.push_back(detail::parse_bracket_node(tokens, pos));
  }
  return trees;
}

inline std::vector<ConstituentTree> parse_bracketed(const std::string& text) {
  std::istringstream is(text);
  return read_bracketed(is);
}

inline void write_bracketed(std::ostream& os, const TreeNode& node) {
  if (node.is_leaf()) {
    os << node.label;
    return;
  }
  os << '(' << node.label;
  for (const auto& child : node.children) {
    os << ' ';
    write_bracketed(os, child);
  }
  os << ')';
}

inline std::string to_bracketed(const TreeNode& tree) {
  std::ostringstream os;
  write_bracketed(os, tree);
  return os.str();
}

inline void write_bracketed_corpus(std::ostream& os, const std::vector<ConstituentTree>& trees) {
  for (const auto& t : trees) {
    write_bracketed(os, t);
    os << '\n';
  }
}

}  // namespace tagparse

#endif
