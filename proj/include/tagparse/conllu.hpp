#ifndef TAGPARSE_CONLLU_HPP
#define TAGPARSE_CONLLU_HPP

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tagparse/util.hpp"

namespace tagparse {

struct Token {
  int index = 0;  // 1-based
  std::string form;
  std::string pos;

  bool operator==(const Token&) const = default;
};

struct DependencySentence {
  std::vector<Token> tokens;
  std::vector<int> heads;  // 0 = dummy root
  std::vector<std::string> deprels;

  size_t size() const { return tokens.size(); }
  bool operator==(const DependencySentence&) const = default;
};

enum class PosColumn { upos, xpos };

namespace detail {

inline void finish_conllu_sentence(DependencySentence& sent,
                                   std::vector<DependencySentence>& out, int lineno) {
  if (sent.tokens.empty()) return;
  int n = static_cast<int>(sent.size());
  for (size_t i = 0; i < sent.heads.size(); ++i) {
    if (sent.heads[i] < 0 || sent.heads[i] > n)
      throw format_error("head index " + std::to_string(sent.heads[i]) +
                         " out of range in sentence ending near line " + std::to_string(lineno));
  }
  out.push_back(std::move(sent));
  sent = DependencySentence{};
}

}  // namespace detail

// Multiword-token ranges (`3-4`) and empty nodes (`5.1`) are skipped: the
// encodings operate on the basic syntactic-word sequence.
inline std::vector<DependencySentence> read_conllu(std::istream& is,
                                                   PosColumn pos_column = PosColumn::upos) {
  std::vector<DependencySentence> out;
  DependencySentence sent;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      detail::finish_conllu_sentence(sent, out, lineno);
      continue;
    }
    if (line[0] == '#') continue;
    auto cols = util::split(line, '\t');
    if (cols.size() != 10)
      throw format_error("expected 10 tab-separated columns at line " + std::to_string(lineno) +
                         ", got " + std::to_string(cols.size()));
    const std::string& id = cols[0];
    if (id.find('-') != std::string::npos) continue;  // multiword token range
    if (id.find('.') != std::string::npos) continue;  // empty node
    auto idv = util::parse_int(id);
    if (!idv)
      throw format_error("non-integer token id '" + id + "' at line " + std::to_string(lineno));
    int expected = static_cast<int>(sent.size()) + 1;
    if (*idv != expected)
      throw format_error("token id " + id + " at line " + std::to_string(lineno) +
                         " does not follow " + std::to_string(expected - 1));
    auto head = util::parse_int(cols[6]);
    if (!head)
      throw format_error("non-integer head '" + cols[6] + "' at line " + std::to_string(lineno));
    Token tok;
    tok.index = expected;
    tok.form = cols[1];
    tok.pos = pos_column == PosColumn::upos ? cols[3] : cols[4];
    sent.tokens.push_back(std::move(tok));
    sent.heads.push_back(static_cast<int>(*head));
    sent.deprels.push_back(cols[7]);
  }
  detail::finish_conllu_sentence(sent, out, lineno);
  return out;
}

inline std::vector<DependencySentence> parse_conllu(const std::string& text,
                                                    PosColumn pos_column = PosColumn::upos) {
  std::istringstream is(text);
  return read_conllu(is, pos_column);
}

inline void write_conllu(std::ostream& os, const DependencySentence& sent,
                         PosColumn pos_column = PosColumn::upos) {
  for (size_t i = 0; i < sent.size(); ++i) {
    const Token& tok = sent.tokens[i];
    const char* upos = pos_column == PosColumn::upos ? tok.pos.c_str() : "_";
    const char* xpos = pos_column == PosColumn::xpos ? tok.pos.c_str() : "_";
    os << (i + 1) << '\t' << tok.form << "\t_\t" << upos << '\t' << xpos << "\t_\t"
       << sent.heads[i] << '\t' << sent.deprels[i] << "\t_\t_\n";
  }
  os << '\n';
}

inline void write_conllu_corpus(std::ostream& os, const std::vector<DependencySentence>& corpus,
                                PosColumn pos_column = PosColumn::upos) {
  for (const auto& s : corpus) write_conllu(os, s, pos_column);
}

}  // namespace tagparse

#endif
