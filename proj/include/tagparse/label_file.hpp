#ifndef TAGPARSE_LABEL_FILE_HPP
#define TAGPARSE_LABEL_FILE_HPP

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tagparse/util.hpp"

namespace tagparse {

// One token per line as `form<TAB>value`, blank line between sentences.
// Used both for label files (value = serialized tree-encoding label) and
// for tag files (value = PoS tag).
struct LabeledSentence {
  std::vector<std::string> forms;
  std::vector<std::string> labels;

  size_t size() const { return forms.size(); }
  bool operator==(const LabeledSentence&) const = default;
};

inline std::vector<LabeledSentence> read_label_file(std::istream& is) {
  std::vector<LabeledSentence> out;
  LabeledSentence sent;
  std::string line;
  int lineno = 0;
  auto flush = [&] {
    if (!sent.forms.empty()) out.push_back(std::move(sent));
    sent = LabeledSentence{};
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw format_error("expected form<TAB>label at line " + std::to_string(lineno));
    sent.forms.push_back(line.substr(0, tab));
    sent.labels.push_back(line.substr(tab + 1));
  }
  flush();
  return out;
}

inline std::vector<LabeledSentence> parse_label_file(const std::string& text) {
  std::istringstream is(text);
  return read_label_file(is);
}

inline void write_label_file(std::ostream& os, const std::vector<LabeledSentence>& corpus) {
  for (const auto& sent : corpus) {
    for (size_t i = 0; i < sent.size(); ++i)
      os << sent.forms[i] << '\t' << sent.labels[i] << '\n';
    os << '\n';
  }
}

}  // namespace tagparse

#endif
