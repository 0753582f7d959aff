#ifndef TAGPARSE_EMBEDDINGS_HPP
#define TAGPARSE_EMBEDDINGS_HPP

#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tagparse/util.hpp"

namespace tagparse {

inline constexpr const char* kUnkToken = "<UNK>";
inline constexpr const char* kBosToken = "<BOS>";
inline constexpr const char* kEosToken = "<EOS>";

struct EmbeddingTable {
  size_t dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;
  std::vector<double> unk;  // fallback, always length dim

  bool contains(const std::string& form) const { return vectors.count(form) > 0; }

  const std::vector<double>& lookup(const std::string& form) const {
    auto it = vectors.find(form);
    return it == vectors.end() ? unk : it->second;
  }
};

// Text format: optional `<count> <dim>` header, then one `form v1 .. vd` row
// per line. Reads line by line; `vocab_filter`, when given, keeps only those
// forms (plus <UNK>/<BOS>/<EOS> rows if the file carries them).
inline EmbeddingTable read_embeddings(std::istream& is,
                                      const std::unordered_set<std::string>* vocab_filter = nullptr) {
  EmbeddingTable table;
  std::string line;
  int lineno = 0;
  bool first_data_line = true;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (util::trim(line).empty()) continue;
    auto fields = util::split_ws(line);
    if (first_data_line && fields.size() == 2 && util::parse_int(fields[0]) &&
        util::parse_int(fields[1])) {
      table.dim = static_cast<size_t>(*util::parse_int(fields[1]));
      first_data_line = false;
      continue;
    }
    first_data_line = false;
    if (fields.size() < 2)
      throw format_error("embedding row with no values at line " + std::to_string(lineno));
    const std::string& form = fields[0];
    size_t d = fields.size() - 1;
    if (table.dim == 0) table.dim = d;
    if (d != table.dim)
      throw format_error("inconsistent embedding dimension at line " + std::to_string(lineno) +
                         ": expected " + std::to_string(table.dim) + ", got " + std::to_string(d));
    bool special = form == kUnkToken || form == kBosToken || form == kEosToken;
    if (vocab_filter && !special && !vocab_filter->count(form)) continue;
    if (table.contains(form)) continue;  // duplicates: first occurrence wins
    std::vector<double> v(d);
    for (size_t i = 0; i < d; ++i) {
      auto x = util::parse_double(fields[i + 1]);
      if (!x)
        throw format_error("unparsable value '" + fields[i + 1] + "' at line " +
                           std::to_string(lineno));
      v[i] = *x;
    }
    table.vectors.emplace(form, std::move(v));
  }
  auto it = table.vectors.find(kUnkToken);
  table.unk = it != table.vectors.end() ? it->second : std::vector<double>(table.dim, 0.0);
  return table;
}

inline EmbeddingTable parse_embeddings(const std::string& text,
                                       const std::unordered_set<std::string>* filter = nullptr) {
  std::istringstream is(text);
  return read_embeddings(is, filter);
}

// Rows come out sorted by form so the file is reproducible.
inline void write_embeddings(std::ostream& os, const EmbeddingTable& table) {
  std::map<std::string, const std::vector<double>*> sorted;
  for (const auto& [form, vec] : table.vectors) sorted.emplace(form, &vec);
  os << sorted.size() << ' ' << table.dim << '\n';
  os.precision(17);
  for (const auto& [form, vec] : sorted) {
    os << form;
    for (double x : *vec) os << ' ' << x;
    os << '\n';
  }
}

struct TokenVectorFile {
  size_t dim = 0;
  std::vector<std::vector<std::vector<double>>> sentences;
};

// Blank-line-delimited blocks, one row of d values per token.
inline TokenVectorFile read_token_vectors(std::istream& is) {
  TokenVectorFile out;
  std::vector<std::vector<double>> block;
  std::string line;
  int lineno = 0;
  auto flush = [&] {
    if (!block.empty()) out.sentences.push_back(std::move(block));
    block.clear();
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (util::trim(line).empty()) {
      flush();
      continue;
    }
    auto fields = util::split_ws(line);
    if (out.dim == 0) out.dim = fields.size();
    if (fields.size() != out.dim)
      throw format_error("vector dimension mismatch at line " + std::to_string(lineno) +
                         ": expected " + std::to_string(out.dim) + ", got " +
                         std::to_string(fields.size()));
    std::vector<double> row(fields.size());
    for (size_t i = 0; i < fields.size(); ++i) {
      auto x = util::parse_double(fields[i]);
      if (!x)
        throw format_error("unparsable value '" + fields[i] + "' at line " +
                           std::to_string(lineno));
      row[i] = *x;
    }
    block.push_back(std::move(row));
  }
  flush();
  return out;
}

inline TokenVectorFile parse_token_vectors(const std::string& text) {
  std::istringstream is(text);
  return read_token_vectors(is);
}

inline void write_token_vectors(std::ostream& os, const TokenVectorFile& file) {
  os.precision(17);
  for (const auto& sent : file.sentences) {
    for (const auto& row : sent) {
      for (size_t i = 0; i < row.size(); ++i) os << (i ? " " : "") << row[i];
      os << '\n';
    }
    os << '\n';
  }
}

}  // namespace tagparse

#endif
