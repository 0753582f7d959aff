// tagparse: constituent and dependency parsing as sequence labeling.
// Subcommands: encode, decode, train, predict, eval, analyze.

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "tagparse/bracketed.hpp"
#include "tagparse/const_codec.hpp"
#include "tagparse/conllu.hpp"
#include "tagparse/dep_codec.hpp"
#include "tagparse/embeddings.hpp"
#include "tagparse/label_file.hpp"
#include "tagparse/metrics.hpp"
#include "tagparse/probe.hpp"
#include "tagparse/trainer.hpp"
#include "tagparse/tree.hpp"
#include "tagparse/util.hpp"

namespace tp = tagparse;

namespace {

enum class Formalism { constituents, dependencies };

Formalism parse_formalism(const std::string& s) {
  if (s == "const") return Formalism::constituents;
  if (s == "dep") return Formalism::dependencies;
  throw std::runtime_error("unknown formalism '" + s + "' (expected const|dep)");
}

tp::PosColumn parse_pos_column(const std::string& s) {
  if (s == "upos") return tp::PosColumn::upos;
  if (s == "xpos") return tp::PosColumn::xpos;
  throw std::runtime_error("unknown PoS column '" + s + "' (expected upos|xpos)");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return is;
}

// Parse a file, prefixing format errors with the path.
template <typename Fn>
auto read_file_as(const std::string& path, Fn parse) {
  auto is = open_input(path);
  try {
    return parse(is);
  } catch (const tp::format_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

struct SentenceBatch {
  std::vector<std::vector<std::string>> forms;
  std::vector<std::vector<std::string>> tags;
};

SentenceBatch sentences_from_trees(const std::vector<tp::ConstituentTree>& trees) {
  SentenceBatch out;
  for (const auto& t : trees) {
    std::vector<std::string> forms, tags;
    tp::collect_leaves(t, forms, tags);
    out.forms.push_back(std::move(forms));
    out.tags.push_back(std::move(tags));
  }
  return out;
}

SentenceBatch sentences_from_conllu(const std::vector<tp::DependencySentence>& corpus) {
  SentenceBatch out;
  for (const auto& s : corpus) {
    std::vector<std::string> forms, tags;
    for (const auto& tok : s.tokens) {
      forms.push_back(tok.form);
      tags.push_back(tok.pos);
    }
    out.forms.push_back(std::move(forms));
    out.tags.push_back(std::move(tags));
  }
  return out;
}

SentenceBatch sentences_from_tsv(const std::vector<tp::LabeledSentence>& rows) {
  SentenceBatch out;
  for (const auto& s : rows) {
    out.forms.push_back(s.forms);
    out.tags.push_back(s.labels);
  }
  return out;
}

SentenceBatch read_tagged_source(const std::string& path, const std::string& format,
                                 Formalism formalism, tp::PosColumn pos_column) {
  if (format == "tsv")
    return sentences_from_tsv(read_file_as(path, [](std::istream& is) { return tp::read_label_file(is); }));
  if (format != "treebank")
    throw std::runtime_error("unknown tags format '" + format + "' (expected tsv|treebank)");
  if (formalism == Formalism::constituents)
    return sentences_from_trees(read_file_as(path, [](std::istream& is) { return tp::read_bracketed(is); }));
  return sentences_from_conllu(
      read_file_as(path, [&](std::istream& is) { return tp::read_conllu(is, pos_column); }));
}

tp::EvalParams load_params(const std::string& path) {
  if (path.empty()) return tp::EvalParams{};
  return read_file_as(path, [](std::istream& is) { return tp::read_eval_params(is); });
}

std::string fmt_pct(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// encode

struct EncodeArgs {
  std::string formalism, input, output, tags_out;
  std::string pos_column = "upos";
  int jobs = 1;
};

int cmd_encode(const EncodeArgs& args) {
  Formalism formalism = parse_formalism(args.formalism);
  std::vector<tp::LabeledSentence> labeled;
  SentenceBatch sents;

  if (formalism == Formalism::constituents) {
    auto trees = read_file_as(args.input, [](std::istream& is) { return tp::read_bracketed(is); });
    sents = sentences_from_trees(trees);
    for (size_t i = 0; i < trees.size(); ++i)
      if (auto err = tp::validate_constituents(trees[i], sents.forms[i]))
        throw std::runtime_error(args.input + ": sentence " + std::to_string(i + 1) + ": " + *err);
    auto encoded = tp::util::parallel_map(trees.size(), args.jobs, [&](size_t i) {
      std::vector<std::string> labels;
      for (const auto& l : tp::encode_constituents(trees[i]))
        labels.push_back(tp::serialize_const_label(l));
      return labels;
    });
    for (size_t i = 0; i < trees.size(); ++i)
      labeled.push_back({sents.forms[i], std::move(encoded[i])});
  } else {
    auto corpus = read_file_as(args.input, [&](std::istream& is) {
      return tp::read_conllu(is, parse_pos_column(args.pos_column));
    });
    sents = sentences_from_conllu(corpus);
    auto encoded = tp::util::parallel_map(corpus.size(), args.jobs, [&](size_t i) {
      std::vector<std::string> labels;
      try {
        for (const auto& l : tp::encode_dependencies(corpus[i]))
          labels.push_back(tp::serialize_dep_label(l));
      } catch (const std::exception& e) {
        throw std::runtime_error(args.input + ": sentence " + std::to_string(i + 1) + ": " +
                                 e.what());
      }
      return labels;
    });
    for (size_t i = 0; i < corpus.size(); ++i)
      labeled.push_back({sents.forms[i], std::move(encoded[i])});
  }

  tp::util::write_file_atomic(args.output,
                              [&](std::ostream& os) { tp::write_label_file(os, labeled); });
  if (!args.tags_out.empty()) {
    std::vector<tp::LabeledSentence> tagged;
    for (size_t i = 0; i < sents.forms.size(); ++i)
      tagged.push_back({sents.forms[i], sents.tags[i]});
    tp::util::write_file_atomic(args.tags_out,
                                [&](std::ostream& os) { tp::write_label_file(os, tagged); });
  }
  std::cerr << "encoded " << labeled.size() << " sentences\n";
  return 0;
}

// ---------------------------------------------------------------------------
// decode

struct DecodeArgs {
  std::string formalism, labels, tags, output;
  std::string tags_format = "tsv";
  std::string pos_column = "upos";
  std::string fallback_nonterminal, fallback_relation;
  bool keep_collapsed = false;
};

int cmd_decode(const DecodeArgs& args) {
  Formalism formalism = parse_formalism(args.formalism);
  tp::PosColumn pos_column = parse_pos_column(args.pos_column);
  auto labeled = read_file_as(args.labels, [](std::istream& is) { return tp::read_label_file(is); });
  auto tagged = read_tagged_source(args.tags, args.tags_format, formalism, pos_column);

  if (labeled.size() != tagged.forms.size())
    throw std::runtime_error("label file has " + std::to_string(labeled.size()) +
                             " sentences but tags source has " +
                             std::to_string(tagged.forms.size()));
  for (size_t i = 0; i < labeled.size(); ++i)
    if (labeled[i].size() != tagged.forms[i].size())
      throw std::runtime_error("sentence " + std::to_string(i + 1) + ": label file has " +
                               std::to_string(labeled[i].size()) + " tokens but tags source has " +
                               std::to_string(tagged.forms[i].size()));

  if (formalism == Formalism::constituents) {
    tp::ConstCodecOptions opts;
    // unparsable labels decode as (+1, most frequent nonterminal in the file)
    std::map<std::string, long> freq;
    for (const auto& s : labeled)
      for (const auto& text : s.labels)
        if (auto l = tp::parse_const_label(text, opts); l && !l->eos) ++freq[l->nonterminal];
    std::string top = opts.fallback_nonterminal;
    long best = 0;
    for (const auto& [nt, count] : freq)
      if (count > best) {
        best = count;
        top = nt;
      }
    opts.fallback_nonterminal =
        args.fallback_nonterminal.empty() ? top : args.fallback_nonterminal;

    tp::ConstRepairStats stats;
    int unparsable = 0;
    std::vector<tp::ConstituentTree> trees;
    for (size_t i = 0; i < labeled.size(); ++i) {
      std::vector<tp::ConstLabel> labels;
      for (const auto& text : labeled[i].labels) {
        auto l = tp::parse_const_label(text, opts);
        if (!l) {
          ++unparsable;
          l = tp::ConstLabel{false, 1, opts.fallback_nonterminal, ""};
        }
        labels.push_back(*l);
      }
      tp::ConstRepairStats s;
      trees.push_back(tp::decode_constituents(labels, labeled[i].forms, tagged.tags[i], opts, &s));
      stats.clamped_depths += s.clamped_depths;
      stats.label_conflicts += s.label_conflicts;
      stats.empty_levels += s.empty_levels;
      stats.fallback_labels += s.fallback_labels;
    }
    if (!args.keep_collapsed)
      for (auto& t : trees) t = tp::expand_unary_chains(t, opts.chain_sep);
    tp::util::write_file_atomic(args.output,
                                [&](std::ostream& os) { tp::write_bracketed_corpus(os, trees); });
    std::cerr << "decoded " << trees.size() << " trees; repairs: " << unparsable
              << " unparsable labels, " << stats.clamped_depths << " clamped depths, "
              << stats.label_conflicts << " nonterminal conflicts, " << stats.empty_levels
              << " empty levels removed, " << stats.fallback_labels << " fallback labels\n";
  } else {
    tp::DepCodecOptions opts;
    std::map<std::string, long> freq;
    for (const auto& s : labeled)
      for (const auto& text : s.labels)
        if (auto l = tp::parse_dep_label(text, opts)) ++freq[l->relation];
    std::string top = opts.fallback_relation;
    long best = 0;
    for (const auto& [rel, count] : freq)
      if (count > best) {
        best = count;
        top = rel;
      }
    opts.fallback_relation = args.fallback_relation.empty() ? top : args.fallback_relation;

    tp::DepRepairStats stats;
    int unparsable = 0;
    std::vector<tp::DependencySentence> corpus;
    for (size_t i = 0; i < labeled.size(); ++i) {
      std::vector<tp::DepLabel> labels;
      for (const auto& text : labeled[i].labels) {
        auto l = tp::parse_dep_label(text, opts);
        if (!l) {
          ++unparsable;
          l = tp::DepLabel{-1, opts.root_pos, opts.fallback_relation};
        }
        labels.push_back(*l);
      }
      tp::DepRepairStats s;
      corpus.push_back(
          tp::decode_dependencies(labels, labeled[i].forms, tagged.tags[i], opts, &s));
      stats.invalid_heads += s.invalid_heads;
      stats.created_roots += s.created_roots;
      stats.extra_roots += s.extra_roots;
      stats.cycles_broken += s.cycles_broken;
    }
    tp::util::write_file_atomic(args.output, [&](std::ostream& os) {
      tp::write_conllu_corpus(os, corpus, pos_column);
    });
    std::cerr << "decoded " << corpus.size() << " sentences; repairs: " << unparsable
              << " unparsable labels, " << stats.invalid_heads << " invalid heads, "
              << stats.created_roots << " created roots, " << stats.extra_roots
              << " extra roots demoted, " << stats.cycles_broken << " cycles broken\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// embedding sources

struct EmbeddingSpec {
  enum Kind { table_file, random, vectors } kind = table_file;
  std::string path;
  size_t dim = 0;
};

EmbeddingSpec parse_embedding_spec(const std::string& spec) {
  EmbeddingSpec out;
  if (spec.rfind("random:", 0) == 0) {
    out.kind = EmbeddingSpec::random;
    auto d = tp::util::parse_int(spec.substr(7));
    if (!d || *d < 1) throw std::runtime_error("bad dimension in '" + spec + "'");
    out.dim = static_cast<size_t>(*d);
  } else if (spec.rfind("vectors:", 0) == 0) {
    out.kind = EmbeddingSpec::vectors;
    out.path = spec.substr(8);
  } else {
    out.path = spec;
  }
  return out;
}

std::vector<std::string> corpus_vocab(const std::vector<tp::LabeledSentence>* corpora[], int n) {
  std::vector<std::string> vocab;
  std::unordered_set<std::string> seen;
  for (int c = 0; c < n; ++c) {
    if (!corpora[c]) continue;
    for (const auto& s : *corpora[c])
      for (const auto& f : s.forms)
        if (seen.insert(f).second) vocab.push_back(f);
  }
  return vocab;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string train, dev, embeddings, dev_embeddings, model;
  double lr = 5e-4;
  int epochs = 30;
  int batch_size = 32;
  uint64_t seed = 1;
  bool fine_tune = false;
};

int run_training(const TrainArgs& args, const tp::TrainConfig& config, const tp::LabelVocab& vocab,
                 const tp::BankBuilder& builder, const tp::ProbeCorpus& train_corpus,
                 const tp::ProbeCorpus& dev_corpus, bool has_table);

int cmd_train(const TrainArgs& args) {
  auto train_labeled =
      read_file_as(args.train, [](std::istream& is) { return tp::read_label_file(is); });
  if (train_labeled.empty()) throw std::runtime_error("training corpus is empty");
  std::vector<tp::LabeledSentence> dev_labeled;
  if (!args.dev.empty())
    dev_labeled = read_file_as(args.dev, [](std::istream& is) { return tp::read_label_file(is); });

  tp::LabelVocab vocab;
  for (const auto& s : train_labeled)
    for (const auto& l : s.labels) vocab.add(l);

  EmbeddingSpec spec = parse_embedding_spec(args.embeddings);
  tp::TrainConfig config;
  config.learning_rate = args.lr;
  config.epochs = args.epochs;
  config.batch_size = args.batch_size;
  config.seed = args.seed;
  config.mode = args.fine_tune ? tp::EmbeddingMode::fine_tune : tp::EmbeddingMode::frozen;

  tp::EmbeddingTable table;
  std::unique_ptr<tp::BankBuilder> builder;
  bool has_table = spec.kind != EmbeddingSpec::vectors;

  if (spec.kind == EmbeddingSpec::random) {
    const std::vector<tp::LabeledSentence>* corpora[] = {&train_labeled, &dev_labeled};
    table = tp::init_random_embeddings(corpus_vocab(corpora, 2), spec.dim, args.seed);
    tp::ensure_special_rows(table, args.seed + 1);
    builder = std::make_unique<tp::BankBuilder>(table);
  } else if (spec.kind == EmbeddingSpec::table_file) {
    const std::vector<tp::LabeledSentence>* corpora[] = {&train_labeled, &dev_labeled};
    auto vocab_list = corpus_vocab(corpora, 2);
    std::unordered_set<std::string> filter(vocab_list.begin(), vocab_list.end());
    table = read_file_as(spec.path,
                         [&](std::istream& is) { return tp::read_embeddings(is, &filter); });
    if (table.dim == 0) throw std::runtime_error(spec.path + ": no embedding rows read");
    tp::ensure_special_rows(table, args.seed + 1);
    builder = std::make_unique<tp::BankBuilder>(table);
  } else {
    if (args.fine_tune)
      throw std::runtime_error("token-vector sources train with frozen embeddings only");
    auto vecs =
        read_file_as(spec.path, [](std::istream& is) { return tp::read_token_vectors(is); });
    if (vecs.sentences.size() != train_labeled.size())
      throw std::runtime_error(spec.path + ": " + std::to_string(vecs.sentences.size()) +
                               " vector blocks for " + std::to_string(train_labeled.size()) +
                               " training sentences");
    builder = std::make_unique<tp::BankBuilder>(vecs.dim, args.seed + 1);
    tp::ProbeCorpus train_corpus, dev_corpus;
    for (size_t i = 0; i < train_labeled.size(); ++i) {
      if (vecs.sentences[i].size() != train_labeled[i].size())
        throw std::runtime_error("sentence " + std::to_string(i + 1) + ": " +
                                 std::to_string(vecs.sentences[i].size()) + " vectors for " +
                                 std::to_string(train_labeled[i].size()) + " tokens");
      train_corpus.sentence_rows.push_back(builder->add_sentence(vecs.sentences[i]));
      std::vector<int> classes;
      for (const auto& l : train_labeled[i].labels) classes.push_back(vocab.id(l));
      train_corpus.sentence_classes.push_back(std::move(classes));
    }
    if (!dev_labeled.empty()) {
      if (args.dev_embeddings.empty())
        throw std::runtime_error("--dev-embeddings vectors:PATH is required with a dev set");
      EmbeddingSpec dspec = parse_embedding_spec(args.dev_embeddings);
      if (dspec.kind != EmbeddingSpec::vectors)
        throw std::runtime_error("--dev-embeddings must be a vectors:PATH source");
      auto dvecs =
          read_file_as(dspec.path, [](std::istream& is) { return tp::read_token_vectors(is); });
      if (dvecs.dim != vecs.dim)
        throw std::runtime_error("dev vectors have dimension " + std::to_string(dvecs.dim) +
                                 ", train vectors " + std::to_string(vecs.dim));
      if (dvecs.sentences.size() != dev_labeled.size())
        throw std::runtime_error(dspec.path + ": " + std::to_string(dvecs.sentences.size()) +
                                 " vector blocks for " + std::to_string(dev_labeled.size()) +
                                 " dev sentences");
      for (size_t i = 0; i < dev_labeled.size(); ++i) {
        if (dvecs.sentences[i].size() != dev_labeled[i].size())
          throw std::runtime_error("dev sentence " + std::to_string(i + 1) +
                                   ": vector/token count mismatch");
        dev_corpus.sentence_rows.push_back(builder->add_sentence(dvecs.sentences[i]));
        std::vector<int> classes;
        for (const auto& l : dev_labeled[i].labels) classes.push_back(vocab.id(l));
        dev_corpus.sentence_classes.push_back(std::move(classes));
      }
    }
    return run_training(args, config, vocab, *builder, train_corpus, dev_corpus, has_table);
  }

  tp::ProbeCorpus train_corpus, dev_corpus;
  for (const auto& s : train_labeled) {
    train_corpus.sentence_rows.push_back(builder->add_sentence(s.forms));
    std::vector<int> classes;
    for (const auto& l : s.labels) classes.push_back(vocab.id(l));
    train_corpus.sentence_classes.push_back(std::move(classes));
  }
  for (const auto& s : dev_labeled) {
    dev_corpus.sentence_rows.push_back(builder->add_sentence(s.forms));
    std::vector<int> classes;
    for (const auto& l : s.labels) classes.push_back(vocab.id(l));
    dev_corpus.sentence_classes.push_back(std::move(classes));
  }
  return run_training(args, config, vocab, *builder, train_corpus, dev_corpus, has_table);
}

int run_training(const TrainArgs& args, const tp::TrainConfig& config, const tp::LabelVocab& vocab,
                 const tp::BankBuilder& builder, const tp::ProbeCorpus& train_corpus,
                 const tp::ProbeCorpus& dev_corpus, bool has_table) {
  std::ostringstream log;
  auto result = tp::train(builder.bank(), train_corpus,
                          dev_corpus.sentence_rows.empty() ? nullptr : &dev_corpus,
                          vocab.size(), config, &log);

  tp::util::write_file_atomic(
      args.model, [&](std::ostream& os) { tp::save_checkpoint(os, result.probe, vocab); });
  tp::util::write_file_atomic(args.model + ".log",
                              [&](std::ostream& os) { os << log.str(); });
  if (has_table) {
    auto table = builder.to_table(result.bank);
    tp::util::write_file_atomic(args.model + ".emb",
                                [&](std::ostream& os) { tp::write_embeddings(os, table); });
  }
  tp::util::write_file_atomic(args.model + ".cfg", [&](std::ostream& os) {
    os << "train=" << args.train << '\n'
       << "dev=" << args.dev << '\n'
       << "embeddings=" << args.embeddings << '\n'
       << "mode=" << (config.mode == tp::EmbeddingMode::fine_tune ? "fine-tune" : "frozen") << '\n'
       << "learning_rate=" << config.learning_rate << '\n'
       << "epochs=" << config.epochs << '\n'
       << "batch_size=" << config.batch_size << '\n'
       << "seed=" << config.seed << '\n'
       << "classes=" << vocab.size() << '\n'
       << "dim=" << builder.dim() << '\n'
       << "best_epoch=" << result.best_epoch << '\n'
       << "best_dev_accuracy=" << result.best_dev_accuracy << '\n';
  });
  std::cerr << "trained " << vocab.size() << " classes over " << train_corpus.token_count()
            << " tokens; best epoch " << result.best_epoch;
  if (result.best_dev_accuracy >= 0) std::cerr << " (dev accuracy " << result.best_dev_accuracy << ")";
  std::cerr << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// predict

struct PredictArgs {
  std::string model, input, embeddings, output;
  std::string formalism = "const";
  std::string input_format = "treebank";
  std::string pos_column = "upos";
  uint64_t seed = 1;
};

int cmd_predict(const PredictArgs& args) {
  auto ckpt = read_file_as(args.model, [](std::istream& is) { return tp::load_checkpoint(is); });

  SentenceBatch sents = read_tagged_source(args.input, args.input_format,
                                           parse_formalism(args.formalism),
                                           parse_pos_column(args.pos_column));

  EmbeddingSpec spec = parse_embedding_spec(args.embeddings);
  if (spec.kind == EmbeddingSpec::random)
    throw std::runtime_error(
        "random embeddings are generated at training time; pass the saved MODEL.emb table");

  std::unique_ptr<tp::BankBuilder> builder;
  std::vector<std::vector<int>> sentence_rows;
  if (spec.kind == EmbeddingSpec::table_file) {
    std::unordered_set<std::string> filter;
    for (const auto& f : sents.forms) filter.insert(f.begin(), f.end());
    auto table = read_file_as(spec.path,
                              [&](std::istream& is) { return tp::read_embeddings(is, &filter); });
    if (table.dim == 0) throw std::runtime_error(spec.path + ": no embedding rows read");
    tp::ensure_special_rows(table, args.seed + 1);
    if (table.dim != static_cast<size_t>(ckpt.probe.input_dim()))
      throw std::runtime_error("embedding dimension " + std::to_string(table.dim) +
                               " does not match model dimension " +
                               std::to_string(ckpt.probe.input_dim()));
    builder = std::make_unique<tp::BankBuilder>(table);
    for (const auto& forms : sents.forms) sentence_rows.push_back(builder->add_sentence(forms));
  } else {
    auto vecs =
        read_file_as(spec.path, [](std::istream& is) { return tp::read_token_vectors(is); });
    if (vecs.dim != static_cast<size_t>(ckpt.probe.input_dim()))
      throw std::runtime_error("token vectors have dimension " + std::to_string(vecs.dim) +
                               ", model expects " + std::to_string(ckpt.probe.input_dim()));
    if (vecs.sentences.size() != sents.forms.size())
      throw std::runtime_error(spec.path + ": " + std::to_string(vecs.sentences.size()) +
                               " vector blocks for " + std::to_string(sents.forms.size()) +
                               " sentences");
    builder = std::make_unique<tp::BankBuilder>(vecs.dim, args.seed + 1);
    for (size_t i = 0; i < sents.forms.size(); ++i) {
      if (vecs.sentences[i].size() != sents.forms[i].size())
        throw std::runtime_error("sentence " + std::to_string(i + 1) +
                                 ": vector/token count mismatch");
      sentence_rows.push_back(builder->add_sentence(vecs.sentences[i]));
    }
  }

  auto classes = tp::predict_classes(ckpt.probe, builder->bank(), sentence_rows);
  std::vector<tp::LabeledSentence> out;
  for (size_t i = 0; i < classes.size(); ++i) {
    std::vector<std::string> labels;
    for (int c : classes[i]) labels.push_back(ckpt.vocab.label(c));
    out.push_back({sents.forms[i], std::move(labels)});
  }
  tp::util::write_file_atomic(args.output,
                              [&](std::ostream& os) { tp::write_label_file(os, out); });
  std::cerr << "predicted labels for " << out.size() << " sentences\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval / analyze

struct EvalArgs {
  std::string formalism, gold, pred, params, output;
  int jobs = 1;
  bool relation_label_only = false;
};

void emit_or_print(const std::string& output, const std::string& text) {
  if (output.empty()) {
    std::cout << text;
    return;
  }
  tp::util::write_file_atomic(output, [&](std::ostream& os) { os << text; });
}

int cmd_eval(const EvalArgs& args) {
  auto params = load_params(args.params);
  std::ostringstream report;
  if (parse_formalism(args.formalism) == Formalism::constituents) {
    auto gold = read_file_as(args.gold, [](std::istream& is) { return tp::read_bracketed(is); });
    auto pred = read_file_as(args.pred, [](std::istream& is) { return tp::read_bracketed(is); });
    auto score = tp::bracketing_score(gold, pred, params, args.jobs);
    report << "labeled bracketing\n"
           << "  sentences:          " << gold.size() << '\n'
           << "  matched brackets:   " << score.total.match << '\n'
           << "  gold brackets:      " << score.total.gold << '\n'
           << "  predicted brackets: " << score.total.pred << '\n'
           << "  precision:          " << fmt_pct(score.precision()) << '\n'
           << "  recall:             " << fmt_pct(score.recall()) << '\n'
           << "  f1:                 " << fmt_pct(score.f1()) << '\n'
           << "  whole-sentence spans: match=" << score.whole_span.match
           << " gold=" << score.whole_span.gold << " pred=" << score.whole_span.pred << '\n';
  } else {
    auto gold = read_file_as(args.gold, [](std::istream& is) { return tp::read_conllu(is); });
    auto pred = read_file_as(args.pred, [](std::istream& is) { return tp::read_conllu(is); });
    auto score = tp::attachment_score(gold, pred, params);
    report << "attachment\n"
           << "  sentences:    " << gold.size() << '\n'
           << "  tokens:       " << score.total << '\n'
           << "  head correct: " << score.head_correct << '\n'
           << "  both correct: " << score.both_correct << '\n'
           << "  uas:          " << fmt_pct(score.uas()) << '\n'
           << "  las:          " << fmt_pct(score.las()) << '\n';
  }
  emit_or_print(args.output, report.str());
  return 0;
}

void emit_bucket_rows(std::ostringstream& os, const std::string& section,
                      const std::map<std::string, tp::MatchCounts>& buckets) {
  tp::MatchCounts total;
  for (const auto& [bucket, c] : buckets) {
    os << section << '\t' << bucket << '\t' << c.match << '\t' << c.gold << '\t' << c.pred << '\t'
       << fmt_pct(c.precision()) << '\t' << fmt_pct(c.recall()) << '\t' << fmt_pct(c.f1()) << '\n';
    total += c;
  }
  os << section << "\tTOTAL\t" << total.match << '\t' << total.gold << '\t' << total.pred << '\t'
     << fmt_pct(total.precision()) << '\t' << fmt_pct(total.recall()) << '\t'
     << fmt_pct(total.f1()) << '\n';
}

int cmd_analyze(const EvalArgs& args) {
  auto params = load_params(args.params);
  std::ostringstream out;
  out << "section\tbucket\tmatch\tgold\tpred\tprecision\trecall\tf1\n";
  if (parse_formalism(args.formalism) == Formalism::constituents) {
    auto gold = read_file_as(args.gold, [](std::istream& is) { return tp::read_bracketed(is); });
    auto pred = read_file_as(args.pred, [](std::istream& is) { return tp::read_bracketed(is); });
    auto score = tp::bracketing_score(gold, pred, params, args.jobs);
    std::map<std::string, tp::MatchCounts> lengths;
    for (const auto& [len, c] : score.per_length) {
      std::string key = std::to_string(len);
      if (len == params.span_length_tail) key += "+";
      lengths[key] = c;
    }
    emit_bucket_rows(out, "span_length", lengths);
    emit_bucket_rows(out, "span_label", score.per_label);
  } else {
    auto gold = read_file_as(args.gold, [](std::istream& is) { return tp::read_conllu(is); });
    auto pred = read_file_as(args.pred, [](std::istream& is) { return tp::read_conllu(is); });
    auto disp = tp::displacement_f1(gold, pred, params);
    std::map<std::string, tp::MatchCounts> disp_buckets;
    for (const auto& [d, c] : disp) disp_buckets[std::to_string(d)] = c;
    emit_bucket_rows(out, "displacement", disp_buckets);
    emit_bucket_rows(out, "relation",
                     tp::relation_f1(gold, pred, params, args.relation_label_only));
  }
  emit_or_print(args.output, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constituent and dependency parsing as sequence labeling"};
  app.require_subcommand(1);

  EncodeArgs enc;
  auto* cenc = app.add_subcommand("encode", "linearize a treebank into per-word labels");
  cenc->add_option("--formalism", enc.formalism, "const|dep")->required();
  cenc->add_option("--input", enc.input, "treebank file")->required();
  cenc->add_option("--output", enc.output, "label file to write")->required();
  cenc->add_option("--tags-out", enc.tags_out, "also write form<TAB>tag file");
  cenc->add_option("--pos-column", enc.pos_column, "upos|xpos (dep input)");
  cenc->add_option("--jobs", enc.jobs, "worker threads");

  DecodeArgs dec;
  auto* cdec = app.add_subcommand("decode", "rebuild trees from a label file");
  cdec->add_option("--formalism", dec.formalism, "const|dep")->required();
  cdec->add_option("--labels", dec.labels, "label file")->required();
  cdec->add_option("--tags", dec.tags, "PoS source for the same sentences")->required();
  cdec->add_option("--tags-format", dec.tags_format, "tsv|treebank");
  cdec->add_option("--pos-column", dec.pos_column, "upos|xpos");
  cdec->add_option("--output", dec.output, "treebank file to write")->required();
  cdec->add_option("--fallback-nonterminal", dec.fallback_nonterminal,
                   "nonterminal for unparsable labels (default: most frequent in file)");
  cdec->add_option("--fallback-relation", dec.fallback_relation,
                   "relation for unparsable labels (default: most frequent in file)");
  cdec->add_flag("--keep-collapsed", dec.keep_collapsed, "do not expand X+Y unary chains");

  TrainArgs tra;
  auto* ctra = app.add_subcommand("train", "fit the linear probe on a label file");
  ctra->add_option("--train", tra.train, "training label file")->required();
  ctra->add_option("--dev", tra.dev, "held-out label file");
  ctra->add_option("--embeddings", tra.embeddings, "PATH | random:D | vectors:PATH")->required();
  ctra->add_option("--dev-embeddings", tra.dev_embeddings, "vectors:PATH for the dev set");
  ctra->add_option("--model", tra.model, "checkpoint to write")->required();
  ctra->add_option("--lr", tra.lr, "learning rate");
  ctra->add_option("--epochs", tra.epochs, "training epochs");
  ctra->add_option("--batch-size", tra.batch_size, "minibatch size");
  ctra->add_option("--seed", tra.seed, "random seed");
  auto* freeze = ctra->add_flag("--freeze", "keep embeddings fixed (default)");
  ctra->add_flag("--fine-tune", tra.fine_tune, "update embeddings during training")
      ->excludes(freeze);

  PredictArgs pre;
  auto* cpre = app.add_subcommand("predict", "label sentences with a trained probe");
  cpre->add_option("--model", pre.model, "checkpoint")->required();
  cpre->add_option("--input", pre.input, "sentences (treebank or form<TAB>tag file)")->required();
  cpre->add_option("--input-format", pre.input_format, "treebank|tsv");
  cpre->add_option("--formalism", pre.formalism, "const|dep (treebank input)");
  cpre->add_option("--pos-column", pre.pos_column, "upos|xpos");
  cpre->add_option("--embeddings", pre.embeddings, "PATH | vectors:PATH")->required();
  cpre->add_option("--output", pre.output, "label file to write")->required();
  cpre->add_option("--seed", pre.seed, "random seed");

  EvalArgs eva;
  auto* ceva = app.add_subcommand("eval", "score a predicted treebank against gold");
  ceva->add_option("--formalism", eva.formalism, "const|dep")->required();
  ceva->add_option("--gold", eva.gold, "gold treebank")->required();
  ceva->add_option("--pred", eva.pred, "predicted treebank")->required();
  ceva->add_option("--params", eva.params, "evaluation parameter file");
  ceva->add_option("--output", eva.output, "write report here instead of stdout");
  ceva->add_option("--jobs", eva.jobs, "worker threads");

  EvalArgs ana;
  auto* cana = app.add_subcommand("analyze", "per-bucket breakdown tables");
  cana->add_option("--formalism", ana.formalism, "const|dep")->required();
  cana->add_option("--gold", ana.gold, "gold treebank")->required();
  cana->add_option("--pred", ana.pred, "predicted treebank")->required();
  cana->add_option("--params", ana.params, "evaluation parameter file");
  cana->add_option("--output", ana.output, "write tables here instead of stdout");
  cana->add_option("--jobs", ana.jobs, "worker threads");
  cana->add_flag("--relation-label-only", ana.relation_label_only,
                 "score relations without penalizing the head");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cenc->parsed()) return cmd_encode(enc);
    if (cdec->parsed()) return cmd_decode(dec);
    if (ctra->parsed()) return cmd_train(tra);
    if (cpre->parsed()) return cmd_predict(pre);
    if (ceva->parsed()) return cmd_eval(eva);
    if (cana->parsed()) return cmd_analyze(ana);
  } catch (const std::exception& e) {
    std::cerr << "tagparse: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
