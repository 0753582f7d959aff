// Acceptance suite: runs each top-level requirement and prints one
// PASS/FAIL/SKIP line per criterion. Exit status: 0 when nothing failed,
// 77 when everything that was selected got skipped, 1 otherwise.
//
// Criterion 7 needs real data that is not redistributable with the source:
// set TAGPARSE_EN_EWT_TRAIN / TAGPARSE_EN_EWT_DEV / TAGPARSE_EN_EWT_TEST to
// the EN-EWT CoNLL-U files and TAGPARSE_EMBEDDINGS_300D to a 300-dimensional
// embedding text file, and run the `acceptance_table1` test.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "tagparse/bracketed.hpp"
#include "tagparse/conllu.hpp"
#include "tagparse/const_codec.hpp"
#include "tagparse/dep_codec.hpp"
#include "tagparse/label_file.hpp"
#include "tagparse/metrics.hpp"
#include "tagparse/probe.hpp"
#include "tagparse/trainer.hpp"
#include "tagparse/util.hpp"

namespace fs = std::filesystem;
using namespace tagparse;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  enum Kind { pass, fail, skip } kind = fail;
  std::string detail;
};

Outcome ok(std::string detail) { return {Outcome::pass, std::move(detail)}; }
Outcome bad(std::string detail) { return {Outcome::fail, std::move(detail)}; }
Outcome skipped(std::string detail) { return {Outcome::skip, std::move(detail)}; }

std::string fmt2(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// 1. constituent round trip

Outcome criterion_const_roundtrip() {
  std::mt19937_64 gen(2024);
  testing::TreeGenConfig cfg;
  cfg.max_words = 12;
  cfg.nonterminals = 10;
  cfg.max_unary_depth = 3;
  auto start = Clock::now();
  for (int i = 0; i < 1000; ++i) {
    auto t = testing::random_tree(cfg, gen);
    auto collapsed = collapse_unary_chains(t);
    auto labels = encode_constituents(t);
    auto decoded =
        decode_constituents(labels, leaf_forms(collapsed), preterminal_tags(collapsed));
    if (!(decoded == collapsed))
      return bad("tree " + std::to_string(i) + " did not round-trip: " + to_bracketed(t));
  }
  double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (secs >= 10.0) return bad("took " + fmt2(secs) + " s (limit 10 s)");
  return ok("1000/1000 trees round-tripped exactly in " + fmt2(secs) + " s");
}

// ---------------------------------------------------------------------------
// 2. dependency round trip

Outcome criterion_dep_roundtrip() {
  std::mt19937_64 gen(2025);
  auto start = Clock::now();
  int non_projective = 0;
  for (int i = 0; i < 1000; ++i) {
    auto s = testing::random_dep_sentence(15, gen);
    if (!testing::is_projective(s)) ++non_projective;
    std::vector<std::string> forms, tags;
    for (const auto& t : s.tokens) {
      forms.push_back(t.form);
      tags.push_back(t.pos);
    }
    auto decoded = decode_dependencies(encode_dependencies(s), forms, tags);
    if (!(decoded == s)) return bad("sentence " + std::to_string(i) + " did not round-trip");
  }
  double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (secs >= 10.0) return bad("took " + fmt2(secs) + " s (limit 10 s)");
  return ok("1000/1000 trees round-tripped exactly (" + std::to_string(non_projective) +
            " non-projective) in " + fmt2(secs) + " s");
}

// ---------------------------------------------------------------------------
// 3. repair totality fuzz

Outcome criterion_repair_fuzz() {
  std::mt19937_64 gen(2026);
  auto start = Clock::now();
  for (int i = 0; i < 10000; ++i) {
    int n = 1 + static_cast<int>(util::uniform_below(gen, 12));
    auto labels = testing::random_const_labels(n, gen);
    std::vector<std::string> words, tags;
    for (int k = 0; k < n; ++k) {
      words.push_back("w" + std::to_string(k + 1));
      tags.push_back("T" + std::to_string(k % 4));
    }
    auto tree = decode_constituents(labels, words, tags);
    if (auto err = validate_constituents(tree, words))
      return bad("constituent fuzz case " + std::to_string(i) + ": " + *err);
  }
  for (int i = 0; i < 10000; ++i) {
    int n = 1 + static_cast<int>(util::uniform_below(gen, 12));
    auto labels = testing::random_dep_labels(n, gen);
    std::vector<std::string> words, tags;
    const auto& tagset = testing::dep_tagset();
    for (int k = 0; k < n; ++k) {
      words.push_back("w" + std::to_string(k + 1));
      tags.push_back(tagset[util::uniform_below(gen, tagset.size())]);
    }
    auto sent = decode_dependencies(labels, words, tags);
    if (auto err = validate_dependencies(sent))
      return bad("dependency fuzz case " + std::to_string(i) + ": " + *err);
  }
  double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (secs >= 30.0) return bad("took " + fmt2(secs) + " s (limit 30 s)");
  return ok("20000/20000 fuzzed sequences decoded to valid trees in " + fmt2(secs) + " s");
}

// ---------------------------------------------------------------------------
// 4. metric oracles

bool counts_equal(const MatchCounts& c, const std::array<long long, 3>& o) {
  return c.match == o[0] && c.gold == o[1] && c.pred == o[2];
}

Outcome criterion_metric_oracles() {
  std::mt19937_64 gen(2027);
  testing::TreeGenConfig cfg;
  cfg.max_words = 9;

  // ten-sentence constituent fixture: a mix of perfect and noisy predictions
  std::vector<ConstituentTree> cgold, cpred;
  for (int i = 0; i < 10; ++i) {
    auto g = collapse_unary_chains(testing::random_tree(cfg, gen));
    auto words = leaf_forms(g);
    auto tags = preterminal_tags(g);
    auto p = i % 3 == 0 ? g
                        : decode_constituents(testing::random_const_labels(
                                                  static_cast<int>(words.size()), gen),
                                              words, tags);
    cgold.push_back(std::move(g));
    cpred.push_back(std::move(p));
  }
  EvalParams params;
  params.delete_labels = {"T0"};  // exercise word deletion too
  auto score = bracketing_score(cgold, cpred, params);
  auto oracle = testing::oracle_bracketing(cgold, cpred, params);
  if (score.total.match != oracle.match || score.total.gold != oracle.gold ||
      score.total.pred != oracle.pred)
    return bad("bracketing totals disagree with the oracle");
  for (const auto& [len, c] : score.per_length)
    if (!oracle.per_length.count(len) || !counts_equal(c, oracle.per_length.at(len)))
      return bad("per-length bucket " + std::to_string(len) + " disagrees with the oracle");
  for (const auto& [lab, c] : score.per_label)
    if (!oracle.per_label.count(lab) || !counts_equal(c, oracle.per_label.at(lab)))
      return bad("per-label bucket " + lab + " disagrees with the oracle");
  if (score.per_length.size() != oracle.per_length.size() ||
      score.per_label.size() != oracle.per_label.size())
    return bad("bucket sets disagree with the oracle");

  auto ident = bracketing_score(cgold, cgold, params);
  if (ident.precision() != 100.0 || ident.recall() != 100.0 || ident.f1() != 100.0)
    return bad("identity bracketing did not score 100.0");

  // ten-sentence dependency fixture
  std::vector<DependencySentence> dgold, dpred;
  for (int i = 0; i < 10; ++i) {
    auto g = testing::random_dep_sentence(9, gen);
    auto p = g;
    if (i % 3 != 0) {
      std::vector<std::string> forms, tags;
      for (const auto& t : p.tokens) {
        forms.push_back(t.form);
        tags.push_back(t.pos);
      }
      for (size_t k = 0; k < p.size(); ++k) {
        if (util::uniform_below(gen, 3) == 0)
          p.heads[k] = static_cast<int>(util::uniform_below(gen, p.size() + 1));
        if (util::uniform_below(gen, 4) == 0) p.deprels[k] = "obl";
      }
      p = repair_tree(forms, tags, p.heads, p.deprels);
    }
    dgold.push_back(std::move(g));
    dpred.push_back(std::move(p));
  }
  EvalParams dparams;
  auto att = attachment_score(dgold, dpred, dparams);
  auto disp = displacement_f1(dgold, dpred, dparams);
  auto rel = relation_f1(dgold, dpred, dparams);
  auto oatt = testing::oracle_attachment(dgold, dpred, dparams);
  if (att.total != oatt.total || att.head_correct != oatt.head_ok ||
      att.both_correct != oatt.both_ok)
    return bad("attachment counts disagree with the oracle");
  if (att.las() > att.uas()) return bad("las exceeded uas");
  for (const auto& [d, c] : disp)
    if (!oatt.displacement.count(d) || !counts_equal(c, oatt.displacement.at(d)))
      return bad("displacement bucket " + std::to_string(d) + " disagrees with the oracle");
  for (const auto& [r, c] : rel)
    if (!oatt.relation.count(r) || !counts_equal(c, oatt.relation.at(r)))
      return bad("relation bucket " + r + " disagrees with the oracle");
  if (disp.size() != oatt.displacement.size() || rel.size() != oatt.relation.size())
    return bad("bucket sets disagree with the oracle");

  auto datt = attachment_score(dgold, dgold, dparams);
  if (datt.uas() != 100.0 || datt.las() != 100.0)
    return bad("identity attachment did not score 100.0");
  for (const auto& [d, c] : displacement_f1(dgold, dgold, dparams))
    if (c.f1() != 100.0) return bad("identity displacement bucket below 100");
  for (const auto& [r, c] : relation_f1(dgold, dgold, dparams))
    if (c.f1() != 100.0) return bad("identity relation bucket below 100");

  return ok("bracketing, attachment, displacement and relation counts all match the oracles;"
            " identity scores 100.0");
}

// ---------------------------------------------------------------------------
// 5. gradient check

Outcome criterion_gradients() {
  std::mt19937_64 gen(2028);
  const double h = 1e-5;
  auto rel_err = [](double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-4});
  };
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    int K = 2 + static_cast<int>(util::uniform_below(gen, 14));
    int d = 1 + static_cast<int>(util::uniform_below(gen, 20));
    int rows = 3 + static_cast<int>(util::uniform_below(gen, 4));
    int B = 2 + static_cast<int>(util::uniform_below(gen, 7));
    LinearProbe probe;
    probe.W.resize(K, d);
    probe.b.resize(K);
    Eigen::MatrixXd bank(rows, d);
    for (int k = 0; k < K; ++k) {
      probe.b(k) = 2.0 * util::uniform01(gen) - 1.0;
      for (int j = 0; j < d; ++j) probe.W(k, j) = 2.0 * util::uniform01(gen) - 1.0;
    }
    for (int r = 0; r < rows; ++r)
      for (int j = 0; j < d; ++j) bank(r, j) = 2.0 * util::uniform01(gen) - 1.0;

    std::vector<BatchItem> batch;
    std::vector<int> ys;
    for (int i = 0; i < B; ++i) {
      batch.push_back({static_cast<int>(util::uniform_below(gen, static_cast<uint64_t>(rows))),
                       static_cast<int>(util::uniform_below(gen, static_cast<uint64_t>(K)))});
      ys.push_back(batch.back().label);
    }
    Eigen::MatrixXd xs(B, d);
    auto fill = [&] {
      for (int i = 0; i < B; ++i) xs.row(i) = bank.row(batch[static_cast<size_t>(i)].row);
    };
    fill();
    auto g = loss_and_gradients(probe, bank, batch, true);

    for (int k = 0; k < K; ++k) {
      for (int j = 0; j < d; ++j) {
        Eigen::MatrixXd Wp = probe.W, Wm = probe.W;
        Wp(k, j) += h;
        Wm(k, j) -= h;
        double fd = static_cast<double>(testing::oracle_loss(Wp, probe.b, xs, ys) -
                                        testing::oracle_loss(Wm, probe.b, xs, ys)) /
                    (2 * h);
        worst = std::max(worst, rel_err(g.dW(k, j), fd));
        if (rel_err(g.dW(k, j), fd) >= 1e-4)
          return bad("dW(" + std::to_string(k) + "," + std::to_string(j) + ") off by rel " +
                     std::to_string(rel_err(g.dW(k, j), fd)));
      }
      Eigen::VectorXd bp = probe.b, bm = probe.b;
      bp(k) += h;
      bm(k) -= h;
      double fd = static_cast<double>(testing::oracle_loss(probe.W, bp, xs, ys) -
                                      testing::oracle_loss(probe.W, bm, xs, ys)) /
                  (2 * h);
      worst = std::max(worst, rel_err(g.db(k), fd));
      if (rel_err(g.db(k), fd) >= 1e-4) return bad("db(" + std::to_string(k) + ") out of tolerance");
    }
    for (const auto& [row, grad] : g.d_rows) {
      for (int j = 0; j < d; ++j) {
        double keep = bank(row, j);
        bank(row, j) = keep + h;
        fill();
        long double fp = testing::oracle_loss(probe.W, probe.b, xs, ys);
        bank(row, j) = keep - h;
        fill();
        long double fm = testing::oracle_loss(probe.W, probe.b, xs, ys);
        bank(row, j) = keep;
        fill();
        double fd = static_cast<double>(fp - fm) / (2 * h);
        worst = std::max(worst, rel_err(grad(j), fd));
        if (rel_err(grad(j), fd) >= 1e-4)
          return bad("embedding row gradient out of tolerance");
      }
    }
  }
  std::ostringstream os;
  os << "100 instances checked; worst relative error " << worst;
  return ok(os.str());
}

// ---------------------------------------------------------------------------
// 6. frozen purity

Outcome criterion_frozen_purity() {
  std::mt19937_64 gen(2029);
  std::vector<std::string> words;
  for (int i = 0; i < 40; ++i) words.push_back("word" + std::to_string(i));
  auto table = init_random_embeddings(words, 24, 555);
  ensure_special_rows(table, 556);
  auto snapshot = table;

  BankBuilder builder(table);
  ProbeCorpus corpus;
  LabelVocab vocab;
  for (int s = 0; s < 60; ++s) {
    std::vector<std::string> forms;
    std::vector<int> classes;
    int len = 3 + static_cast<int>(util::uniform_below(gen, 6));
    for (int i = 0; i < len; ++i) {
      int w = static_cast<int>(util::uniform_below(gen, words.size()));
      forms.push_back(words[static_cast<size_t>(w)]);
      classes.push_back(vocab.add("L" + std::to_string(w % 7)));
    }
    corpus.sentence_rows.push_back(builder.add_sentence(forms));
    corpus.sentence_classes.push_back(std::move(classes));
  }

  Eigen::MatrixXd before = builder.bank();
  TrainConfig config;  // full default run: 30 epochs, frozen
  auto result = train(before, corpus, &corpus, vocab.size(), config);

  if (result.bank.rows() != before.rows() || result.bank.cols() != before.cols())
    return bad("bank shape changed");
  if (!(result.bank.array() == before.array()).all())
    return bad("frozen training modified the embedding bank");
  auto written = builder.to_table(result.bank);
  for (const auto& [form, vec] : snapshot.vectors) {
    auto it = written.vectors.find(form);
    if (it == written.vectors.end()) return bad("form '" + form + "' missing after training");
    if (std::memcmp(it->second.data(), vec.data(), vec.size() * sizeof(double)) != 0)
      return bad("vector for '" + form + "' changed bitwise");
  }
  return ok("30-epoch frozen run left all " + std::to_string(snapshot.vectors.size()) +
            " vectors bitwise identical");
}

// ---------------------------------------------------------------------------
// subprocess plumbing shared by criteria 7 and 8

struct ToolRunner {
  fs::path dir;
  std::string bin;

  explicit ToolRunner(const std::string& name) {
    const char* env = std::getenv("TAGPARSE_BIN");
    bin = env ? env : "";
    dir = fs::temp_directory_path() / (name + "_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~ToolRunner() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }

  int run(const std::string& args, std::string* out = nullptr) const {
    std::string so = path("_stdout"), se = path("_stderr");
    int raw = std::system((bin + " " + args + " >" + so + " 2>" + se).c_str());
    if (out) *out = util::read_file(so);
    if (!WIFEXITED(raw) || WEXITSTATUS(raw) != 0) {
      std::cerr << util::read_file(se);
      return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    }
    return 0;
  }
};

double parse_report_value(const std::string& report, const std::string& key) {
  std::istringstream is(report);
  std::string line;
  while (std::getline(is, line)) {
    if (line.find(key) == std::string::npos) continue;
    auto fields = util::split_ws(line);
    if (auto v = util::parse_double(fields.back())) return *v;
  }
  return -1.0;
}

// ---------------------------------------------------------------------------
// 7. the frozen-precomputed-vector experiment on EN-EWT

Outcome criterion_table1() {
  const char* train_path = std::getenv("TAGPARSE_EN_EWT_TRAIN");
  const char* dev_path = std::getenv("TAGPARSE_EN_EWT_DEV");
  const char* test_path = std::getenv("TAGPARSE_EN_EWT_TEST");
  const char* emb_path = std::getenv("TAGPARSE_EMBEDDINGS_300D");
  for (auto [name, value] :
       {std::pair{"TAGPARSE_EN_EWT_TRAIN", train_path}, {"TAGPARSE_EN_EWT_DEV", dev_path},
        {"TAGPARSE_EN_EWT_TEST", test_path}, {"TAGPARSE_EMBEDDINGS_300D", emb_path}}) {
    if (!value || !fs::exists(value))
      return skipped(std::string(name) +
                     " is not set or does not exist; supply the EN-EWT CoNLL-U files and a "
                     "300-dimensional embedding table to run this criterion");
  }

  ToolRunner t("tagparse_table1");
  if (t.bin.empty()) return bad("TAGPARSE_BIN is not set");
  auto start = Clock::now();

  for (auto [tag, src] : {std::pair{"train", train_path}, {"dev", dev_path}, {"test", test_path}}) {
    std::string extra = std::string(tag) == "test" ? " --tags-out " + t.path("test.tags") : "";
    if (t.run("encode --formalism dep --input " + std::string(src) + " --output " +
              t.path(std::string(tag) + ".labels") + extra) != 0)
      return bad(std::string("encode failed on ") + tag);
  }

  const char* epochs_env = std::getenv("TAGPARSE_T1_EPOCHS");
  std::string epochs = epochs_env ? epochs_env : "10";

  auto run_experiment = [&](const std::string& name, const std::string& source,
                            double* las) -> Outcome {
    std::string model = t.path(name + ".bin");
    if (t.run("train --train " + t.path("train.labels") + " --dev " + t.path("dev.labels") +
              " --embeddings " + source + " --lr 5e-4 --batch-size 32 --epochs " + epochs +
              " --seed 1 --model " + model) != 0)
      return bad(name + ": training failed");
    if (t.run("predict --model " + model + " --input " + std::string(test_path) +
              " --formalism dep --embeddings " + model + ".emb --output " +
              t.path(name + ".pred.labels")) != 0)
      return bad(name + ": prediction failed");
    if (t.run("decode --formalism dep --labels " + t.path(name + ".pred.labels") + " --tags " +
              t.path("test.tags") + " --output " + t.path(name + ".pred.conllu")) != 0)
      return bad(name + ": decoding failed");
    std::string report;
    if (t.run("eval --formalism dep --gold " + std::string(test_path) + " --pred " +
                  t.path(name + ".pred.conllu"),
              &report) != 0)
      return bad(name + ": evaluation failed");
    *las = parse_report_value(report, "las:");
    if (*las < 0) return bad(name + ": could not parse the LAS from the report");
    return ok("");
  };

  double las_random = -1, las_table = -1;
  if (auto r = run_experiment("random", "random:300", &las_random); r.kind != Outcome::pass)
    return r;
  if (auto r = run_experiment("table", emb_path, &las_table); r.kind != Outcome::pass) return r;

  double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::string detail = "random LAS " + fmt2(las_random) + ", precomputed LAS " + fmt2(las_table) +
                       " after " + epochs + " epochs in " + fmt2(secs) + " s";
  if (las_random < 22.0 || las_random > 48.0)
    return bad(detail + "; random LAS outside [22, 48]");
  if (las_table < las_random + 3.0)
    return bad(detail + "; precomputed vectors did not beat random by >= 3 points");
  return ok(detail);
}

// ---------------------------------------------------------------------------
// 8. token-vector ingestion end to end (the desk-scale stand-in for the
// contextualized-encoder rows, which need pretrained models and licensed data)

Outcome criterion_token_vectors() {
  ToolRunner t("tagparse_vectors");
  if (t.bin.empty()) return bad("TAGPARSE_BIN is not set");

  std::mt19937_64 gen(2030);
  std::vector<DependencySentence> train_corpus, test_corpus;
  for (int i = 0; i < 40; ++i) train_corpus.push_back(testing::random_dep_sentence(8, gen));
  for (int i = 0; i < 10; ++i) test_corpus.push_back(testing::random_dep_sentence(8, gen));

  {
    std::ofstream os(t.path("train.conllu"));
    write_conllu_corpus(os, train_corpus);
    std::ofstream os2(t.path("test.conllu"));
    write_conllu_corpus(os2, test_corpus);
  }
  if (t.run("encode --formalism dep --input " + t.path("train.conllu") + " --output " +
            t.path("train.labels")) != 0)
    return bad("encode failed on the training corpus");
  if (t.run("encode --formalism dep --input " + t.path("test.conllu") + " --output " +
            t.path("test.labels") + " --tags-out " + t.path("test.tags")) != 0)
    return bad("encode failed on the test corpus");

  // synthetic 1024-dim contextual vectors: informative about the gold label,
  // so the probe has something to learn
  auto train_labeled = parse_label_file(util::read_file(t.path("train.labels")));
  auto test_labeled = parse_label_file(util::read_file(t.path("test.labels")));
  LabelVocab vocab;
  for (const auto& s : train_labeled)
    for (const auto& l : s.labels) vocab.add(l);

  auto write_vectors = [&](const std::string& path,
                           const std::vector<LabeledSentence>& corpus) {
    std::ofstream os(path);
    os.precision(10);
    for (const auto& s : corpus) {
      for (const auto& label : s.labels) {
        int cls = vocab.id(label);
        for (int j = 0; j < 1024; ++j) {
          double noise = 0.05 * (2.0 * util::uniform01(gen) - 1.0);
          double signal = j == cls % 1024 ? 2.0 : 0.0;
          os << (j ? " " : "") << signal + noise;
        }
        os << '\n';
      }
      os << '\n';
    }
  };
  write_vectors(t.path("train.vec"), train_labeled);
  write_vectors(t.path("test.vec"), test_labeled);

  if (t.run("train --train " + t.path("train.labels") + " --embeddings vectors:" +
            t.path("train.vec") + " --epochs 60 --lr 0.2 --batch-size 16 --seed 3 --model " +
            t.path("probe.bin")) != 0)
    return bad("training on token vectors failed");
  if (t.run("predict --model " + t.path("probe.bin") + " --input " + t.path("test.conllu") +
            " --formalism dep --embeddings vectors:" + t.path("test.vec") + " --output " +
            t.path("pred.labels")) != 0)
    return bad("prediction from token vectors failed");
  if (t.run("decode --formalism dep --labels " + t.path("pred.labels") + " --tags " +
            t.path("test.tags") + " --output " + t.path("pred.conllu")) != 0)
    return bad("decoding failed");

  auto pred = parse_conllu(util::read_file(t.path("pred.conllu")));
  if (pred.size() != test_corpus.size()) return bad("prediction lost sentences");
  for (size_t i = 0; i < pred.size(); ++i)
    if (auto err = validate_dependencies(pred[i]))
      return bad("decoded sentence " + std::to_string(i + 1) + " invalid: " + *err);

  std::string report;
  if (t.run("eval --formalism dep --gold " + t.path("test.conllu") + " --pred " +
                t.path("pred.conllu"),
            &report) != 0)
    return bad("evaluation failed");
  double las = parse_report_value(report, "las:");
  double uas = parse_report_value(report, "uas:");
  if (las < 0 || uas < 0 || las > uas) return bad("report not parseable or inconsistent");
  // informative vectors must beat guessing by a wide margin
  if (las < 50.0) return bad("LAS " + fmt2(las) + " on informative synthetic vectors (< 50)");
  return ok("1024-dim vector files drove train/predict/decode/eval end to end; test LAS " +
            fmt2(las));
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> skip_ids, only_ids;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if ((arg == "--skip" || arg == "--only") && i + 1 < argc) {
      auto v = tagparse::util::parse_int(argv[++i]);
      if (!v) {
        std::cerr << "bad criterion id: " << argv[i] << '\n';
        return 2;
      }
      (arg == "--skip" ? skip_ids : only_ids).push_back(static_cast<int>(*v));
    } else {
      std::cerr << "usage: acceptance [--skip N]... [--only N]...\n";
      return 2;
    }
  }

  std::vector<Criterion> criteria{
      {1, "constituent round-trip", criterion_const_roundtrip},
      {2, "dependency round-trip", criterion_dep_roundtrip},
      {3, "repair totality fuzz", criterion_repair_fuzz},
      {4, "metric oracles", criterion_metric_oracles},
      {5, "gradient check", criterion_gradients},
      {6, "frozen-mode purity", criterion_frozen_purity},
      {7, "EN-EWT frozen-vector experiment", criterion_table1},
      {8, "token-vector ingestion end-to-end", criterion_token_vectors},
  };

  int failed = 0, passed = 0, skipped_count = 0;
  for (const auto& c : criteria) {
    bool selected = only_ids.empty() ||
                    std::find(only_ids.begin(), only_ids.end(), c.id) != only_ids.end();
    if (std::find(skip_ids.begin(), skip_ids.end(), c.id) != skip_ids.end()) selected = false;
    if (!selected) continue;
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = bad(std::string("unexpected exception: ") + e.what());
    }
    const char* verdict = outcome.kind == Outcome::pass ? "PASS"
                          : outcome.kind == Outcome::skip ? "SKIP"
                                                          : "FAIL";
    std::cout << "CRITERION " << c.id << " (" << c.title << "): " << verdict;
    if (!outcome.detail.empty()) std::cout << " - " << outcome.detail;
    std::cout << std::endl;
    if (outcome.kind == Outcome::pass) ++passed;
    if (outcome.kind == Outcome::fail) ++failed;
    if (outcome.kind == Outcome::skip) ++skipped_count;
  }
  if (failed > 0) return 1;
  if (passed == 0 && skipped_count > 0) return 77;
  return 0;
}
