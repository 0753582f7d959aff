#ifndef TAGPARSE_TRAINER_HPP
#define TAGPARSE_TRAINER_HPP

#include <Eigen/Dense>
#include <cstring>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "tagparse/embeddings.hpp"
#include "tagparse/probe.hpp"
#include "tagparse/util.hpp"

namespace tagparse {

enum class EmbeddingMode { frozen, fine_tune };

struct TrainConfig {
  double learning_rate = 5e-4;
  int epochs = 30;
  int batch_size = 32;
  uint64_t seed = 1;
  EmbeddingMode mode = EmbeddingMode::frozen;
};

// Token streams over a shared row bank. Row 0 / last of each sentence are
// the dummy BOS/EOS positions; they carry no class and take no loss.
struct ProbeCorpus {
  std::vector<std::vector<int>> sentence_rows;
  std::vector<std::vector<int>> sentence_classes;  // empty for predict-only corpora

  size_t token_count() const {
    size_t n = 0;
    for (const auto& s : sentence_rows) n += s.size() - 2;
    return n;
  }
};

// Accumulates embedding rows for one or more corpora so that train, dev and
// fine-tuning all see the same storage. In table mode distinct forms share
// rows (out-of-vocabulary forms share the <UNK> row); in vectors mode every
// token owns its row.
class BankBuilder {
 public:
  explicit BankBuilder(const EmbeddingTable& table) : table_(&table), dim_(table.dim) {
    if (!table.contains(kBosToken) || !table.contains(kEosToken) || !table.contains(kUnkToken))
      throw std::invalid_argument("embedding table lacks <UNK>/<BOS>/<EOS> rows");
    bos_ = row_for_form(kBosToken);
    eos_ = row_for_form(kEosToken);
    row_for_form(kUnkToken);
  }

  BankBuilder(size_t dim, uint64_t seed) : dim_(dim) {
    std::mt19937_64 gen(seed);
    double bound = std::sqrt(3.0) / static_cast<double>(dim);
    auto random_row = [&](const char* name) {
      std::vector<double> v(dim);
      for (auto& x : v) x = bound * (2.0 * util::uniform01(gen) - 1.0);
      rows_.push_back(std::move(v));
      row_forms_.emplace_back(name);
      return static_cast<int>(rows_.size()) - 1;
    };
    bos_ = random_row(kBosToken);
    eos_ = random_row(kEosToken);
  }

  std::vector<int> add_sentence(const std::vector<std::string>& forms) {
    if (!table_) throw std::logic_error("builder is in vectors mode");
    std::vector<int> rows;
    rows.reserve(forms.size() + 2);
    rows.push_back(bos_);
    for (const auto& f : forms) rows.push_back(row_for_form(table_->contains(f) ? f : kUnkToken));
    rows.push_back(eos_);
    return rows;
  }

  std::vector<int> add_sentence(const std::vector<std::vector<double>>& vectors) {
    std::vector<int> rows;
    rows.reserve(vectors.size() + 2);
    rows.push_back(bos_);
    for (const auto& v : vectors) {
      if (v.size() != dim_)
        throw std::invalid_argument("token vector dimension mismatch: expected " +
                                    std::to_string(dim_) + ", got " + std::to_string(v.size()));
      rows_.push_back(v);
      row_forms_.emplace_back();
      rows.push_back(static_cast<int>(rows_.size()) - 1);
    }
    rows.push_back(eos_);
    return rows;
  }

  Eigen::MatrixXd bank() const {
    Eigen::MatrixXd m(rows_.size(), dim_);
    for (size_t i = 0; i < rows_.size(); ++i)
      for (size_t j = 0; j < dim_; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows_[i][j];
    return m;
  }

  const std::vector<std::string>& row_forms() const { return row_forms_; }
  size_t dim() const { return dim_; }

  // Copies (possibly fine-tuned) rows back into an embedding table.
  EmbeddingTable to_table(const Eigen::MatrixXd& bank) const {
    EmbeddingTable out;
    out.dim = dim_;
    for (size_t i = 0; i < row_forms_.size(); ++i) {
      if (row_forms_[i].empty()) continue;
      std::vector<double> v(dim_);
      for (size_t j = 0; j < dim_; ++j) v[j] = bank(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      out.vectors.emplace(row_forms_[i], std::move(v));
    }
    auto it = out.vectors.find(kUnkToken);
    out.unk = it != out.vectors.end() ? it->second : std::vector<double>(dim_, 0.0);
    return out;
  }

 private:
  int row_for_form(const std::string& form) {
    auto it = form_rows_.find(form);
    if (it != form_rows_.end()) return it->second;
    rows_.push_back(table_->lookup(form));
    row_forms_.push_back(form);
    int id = static_cast<int>(rows_.size()) - 1;
    form_rows_.emplace(form, id);
    return id;
  }

  const EmbeddingTable* table_ = nullptr;
  size_t dim_;
  int bos_ = 0, eos_ = 0;
  std::vector<std::vector<double>> rows_;
  std::vector<std::string> row_forms_;
  std::unordered_map<std::string, int> form_rows_;
};

namespace detail {

// Logits for the real tokens of one sentence, one row per token.
inline Eigen::MatrixXd sentence_logits(const LinearProbe& probe, const Eigen::MatrixXd& bank,
                                       const std::vector<int>& rows) {
  Eigen::Index n = static_cast<Eigen::Index>(rows.size()) - 2;
  Eigen::MatrixXd X(n, bank.cols());
  for (Eigen::Index i = 0; i < n; ++i) X.row(i) = bank.row(rows[static_cast<size_t>(i) + 1]);
  Eigen::MatrixXd logits = X * probe.W.transpose();
  logits.rowwise() += probe.b.transpose();
  return logits;
}

}  // namespace detail

inline double evaluate_accuracy(const LinearProbe& probe, const Eigen::MatrixXd& bank,
                                const ProbeCorpus& corpus) {
  long long total = 0, correct = 0;
  for (size_t s = 0; s < corpus.sentence_rows.size(); ++s) {
    auto logits = detail::sentence_logits(probe, bank, corpus.sentence_rows[s]);
    const auto& classes = corpus.sentence_classes[s];
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
      ++total;
      if (argmax_class(logits.row(i).transpose()) == classes[static_cast<size_t>(i)]) ++correct;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_accuracy = -1.0;  // -1 when no held-out set
};

struct TrainResult {
  LinearProbe probe;
  Eigen::MatrixXd bank;
  std::vector<EpochStats> history;
  int best_epoch = 0;
  double best_dev_accuracy = -1.0;
};

// Plain minibatch SGD over the summed cross-entropy. Shuffling, batching
// and gradient application follow a fixed order, so a fixed seed gives a
// bit-identical trajectory. Returns the best-by-dev-accuracy checkpoint
// (the final epoch when no dev corpus is given).
inline TrainResult train(Eigen::MatrixXd bank, const ProbeCorpus& train_corpus,
                         const ProbeCorpus* dev_corpus, int num_classes,
                         const TrainConfig& config, std::ostream* log = nullptr) {
  if (config.learning_rate <= 0) throw std::invalid_argument("learning rate must be positive");
  if (config.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (config.batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (train_corpus.token_count() == 0) throw std::invalid_argument("training corpus is empty");

  bool fine_tune = config.mode == EmbeddingMode::fine_tune;
  int dim = static_cast<int>(bank.cols());

  std::vector<BatchItem> items;
  for (size_t s = 0; s < train_corpus.sentence_rows.size(); ++s) {
    const auto& rows = train_corpus.sentence_rows[s];
    const auto& classes = train_corpus.sentence_classes[s];
    for (size_t i = 0; i + 2 < rows.size(); ++i) items.push_back({rows[i + 1], classes[i]});
  }

  TrainResult result;
  result.probe = LinearProbe::zeros(num_classes, dim);
  bool has_dev = dev_corpus && !dev_corpus->sentence_rows.empty();

  LinearProbe best = result.probe;
  Eigen::MatrixXd best_bank;
  int best_epoch = has_dev ? 0 : config.epochs;
  double best_acc = -1.0;

  std::mt19937_64 gen(config.seed);
  if (log) *log << "epoch\ttrain_loss\tdev_accuracy\n";
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    util::shuffle(items, gen);
    double epoch_loss = 0.0;
    for (size_t off = 0; off < items.size(); off += static_cast<size_t>(config.batch_size)) {
      size_t hi = std::min(items.size(), off + static_cast<size_t>(config.batch_size));
      std::vector<BatchItem> batch(items.begin() + static_cast<long>(off),
                                   items.begin() + static_cast<long>(hi));
      Gradients g = loss_and_gradients(result.probe, bank, batch, fine_tune);
      epoch_loss += g.loss;
      result.probe.W -= config.learning_rate * g.dW;
      result.probe.b -= config.learning_rate * g.db;
      for (const auto& [row, grad] : g.d_rows)
        bank.row(row) -= config.learning_rate * grad.transpose();
    }

    EpochStats stats{epoch, epoch_loss, -1.0};
    if (has_dev) {
      stats.dev_accuracy = evaluate_accuracy(result.probe, bank, *dev_corpus);
      if (stats.dev_accuracy > best_acc) {
        best_acc = stats.dev_accuracy;
        best_epoch = epoch;
        best = result.probe;
        if (fine_tune) best_bank = bank;
      }
    }
    result.history.push_back(stats);
    if (log) {
      *log << epoch << '\t' << stats.train_loss << '\t';
      if (stats.dev_accuracy >= 0)
        *log << stats.dev_accuracy;
      else
        *log << "-";
      *log << '\n';
    }
  }

  if (has_dev) {
    result.probe = best;
    result.bank = fine_tune && best_bank.size() > 0 ? best_bank : bank;
    result.best_epoch = best_epoch;
    result.best_dev_accuracy = best_acc;
  } else {
    result.bank = bank;
    result.best_epoch = config.epochs;
  }
  return result;
}

// Argmax class ids for every real token, BOS/EOS positions dropped.
inline std::vector<std::vector<int>> predict_classes(const LinearProbe& probe,
                                                     const Eigen::MatrixXd& bank,
                                                     const std::vector<std::vector<int>>& sentence_rows) {
  std::vector<std::vector<int>> out;
  out.reserve(sentence_rows.size());
  for (const auto& rows : sentence_rows) {
    auto logits = detail::sentence_logits(probe, bank, rows);
    std::vector<int> classes;
    classes.reserve(static_cast<size_t>(logits.rows()));
    for (Eigen::Index i = 0; i < logits.rows(); ++i)
      classes.push_back(argmax_class(logits.row(i).transpose()));
    out.push_back(std::move(classes));
  }
  return out;
}

namespace detail {

inline void put_u32(std::ostream& os, uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

inline void put_u64(std::ostream& os, uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

inline void put_f64(std::ostream& os, double d) {
  uint64_t v;
  std::memcpy(&v, &d, 8);
  put_u64(os, v);
}

inline uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw format_error("truncated checkpoint");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return v;
}

inline uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw format_error("truncated checkpoint");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

inline double get_f64(std::istream& is) {
  uint64_t v = get_u64(is);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

}  // namespace detail

inline constexpr char kCheckpointMagic[8] = {'T', 'A', 'G', 'P', 'R', 'O', 'B', 'E'};

// Versioned header (dimension, class count, label vocabulary) followed by
// row-major W and b as little-endian 64-bit floats.
inline void save_checkpoint(std::ostream& os, const LinearProbe& probe, const LabelVocab& vocab) {
  os.write(kCheckpointMagic, 8);
  detail::put_u32(os, 1);  // version
  detail::put_u64(os, static_cast<uint64_t>(probe.num_classes()));
  detail::put_u64(os, static_cast<uint64_t>(probe.input_dim()));
  for (const auto& label : vocab.labels) {
    detail::put_u32(os, static_cast<uint32_t>(label.size()));
    os.write(label.data(), static_cast<std::streamsize>(label.size()));
  }
  for (int k = 0; k < probe.num_classes(); ++k)
    for (int j = 0; j < probe.input_dim(); ++j) detail::put_f64(os, probe.W(k, j));
  for (int k = 0; k < probe.num_classes(); ++k) detail::put_f64(os, probe.b(k));
}

struct Checkpoint {
  LinearProbe probe;
  LabelVocab vocab;
};

inline Checkpoint load_checkpoint(std::istream& is) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw format_error("not a probe checkpoint (bad magic)");
  uint32_t version = detail::get_u32(is);
  if (version != 1) throw format_error("unsupported checkpoint version " + std::to_string(version));
  auto K = static_cast<Eigen::Index>(detail::get_u64(is));
  auto d = static_cast<Eigen::Index>(detail::get_u64(is));
  Checkpoint ckpt;
  ckpt.vocab.labels.clear();
  ckpt.vocab.index.clear();
  for (Eigen::Index k = 0; k < K; ++k) {
    uint32_t len = detail::get_u32(is);
    std::string label(len, '\0');
    if (!is.read(label.data(), len)) throw format_error("truncated checkpoint");
    ckpt.vocab.add(label);
  }
  ckpt.probe.W.resize(K, d);
  ckpt.probe.b.resize(K);
  for (Eigen::Index k = 0; k < K; ++k)
    for (Eigen::Index j = 0; j < d; ++j) ckpt.probe.W(k, j) = detail::get_f64(is);
  for (Eigen::Index k = 0; k < K; ++k) ckpt.probe.b(k) = detail::get_f64(is);
  return ckpt;
}

}  // namespace tagparse

#endif
