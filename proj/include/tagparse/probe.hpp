#ifndef TAGPARSE_PROBE_HPP
#define TAGPARSE_PROBE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tagparse/embeddings.hpp"
#include "tagparse/util.hpp"

namespace tagparse {

inline constexpr const char* kUnkLabel = "<UNK-LABEL>";

// Bijection between atomic label strings and class indices. Class 0 is a
// reserved label for strings never seen in training.
struct LabelVocab {
  std::vector<std::string> labels;
  std::unordered_map<std::string, int> index;

  LabelVocab() { add(kUnkLabel); }

  int add(const std::string& label) {
    auto it = index.find(label);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(labels.size());
    labels.push_back(label);
    index.emplace(label, id);
    return id;
  }
  int id(const std::string& label) const {
    auto it = index.find(label);
    return it == index.end() ? 0 : it->second;
  }
  const std::string& label(int id) const { return labels.at(static_cast<size_t>(id)); }
  int size() const { return static_cast<int>(labels.size()); }
};

// The whole model: logits = W x + b, class distribution via softmax.
struct LinearProbe {
  Eigen::MatrixXd W;  // K x d
  Eigen::VectorXd b;  // K

  int num_classes() const { return static_cast<int>(W.rows()); }
  int input_dim() const { return static_cast<int>(W.cols()); }

  static LinearProbe zeros(int num_classes, int dim) {
    LinearProbe p;
    p.W = Eigen::MatrixXd::Zero(num_classes, dim);
    p.b = Eigen::VectorXd::Zero(num_classes);
    return p;
  }
};

inline Eigen::VectorXd softmax(Eigen::VectorXd logits) {
  logits.array() -= logits.maxCoeff();
  Eigen::VectorXd out = logits.array().exp();
  return out / out.sum();
}

inline Eigen::VectorXd forward(const LinearProbe& probe, const Eigen::VectorXd& x) {
  if (x.size() != probe.input_dim())
    throw std::invalid_argument("input has dimension " + std::to_string(x.size()) +
                                ", probe expects " + std::to_string(probe.input_dim()));
  return softmax(probe.W * x + probe.b);
}

// Lowest index wins ties.
inline int argmax_class(const Eigen::VectorXd& scores) {
  int best = 0;
  for (int k = 1; k < scores.size(); ++k)
    if (scores[k] > scores[best]) best = k;
  return best;
}

struct BatchItem {
  int row = -1;  // row in the embedding bank
  int label = -1;
};

struct Gradients {
  double loss = 0.0;
  Eigen::MatrixXd dW;
  Eigen::VectorXd db;
  std::map<int, Eigen::VectorXd> d_rows;  // fine-tune mode only
};

// Summed negative log-likelihood over the batch and its analytic gradients.
// In frozen mode the embedding gradients are suppressed.
inline Gradients loss_and_gradients(const LinearProbe& probe, const Eigen::MatrixXd& bank,
                                    const std::vector<BatchItem>& batch, bool fine_tune) {
  int B = static_cast<int>(batch.size());
  int K = probe.num_classes();
  Eigen::MatrixXd X(B, probe.input_dim());
  for (int i = 0; i < B; ++i) {
    if (batch[i].label < 0 || batch[i].label >= K)
      throw std::out_of_range("label id " + std::to_string(batch[i].label) +
                              " outside vocabulary of size " + std::to_string(K));
    X.row(i) = bank.row(batch[i].row);
  }

  Eigen::MatrixXd logits = X * probe.W.transpose();
  logits.rowwise() += probe.b.transpose();

  Gradients g;
  Eigen::MatrixXd P(B, K);
  for (int i = 0; i < B; ++i) {
    Eigen::VectorXd row = logits.row(i).transpose();
    row.array() -= row.maxCoeff();
    Eigen::VectorXd ex = row.array().exp();
    double z = ex.sum();
    P.row(i) = (ex / z).transpose();
    g.loss -= row[batch[i].label] - std::log(z);
  }

  Eigen::MatrixXd G = P;  // dL/dlogits = P - onehot(y)
  for (int i = 0; i < B; ++i) G(i, batch[i].label) -= 1.0;

  g.dW = G.transpose() * X;
  g.db = G.colwise().sum().transpose();
  if (fine_tune) {
    Eigen::MatrixXd dX = G * probe.W;
    for (int i = 0; i < B; ++i) {
      auto [it, fresh] = g.d_rows.try_emplace(batch[i].row, dX.row(i).transpose());
      if (!fresh) it->second += dX.row(i).transpose();
    }
  }
  return g;
}

// Each coordinate i.i.d. uniform on [-sqrt(3)/d, +sqrt(3)/d], drawn in the
// given vocabulary order so a fixed seed reproduces the table exactly.
inline EmbeddingTable init_random_embeddings(const std::vector<std::string>& vocab, size_t dim,
                                             uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("embedding dimension must be >= 1");
  EmbeddingTable table;
  table.dim = dim;
  std::mt19937_64 gen(seed);
  double bound = std::sqrt(3.0) / static_cast<double>(dim);
  for (const auto& word : vocab) {
    if (table.contains(word)) continue;
    std::vector<double> v(dim);
    for (auto& x : v) x = bound * (2.0 * util::uniform01(gen) - 1.0);
    table.vectors.emplace(word, std::move(v));
  }
  table.unk.assign(dim, 0.0);
  return table;
}

// Adds <UNK>/<BOS>/<EOS> rows when absent and refreshes the fallback vector.
inline void ensure_special_rows(EmbeddingTable& table, uint64_t seed) {
  if (table.dim == 0) throw std::invalid_argument("embedding table has no dimension");
  std::mt19937_64 gen(seed);
  double bound = std::sqrt(3.0) / static_cast<double>(table.dim);
  for (const char* tok : {kUnkToken, kBosToken, kEosToken}) {
    std::vector<double> v(table.dim);
    for (auto& x : v) x = bound * (2.0 * util::uniform01(gen) - 1.0);
    if (!table.contains(tok)) table.vectors.emplace(tok, std::move(v));
  }
  table.unk = table.vectors.at(kUnkToken);
}

// One vector per token plus the dummy beginning- and end-of-sentence rows.
// Out-of-vocabulary forms fall back to the <UNK> vector.
inline Eigen::MatrixXd embed_sentence(const std::vector<std::string>& forms,
                                      const EmbeddingTable& table) {
  if (!table.contains(kBosToken) || !table.contains(kEosToken))
    throw std::invalid_argument("embedding table lacks <BOS>/<EOS> rows");
  Eigen::MatrixXd out(forms.size() + 2, table.dim);
  auto put = [&](Eigen::Index row, const std::vector<double>& v) {
    for (size_t j = 0; j < v.size(); ++j) out(row, static_cast<Eigen::Index>(j)) = v[j];
  };
  put(0, table.lookup(kBosToken));
  for (size_t i = 0; i < forms.size(); ++i) put(static_cast<Eigen::Index>(i) + 1, table.lookup(forms[i]));
  put(out.rows() - 1, table.lookup(kEosToken));
  return out;
}

}  // namespace tagparse

#endif
