#pragma once

#include <Eigen/Dense>

#include <algorithm>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chessvec/corpus.hpp"

namespace chessvec {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class EmptyVocabulary : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonFiniteLoss : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Token inventory ordered by descending count, ties lexicographic.
class Vocabulary {
 public:
  struct Entry {
    std::string token;
    std::uint64_t count = 0;
  };

  Vocabulary() = default;
  /// Keeps tokens with count >= min_count and sorts them.
  static Vocabulary from_counts(const std::unordered_map<std::string, std::uint64_t>& counts, std::uint64_t min_count);
  /// Uses the given order as-is (model files).
  static Vocabulary from_entries(std::vector<Entry> entries);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }
  const std::string& token(std::size_t i) const { return entries_[i].token; }
  std::uint64_t count(std::size_t i) const { return entries_[i].count; }
  std::uint64_t total_count() const { return total_; }
  std::optional<std::size_t> index_of(std::string_view token) const;

 private:
  void reindex();

  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t total_ = 0;
};

/// Throws EmptyVocabulary if nothing survives min_count.
Vocabulary build_vocab(std::istream& corpus, std::uint64_t min_count);

/// Draws token i with probability count(i)^power / sum_j count(j)^power.
class NegativeSampler {
 public:
  explicit NegativeSampler(const Vocabulary& vocab, double power = 0.75);

  template <typename Rng>
  std::size_t sample(Rng& rng) const {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total_;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<std::size_t>(it - cumulative_.begin());
  }

  double probability(std::size_t i) const;
  std::size_t size() const { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
  double total_ = 0;
};

// ---------------------------------------------------------------------------
// Skip-gram with negative sampling, one (center, context) pair.
//
//   loss = -log s(u_ctx . v) - sum_n log s(-u_n . v)
//
// `negatives` holds one output vector per column.

template <typename Scalar>
Scalar log_sigmoid(Scalar x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  return x >= 0 ? Scalar(1) / (Scalar(1) + std::exp(-x)) : std::exp(x) / (Scalar(1) + std::exp(x));
}

template <typename Scalar>
Scalar sgns_loss(const Vector<Scalar>& center, const Vector<Scalar>& context, const Matrix<Scalar>& negatives) {
  Scalar loss = -log_sigmoid<Scalar>(context.dot(center));
  for (Eigen::Index n = 0; n < negatives.cols(); ++n) loss -= log_sigmoid<Scalar>(-negatives.col(n).dot(center));
  return loss;
}

template <typename Scalar>
struct SgnsGradient {
  Scalar loss = 0;
  Vector<Scalar> center;
  Vector<Scalar> context;
  Matrix<Scalar> negatives;
};

template <typename Scalar>
SgnsGradient<Scalar> sgns_gradient(const Vector<Scalar>& center, const Vector<Scalar>& context,
                                   const Matrix<Scalar>& negatives) {
  SgnsGradient<Scalar> g;
  g.loss = sgns_loss<Scalar>(center, context, negatives);
  // d/ds [-log s(s)] = s(s) - 1 ; d/ds [-log s(-s)] = s(s)
  const Scalar pos = sigmoid<Scalar>(context.dot(center)) - Scalar(1);
  g.center = pos * context;
  g.context = pos * center;
  g.negatives.resize(negatives.rows(), negatives.cols());
  for (Eigen::Index n = 0; n < negatives.cols(); ++n) {
    const Scalar neg = sigmoid<Scalar>(negatives.col(n).dot(center));
    g.center += neg * negatives.col(n);
    g.negatives.col(n) = neg * center;
  }
  return g;
}

/// One gradient step of size lr on all involved vectors. Returns the loss at
/// the pre-update point.
template <typename Scalar>
Scalar sgns_update(Vector<Scalar>& center, Vector<Scalar>& context, Matrix<Scalar>& negatives, Scalar lr) {
  auto g = sgns_gradient<Scalar>(center, context, negatives);
  center -= lr * g.center;
  context -= lr * g.context;
  negatives -= lr * g.negatives;
  return g.loss;
}

// ---------------------------------------------------------------------------

enum class TrainMode { Deterministic, Parallel };

struct Hyperparams {
  int dim = 300;
  int window = 5;
  /// Draw the window radius uniformly from [1, window] per center token.
  bool dynamic_window = true;
  int negatives = 5;
  int epochs = 5;
  double initial_lr = 0.025;
  double min_lr_ratio = 1e-4;
  std::uint64_t min_count = 5;
  double subsample_t = 1e-4;
  std::uint64_t seed = 1;
  TrainMode mode = TrainMode::Deterministic;
  int jobs = 1;

  void validate() const;
};

/// Window 5 with a sampled radius for move listings; a fixed window of 32
/// (whole board) for position sentences and 40 for combined sentences.
Hyperparams defaults_for(SentenceType type);

struct EmbeddingModel {
  Vocabulary vocab;
  RowMatrix<float> input;
  RowMatrix<float> output;
  Hyperparams params;
  std::vector<double> epoch_loss;

  std::size_t size() const { return vocab.size(); }
  int dim() const { return static_cast<int>(input.cols()); }
};

/// Token ids per sentence after vocabulary filtering.
struct EncodedCorpus {
  std::vector<std::int32_t> ids;
  std::vector<std::size_t> offsets;  // sentence i spans [offsets[i], offsets[i+1])
  std::size_t sentences() const { return offsets.empty() ? 0 : offsets.size() - 1; }
};

/// Reads a corpus once, builds the vocabulary and encodes every sentence.
std::pair<Vocabulary, EncodedCorpus> load_corpus(std::istream& corpus, std::uint64_t min_count);

/// Token stream after subsampling one sentence (exposed for tests).
template <typename Rng>
void subsample_sentence(const std::int32_t* begin, const std::int32_t* end, const Vocabulary& vocab, double t,
                        Rng& rng, std::vector<std::int32_t>& out) {
  out.clear();
  const double total = static_cast<double>(vocab.total_count());
  for (const std::int32_t* p = begin; p != end; ++p) {
    if (t > 0) {
      const double f = static_cast<double>(vocab.count(static_cast<std::size_t>(*p))) / total;
      if (f > t) {
        const double keep = std::sqrt(t / f);
        if (static_cast<double>(rng() >> 11) * 0x1.0p-53 >= keep) continue;
      }
    }
    out.push_back(*p);
  }
}

EmbeddingModel train(std::istream& corpus, const Hyperparams& params);
EmbeddingModel train(const Vocabulary& vocab, const EncodedCorpus& corpus, const Hyperparams& params);

void save_model(const EmbeddingModel& model, std::ostream& out);
void save_model(const EmbeddingModel& model, const std::filesystem::path& path);
EmbeddingModel load_model(std::istream& in);
EmbeddingModel load_model(const std::filesystem::path& path);

}  // namespace chessvec
