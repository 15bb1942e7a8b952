#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "chessvec/embedding.hpp"

namespace chessvec {

class PerplexityTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonFiniteGradient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TsneInit { RandomGaussian, Pca };

struct TsneConfig {
  double perplexity = 30;
  int iterations = 1000;
  double exaggeration = 12;
  int exaggeration_iters = 250;
  /// Defaults to max(V / 12, 50), with the floor lowered for tiny inputs
  /// where 50 would make the exaggeration phase diverge.
  std::optional<double> learning_rate;
  double momentum = 0.5;
  double final_momentum = 0.8;
  std::uint64_t seed = 1;
  TsneInit init = TsneInit::RandomGaussian;
  /// KL divergence is sampled every `kl_every` iterations (and at the end of
  /// the exaggeration phase and the final iteration).
  int kl_every = 50;
  int jobs = 1;

  void validate(std::size_t n) const;
};

template <typename Scalar>
struct TsneResult {
  RowMatrix<Scalar> embedding;       // n x 2, mean-centred
  std::vector<double> perplexities;  // achieved per-point perplexity
  std::vector<std::pair<int, double>> kl_trace;
  double kl_after_exaggeration = 0;
  double kl_final = 0;
};

/// Row-stochastic conditional affinities p_{j|i} with a per-point Gaussian
/// bandwidth found by bisection on the entropy. `perplexities` receives the
/// achieved perplexity of each row.
template <typename Scalar>
Matrix<Scalar> conditional_affinities(const RowMatrix<Scalar>& x, double perplexity,
                                      std::vector<double>* perplexities = nullptr);

/// (P + P^T) / 2n: symmetric, sums to one.
template <typename Scalar>
Matrix<Scalar> joint_affinities(const RowMatrix<Scalar>& x, double perplexity,
                                std::vector<double>* perplexities = nullptr);

/// KL(P || Q) for a 2-D embedding y.
template <typename Scalar>
double tsne_kl(const Matrix<Scalar>& p, const RowMatrix<Scalar>& y);

/// Exact O(n^2) t-SNE to two dimensions.
template <typename Scalar>
TsneResult<Scalar> tsne(const RowMatrix<Scalar>& x, const TsneConfig& config);

extern template Matrix<float> conditional_affinities(const RowMatrix<float>&, double, std::vector<double>*);
extern template Matrix<double> conditional_affinities(const RowMatrix<double>&, double, std::vector<double>*);
extern template Matrix<float> joint_affinities(const RowMatrix<float>&, double, std::vector<double>*);
extern template Matrix<double> joint_affinities(const RowMatrix<double>&, double, std::vector<double>*);
extern template double tsne_kl(const Matrix<float>&, const RowMatrix<float>&);
extern template double tsne_kl(const Matrix<double>&, const RowMatrix<double>&);
extern template TsneResult<float> tsne(const RowMatrix<float>&, const TsneConfig&);
extern template TsneResult<double> tsne(const RowMatrix<double>&, const TsneConfig&);

}  // namespace chessvec
