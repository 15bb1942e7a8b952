#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chessvec/embedding.hpp"

namespace chessvec {

class UnknownToken : public std::runtime_error {
 public:
  explicit UnknownToken(std::string token) : std::runtime_error("unknown token: " + token), token_(std::move(token)) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

class TooFewTokens : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonMoveVocabulary : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Neighbor {
  std::string token;
  double similarity = 0;
};

struct TokenPair {
  std::string a;
  std::string b;
  double similarity = 0;
};

struct ExtremePairs {
  std::vector<TokenPair> most_similar;   // descending
  std::vector<TokenPair> least_similar;  // ascending
};

struct DestStatsRow {
  int n = 0;
  std::size_t count = 0;
  double percent = 0;
};

enum class NeighborCriterion {
  /// Same piece kind and color, same destination, different origin.
  SameDestination,
  /// Same piece kind and color, any squares.
  SamePieceKindColor,
};

struct DestStatsOptions {
  int k = 10;
  NeighborCriterion criterion = NeighborCriterion::SameDestination;
  /// Only score the `limit` most frequent move tokens (0 = all of them).
  std::size_t limit = 0;
};

/// Read-only cosine queries over a model's input vectors. Rows are
/// unit-normalized once up front; zero vectors stay zero.
class VectorIndex {
 public:
  explicit VectorIndex(const EmbeddingModel& model);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(std::size_t i) const { return tokens_[i]; }
  std::size_t index(std::string_view token) const;  // throws UnknownToken
  const RowMatrix<double>& unit() const { return unit_; }

  double cosine(std::string_view a, std::string_view b) const;
  std::vector<Neighbor> most_similar(std::string_view token, std::size_t k) const;
  /// 3CosAdd: sum of unit(positive) minus sum of unit(negative).
  std::vector<Neighbor> analogy(const std::vector<std::string>& positive, const std::vector<std::string>& negative,
                                std::size_t k) const;
  std::string odd_one_out(const std::vector<std::string>& tokens) const;
  ExtremePairs extreme_pairs(std::size_t k, std::uint64_t min_count = 0, int jobs = 1) const;
  std::vector<DestStatsRow> destination_stats(const std::vector<int>& thresholds,
                                              const DestStatsOptions& options = {}) const;

  /// Top-k rows by cosine to `target`, skipping `exclude` (sorted indices).
  std::vector<Neighbor> nearest(const Vector<double>& target, std::size_t k,
                                const std::vector<std::size_t>& exclude) const;

 private:
  std::vector<std::size_t> top_indices(const Vector<double>& sims, std::size_t k,
                                       const std::vector<std::size_t>& exclude) const;

  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, std::size_t> index_;
  RowMatrix<double> unit_;
};

}  // namespace chessvec
