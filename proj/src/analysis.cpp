#include "chessvec/analysis.hpp"

#include <algorithm>
#include <queue>
#include <thread>

#include "chessvec/tokens.hpp"

namespace chessvec {

VectorIndex::VectorIndex(const EmbeddingModel& model) {
  const std::size_t V = model.size();
  tokens_.reserve(V);
  counts_.reserve(V);
  for (std::size_t i = 0; i < V; ++i) {
    tokens_.push_back(model.vocab.token(i));
    counts_.push_back(model.vocab.count(i));
    index_.emplace(tokens_.back(), i);
  }
  unit_ = model.input.cast<double>();
  for (Eigen::Index r = 0; r < unit_.rows(); ++r) {
    const double n = unit_.row(r).norm();
    if (n > 0) unit_.row(r) /= n;
  }
}

std::size_t VectorIndex::index(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) throw UnknownToken(std::string(token));
  return it->second;
}

double VectorIndex::cosine(std::string_view a, std::string_view b) const {
  const auto i = static_cast<Eigen::Index>(index(a)), j = static_cast<Eigen::Index>(index(b));
  return unit_.row(i).dot(unit_.row(j));
}

std::vector<std::size_t> VectorIndex::top_indices(const Vector<double>& sims, std::size_t k,
                                                  const std::vector<std::size_t>& exclude) const {
  std::vector<std::size_t> idx;
  idx.reserve(size());
  for (std::size_t i = 0; i < size(); ++i)
    if (!std::binary_search(exclude.begin(), exclude.end(), i)) idx.push_back(i);
  k = std::min(k, idx.size());
  auto better = [&](std::size_t a, std::size_t b) {
    const double sa = sims(static_cast<Eigen::Index>(a)), sb = sims(static_cast<Eigen::Index>(b));
    return sa != sb ? sa > sb : tokens_[a] < tokens_[b];
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), better);
  idx.resize(k);
  return idx;
}

std::vector<Neighbor> VectorIndex::nearest(const Vector<double>& target, std::size_t k,
                                           const std::vector<std::size_t>& exclude) const {
  const double norm = target.norm();
  Vector<double> sims = unit_ * target;
  if (norm > 0) sims /= norm;
  std::vector<Neighbor> out;
  for (std::size_t i : top_indices(sims, k, exclude)) out.push_back({tokens_[i], sims(static_cast<Eigen::Index>(i))});
  return out;
}

std::vector<Neighbor> VectorIndex::most_similar(std::string_view token, std::size_t k) const {
  const std::size_t i = index(token);
  return nearest(unit_.row(static_cast<Eigen::Index>(i)).transpose(), k, {i});
}

std::vector<Neighbor> VectorIndex::analogy(const std::vector<std::string>& positive,
                                           const std::vector<std::string>& negative, std::size_t k) const {
  if (positive.empty()) throw std::invalid_argument("analogy needs at least one positive token");
  Vector<double> target = Vector<double>::Zero(unit_.cols());
  std::vector<std::size_t> exclude;
  for (const auto& t : positive) {
    const std::size_t i = index(t);
    target += unit_.row(static_cast<Eigen::Index>(i)).transpose();
    exclude.push_back(i);
  }
  for (const auto& t : negative) {
    const std::size_t i = index(t);
    target -= unit_.row(static_cast<Eigen::Index>(i)).transpose();
    exclude.push_back(i);
  }
  std::sort(exclude.begin(), exclude.end());
  exclude.erase(std::unique(exclude.begin(), exclude.end()), exclude.end());
  return nearest(target, k, exclude);
}

std::string VectorIndex::odd_one_out(const std::vector<std::string>& tokens) const {
  std::vector<std::size_t> ids;
  for (const auto& t : tokens) ids.push_back(index(t));
  if (ids.size() < 3) throw TooFewTokens("odd-one-out needs at least 3 tokens, got " + std::to_string(ids.size()));
  Vector<double> mean = Vector<double>::Zero(unit_.cols());
  for (std::size_t i : ids) mean += unit_.row(static_cast<Eigen::Index>(i)).transpose();
  mean /= static_cast<double>(ids.size());
  const double mnorm = mean.norm();
  std::size_t best = 0;
  double best_sim = 0;
  for (std::size_t n = 0; n < ids.size(); ++n) {
    double s = unit_.row(static_cast<Eigen::Index>(ids[n])).dot(mean);
    if (mnorm > 0) s /= mnorm;
    if (n == 0 || s < best_sim || (s == best_sim && tokens_[ids[n]] < tokens_[ids[best]])) {
      best = n;
      best_sim = s;
    }
  }
  return tokens_[ids[best]];
}

namespace {

struct ScoredPair {
  double sim;
  std::size_t i, j;
};

}  // namespace

ExtremePairs VectorIndex::extreme_pairs(std::size_t k, std::uint64_t min_count, int jobs) const {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < size(); ++i)
    if (counts_[i] >= min_count) keep.push_back(i);
  // Order among equal similarities follows the token strings, so results do
  // not depend on how rows were split across workers.
  auto tok_less = [&](const ScoredPair& a, const ScoredPair& b) {
    if (tokens_[a.i] != tokens_[b.i]) return tokens_[a.i] < tokens_[b.i];
    return tokens_[a.j] < tokens_[b.j];
  };
  auto hi_first = [&](const ScoredPair& a, const ScoredPair& b) { return a.sim != b.sim ? a.sim > b.sim : tok_less(a, b); };
  auto lo_first = [&](const ScoredPair& a, const ScoredPair& b) { return a.sim != b.sim ? a.sim < b.sim : tok_less(a, b); };

  RowMatrix<double> sub(static_cast<Eigen::Index>(keep.size()), unit_.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = unit_.row(static_cast<Eigen::Index>(keep[r]));

  const int workers = std::max(1, jobs);
  std::vector<std::vector<ScoredPair>> hi(static_cast<std::size_t>(workers)), lo(static_cast<std::size_t>(workers));
  auto scan = [&](int w) {
    // Heaps whose top is the current worst kept pair.
    std::priority_queue<ScoredPair, std::vector<ScoredPair>, decltype(hi_first)> top(hi_first);
    std::priority_queue<ScoredPair, std::vector<ScoredPair>, decltype(lo_first)> bottom(lo_first);
    const Eigen::Index n = sub.rows(), block = 128;
    for (Eigen::Index r0 = static_cast<Eigen::Index>(w) * block; r0 < n; r0 += block * workers) {
      const Eigen::Index rows = std::min(block, n - r0);
      const Matrix<double> g = sub.middleRows(r0, rows) * sub.bottomRows(n - r0).transpose();
      for (Eigen::Index a = 0; a < rows; ++a)
        for (Eigen::Index b = a + 1; b < n - r0; ++b) {
          std::size_t i = keep[static_cast<std::size_t>(r0 + a)], j = keep[static_cast<std::size_t>(r0 + b)];
          if (tokens_[j] < tokens_[i]) std::swap(i, j);
          const ScoredPair p{g(a, b), i, j};
          if (top.size() < k) top.push(p);
          else if (k && hi_first(p, top.top())) top.pop(), top.push(p);
          if (bottom.size() < k) bottom.push(p);
          else if (k && lo_first(p, bottom.top())) bottom.pop(), bottom.push(p);
        }
    }
    for (; !top.empty(); top.pop()) hi[static_cast<std::size_t>(w)].push_back(top.top());
    for (; !bottom.empty(); bottom.pop()) lo[static_cast<std::size_t>(w)].push_back(bottom.top());
  };
  if (workers == 1) {
    scan(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(scan, w);
  }

  auto merge = [&](std::vector<std::vector<ScoredPair>>& parts, auto cmp) {
    std::vector<ScoredPair> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    std::sort(all.begin(), all.end(), cmp);
    if (all.size() > k) all.resize(k);
    std::vector<TokenPair> out;
    for (const auto& p : all) out.push_back({tokens_[p.i], tokens_[p.j], p.sim});
    return out;
  };
  return {merge(hi, hi_first), merge(lo, lo_first)};
}

std::vector<DestStatsRow> VectorIndex::destination_stats(const std::vector<int>& thresholds,
                                                         const DestStatsOptions& options) const {
  std::vector<std::optional<Token>> parsed(size());
  std::size_t moves = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    auto t = try_parse_token(tokens_[i]);
    if (t && t->kind == TokenKind::Move) {
      parsed[i] = *t;
      ++moves;
    }
  }
  if (size() == 0 || moves * 2 < size())
    throw NonMoveVocabulary(std::to_string(size() - moves) + " of " + std::to_string(size()) +
                            " tokens are not move tokens");

  std::vector<std::size_t> scored;  // vocabulary order = descending frequency
  for (std::size_t i = 0; i < size() && (options.limit == 0 || scored.size() < options.limit); ++i)
    if (parsed[i]) scored.push_back(i);

  auto qualifies = [&](const Token& a, const Token& b) {
    if (a.piece != b.piece) return false;
    if (options.criterion == NeighborCriterion::SamePieceKindColor) return true;
    return a.to == b.to && a.from != b.from;
  };

  std::vector<int> hits(scored.size());
  const std::size_t k = static_cast<std::size_t>(std::max(0, options.k));
  const Eigen::Index block = 256;
  for (std::size_t s0 = 0; s0 < scored.size(); s0 += block) {
    const std::size_t rows = std::min<std::size_t>(block, scored.size() - s0);
    RowMatrix<double> q(static_cast<Eigen::Index>(rows), unit_.cols());
    for (std::size_t r = 0; r < rows; ++r) q.row(static_cast<Eigen::Index>(r)) = unit_.row(static_cast<Eigen::Index>(scored[s0 + r]));
    const Matrix<double> sims = unit_ * q.transpose();
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t self = scored[s0 + r];
      int h = 0;
      for (std::size_t nb : top_indices(sims.col(static_cast<Eigen::Index>(r)), k, {self}))
        if (parsed[nb] && qualifies(*parsed[self], *parsed[nb])) ++h;
      hits[s0 + r] = h;
    }
  }

  std::vector<DestStatsRow> rows;
  for (int n : thresholds) {
    DestStatsRow row;
    row.n = n;
    row.count = static_cast<std::size_t>(std::count_if(hits.begin(), hits.end(), [n](int h) { return h >= n; }));
    row.percent = scored.empty() ? 0.0 : 100.0 * static_cast<double>(row.count) / static_cast<double>(scored.size());
    rows.push_back(row);
  }
  return rows;
}

}  // namespace chessvec
