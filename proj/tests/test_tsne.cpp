#include <doctest.h>

#include <random>

#include "chessvec/tsne.hpp"

using namespace chessvec;

namespace {

// Three Gaussian blobs in 10-D.
RowMatrix<double> blobs(int per, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  RowMatrix<double> x(3 * per, 10);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < per; ++i)
      for (int d = 0; d < 10; ++d) x(c * per + i, d) = nd(rng) + (d == c ? 8.0 : 0.0);
  return x;
}

}  // namespace

TEST_CASE("bandwidth search hits the target perplexity") {
  const auto x = blobs(30, 1);
  for (double perp : {5.0, 10.0, 25.0}) {
    std::vector<double> got;
    const auto p = conditional_affinities(x, perp, &got);
    for (double g : got) CHECK(std::abs(g - perp) < 1e-3);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      CHECK(p.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(p(i, i) == 0.0);
    }
  }
}

TEST_CASE("joint affinities are symmetric and normalized") {
  const auto p = joint_affinities(blobs(20, 2), 8.0);
  CHECK(std::abs(p.sum() - 1.0) < 1e-9);
  CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("perplexity constraint") {
  RowMatrix<double> x = RowMatrix<double>::Random(10, 3);
  TsneConfig c;
  c.perplexity = 4;  // 12 > 9
  CHECK_THROWS_AS(tsne(x, c), PerplexityTooLarge);
  c.perplexity = 3;
  c.iterations = 300;
  CHECK_NOTHROW(tsne(x, c));
  RowMatrix<double> three = RowMatrix<double>::Random(3, 3);
  c.perplexity = 0.5;
  CHECK_THROWS_AS(tsne(three, c), std::invalid_argument);
}

TEST_CASE("two identical pairs stay paired") {
  RowMatrix<double> x(4, 3);
  x << 1, 0, 0,  //
      1, 0, 0,   //
      0, 0, 1,   //
      0, 0, 1;
  TsneConfig c;
  c.perplexity = 1;
  c.iterations = 500;
  c.seed = 3;
  const auto r = tsne(x, c);
  const auto& y = r.embedding;
  const double same = std::max((y.row(0) - y.row(1)).norm(), (y.row(2) - y.row(3)).norm());
  double across = 1e300;
  for (int i : {0, 1})
    for (int j : {2, 3}) across = std::min(across, (y.row(i) - y.row(j)).norm());
  CHECK(same < across);
}

TEST_CASE("t-SNE run: centred, deterministic, KL decreases") {
  const auto x = blobs(25, 4);
  TsneConfig c;
  c.perplexity = 10;
  c.iterations = 400;
  c.seed = 9;
  const auto a = tsne(x, c);
  const auto b = tsne(x, c);
  CHECK(a.embedding == b.embedding);
  CHECK(a.embedding.allFinite());
  CHECK(a.embedding.colwise().mean().cwiseAbs().maxCoeff() < 1e-9);
  CHECK(a.kl_final < a.kl_after_exaggeration);
  REQUIRE(!a.kl_trace.empty());
  CHECK(a.kl_trace.back().first == 400);

  c.jobs = 3;
  CHECK(tsne(x, c).embedding == a.embedding);

  c.jobs = 1;
  c.seed = 10;
  CHECK(tsne(x, c).embedding != a.embedding);

  c.init = TsneInit::Pca;
  const auto p1 = tsne(x, c);
  c.seed = 11;  // PCA start ignores the seed
  CHECK(tsne(x, c).embedding == p1.embedding);
  CHECK(p1.kl_final < p1.kl_after_exaggeration);

  // clusters separate: every point's nearest neighbour is in its own blob
  int right = 0;
  for (Eigen::Index i = 0; i < 75; ++i) {
    Eigen::Index best = -1;
    double bd = 1e300;
    for (Eigen::Index j = 0; j < 75; ++j)
      if (j != i && (a.embedding.row(i) - a.embedding.row(j)).squaredNorm() < bd)
        bd = (a.embedding.row(i) - a.embedding.row(j)).squaredNorm(), best = j;
    right += best / 25 == i / 25;
  }
  CHECK(right == 75);
}

TEST_CASE("float instantiation") {
  RowMatrix<float> x = blobs(10, 5).cast<float>();
  TsneConfig c;
  c.perplexity = 5;
  c.iterations = 300;
  const auto r = tsne(x, c);
  CHECK(r.embedding.rows() == 30);
  CHECK(r.embedding.allFinite());
  for (double g : r.perplexities) CHECK(std::abs(g - 5.0) < 1e-3);
}
