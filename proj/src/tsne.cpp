#include "chessvec/tsne.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace chessvec {

void TsneConfig::validate(std::size_t n) const {
  if (n < 4) throw std::invalid_argument("t-SNE needs at least 4 points, got " + std::to_string(n));
  if (!(perplexity > 0)) throw std::invalid_argument("perplexity must be positive");
  if (static_cast<double>(n - 1) < 3 * perplexity)
    throw PerplexityTooLarge("perplexity " + std::to_string(perplexity) + " too large for " + std::to_string(n) +
                             " points (need 3 * perplexity <= n - 1)");
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (exaggeration_iters < 0 || exaggeration_iters >= iterations)
    throw std::invalid_argument("exaggeration phase must end before the last iteration");
  if (learning_rate && !(*learning_rate > 0)) throw std::invalid_argument("learning rate must be positive");
}

namespace {

// Runs fn(first, last) over [0, n) split into `jobs` contiguous chunks.
template <typename Fn>
void parallel_rows(Eigen::Index n, int jobs, Fn&& fn) {
  if (jobs <= 1 || n < 256) {
    fn(Eigen::Index{0}, n);
    return;
  }
  std::vector<std::jthread> pool;
  for (int w = 0; w < jobs; ++w) {
    const Eigen::Index a = n * w / jobs, b = n * (w + 1) / jobs;
    pool.emplace_back([&fn, a, b] { fn(a, b); });
  }
}

template <typename Scalar>
Matrix<double> squared_distances(const RowMatrix<Scalar>& x) {
  const RowMatrix<double> xd = x.template cast<double>();
  const Vector<double> sq = xd.rowwise().squaredNorm();
  Matrix<double> d = -2.0 * (xd * xd.transpose());
  d.colwise() += sq;
  d.rowwise() += sq.transpose();
  d = d.cwiseMax(0.0);
  d.diagonal().setZero();
  return d;
}

}  // namespace

template <typename Scalar>
Matrix<Scalar> conditional_affinities(const RowMatrix<Scalar>& x, double perplexity, std::vector<double>* perplexities) {
  const Eigen::Index n = x.rows();
  const Matrix<double> d = squared_distances(x);
  Matrix<Scalar> p = Matrix<Scalar>::Zero(n, n);
  if (perplexities) perplexities->assign(static_cast<std::size_t>(n), 0.0);
  const double target = std::log(perplexity);
  std::vector<double> row(static_cast<std::size_t>(n));

  for (Eigen::Index i = 0; i < n; ++i) {
    // Shifting by the nearest distance leaves p_{j|i} unchanged and keeps
    // exp() away from underflow.
    double dmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) dmin = std::min(dmin, d(j, i));
    double beta = 1.0, lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    double entropy = 0, sum = 0;
    for (int step = 0; step < 50; ++step) {
      sum = 0;
      double weighted = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double dij = d(j, i) - dmin;
        const double v = j == i ? 0.0 : std::exp(-beta * dij);
        row[static_cast<std::size_t>(j)] = v;
        sum += v;
        weighted += v * dij;
      }
      entropy = std::log(sum) + beta * weighted / sum;
      const double diff = entropy - target;
      if (std::abs(diff) < 1e-5) break;
      if (diff > 0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2 : (beta + hi) / 2;
      } else {
        hi = beta;
        beta = std::isinf(lo) ? beta / 2 : (beta + lo) / 2;
      }
    }
    for (Eigen::Index j = 0; j < n; ++j) p(i, j) = static_cast<Scalar>(row[static_cast<std::size_t>(j)] / sum);
    if (perplexities) (*perplexities)[static_cast<std::size_t>(i)] = std::exp(entropy);
  }
  return p;
}

template <typename Scalar>
Matrix<Scalar> joint_affinities(const RowMatrix<Scalar>& x, double perplexity, std::vector<double>* perplexities) {
  Matrix<Scalar> c = conditional_affinities(x, perplexity, perplexities);
  const Scalar scale = Scalar(1) / (Scalar(2) * static_cast<Scalar>(x.rows()));
  Matrix<Scalar> p = (c + c.transpose()) * scale;
  return p;
}

template <typename Scalar>
double tsne_kl(const Matrix<Scalar>& p, const RowMatrix<Scalar>& y) {
  const Eigen::Index n = y.rows();
  double z = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) z += 1.0 / (1.0 + static_cast<double>((y.row(i) - y.row(j)).squaredNorm()));
  double kl = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double pij = static_cast<double>(p(i, j));
      if (i == j || pij <= 0) continue;
      const double q = 1.0 / (1.0 + static_cast<double>((y.row(i) - y.row(j)).squaredNorm())) / z;
      kl += pij * std::log(pij / std::max(q, 1e-300));
    }
  return kl;
}

template <typename Scalar>
TsneResult<Scalar> tsne(const RowMatrix<Scalar>& x, const TsneConfig& config) {
  const Eigen::Index n = x.rows();
  config.validate(static_cast<std::size_t>(n));
  TsneResult<Scalar> result;
  const Matrix<Scalar> p = joint_affinities(x, config.perplexity, &result.perplexities);
  // The floor of 50 only matters for small inputs, where it can exceed the
  // step size the exaggerated attraction tolerates (4 * exaggeration * p_ij
  // per unit of learning rate); lower it there.
  const double stable = 1.0 / (4.0 * config.exaggeration * static_cast<double>(p.maxCoeff()));
  const double lr = config.learning_rate.value_or(std::max(static_cast<double>(n) / 12.0, std::min(50.0, stable)));

  RowMatrix<double> y(n, 2);
  std::mt19937_64 rng(config.seed);
  if (config.init == TsneInit::Pca) {
    RowMatrix<double> xc = x.template cast<double>();
    xc.rowwise() -= xc.colwise().mean();
    Eigen::SelfAdjointEigenSolver<Matrix<double>> eig(xc.transpose() * xc);
    const Eigen::Index d = xc.cols();
    Matrix<double> basis(d, 2);
    basis.col(0) = eig.eigenvectors().col(d - 1);
    basis.col(1) = d > 1 ? Vector<double>(eig.eigenvectors().col(d - 2)) : Vector<double>::Zero(d);
    // Eigenvector signs are arbitrary; fix them so the result is reproducible.
    for (int c = 0; c < 2; ++c) {
      Eigen::Index arg;
      basis.col(c).cwiseAbs().maxCoeff(&arg);
      if (basis(arg, c) < 0) basis.col(c) *= -1;
    }
    y = xc * basis;
    double sd = std::sqrt(y.col(0).squaredNorm() / static_cast<double>(n));
    if (sd > 0) y *= 1e-4 / sd;
  } else {
    std::normal_distribution<double> nd(0.0, 1e-4);
    for (Eigen::Index i = 0; i < n; ++i) y(i, 0) = nd(rng), y(i, 1) = nd(rng);
  }
  y.rowwise() -= y.colwise().mean();

  RowMatrix<double> update = RowMatrix<double>::Zero(n, 2), gains = RowMatrix<double>::Ones(n, 2);
  RowMatrix<double> grad(n, 2);
  std::vector<double> zrow(static_cast<std::size_t>(n));
  const Matrix<double> pd = p.template cast<double>();

  auto kl_now = [&] {
    const RowMatrix<Scalar> ys = y.template cast<Scalar>();
    return tsne_kl(p, ys);
  };

  for (int it = 0; it < config.iterations; ++it) {
    const bool exaggerating = it < config.exaggeration_iters;
    const double exag = exaggerating ? config.exaggeration : 1.0;
    const double momentum = exaggerating ? config.momentum : config.final_momentum;

    // Partition function, accumulated per row so the total does not depend
    // on the number of workers.
    parallel_rows(n, config.jobs, [&](Eigen::Index a, Eigen::Index b) {
      for (Eigen::Index i = a; i < b; ++i) {
        double s = 0;
        const double yi0 = y(i, 0), yi1 = y(i, 1);
        for (Eigen::Index j = 0; j < n; ++j) {
          if (j == i) continue;
          const double d0 = yi0 - y(j, 0), d1 = yi1 - y(j, 1);
          s += 1.0 / (1.0 + d0 * d0 + d1 * d1);
        }
        zrow[static_cast<std::size_t>(i)] = s;
      }
    });
    double z = 0;
    for (double s : zrow) z += s;

    parallel_rows(n, config.jobs, [&](Eigen::Index a, Eigen::Index b) {
      for (Eigen::Index i = a; i < b; ++i) {
        double g0 = 0, g1 = 0;
        const double yi0 = y(i, 0), yi1 = y(i, 1);
        for (Eigen::Index j = 0; j < n; ++j) {
          if (j == i) continue;
          const double d0 = yi0 - y(j, 0), d1 = yi1 - y(j, 1);
          const double num = 1.0 / (1.0 + d0 * d0 + d1 * d1);
          const double m = (exag * pd(i, j) - num / z) * num;
          g0 += m * d0;
          g1 += m * d1;
        }
        grad(i, 0) = 4 * g0;
        grad(i, 1) = 4 * g1;
      }
    });
    if (!grad.allFinite()) throw NonFiniteGradient("non-finite t-SNE gradient at iteration " + std::to_string(it));

    for (Eigen::Index i = 0; i < n; ++i)
      for (int c = 0; c < 2; ++c) {
        double& g = gains(i, c);
        g = (grad(i, c) > 0) != (update(i, c) > 0) ? g + 0.2 : g * 0.8;
        g = std::max(g, 0.01);
        update(i, c) = momentum * update(i, c) - lr * g * grad(i, c);
      }
    y += update;
    y.rowwise() -= y.colwise().mean();

    const int done = it + 1;
    const bool end_of_exaggeration = done == config.exaggeration_iters;
    if (done % std::max(1, config.kl_every) == 0 || end_of_exaggeration || done == config.iterations) {
      const double kl = kl_now();
      result.kl_trace.emplace_back(done, kl);
      if (end_of_exaggeration) result.kl_after_exaggeration = kl;
      if (done == config.iterations) result.kl_final = kl;
    }
  }
  if (config.exaggeration_iters == 0) result.kl_after_exaggeration = result.kl_trace.front().second;
  result.embedding = y.template cast<Scalar>();
  return result;
}

template Matrix<float> conditional_affinities(const RowMatrix<float>&, double, std::vector<double>*);
template Matrix<double> conditional_affinities(const RowMatrix<double>&, double, std::vector<double>*);
template Matrix<float> joint_affinities(const RowMatrix<float>&, double, std::vector<double>*);
template Matrix<double> joint_affinities(const RowMatrix<double>&, double, std::vector<double>*);
template double tsne_kl(const Matrix<float>&, const RowMatrix<float>&);
template double tsne_kl(const Matrix<double>&, const RowMatrix<double>&);
template TsneResult<float> tsne(const RowMatrix<float>&, const TsneConfig&);
template TsneResult<double> tsne(const RowMatrix<double>&, const TsneConfig&);

}  // namespace chessvec
