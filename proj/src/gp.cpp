#include "invgp/gp.hpp"

#include <cmath>
#include <numbers>

namespace invgp {

Vec GPPrior::mean_at(const Mat& X) const {
  Vec m(X.rows());
  for (int i = 0; i < X.rows(); ++i) m[i] = mean_at(Vec(X.row(i).transpose()));
  return m;
}

Eigen::LLT<Mat> jittered_llt(const Mat& A, double* jitter_used) {
  double base = A.diagonal().mean();
  double jitter = 0.0;
  for (int attempt = 0; attempt <= 7; ++attempt) {
    Mat B = A;
    if (jitter > 0.0) B.diagonal().array() += jitter;
    Eigen::LLT<Mat> llt(B);
    if (llt.info() == Eigen::Success) {
      if (jitter_used != nullptr) *jitter_used = jitter;
      return llt;
    }
    jitter = (attempt == 0) ? 1e-12 * base : jitter * 10.0;
    if (base <= 0.0) break;
  }
  throw std::runtime_error("jittered_llt: factorization failed after jitter escalation");
}

Mat psd_sqrt(const Mat& K) {
  if (K.rows() == 0) return K;
  if (K.norm() == 0.0) return Mat::Zero(K.rows(), K.cols());
  Eigen::LLT<Mat> llt(K);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Mat> es(K);
  Vec lam = es.eigenvalues();
  double lmax = std::max(lam.maxCoeff(), 0.0);
  if (lam.minCoeff() < -1e-8 * std::max(lmax, 1e-300)) {
    throw std::runtime_error("psd_sqrt: matrix is not PSD (lambda_min = " +
                             std::to_string(lam.minCoeff()) + ")");
  }
  Vec s = lam.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal();
}

Posterior::Posterior(GPPrior prior, Dataset data)
    : prior_(std::move(prior)), data_(std::move(data)) {
  if (data_.X.rows() != data_.y.size()) {
    throw std::invalid_argument("Posterior: X/y size mismatch");
  }
  Mat K = gram(prior_.kernel, data_.X).K;
  K.diagonal().array() += prior_.noise_var;
  llt_ = jittered_llt(K, &jitter_used_);
  Vec r = data_.y - prior_.mean_at(data_.X);
  alpha_ = llt_.solve(r);
}

double Posterior::mean(const Vec& x) const {
  Mat xr(1, x.size());
  xr.row(0) = x.transpose();
  Vec kx = prior_.kernel.cross(xr, data_.X).row(0).transpose();
  return prior_.mean_at(x) + kx.dot(alpha_);
}

Vec Posterior::mean(const Mat& X) const {
  return prior_.mean_at(X) + prior_.kernel.cross(X, data_.X) * alpha_;
}

double Posterior::cov(const Vec& x, const Vec& y) const {
  Mat xr(1, x.size()), yr(1, y.size());
  xr.row(0) = x.transpose();
  yr.row(0) = y.transpose();
  Vec kx = prior_.kernel.cross(xr, data_.X).row(0).transpose();
  Vec ky = prior_.kernel.cross(yr, data_.X).row(0).transpose();
  return prior_.kernel(x, y) - kx.dot(llt_.solve(ky));
}

double Posterior::sd(const Vec& x) const { return std::sqrt(std::max(var(x), 0.0)); }

Mat Posterior::cov(const Mat& X) const {
  Mat Kxx = gram(prior_.kernel, X).K;
  Mat Kxd = prior_.kernel.cross(X, data_.X);
  Mat C = Kxx - Kxd * llt_.solve(Kxd.transpose());
  for (int i = 0; i < C.rows(); ++i) {
    for (int j = i + 1; j < C.cols(); ++j) C(j, i) = C(i, j);
  }
  return C;
}

namespace {

Mat draw_paths(const Vec& mean, const Mat& L, int n_paths, std::uint64_t seed) {
  int n = static_cast<int>(mean.size());
  Mat paths(n_paths, n);
  for (int p = 0; p < n_paths; ++p) {
    auto rng = substream(seed, static_cast<std::uint64_t>(p));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec z(L.cols());
    for (int i = 0; i < z.size(); ++i) z[i] = gauss(rng);
    paths.row(p) = (mean + L * z).transpose();
  }
  return paths;
}

}  // namespace

Mat sample_paths(const GPPrior& prior, const Mat& grid, int n_paths, std::uint64_t seed) {
  if (grid.rows() == 0) throw std::invalid_argument("sample_paths: empty grid");
  Mat K = gram(prior.kernel, grid).K;
  Mat L = psd_sqrt(K);
  return draw_paths(prior.mean_at(grid), L, n_paths, seed);
}

Mat conditional_simulate(const Posterior& post, const Mat& grid, int n_paths,
                         std::uint64_t seed) {
  if (grid.rows() == 0) throw std::invalid_argument("conditional_simulate: empty grid");
  Mat C = post.cov(grid);
  Mat L = psd_sqrt(C);
  return draw_paths(post.mean(grid), L, n_paths, seed);
}

double log_marginal_likelihood(const GPPrior& prior, const Dataset& data) {
  Mat K = gram(prior.kernel, data.X).K;
  K.diagonal().array() += prior.noise_var;
  Eigen::LLT<Mat> llt = jittered_llt(K);
  Vec r = data.y - prior.mean_at(data.X);
  Vec alpha = llt.solve(r);
  double logdet = 2.0 * Mat(llt.matrixL()).diagonal().array().log().sum();
  int n = data.size();
  return -0.5 * r.dot(alpha) - 0.5 * logdet - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

PathInvarianceReport path_invariance_test(const Kernel& k, const PathOperator& T,
                                          const Mat& grid, int n_paths, double tol,
                                          std::uint64_t seed) {
  GPPrior prior{nullptr, k, 0.0};
  Mat paths = sample_paths(prior, grid, n_paths, seed);

  auto grid_index = [&](const Vec& x) {
    for (int i = 0; i < grid.rows(); ++i) {
      if ((grid.row(i).transpose() - x).cwiseAbs().maxCoeff() <= 1e-9) return i;
    }
    throw std::runtime_error(
        "path_invariance_test: operator image leaves the grid; build the grid "
        "with orbit_closure over the operator's symbols");
  };

  PathInvarianceReport rep;
  for (int p = 0; p < paths.rows(); ++p) {
    const Vec path = paths.row(p).transpose();
    auto f = [&](const Vec& x) { return path[grid_index(x)]; };
    for (int i = 0; i < grid.rows(); ++i) {
      Vec x = grid.row(i).transpose();
      double v = std::abs(T.apply(f, x) - path[i]);
      rep.max_violation = std::max(rep.max_violation, v);
    }
  }
  rep.passed = rep.max_violation <= tol;
  return rep;
}

}  // namespace invgp
