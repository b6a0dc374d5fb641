#ifndef INVGP_GP_HPP
#define INVGP_GP_HPP

#include "invgp/invariance.hpp"
#include "invgp/kernels.hpp"
#include "invgp/operators.hpp"

namespace invgp {

using MeanFunction = std::function<double(const Vec&)>;

struct GPPrior {
  MeanFunction mean;  // nullptr means zero mean
  Kernel kernel;
  double noise_var = 0.0;

  double mean_at(const Vec& x) const { return mean ? mean(x) : 0.0; }
  Vec mean_at(const Mat& X) const;
};

struct Dataset {
  Mat X;
  Vec y;

  int size() const { return static_cast<int>(y.size()); }
};

// Conditional distribution of the prior given the data (Gaussian, with the
// usual kriging mean and conditional kernel).  Immutable and shareable.
class Posterior {
 public:
  Posterior(GPPrior prior, Dataset data);

  double mean(const Vec& x) const;
  Vec mean(const Mat& X) const;
  double cov(const Vec& x, const Vec& y) const;
  double var(const Vec& x) const { return cov(x, x); }
  double sd(const Vec& x) const;
  Mat cov(const Mat& X) const;

  const GPPrior& prior() const { return prior_; }
  const Dataset& data() const { return data_; }
  double jitter_used() const { return jitter_used_; }

 private:
  GPPrior prior_;
  Dataset data_;
  Eigen::LLT<Mat> llt_;
  Vec alpha_;  // (K + tau^2 I)^{-1} (y - mu(X))
  double jitter_used_ = 0.0;
};

// Cholesky factorization of A + jitter*I with the escalation policy
// jitter in {0, 1e-12 .. 1e-6} * mean(diag A); throws past the last rung.
Eigen::LLT<Mat> jittered_llt(const Mat& A, double* jitter_used = nullptr);

// Symmetric PSD square root used by the samplers: plain Cholesky when it
// succeeds, spectral square root with eigenvalue clipping otherwise (keeps
// draws of rank-deficient kernels exactly inside the kernel's range, which
// the pathwise invariance properties require).
Mat psd_sqrt(const Mat& K);

// Draws from N(mu(grid), K_grid).  Row p is path p; deterministic per seed
// and independent of scheduling (per-path substreams).
Mat sample_paths(const GPPrior& prior, const Mat& grid, int n_paths, std::uint64_t seed);

// Draws from the posterior law on the grid.
Mat conditional_simulate(const Posterior& post, const Mat& grid, int n_paths,
                         std::uint64_t seed);

double log_marginal_likelihood(const GPPrior& prior, const Dataset& data);

struct PathInvarianceReport {
  double max_violation = 0.0;  // sup over paths and grid points
  bool passed = false;
};

// Checks sup_x |T(path)(x) - path(x)| over sampled paths, with paths known
// only on `grid`.  The operator is applied through grid lookups, so symbol
// images (and centering nodes) must land on grid points; use orbit_closure
// to build a suitable grid.
PathInvarianceReport path_invariance_test(const Kernel& k, const PathOperator& T,
                                          const Mat& grid, int n_paths, double tol,
                                          std::uint64_t seed = 99);

}  // namespace invgp

#endif
