#ifndef INVGP_EXPERIMENTS_HPP
#define INVGP_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "invgp/anova.hpp"
#include "invgp/fit.hpp"
#include "invgp/gp.hpp"

namespace invgp {

// Every runner takes a JSON config (missing keys fall back to the documented
// defaults), an output directory ("" suppresses file output), and a seed.
// Runners never throw on a failed assertion; failures are collected so a
// single run reports everything that went wrong.

struct ZeroMeanResult {
  double integral_f = 0.0;      // trapezoid integral of the target over [-pi,pi]
  double rise_se = 0.0;         // plain squared-exponential predictor
  double rise_inv = 0.0;        // argumentwise centred predictor
  double ratio = 0.0;           // rise_se / rise_inv
  double integral_m_inv = 0.0;  // quadrature integral of the centred posterior mean
  bool passed = false;
  std::vector<std::string> failures;
};
ZeroMeanResult run_zero_mean(const nlohmann::json& config, const std::string& out_dir,
                             std::uint64_t seed);

struct OdeResult {
  double prior_mean_max_err = 0.0;  // |prior mean - 2t| on the grid
  double max_sd_one_obs = 0.0;
  double max_sd_two_obs = 0.0;
  bool passed = false;
  std::vector<std::string> failures;
};
OdeResult run_ode(const nlohmann::json& config, const std::string& out_dir,
                  std::uint64_t seed);

struct HarmonicResult {
  double interior_max_err = 0.0;
  double boundary_max_err = 0.0;
  double max_fd_residual_f = 0.0;  // Laplacian of the target
  double max_fd_residual_m = 0.0;  // Laplacian of the posterior mean
  bool passed = false;
  std::vector<std::string> failures;
};
HarmonicResult run_harmonic(const nlohmann::json& config, const std::string& out_dir,
                            std::uint64_t seed);

struct GFunctionKernelStats {
  std::string kernel;
  std::vector<double> q2, rmse, log_likelihood;  // one entry per replication
  double q2_mean = 0.0, q2_sd = 0.0;
  double rmse_mean = 0.0;
  double ll_mean = 0.0;
  int failed_fits = 0;
};

struct GFunctionResult {
  std::vector<IndexSet> subsets;  // interaction set used by k_spa
  std::vector<GFunctionKernelStats> kernels;  // order: add, spa, anova, gauss
  bool passed = false;
  std::vector<std::string> failures;
};
GFunctionResult run_gfunction(const nlohmann::json& config, const std::string& out_dir,
                              std::uint64_t seed);

struct GalleryEntry {
  std::string kernel;
  std::string op;
  bool expected = false;  // should the pair be invariant?
  bool arg_passed = false;
  bool path_passed = false;
  double arg_violation = 0.0;
  double path_violation = 0.0;
};

struct GalleryResult {
  std::vector<GalleryEntry> entries;
  double circle_constancy = 0.0;  // max deviation of a radial-kernel path on a circle
  bool passed = false;
  std::vector<std::string> failures;
};
GalleryResult run_invariance_gallery(const nlohmann::json& config,
                                     const std::string& out_dir, std::uint64_t seed);

struct ExperimentOutcome {
  nlohmann::json metrics;
  bool passed = false;
  std::vector<std::string> failures;
};

// Dispatch on id in {zero-mean, ode, harmonic, gfunction, invariance-gallery};
// writes a manifest next to the outputs when out_dir is nonempty.
ExperimentOutcome run_experiment(const std::string& id, const nlohmann::json& config,
                                 const std::string& out_dir, std::uint64_t seed);

// Target of the zero-mean study: cos x + cos 2x + cos 3x + sin(x/2).
double zero_mean_target(double x);

// Target of the harmonic study: cos(1 - x1) exp(x2).
double harmonic_target(const Vec& x);

}  // namespace invgp

#endif
