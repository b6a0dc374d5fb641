#ifndef INVGP_FIT_HPP
#define INVGP_FIT_HPP

#include "invgp/gp.hpp"

namespace invgp {

// Parameterized kernel family: build() receives raw (positive) parameters.
struct KernelTemplate {
  int n_params = 0;
  std::function<Kernel(const Vec&)> build;
  std::vector<std::string> param_names;
  std::string label;
};

struct MLConfig {
  int restarts = 10;
  int max_evals = 400;  // objective evaluations per restart
  double ftol = 1e-7;
  std::uint64_t seed = 0;
  bool fit_noise = true;
  // Raw-scale bounds per optimized parameter (kernel params, then noise when
  // fit_noise).  Empty vectors mean [1e-4, 1e4] everywhere.
  Vec lower;
  Vec upper;
  // Optional raw-scale center used for the first restart.
  Vec init_center;
  double fixed_noise = 0.0;  // used when !fit_noise
};

struct RestartDiagnostics {
  int index = 0;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  int evals = 0;
  bool ok = false;
  std::string error;
};

struct FitResult {
  GPPrior prior;
  Vec params;  // raw kernel parameters of the winning restart
  double noise_var = 0.0;
  double log_likelihood = 0.0;
  int best_restart = -1;
  std::vector<RestartDiagnostics> restarts;
};

// Maximum-likelihood fit over log-parameters with a Nelder-Mead simplex and
// Latin-hypercube restarts.  Deterministic for a fixed config seed; ties
// between restarts break by index.  Throws if every restart fails.
FitResult fit_ml(const KernelTemplate& tmpl, const MeanFunction& mean,
                 const Dataset& data, const MLConfig& cfg);

// Generic Nelder-Mead minimizer (adaptive coefficients), exposed for tests.
struct SimplexResult {
  Vec x;
  double value = 0.0;
  int evals = 0;
};
SimplexResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0,
                          double step, int max_evals, double ftol);

}  // namespace invgp

#endif
