#include <doctest.h>

#include <cmath>

#include "invgp/fit.hpp"

using namespace invgp;

namespace {

Dataset se_dataset(double sigma2, double theta, int n, std::uint64_t seed) {
  Kernel k = make_se_kernel_1d(sigma2, theta, -1.0, 1.0);
  Mat X = uniform_points(k.domain(), n, seed);
  Mat paths = sample_paths({nullptr, k, 0.0}, X, 1, seed + 1);
  return {X, paths.row(0).transpose()};
}

KernelTemplate se_template() {
  KernelTemplate tmpl;
  tmpl.n_params = 2;
  tmpl.param_names = {"sigma2", "theta"};
  tmpl.label = "se_1d";
  tmpl.build = [](const Vec& p) { return make_se_kernel_1d(p[0], p[1], -1.0, 1.0); };
  return tmpl;
}

}  // namespace

TEST_CASE("nelder_mead minimizes a shifted quadratic") {
  Vec c(4);
  c << 1.0, -2.0, 0.5, 3.0;
  auto f = [&](const Vec& x) { return (x - c).squaredNorm(); };
  SimplexResult r = nelder_mead(f, Vec::Zero(4), 0.5, 2000, 1e-12);
  CHECK((r.x - c).cwiseAbs().maxCoeff() < 1e-3);
  CHECK(r.value < 1e-6);
  CHECK(r.evals <= 2000);
}

TEST_CASE("fit_ml recovers reasonable hyperparameters") {
  Dataset data = se_dataset(1.0, 0.4, 40, 51);
  MLConfig cfg;
  cfg.restarts = 4;
  cfg.max_evals = 300;
  cfg.seed = 3;
  cfg.fit_noise = false;
  cfg.fixed_noise = 1e-8;

  FitResult fit = fit_ml(se_template(), nullptr, data, cfg);
  CHECK(fit.params.size() == 2);
  CHECK(fit.best_restart >= 0);
  // The lengthscale is identifiable from 40 noiseless points.
  CHECK(fit.params[1] > 0.15);
  CHECK(fit.params[1] < 1.2);

  // No restart ends worse than it started.
  for (const auto& d : fit.restarts) {
    if (d.ok) CHECK(d.final_objective <= d.initial_objective + 1e-9);
  }
}

TEST_CASE("fit_ml is deterministic for a fixed seed") {
  Dataset data = se_dataset(1.0, 0.5, 25, 52);
  MLConfig cfg;
  cfg.restarts = 3;
  cfg.max_evals = 200;
  cfg.seed = 9;

  FitResult a = fit_ml(se_template(), nullptr, data, cfg);
  FitResult b = fit_ml(se_template(), nullptr, data, cfg);
  CHECK((a.params - b.params).norm() == 0.0);
  CHECK(a.noise_var == b.noise_var);
  CHECK(a.best_restart == b.best_restart);
}

TEST_CASE("fit_ml validates its configuration") {
  Dataset data = se_dataset(1.0, 0.5, 10, 53);
  MLConfig cfg;
  cfg.restarts = 0;
  CHECK_THROWS(fit_ml(se_template(), nullptr, data, cfg));

  cfg.restarts = 1;
  cfg.lower = Vec::Constant(3, -1.0);  // noise included, nonpositive lower
  cfg.upper = Vec::Constant(3, 1.0);
  CHECK_THROWS(fit_ml(se_template(), nullptr, data, cfg));
}

TEST_CASE("fit_ml honors bound constraints") {
  Dataset data = se_dataset(1.0, 0.5, 20, 54);
  MLConfig cfg;
  cfg.restarts = 2;
  cfg.max_evals = 150;
  cfg.seed = 5;
  cfg.fit_noise = false;
  cfg.fixed_noise = 1e-8;
  cfg.lower = Vec::Constant(2, 0.3);
  cfg.upper = Vec::Constant(2, 3.0);

  FitResult fit = fit_ml(se_template(), nullptr, data, cfg);
  for (int i = 0; i < 2; ++i) {
    CHECK(fit.params[i] >= 0.3 - 1e-12);
    CHECK(fit.params[i] <= 3.0 + 1e-12);
  }
}
