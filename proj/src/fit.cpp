#include "invgp/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace invgp {

SimplexResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0,
                          double step, int max_evals, double ftol) {
  const int n = static_cast<int>(x0.size());
  // Adaptive coefficients (helpful for the 20+-dimensional fits).
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / n;
  const double gamma = 0.75 - 0.5 / n;
  const double delta = 1.0 - 1.0 / n;

  int evals = 0;
  auto eval = [&](const Vec& x) {
    ++evals;
    return f(x);
  };

  std::vector<Vec> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  for (int i = 1; i <= n; ++i) xs[i][i - 1] += step;
  for (int i = 0; i <= n; ++i) fs[i] = eval(xs[i]);

  std::vector<int> order(n + 1);
  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fs[a] < fs[b]; });
    int best = order[0], worst = order[n], second_worst = order[n - 1];
    if (std::abs(fs[worst] - fs[best]) <= ftol * (std::abs(fs[best]) + ftol)) break;

    Vec centroid = Vec::Zero(n);
    for (int i = 0; i <= n; ++i) {
      if (i != worst) centroid += xs[i];
    }
    centroid /= n;

    Vec xr = centroid + alpha * (centroid - xs[worst]);
    double fr = eval(xr);
    if (fr < fs[best]) {
      Vec xe = centroid + beta * (xr - centroid);
      double fe = eval(xe);
      if (fe < fr) {
        xs[worst] = xe;
        fs[worst] = fe;
      } else {
        xs[worst] = xr;
        fs[worst] = fr;
      }
    } else if (fr < fs[second_worst]) {
      xs[worst] = xr;
      fs[worst] = fr;
    } else {
      bool outside = fr < fs[worst];
      Vec xc = outside ? Vec(centroid + gamma * (xr - centroid))
                       : Vec(centroid - gamma * (centroid - xs[worst]));
      double fc = eval(xc);
      if (fc < std::min(fr, fs[worst])) {
        xs[worst] = xc;
        fs[worst] = fc;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          xs[i] = xs[best] + delta * (xs[i] - xs[best]);
          fs[i] = eval(xs[i]);
        }
      }
    }
  }

  int best = 0;
  for (int i = 1; i <= n; ++i) {
    if (fs[i] < fs[best]) best = i;
  }
  return SimplexResult{xs[best], fs[best], evals};
}

namespace {

// Latin hypercube across restarts: restart r gets stratum perm_j[r] in
// dimension j.
Mat lhs_unit(int n_points, int dim, std::uint64_t seed) {
  Mat U(n_points, dim);
  for (int j = 0; j < dim; ++j) {
    std::vector<int> perm(n_points);
    std::iota(perm.begin(), perm.end(), 0);
    auto rng = substream(seed, 1000 + static_cast<std::uint64_t>(j));
    std::shuffle(perm.begin(), perm.end(), rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int r = 0; r < n_points; ++r) {
      U(r, j) = (perm[r] + u(rng)) / n_points;
    }
  }
  return U;
}

}  // namespace

FitResult fit_ml(const KernelTemplate& tmpl, const MeanFunction& mean,
                 const Dataset& data, const MLConfig& cfg) {
  if (cfg.restarts < 1) throw std::invalid_argument("fit_ml: restarts >= 1");
  const int n_opt = tmpl.n_params + (cfg.fit_noise ? 1 : 0);

  Vec lower = cfg.lower.size() == n_opt ? cfg.lower : Vec::Constant(n_opt, 1e-4);
  Vec upper = cfg.upper.size() == n_opt ? cfg.upper : Vec::Constant(n_opt, 1e4);
  for (int i = 0; i < n_opt; ++i) {
    if (!(lower[i] > 0.0) || !(upper[i] > lower[i]) || !std::isfinite(upper[i])) {
      throw std::invalid_argument("fit_ml: bounds must be finite and 0 < lower < upper");
    }
  }
  Vec zlo = lower.array().log();
  Vec zhi = upper.array().log();

  auto objective = [&](const Vec& z) -> double {
    // Soft box: quadratic penalty outside keeps the simplex feasible.
    double penalty = 0.0;
    Vec zc = z;
    for (int i = 0; i < n_opt; ++i) {
      if (z[i] < zlo[i]) {
        penalty += (zlo[i] - z[i]) * (zlo[i] - z[i]);
        zc[i] = zlo[i];
      } else if (z[i] > zhi[i]) {
        penalty += (z[i] - zhi[i]) * (z[i] - zhi[i]);
        zc[i] = zhi[i];
      }
    }
    try {
      Vec params = zc.head(tmpl.n_params).array().exp();
      double tau2 = cfg.fit_noise ? std::exp(zc[n_opt - 1]) : cfg.fixed_noise;
      GPPrior prior{mean, tmpl.build(params), tau2};
      double ll = log_marginal_likelihood(prior, data);
      if (!std::isfinite(ll)) return 1e12;
      return -ll + 1e3 * penalty;
    } catch (const std::exception&) {
      return 1e12;
    }
  };

  Mat U = lhs_unit(cfg.restarts, n_opt, cfg.seed);
  FitResult result;
  double best_obj = std::numeric_limits<double>::infinity();

  for (int r = 0; r < cfg.restarts; ++r) {
    Vec z0(n_opt);
    if (r == 0 && cfg.init_center.size() == n_opt) {
      z0 = cfg.init_center.array().log();
      for (int i = 0; i < n_opt; ++i) z0[i] = std::clamp(z0[i], zlo[i], zhi[i]);
    } else {
      for (int i = 0; i < n_opt; ++i) z0[i] = zlo[i] + U(r, i) * (zhi[i] - zlo[i]);
    }

    RestartDiagnostics diag;
    diag.index = r;
    diag.initial_objective = objective(z0);
    try {
      SimplexResult sr = nelder_mead(objective, z0, 0.5, cfg.max_evals, cfg.ftol);
      diag.final_objective = std::min(sr.value, diag.initial_objective);
      diag.evals = sr.evals;
      diag.ok = diag.final_objective < 1e11;
      if (!diag.ok) diag.error = "all evaluations failed numerically";
      if (diag.ok && sr.value < best_obj) {
        best_obj = sr.value;
        Vec zc = sr.x.cwiseMax(zlo).cwiseMin(zhi);
        result.params = zc.head(tmpl.n_params).array().exp();
        result.noise_var = cfg.fit_noise ? std::exp(zc[n_opt - 1]) : cfg.fixed_noise;
        result.best_restart = r;
      }
    } catch (const std::exception& e) {
      diag.ok = false;
      diag.error = e.what();
    }
    result.restarts.push_back(diag);
  }

  if (result.best_restart < 0) {
    std::string msg = "fit_ml(" + tmpl.label + "): all restarts failed:";
    for (const auto& d : result.restarts) msg += " [" + std::to_string(d.index) + "] " + d.error;
    throw std::runtime_error(msg);
  }

  result.prior = GPPrior{mean, tmpl.build(result.params), result.noise_var};
  result.log_likelihood = log_marginal_likelihood(result.prior, data);
  return result;
}

}  // namespace invgp
