#include "invgp/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "invgp/invariance.hpp"
#include "invgp/io.hpp"
#include "invgp/mercer.hpp"
#include "invgp/operators.hpp"

namespace invgp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const std::string& what, std::vector<std::string>& failures) {
  if (!ok) failures.push_back(what);
}

Vec linspace(double a, double b, int n) {
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = a + (b - a) * i / (n - 1);
  return x;
}

// Trapezoid weights on an equispaced grid.
Vec trapezoid_weights(double a, double b, int n) {
  double dx = (b - a) / (n - 1);
  Vec w = Vec::Constant(n, dx);
  w[0] = w[n - 1] = 0.5 * dx;
  return w;
}

std::string out_path(const std::string& out_dir, const std::string& file) {
  return (fs::path(out_dir) / file).string();
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = 0.0;
  for (double x : v) m += x;
  m /= v.size();
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double m = 0.0;
  for (double x : v) m += x;
  return m / v.size();
}

}  // namespace

double zero_mean_target(double x) {
  return std::cos(x) + std::cos(2.0 * x) + std::cos(3.0 * x) + std::sin(0.5 * x);
}

double harmonic_target(const Vec& x) { return std::cos(1.0 - x[0]) * std::exp(x[1]); }

ZeroMeanResult run_zero_mean(const json& config, const std::string& out_dir,
                             std::uint64_t /*seed*/) {
  const int n_obs = config.value("n_obs", 12);
  const int quad_nodes = config.value("quad_nodes", 401);
  const int rise_grid = config.value("rise_grid", 1001);
  const double sigma2 = config.value("sigma2", 1.0);
  const double theta = config.value("theta", 2.0);
  const double noise_var = config.value("noise_var", 0.0);

  ZeroMeanResult res;

  // Equispaced interior design (cell midpoints of [-pi, pi]).
  Mat X(n_obs, 1);
  Vec y(n_obs);
  for (int i = 0; i < n_obs; ++i) {
    X(i, 0) = -kPi + (i + 0.5) * 2.0 * kPi / n_obs;
    y[i] = zero_mean_target(X(i, 0));
  }
  Dataset data{X, y};

  Kernel k_se = make_se_kernel_1d(sigma2, theta, -kPi, kPi);
  // Unnormalized Lebesgue quadrature; centering normalizes internally.
  QuadratureMeasure nu = QuadratureMeasure::uniform_1d(-kPi, kPi, quad_nodes, false);
  Kernel k_inv = make_centered_kernel(k_se, nu, /*allow_unnormalized=*/true);

  Posterior post_se(GPPrior{nullptr, k_se, noise_var}, data);
  Posterior post_inv(GPPrior{nullptr, k_inv, noise_var}, data);

  Vec grid = linspace(-kPi, kPi, rise_grid);
  Mat G(rise_grid, 1);
  G.col(0) = grid;
  Vec f_grid(rise_grid);
  for (int i = 0; i < rise_grid; ++i) f_grid[i] = zero_mean_target(grid[i]);
  Vec m_se = post_se.mean(G);
  Vec m_inv = post_inv.mean(G);

  Vec w = trapezoid_weights(-kPi, kPi, rise_grid);
  res.integral_f = w.dot(f_grid);
  res.rise_se = std::sqrt(w.dot((m_se - f_grid).cwiseAbs2()));
  res.rise_inv = std::sqrt(w.dot((m_inv - f_grid).cwiseAbs2()));
  res.ratio = res.rise_se / res.rise_inv;

  // Integral of the centred posterior mean against the centering quadrature
  // (node-exact zero in exact arithmetic).
  res.integral_m_inv = nu.weights.dot(post_inv.mean(nu.nodes));

  require(std::abs(res.integral_f) <= 1e-10, "target does not integrate to zero",
          res.failures);
  require(res.ratio >= 5.0, "RISE ratio below 5", res.failures);
  require(std::abs(res.integral_m_inv) <= 1e-8,
          "centred posterior mean does not integrate to zero", res.failures);
  res.passed = res.failures.empty();

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_dataset_csv(out_path(out_dir, "train.csv"), data);
    Mat rows(rise_grid, 4);
    rows.col(0) = grid;
    rows.col(1) = f_grid;
    rows.col(2) = m_se;
    rows.col(3) = m_inv;
    write_csv(out_path(out_dir, "grid.csv"), {"x", "f", "mean_se", "mean_centred"},
              rows);
  }
  return res;
}

OdeResult run_ode(const json& config, const std::string& out_dir,
                  std::uint64_t /*seed*/) {
  const int grid_n = config.value("grid_n", 200);
  std::vector<double> obs1 = config.value("obs_one", std::vector<double>{1.0});
  std::vector<double> obs2 = config.value("obs_two", std::vector<double>{1.0, 4.0});

  OdeResult res;

  Kernel k = make_ode_span_kernel(Mat::Identity(2, 2));
  MeanFunction mu = [](const Vec& t) { return 2.0 * t[0]; };
  auto truth = [](double t) { return 2.0 * t + std::cos(t); };

  Vec grid = linspace(0.0, 2.0 * kPi, grid_n);
  Mat G(grid_n, 1);
  G.col(0) = grid;

  GPPrior prior{mu, k, 0.0};
  for (int i = 0; i < grid_n; ++i) {
    Vec t(1);
    t[0] = grid[i];
    res.prior_mean_max_err =
        std::max(res.prior_mean_max_err, std::abs(prior.mean_at(t) - 2.0 * grid[i]));
  }

  auto make_data = [&](const std::vector<double>& obs) {
    Mat X(obs.size(), 1);
    Vec y(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
      X(i, 0) = obs[i];
      y[i] = truth(obs[i]);
    }
    return Dataset{X, y};
  };

  Posterior post1(prior, make_data(obs1));
  Posterior post2(prior, make_data(obs2));

  Vec mean1(grid_n), sd1(grid_n), mean2(grid_n), sd2(grid_n);
  for (int i = 0; i < grid_n; ++i) {
    Vec t(1);
    t[0] = grid[i];
    mean1[i] = post1.mean(t);
    sd1[i] = post1.sd(t);
    mean2[i] = post2.mean(t);
    sd2[i] = post2.sd(t);
  }
  res.max_sd_one_obs = sd1.maxCoeff();
  res.max_sd_two_obs = sd2.maxCoeff();

  require(res.prior_mean_max_err == 0.0, "prior mean is not exactly 2t", res.failures);
  require(res.max_sd_one_obs > 1e-6, "one observation already collapses the posterior",
          res.failures);
  require(res.max_sd_two_obs <= 1e-5,
          "posterior sd does not collapse after two observations", res.failures);
  res.passed = res.failures.empty();

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    Mat rows(grid_n, 6);
    rows.col(0) = grid;
    for (int i = 0; i < grid_n; ++i) rows(i, 1) = truth(grid[i]);
    rows.col(2) = mean1;
    rows.col(3) = sd1;
    rows.col(4) = mean2;
    rows.col(5) = sd2;
    write_csv(out_path(out_dir, "grid.csv"),
              {"t", "truth", "mean_one_obs", "sd_one_obs", "mean_two_obs", "sd_two_obs"},
              rows);
  }
  return res;
}

HarmonicResult run_harmonic(const json& config, const std::string& out_dir,
                            std::uint64_t /*seed*/) {
  const int grid_n = config.value("grid_n", 41);
  const double theta = config.value("theta", 1.0);

  HarmonicResult res;

  Mat X(4, 2);
  X << 0.5, 0.5, 0.5, -0.5, -0.5, 0.5, -0.5, -0.5;
  if (config.contains("design")) {
    const auto& dj = config.at("design");
    X.resize(dj.size(), 2);
    for (std::size_t i = 0; i < dj.size(); ++i) {
      X(i, 0) = dj[i][0].get<double>();
      X(i, 1) = dj[i][1].get<double>();
    }
  }
  Vec y(X.rows());
  for (int i = 0; i < X.rows(); ++i) y[i] = harmonic_target(X.row(i).transpose());

  Kernel k = make_harmonic_kernel(theta);
  Posterior post(GPPrior{nullptr, k, 0.0}, Dataset{X, y});
  auto m_fn = [&post](const Vec& x) { return post.mean(x); };
  auto f_fn = [](const Vec& x) { return harmonic_target(x); };

  Vec axis = linspace(-1.0, 1.0, grid_n);
  Box box = Box::cube(2, -1.0, 1.0);
  LinearDifferentialCheck lap{LinearDifferentialCheck::Operator::kLaplacian, 1e-3, 2};

  Mat rows(grid_n * grid_n, 5);
  int r = 0;
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j, ++r) {
      Vec x(2);
      x[0] = axis[i];
      x[1] = axis[j];
      double f = harmonic_target(x);
      double m = post.mean(x);
      double err = std::abs(m - f);
      bool boundary = i == 0 || j == 0 || i == grid_n - 1 || j == grid_n - 1;
      if (boundary) {
        res.boundary_max_err = std::max(res.boundary_max_err, err);
      } else {
        res.interior_max_err = std::max(res.interior_max_err, err);
        res.max_fd_residual_f =
            std::max(res.max_fd_residual_f, std::abs(fd_operator_residual(lap, f_fn, x, &box)));
        res.max_fd_residual_m =
            std::max(res.max_fd_residual_m, std::abs(fd_operator_residual(lap, m_fn, x, &box)));
      }
      rows(r, 0) = x[0];
      rows(r, 1) = x[1];
      rows(r, 2) = f;
      rows(r, 3) = m;
      rows(r, 4) = err;
    }
  }

  require(res.interior_max_err <= res.boundary_max_err + 1e-8,
          "maximum error not attained on the boundary", res.failures);
  require(res.max_fd_residual_f <= 1e-5, "target is not numerically harmonic",
          res.failures);
  require(res.max_fd_residual_m <= 1e-4, "posterior mean is not numerically harmonic",
          res.failures);
  res.passed = res.failures.empty();

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_dataset_csv(out_path(out_dir, "train.csv"), Dataset{X, y});
    write_csv(out_path(out_dir, "grid.csv"), {"x1", "x2", "f", "mean", "abs_err"}, rows);
  }
  return res;
}

namespace {

struct KernelLayout {
  ExperimentKernelKind kind;
  int first_theta = 0;  // kernel-parameter index of the first lengthscale
};

MLConfig gfunction_ml_config(const json& config, const KernelTemplate& tmpl,
                             int first_theta, double var_y, double theta_init,
                             std::uint64_t seed) {
  MLConfig cfg;
  cfg.restarts = config.value("restarts", 6);
  cfg.max_evals = config.value("max_evals", 800);
  cfg.seed = seed;
  cfg.fit_noise = true;
  const int n_opt = tmpl.n_params + 1;
  cfg.lower = Vec::Constant(n_opt, 1e-5);
  cfg.upper = Vec::Constant(n_opt, 1e3);
  for (int i = first_theta; i < tmpl.n_params; ++i) {
    cfg.lower[i] = 0.02;
    cfg.upper[i] = 100.0;
  }
  cfg.lower[n_opt - 1] = 1e-8;                       // noise variance
  cfg.upper[n_opt - 1] = std::max(var_y, 1e-2);
  cfg.init_center = Vec::Constant(n_opt, theta_init);
  for (int i = 0; i < first_theta; ++i) {
    cfg.init_center[i] = std::max(var_y / std::max(first_theta - 1, 1), 1e-3);
  }
  cfg.init_center[n_opt - 1] = std::max(1e-2 * var_y, 1e-6);
  return cfg;
}

}  // namespace

GFunctionResult run_gfunction(const json& config, const std::string& out_dir,
                              std::uint64_t seed) {
  const int d = config.value("d", 10);
  std::vector<double> a_vals =
      config.value("a", std::vector<double>{0, 0, 0, 2, 2, 2, 4, 4, 4, 8});
  if (static_cast<int>(a_vals.size()) != d) {
    throw std::invalid_argument("run_gfunction: a must have length d");
  }
  const int n_train = config.value("n_train", 100);
  const int n_test = config.value("n_test", 1000);
  const int n_seeds = config.value("n_seeds", 10);
  const double threshold = config.value("threshold", 3e-3);
  const int max_order = config.value("max_order", std::min(d, 4));
  const int quad_nodes = config.value("quad_nodes", 33);

  GFunction g{Eigen::Map<const Vec>(a_vals.data(), a_vals.size())};
  SobolTable table = g_sobol_closed_form(g, max_order);
  GFunctionResult res;
  res.subsets = significant_subsets(table, threshold);

  const ExperimentKernelKind kinds[] = {ExperimentKernelKind::kAdd,
                                        ExperimentKernelKind::kSpa,
                                        ExperimentKernelKind::kAnova,
                                        ExperimentKernelKind::kGauss};
  for (auto kind : kinds) {
    GFunctionKernelStats st;
    st.kernel = experiment_kernel_name(kind);
    res.kernels.push_back(st);
  }

  Box box = Box::cube(d, 0.0, 1.0);
  std::ostringstream per_rep_csv;
  per_rep_csv << "kernel,rep,log_likelihood,rmse,q2\n";

  for (int rep = 0; rep < n_seeds; ++rep) {
    Mat Xtr = uniform_points(box, n_train, splitmix64(seed ^ (0x11 + 2ULL * rep)));
    Mat Xte = uniform_points(box, n_test, splitmix64(seed ^ (0x12 + 2ULL * rep)));
    Vec ytr(n_train), yte(n_test);
    for (int i = 0; i < n_train; ++i) ytr[i] = g(Xtr.row(i).transpose());
    for (int i = 0; i < n_test; ++i) yte[i] = g(Xte.row(i).transpose());
    Dataset train{Xtr, ytr};
    double var_y = (ytr.array() - ytr.mean()).square().sum() / (n_train - 1);

    for (std::size_t kk = 0; kk < 4; ++kk) {
      ExperimentKernelKind kind = kinds[kk];
      KernelTemplate tmpl = experiment_kernel_template(kind, d, res.subsets, quad_nodes);
      int first_theta = kind == ExperimentKernelKind::kGauss
                            ? 1
                            : 1 + (tmpl.n_params - 1) / 2;
      double theta_init = kind == ExperimentKernelKind::kGauss ? 1.5 : 0.4;
      MLConfig cfg = gfunction_ml_config(
          config, tmpl, first_theta, var_y, theta_init,
          splitmix64(seed ^ (0x9000 + 16ULL * rep + kk)));
      try {
        FitResult fit = fit_ml(tmpl, nullptr, train, cfg);
        Posterior post(fit.prior, train);
        Vec pred = post.mean(Xte);
        double rmse = std::sqrt((pred - yte).squaredNorm() / n_test);
        double q2 = 1.0 - (pred - yte).squaredNorm() /
                              (yte.array() - yte.mean()).square().sum();
        auto& st = res.kernels[kk];
        st.log_likelihood.push_back(fit.log_likelihood);
        st.rmse.push_back(rmse);
        st.q2.push_back(q2);
        per_rep_csv << st.kernel << "," << rep << "," << format_double(fit.log_likelihood)
                    << "," << format_double(rmse) << "," << format_double(q2) << "\n";
      } catch (const std::exception& e) {
        res.kernels[kk].failed_fits += 1;
        res.failures.push_back(res.kernels[kk].kernel + " rep " + std::to_string(rep) +
                               ": " + e.what());
      }
    }
  }

  for (auto& st : res.kernels) {
    st.q2_mean = mean_of(st.q2);
    st.q2_sd = sample_sd(st.q2);
    st.rmse_mean = mean_of(st.rmse);
    st.ll_mean = mean_of(st.log_likelihood);
  }

  require(res.kernels[1].q2_mean > res.kernels[2].q2_mean &&
              res.kernels[2].q2_mean > res.kernels[0].q2_mean &&
              res.kernels[0].q2_mean > res.kernels[3].q2_mean,
          "mean Q2 ordering k_spa > k_anova > k_add > k_gauss violated", res.failures);
  res.passed = res.failures.empty();

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    {
      std::ofstream out(out_path(out_dir, "metrics.csv"));
      out << per_rep_csv.str();
    }
    {
      std::ofstream out(out_path(out_dir, "summary.csv"));
      out << "kernel,q2_mean,q2_sd,rmse_mean,ll_mean,failed_fits\n";
      for (const auto& st : res.kernels) {
        out << st.kernel << "," << format_double(st.q2_mean) << ","
            << format_double(st.q2_sd) << "," << format_double(st.rmse_mean) << ","
            << format_double(st.ll_mean) << "," << st.failed_fits << "\n";
      }
    }
    write_sobol_csv(out_path(out_dir, "sobol_indices.csv"), table);
    {
      std::ofstream out(out_path(out_dir, "subsets.csv"));
      out << "subset,S_I\n";
      for (const auto& I : res.subsets) {
        out << "\"" << I.str() << "\"," << format_double(table.at(I)) << "\n";
      }
    }
  }
  return res;
}

namespace {

struct GalleryPair {
  std::string kernel_name;
  std::string op_name;
  Kernel k;
  std::shared_ptr<PathOperator> T;
  bool expected = false;
  QuadratureMeasure nu;  // discretization for path sampling
};

// Max |T(path) - path| over Karhunen-Loeve paths extended off-node, probed in
// the kernel box shrunk by the operator stencil margin.
double functional_path_violation(const GalleryPair& p, int n_paths, int n_probe,
                                 std::uint64_t seed) {
  int trunc = std::min(p.nu.size(), 80);
  MercerDecomposition dec = discrete_mercer(p.k, p.nu, trunc);
  Box box = p.k.domain();
  double margin = p.T->boundary_margin() * 2.0 + 1e-6;
  Box probe_box(Vec(box.lower.array() + margin), Vec(box.upper.array() - margin));
  Mat probes = uniform_points(probe_box, n_probe, splitmix64(seed ^ 0x5151));

  double worst = 0.0;
  for (int path = 0; path < n_paths; ++path) {
    auto f = kl_path_function(dec, p.k, seed, path, /*rank_tol=*/1e-4);
    for (int i = 0; i < n_probe; ++i) {
      Vec x = probes.row(i).transpose();
      worst = std::max(worst, std::abs(p.T->apply(f, x) - f(x)));
    }
  }
  return worst;
}

std::shared_ptr<PathOperator> single_rotation_op(double angle) {
  return std::make_shared<CompositionCombination>(
      std::vector<SymbolMap>{rotation_symbol(angle)}, Vec::Ones(1));
}

}  // namespace

GalleryResult run_invariance_gallery(const json& config, const std::string& out_dir,
                                     std::uint64_t seed) {
  const int n_paths = config.value("n_paths", 3);
  const int n_probe = config.value("n_probe", 40);
  const double arg_tol = config.value("arg_tol", 1e-8);
  const double path_tol = config.value("path_tol", 1e-6);

  GalleryResult res;

  auto [k1, k2] = make_polar_kernels();
  QuadratureMeasure nu_square = QuadratureMeasure::uniform_grid(Box::cube(2, -1.0, 1.0), 13);

  QuadratureMeasure nu_c = QuadratureMeasure::uniform_1d(-kPi, kPi, 101);
  Kernel se_pi = make_se_kernel_1d(1.0, 0.5, -kPi, kPi);
  Kernel k0 = make_centered_kernel(se_pi, nu_c);

  Box unit2 = Box::cube(2, 0.0, 1.0);
  std::vector<std::vector<Kernel>> blocks(2, std::vector<Kernel>(2));
  blocks[0][0] = make_se_kernel_1d(1.0, 0.3, 0.0, 1.0);
  blocks[1][1] = make_se_kernel_1d(1.0, 0.3, 0.0, 1.0);
  Kernel k_additive = make_additive_kernel(blocks, unit2);
  Vec anchor = unit2.center();

  Kernel k_ode = make_ode_span_kernel(Mat::Identity(2, 2));
  QuadratureMeasure nu_ode = QuadratureMeasure::uniform_1d(0.0, 2.0 * kPi, 101);
  Kernel k_harm = make_harmonic_kernel(1.0);

  Kernel se_2 = make_se_kernel(1.0, Vec::Constant(2, 0.5), Box::cube(2, -1.0, 1.0));
  Kernel se_unit2 = make_se_kernel(1.0, Vec::Constant(2, 0.3), unit2);
  Kernel se_ode = make_se_kernel_1d(1.0, 0.5, 0.0, 2.0 * kPi);

  auto neg_second = std::make_shared<DifferentialPathOperator>(
      DifferentialPathOperator::Tag::kNegSecondDerivative, 5e-3, 4);
  auto lap_shift = std::make_shared<DifferentialPathOperator>(
      DifferentialPathOperator::Tag::kLaplacianShift, 5e-3, 4);
  auto centering = std::make_shared<CenteringOperator>(nu_c);
  auto additivity = std::make_shared<CompositionCombination>(additivity_operator(anchor));

  std::vector<GalleryPair> pairs{
      {"polar_sheet", "rotation_quarter", k1, single_rotation_op(kPi / 2.0), true, nu_square},
      {"polar_radial", "rotation_generic", k2, single_rotation_op(2.0 * kPi / 7.0), true,
       nu_square},
      {"centred_se", "centering", k0, centering, true, nu_c},
      {"additive_blocks", "additivity", k_additive, additivity, true,
       QuadratureMeasure::uniform_grid(unit2, 13)},
      {"ode_span", "neg_second_derivative", k_ode, neg_second, true, nu_ode},
      {"harmonic", "laplacian_shift", k_harm, lap_shift, true, nu_square},
      // Squared-exponential controls: expected to fail every operator.
      {"se_control", "rotation_quarter", se_2, single_rotation_op(kPi / 2.0), false,
       nu_square},
      {"se_control", "rotation_generic", se_2, single_rotation_op(2.0 * kPi / 7.0), false,
       nu_square},
      {"se_control", "centering", se_pi, centering, false, nu_c},
      {"se_control", "additivity", se_unit2, additivity, false,
       QuadratureMeasure::uniform_grid(unit2, 13)},
      {"se_control", "neg_second_derivative", se_ode, neg_second, false, nu_ode},
      {"se_control", "laplacian_shift", se_2, lap_shift, false, nu_square},
  };

  for (const auto& p : pairs) {
    GalleryEntry e;
    e.kernel = p.kernel_name;
    e.op = p.op_name;
    e.expected = p.expected;

    InvarianceReport rep =
        check_argumentwise_invariance(*p.T, p.k, 100, arg_tol, splitmix64(seed ^ 0x77));
    e.arg_passed = rep.passed;
    e.arg_violation = rep.max_violation;

    e.path_violation = functional_path_violation(p, n_paths, n_probe, seed);
    e.path_passed = e.path_violation <= path_tol;

    require(e.arg_passed == e.expected,
            p.kernel_name + "/" + p.op_name + ": argumentwise check " +
                (e.expected ? "failed" : "passed") + " unexpectedly",
            res.failures);
    require(e.path_passed == e.expected,
            p.kernel_name + "/" + p.op_name + ": path check " +
                (e.expected ? "failed" : "passed") + " unexpectedly",
            res.failures);
    res.entries.push_back(e);

    if (!out_dir.empty() && p.expected) {
      fs::create_directories(out_dir);
      int trunc = std::min(p.nu.size(), 80);
      MercerDecomposition dec = discrete_mercer(p.k, p.nu, trunc);
      Mat paths = kl_sample(dec, seed, n_paths);
      int dcols = p.nu.dim();
      Mat rows(p.nu.size(), dcols + n_paths);
      rows.leftCols(dcols) = p.nu.nodes;
      rows.rightCols(n_paths) = paths.transpose();
      std::vector<std::string> header;
      for (int i = 1; i <= dcols; ++i) header.push_back("x" + std::to_string(i));
      for (int i = 0; i < n_paths; ++i) header.push_back("path" + std::to_string(i));
      write_csv(out_path(out_dir, "paths_" + p.kernel_name + ".csv"), header, rows);
    }
  }

  // Paths of the radial kernel are angle-free: constant on every circle.
  {
    int trunc = std::min(nu_square.size(), 80);
    MercerDecomposition dec = discrete_mercer(k2, nu_square, trunc);
    auto f = kl_path_function(dec, k2, seed, 0);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < 32; ++i) {
      double ang = 2.0 * kPi * i / 32;
      Vec x(2);
      x[0] = 0.6 * std::cos(ang);
      x[1] = 0.6 * std::sin(ang);
      double v = f(x);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    res.circle_constancy = hi - lo;
    require(res.circle_constancy <= 1e-8, "radial-kernel path varies along a circle",
            res.failures);
  }

  res.passed = res.failures.empty();

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream out(out_path(out_dir, "gallery.csv"));
    out << "kernel,operator,expected,arg_passed,path_passed,arg_violation,path_violation\n";
    for (const auto& e : res.entries) {
      out << e.kernel << "," << e.op << "," << (e.expected ? 1 : 0) << ","
          << (e.arg_passed ? 1 : 0) << "," << (e.path_passed ? 1 : 0) << ","
          << format_double(e.arg_violation) << "," << format_double(e.path_violation)
          << "\n";
    }
  }
  return res;
}

ExperimentOutcome run_experiment(const std::string& id, const json& config,
                                 const std::string& out_dir, std::uint64_t seed) {
  ExperimentOutcome out;
  json metrics;

  if (id == "zero-mean") {
    ZeroMeanResult r = run_zero_mean(config, out_dir, seed);
    metrics = {{"integral_f", r.integral_f},       {"rise_se", r.rise_se},
               {"rise_centred", r.rise_inv},       {"rise_ratio", r.ratio},
               {"integral_mean", r.integral_m_inv}};
    out.passed = r.passed;
    out.failures = r.failures;
  } else if (id == "ode") {
    OdeResult r = run_ode(config, out_dir, seed);
    metrics = {{"prior_mean_max_err", r.prior_mean_max_err},
               {"max_sd_one_obs", r.max_sd_one_obs},
               {"max_sd_two_obs", r.max_sd_two_obs}};
    out.passed = r.passed;
    out.failures = r.failures;
  } else if (id == "harmonic") {
    HarmonicResult r = run_harmonic(config, out_dir, seed);
    metrics = {{"interior_max_err", r.interior_max_err},
               {"boundary_max_err", r.boundary_max_err},
               {"max_fd_residual_f", r.max_fd_residual_f},
               {"max_fd_residual_m", r.max_fd_residual_m}};
    out.passed = r.passed;
    out.failures = r.failures;
  } else if (id == "gfunction") {
    GFunctionResult r = run_gfunction(config, out_dir, seed);
    json subsets = json::array();
    for (const auto& I : r.subsets) subsets.push_back(I.str());
    json kernels = json::array();
    for (const auto& st : r.kernels) {
      kernels.push_back({{"kernel", st.kernel},
                         {"q2_mean", st.q2_mean},
                         {"q2_sd", st.q2_sd},
                         {"rmse_mean", st.rmse_mean},
                         {"ll_mean", st.ll_mean},
                         {"failed_fits", st.failed_fits}});
    }
    metrics = {{"subsets", subsets}, {"kernels", kernels}};
    out.passed = r.passed;
    out.failures = r.failures;
  } else if (id == "invariance-gallery") {
    GalleryResult r = run_invariance_gallery(config, out_dir, seed);
    json entries = json::array();
    for (const auto& e : r.entries) {
      entries.push_back({{"kernel", e.kernel},
                         {"operator", e.op},
                         {"expected", e.expected},
                         {"arg_passed", e.arg_passed},
                         {"path_passed", e.path_passed},
                         {"arg_violation", e.arg_violation},
                         {"path_violation", e.path_violation}});
    }
    metrics = {{"entries", entries}, {"circle_constancy", r.circle_constancy}};
    out.passed = r.passed;
    out.failures = r.failures;
  } else {
    throw std::invalid_argument(
        "unknown experiment '" + id +
        "' (expected zero-mean | ode | harmonic | gfunction | invariance-gallery)");
  }

  out.metrics = metrics;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    json results = metrics;
    results["passed"] = out.passed;
    results["failures"] = out.failures;
    write_manifest(out_dir, id, seed, config, results);
  }
  return out;
}

}  // namespace invgp
