#include "invgp/anova.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace invgp {

double GFunction::operator()(const Vec& x) const {
  if (x.size() != a.size()) throw std::invalid_argument("g-function: dimension mismatch");
  double p = 1.0;
  for (int i = 0; i < a.size(); ++i) {
    p *= (std::abs(4.0 * x[i] - 2.0) + a[i]) / (1.0 + a[i]);
  }
  return p;
}

double g_eval(const GFunction& g, const Vec& x) { return g(x); }

IndexSet::IndexSet(std::initializer_list<int> init) : IndexSet(std::vector<int>(init)) {}

IndexSet::IndexSet(std::vector<int> v) : indices(std::move(v)) {
  std::sort(indices.begin(), indices.end());
  if (indices.empty()) throw std::invalid_argument("IndexSet: must be nonempty");
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 1 || (i > 0 && indices[i] == indices[i - 1])) {
      throw std::invalid_argument("IndexSet: indices must be distinct and >= 1");
    }
  }
}

bool IndexSet::contains(int i) const {
  return std::binary_search(indices.begin(), indices.end(), i);
}

std::string IndexSet::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i > 0) os << ",";
    os << indices[i];
  }
  return os.str();
}

IndexSet IndexSet::parse(const std::string& s) {
  std::vector<int> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stoi(tok));
  return IndexSet(std::move(v));
}

double SobolTable::sum() const {
  double s = 0.0;
  for (const auto& [I, v] : indices) s += v;
  return s;
}

double SobolTable::at(const IndexSet& I) const {
  auto it = indices.find(I);
  if (it == indices.end()) throw std::out_of_range("SobolTable: no entry for {" + I.str() + "}");
  return it->second;
}

namespace {

// All nonempty subsets of {1..d} with order <= max_order, lexicographic.
void enumerate_subsets(int d, int max_order,
                       const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> current;
  std::function<void(int)> rec = [&](int next) {
    if (!current.empty()) visit(current);
    if (static_cast<int>(current.size()) == max_order) return;
    for (int i = next; i <= d; ++i) {
      current.push_back(i);
      rec(i + 1);
      current.pop_back();
    }
  };
  rec(1);
}

void enumerate_proper_subsets(const std::vector<int>& I,
                              const std::function<void(const std::vector<int>&)>& visit) {
  int m = static_cast<int>(I.size());
  for (int mask = 1; mask < (1 << m) - 1; ++mask) {
    std::vector<int> J;
    for (int b = 0; b < m; ++b) {
      if (mask & (1 << b)) J.push_back(I[b]);
    }
    visit(J);
  }
}

}  // namespace

SobolTable g_sobol_closed_form(const GFunction& g, int max_order) {
  int d = g.dim();
  if (max_order < 1 || max_order > d) {
    throw std::invalid_argument("g_sobol_closed_form: 1 <= max_order <= d required");
  }
  Vec beta(d);
  for (int i = 0; i < d; ++i) beta[i] = (1.0 / 3.0) / ((1.0 + g.a[i]) * (1.0 + g.a[i]));
  double denom = 1.0;
  for (int i = 0; i < d; ++i) denom *= 1.0 + beta[i];
  denom -= 1.0;

  SobolTable table;
  table.total_variance = denom;  // E[g] = 1, so Var(g) = prod(1+beta) - 1
  enumerate_subsets(d, max_order, [&](const std::vector<int>& I) {
    double num = 1.0;
    for (int i : I) num *= beta[i - 1];
    table.indices[IndexSet(I)] = num / denom;
  });
  return table;
}

SobolTable quadrature_hdmr_sobol(const std::function<double(const Vec&)>& f, int d,
                                 int max_order, int nodes_per_half) {
  if (d < 1 || d > 6) throw std::invalid_argument("quadrature_hdmr_sobol: d must be in 1..6");
  if (max_order < 1 || max_order > d) {
    throw std::invalid_argument("quadrature_hdmr_sobol: 1 <= max_order <= d required");
  }
  // Composite probability rule on [0,1] with a break at 1/2.
  QuadratureMeasure left = QuadratureMeasure::gauss_legendre_1d(0.0, 0.5, nodes_per_half);
  QuadratureMeasure right = QuadratureMeasure::gauss_legendre_1d(0.5, 1.0, nodes_per_half);
  int n1 = left.size() + right.size();
  Vec x1(n1), w1(n1);
  x1 << left.nodes.col(0), right.nodes.col(0);
  w1 << left.weights, right.weights;

  long total = 1;
  for (int i = 0; i < d; ++i) total *= n1;

  // Full-grid evaluation.
  std::vector<double> values(total), weights(total);
  std::vector<int> idx(d, 0);
  Vec x(d);
  for (long p = 0; p < total; ++p) {
    long rem = p;
    double w = 1.0;
    for (int i = d - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % n1);
      rem /= n1;
      x[i] = x1[idx[i]];
      w *= w1[idx[i]];
    }
    values[p] = f(x);
    weights[p] = w;
  }

  double f0 = 0.0, second_moment = 0.0;
  for (long p = 0; p < total; ++p) {
    f0 += weights[p] * values[p];
    second_moment += weights[p] * values[p] * values[p];
  }
  double var_total = second_moment - f0 * f0;

  SobolTable table;
  table.total_variance = var_total;
  if (var_total <= 1e-14 * (1.0 + f0 * f0)) {
    table.degenerate = true;
    enumerate_subsets(d, max_order, [&](const std::vector<int>& I) {
      table.indices[IndexSet(I)] = 0.0;
    });
    return table;
  }

  // Closed (sub-tree) variances V_I = Var E[f | X_I], then partial variances
  // by Mobius inversion.  Subsets are processed by increasing order so every
  // proper subset is available when it is subtracted.
  std::vector<std::vector<int>> subsets;
  enumerate_subsets(d, max_order,
                    [&](const std::vector<int>& I) { subsets.push_back(I); });
  std::stable_sort(subsets.begin(), subsets.end(),
                   [](const auto& a, const auto& b) { return a.size() < b.size(); });

  std::map<IndexSet, double> partial;
  auto process = [&](const std::vector<int>& I) {
    int m = static_cast<int>(I.size());
    long bucket_count = 1;
    for (int i = 0; i < m; ++i) bucket_count *= n1;
    std::vector<double> acc(bucket_count, 0.0);
    for (long p = 0; p < total; ++p) {
      long rem = p;
      long bucket = 0;
      // Recompute per-dim indices; project onto I.
      for (int i = d - 1, slot = m - 1; i >= 0; --i) {
        int xi = static_cast<int>(rem % n1);
        rem /= n1;
        if (slot >= 0 && I[slot] - 1 == i) {
          // Build bucket index in I order (I is ascending; we iterate dims
          // descending, filling from the least significant digit).
          long stride = 1;
          for (int q = m - 1; q > slot; --q) stride *= n1;
          bucket += xi * stride;
          --slot;
        }
      }
      acc[bucket] += weights[p] * values[p];
    }
    // Marginal weight of bucket b.
    double v_closed = -f0 * f0;
    std::vector<int> bidx(m, 0);
    for (long b = 0; b < bucket_count; ++b) {
      long rem = b;
      double wI = 1.0;
      for (int i = m - 1; i >= 0; --i) {
        wI *= w1[rem % n1];
        rem /= n1;
      }
      v_closed += acc[b] * acc[b] / wI;
    }
    double dI = v_closed;
    enumerate_proper_subsets(I, [&](const std::vector<int>& J) {
      dI -= partial.at(IndexSet(J));
    });
    partial[IndexSet(I)] = dI;
    table.indices[IndexSet(I)] = dI / var_total;
  };
  for (const auto& I : subsets) process(I);
  return table;
}

namespace {

double pick_freeze_closed(const std::function<double(const Vec&)>& f, const Mat& A,
                          const Mat& B, const std::vector<int>& J, double* var_out) {
  int n = static_cast<int>(A.rows());
  Vec fa(n), fab(n);
  Vec x(A.cols());
  for (int i = 0; i < n; ++i) {
    fa[i] = f(A.row(i).transpose());
    x = B.row(i).transpose();
    for (int j : J) x[j - 1] = A(i, j - 1);
    fab[i] = f(x);
  }
  double m = 0.5 * (fa.mean() + fab.mean());
  double cov = (fa.cwiseProduct(fab)).mean() - m * m;
  double var = 0.5 * (fa.squaredNorm() + fab.squaredNorm()) / n - m * m;
  if (var_out != nullptr) *var_out = var;
  return cov;
}

}  // namespace

SobolEstimate monte_carlo_sobol(const std::function<double(const Vec&)>& f, int d,
                                const IndexSet& I, int n_mc, std::uint64_t seed) {
  SobolEstimate est;
  est.low_precision = n_mc < 1000;
  if (d <= 4) {
    SobolTable t = quadrature_hdmr_sobol(f, d, I.order());
    est.value = t.indices.at(I);
    est.degenerate = t.degenerate;
    est.stderr_est = 0.0;
    return est;
  }

  Box cube = Box::cube(d, 0.0, 1.0);
  Mat A = uniform_points(cube, n_mc, splitmix64(seed) ^ 0xA);
  Mat B = uniform_points(cube, n_mc, splitmix64(seed) ^ 0xB);

  double var_total = 0.0;
  double s = 0.0;
  // Mobius over nonempty subsets of I.
  int m = I.order();
  for (int mask = 1; mask < (1 << m); ++mask) {
    std::vector<int> J;
    for (int b = 0; b < m; ++b) {
      if (mask & (1 << b)) J.push_back(I.indices[b]);
    }
    double var = 0.0;
    double closed = pick_freeze_closed(f, A, B, J, &var);
    var_total = var;
    int sign = ((m - static_cast<int>(J.size())) % 2 == 0) ? 1 : -1;
    s += sign * closed;
  }
  if (var_total <= 1e-14) {
    est.degenerate = true;
    est.value = 0.0;
    return est;
  }
  est.value = s / var_total;
  est.stderr_est = (1 << m) / std::sqrt(static_cast<double>(n_mc));
  return est;
}

std::vector<IndexSet> significant_subsets(const SobolTable& table, double threshold) {
  if (!(threshold > 0.0) || !(threshold < 1.0)) {
    throw std::invalid_argument("significant_subsets: threshold must be in (0,1)");
  }
  std::vector<IndexSet> out;
  for (const auto& [I, v] : table.indices) {
    if (v >= threshold) out.push_back(I);
  }
  return out;
}

Kernel build_centered_1d_kernel(double sigma2, double theta, double a, double b,
                                int n_nodes) {
  Kernel base = make_se_kernel_1d(sigma2, theta, a, b);
  QuadratureMeasure nu = QuadratureMeasure::uniform_1d(a, b, n_nodes, true);
  return make_centered_kernel(base, nu);
}

std::vector<int> active_variables(const std::vector<IndexSet>& S) {
  std::set<int> vars;
  for (const auto& I : S) vars.insert(I.indices.begin(), I.indices.end());
  return {vars.begin(), vars.end()};
}

std::string experiment_kernel_name(ExperimentKernelKind kind) {
  switch (kind) {
    case ExperimentKernelKind::kAdd: return "k_add";
    case ExperimentKernelKind::kSpa: return "k_spa";
    case ExperimentKernelKind::kAnova: return "k_anova";
    case ExperimentKernelKind::kGauss: return "k_gauss";
  }
  return "?";
}

int experiment_kernel_param_count(ExperimentKernelKind kind, int d,
                                  const std::vector<IndexSet>& S) {
  switch (kind) {
    case ExperimentKernelKind::kAdd: return 1 + 2 * d;
    case ExperimentKernelKind::kSpa: return 1 + 2 * static_cast<int>(active_variables(S).size());
    case ExperimentKernelKind::kAnova: return 1 + 2 * d;
    case ExperimentKernelKind::kGauss: return 1 + d;
  }
  return 0;
}

Kernel build_experiment_kernel(ExperimentKernelKind kind, int d,
                               const std::vector<IndexSet>& S, const Vec& params,
                               int quad_nodes) {
  int expected = experiment_kernel_param_count(kind, d, S);
  if (params.size() != expected) {
    throw std::invalid_argument(experiment_kernel_name(kind) + ": expected " +
                                std::to_string(expected) + " parameters, got " +
                                std::to_string(params.size()));
  }
  Box domain = Box::cube(d, 0.0, 1.0);

  switch (kind) {
    case ExperimentKernelKind::kAdd: {
      std::vector<Kernel> terms{make_constant_kernel(params[0], domain)};
      for (int i = 0; i < d; ++i) {
        Kernel k0 = build_centered_1d_kernel(params[1 + i], params[1 + d + i], 0.0, 1.0,
                                             quad_nodes);
        terms.push_back(lift_to_coordinate(k0, i, domain));
      }
      return add(terms);
    }
    case ExperimentKernelKind::kSpa: {
      std::vector<int> act = active_variables(S);
      int na = static_cast<int>(act.size());
      std::map<int, Kernel> lifted;
      for (int j = 0; j < na; ++j) {
        Kernel k0 = build_centered_1d_kernel(params[1 + j], params[1 + na + j], 0.0, 1.0,
                                             quad_nodes);
        lifted.emplace(act[j], lift_to_coordinate(k0, act[j] - 1, domain));
      }
      std::vector<Kernel> terms{make_constant_kernel(params[0], domain)};
      for (const auto& I : S) {
        std::vector<Kernel> factors;
        for (int i : I.indices) factors.push_back(lifted.at(i));
        terms.push_back(factors.size() == 1 ? factors[0] : mul(factors));
      }
      return add(terms);
    }
    case ExperimentKernelKind::kAnova: {
      std::vector<Kernel> factors;
      for (int i = 0; i < d; ++i) {
        Kernel k0 = build_centered_1d_kernel(params[1 + i], params[1 + d + i], 0.0, 1.0,
                                             quad_nodes);
        factors.push_back(add(make_constant_kernel(1.0, domain),
                              lift_to_coordinate(k0, i, domain)));
      }
      return scale(params[0], mul(factors));
    }
    case ExperimentKernelKind::kGauss: {
      return make_se_kernel(params[0], params.tail(d), domain);
    }
  }
  throw std::logic_error("build_experiment_kernel: unreachable");
}

KernelTemplate experiment_kernel_template(ExperimentKernelKind kind, int d,
                                          const std::vector<IndexSet>& S,
                                          int quad_nodes) {
  KernelTemplate tmpl;
  tmpl.label = experiment_kernel_name(kind);
  tmpl.n_params = experiment_kernel_param_count(kind, d, S);
  std::vector<IndexSet> s_copy = S;
  tmpl.build = [kind, d, s_copy, quad_nodes](const Vec& p) {
    return build_experiment_kernel(kind, d, s_copy, p, quad_nodes);
  };
  return tmpl;
}

}  // namespace invgp
