#ifndef INVGP_ANOVA_HPP
#define INVGP_ANOVA_HPP

#include <map>
#include <set>
#include <vector>

#include "invgp/fit.hpp"
#include "invgp/kernels.hpp"

namespace invgp {

// Sobol' g-function on [0,1]^d.
struct GFunction {
  Vec a;

  explicit GFunction(Vec a_) : a(std::move(a_)) {
    for (int i = 0; i < a.size(); ++i) {
      if (!(a[i] >= 0.0)) throw std::invalid_argument("g-function: a_i >= 0 required");
    }
  }

  int dim() const { return static_cast<int>(a.size()); }
  double operator()(const Vec& x) const;
};

// Nonempty sorted subset of {1..d}.
struct IndexSet {
  std::vector<int> indices;  // 1-based, strictly increasing

  IndexSet() = default;
  IndexSet(std::initializer_list<int> init);
  explicit IndexSet(std::vector<int> v);

  int order() const { return static_cast<int>(indices.size()); }
  bool contains(int i) const;
  std::string str() const;  // "1,3"
  static IndexSet parse(const std::string& s);

  auto operator<=>(const IndexSet&) const = default;
};

struct SobolTable {
  std::map<IndexSet, double> indices;
  double total_variance = 0.0;
  bool degenerate = false;

  double sum() const;
  double at(const IndexSet& I) const;
};

double g_eval(const GFunction& g, const Vec& x);

// Closed-form indices S_I = prod_{i in I} beta_i / (prod(1+beta_i) - 1),
// beta_i = (1+a_i)^{-2}/3, for all nonempty I with |I| <= max_order.
SobolTable g_sobol_closed_form(const GFunction& g, int max_order);

// Independent oracle: full HDMR on a composite Gauss-Legendre tensor grid
// (each [0,1] axis split at 1/2 so kinked integrands are handled cleanly).
// Exact up to quadrature error; intended for d <= 4.
SobolTable quadrature_hdmr_sobol(const std::function<double(const Vec&)>& f, int d,
                                 int max_order, int nodes_per_half = 12);

struct SobolEstimate {
  double value = 0.0;
  double stderr_est = 0.0;
  bool degenerate = false;
  bool low_precision = false;
};

// Monte-Carlo / quadrature estimate of S_I: tensor-quadrature HDMR for
// d <= 4, pick-freeze with Mobius inversion for larger d.
SobolEstimate monte_carlo_sobol(const std::function<double(const Vec&)>& f, int d,
                                const IndexSet& I, int n_mc, std::uint64_t seed);

// {I : S_I >= threshold}, in table order.
std::vector<IndexSet> significant_subsets(const SobolTable& table, double threshold);

// Argumentwise centred 1-D squared-exponential kernel k0 on [a,b], uniform
// probability quadrature with n_nodes nodes.
Kernel build_centered_1d_kernel(double sigma2, double theta, double a, double b,
                                int n_nodes = 33);

enum class ExperimentKernelKind { kAdd, kSpa, kAnova, kGauss };

// Sorted list of variables appearing in S.
std::vector<int> active_variables(const std::vector<IndexSet>& S);

// Expected parameter count for a kind (sigma^2-type + lengthscales).
int experiment_kernel_param_count(ExperimentKernelKind kind, int d,
                                  const std::vector<IndexSet>& S);

// Builds one of the four benchmark kernels on [0,1]^d from its raw parameter
// vector; throws (naming the kernel) on a wrong parameter count.
Kernel build_experiment_kernel(ExperimentKernelKind kind, int d,
                               const std::vector<IndexSet>& S, const Vec& params,
                               int quad_nodes = 33);

// KernelTemplate wrapper for ML fitting.
KernelTemplate experiment_kernel_template(ExperimentKernelKind kind, int d,
                                          const std::vector<IndexSet>& S,
                                          int quad_nodes = 33);

std::string experiment_kernel_name(ExperimentKernelKind kind);

}  // namespace invgp

#endif
