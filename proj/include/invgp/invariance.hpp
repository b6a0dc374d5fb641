#ifndef INVGP_INVARIANCE_HPP
#define INVGP_INVARIANCE_HPP

#include "invgp/kernels.hpp"
#include "invgp/operators.hpp"

namespace invgp {

struct InvarianceReport {
  double max_violation = 0.0;   // max |T(k(.,x'))(x) - k(x,x')|
  double max_relative = 0.0;    // same, scaled by 1 + |k(x,x')|
  bool passed = false;
  int n_probe = 0;
};

// x -> T(k(., xprime))(x).
std::function<double(const Vec&)> apply_T_to_kernel_arg(const PathOperator& T,
                                                        const Kernel& k,
                                                        const Vec& xprime);

// Random probing of the argumentwise invariance condition T(k(.,x')) = k(.,x').
// Probes are drawn in the kernel's box shrunk by the operator's boundary
// margin.  Passed iff every probe satisfies the relative bound at `tol`.
InvarianceReport check_argumentwise_invariance(const PathOperator& T, const Kernel& k,
                                               int n_probe = 200, double tol = 1e-10,
                                               std::uint64_t seed = 1234);

// k_G(x,y) = (1/#G^2) sum_ij k(g_i(x), g_j(y)); argumentwise invariant under
// every element of G.
Kernel symmetrize_kernel(const Kernel& k, const GroupAction& g);

// Finite-difference residual checks for linear differential operators.
struct LinearDifferentialCheck {
  enum class Operator { kLaplacian, kOscillator /* L[y] = y'' + y */ };
  Operator op = Operator::kLaplacian;
  double h = 1e-3;
  int order = 2;  // 2 or 4
};

// Central-difference estimate of L[f](x).  Throws if the stencil exits the
// given box.
double fd_operator_residual(const LinearDifferentialCheck& check,
                            const std::function<double(const Vec&)>& f, const Vec& x,
                            const Box* box = nullptr);

}  // namespace invgp

#endif
