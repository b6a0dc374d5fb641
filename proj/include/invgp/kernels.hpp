#ifndef INVGP_KERNELS_HPP
#define INVGP_KERNELS_HPP

#include <functional>
#include <memory>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "invgp/common.hpp"
#include "invgp/quadrature.hpp"

namespace invgp {

// Implementation side of a covariance kernel.  Kernels are immutable after
// construction and evaluation is pure, so instances can be shared freely
// across threads.
class KernelImpl {
 public:
  KernelImpl(int dim, Box domain) : dim_(dim), domain_(std::move(domain)) {}
  virtual ~KernelImpl() = default;

  virtual double eval(const Vec& x, const Vec& y) const = 0;

  // Matrix of k(X_i, Y_j).  The default loops over eval; structured kernels
  // override it with a batched path (this is what makes Gram assembly for
  // the composite experiment kernels affordable).
  virtual Mat cross(const Mat& X, const Mat& Y) const;

  // JSON spec {type, params, domain, children[]}.  Throws for kernels built
  // from opaque closures.
  virtual nlohmann::json spec() const;

  virtual std::string name() const = 0;

  int dim() const { return dim_; }
  const Box& domain() const { return domain_; }

 protected:
  int dim_;
  Box domain_;
};

// Value-semantics handle.
class Kernel {
 public:
  Kernel() = default;
  explicit Kernel(std::shared_ptr<const KernelImpl> impl) : impl_(std::move(impl)) {}

  double operator()(const Vec& x, const Vec& y) const;
  Mat cross(const Mat& X, const Mat& Y) const;

  int dim() const { return impl_->dim(); }
  const Box& domain() const { return impl_->domain(); }
  std::string name() const { return impl_->name(); }
  nlohmann::json spec() const;
  const std::shared_ptr<const KernelImpl>& impl() const { return impl_; }
  bool valid() const { return impl_ != nullptr; }

 private:
  std::shared_ptr<const KernelImpl> impl_;
};

struct GramMatrix {
  Mat K;
  Mat points;
};

GramMatrix gram(const Kernel& k, const Mat& points);

// True iff lambda_min(G) >= -tol * max(lambda_max(G), 0).
bool min_eig_check(const GramMatrix& g, double tol);
double min_eigenvalue(const Mat& K);

// --- base kernels -----------------------------------------------------------

// k(x,y) = sigma2 * prod_i exp(-(x_i - y_i)^2 / theta_i^2).  Note: no 1/2
// factor in the exponent.
Kernel make_se_kernel(double sigma2, const Vec& lengthscales, const Box& domain);
Kernel make_se_kernel_1d(double sigma2, double theta, double a, double b);

Kernel make_constant_kernel(double value, const Box& domain);

// 1-D Brownian motion covariance min(s,t) on [0, horizon].
Kernel make_brownian_kernel(double horizon = 1.0);

// Polar kernels on [-1,1]^2: Brownian-sheet pullback (invariant under
// rotations by multiples of pi/2) and the radial Brownian kernel
// min(rho_x, rho_y) (invariant under all rotations).
std::pair<Kernel, Kernel> make_polar_kernels();

// Kernel from an arbitrary closure; not serializable.
Kernel make_kernel_from_function(
    int dim, const Box& domain,
    std::function<double(const Vec&, const Vec&)> fn,
    const std::string& label = "closure");

// --- algebra ----------------------------------------------------------------

Kernel add(const Kernel& a, const Kernel& b);
Kernel add(const std::vector<Kernel>& terms);
Kernel mul(const Kernel& a, const Kernel& b);
Kernel mul(const std::vector<Kernel>& factors);
Kernel scale(double c, const Kernel& k);
// Adds a constant kernel c >= 0 (bias term).
Kernel shift_mean_embed(double c, const Kernel& k);

// Applies a 1-D kernel to coordinate `index` of points in `domain`.
Kernel lift_to_coordinate(const Kernel& base1d, int index, const Box& domain);

// Argumentwise centering: k0 = k - m(x) - m(y) + c with m, c the quadrature
// integrals of k against nu.  nu must be a probability measure unless
// allow_unnormalized is set, in which case it is normalized internally (the
// centered kernel only depends on nu up to its total mass).
Kernel make_centered_kernel(const Kernel& k, const QuadratureMeasure& nu,
                            bool allow_unnormalized = false);

// k(x,y) = sum_ij blocks[i][j](x_i, y_j).  blocks must be d x d of 1-D
// kernels (empty entries treated as zero).  The assembled kernel must pass an
// empirical PSD check; throws with the offending eigenvalue otherwise.
Kernel make_additive_kernel(const std::vector<std::vector<Kernel>>& blocks,
                            const Box& domain);

// k(s,t) = (cos s, sin s) Sigma (cos t, sin t)^T; sections solve y'' + y = 0.
Kernel make_ode_span_kernel(const Mat& sigma, double a = 0.0,
                            double b = 2.0 * 3.14159265358979323846);

// k(x,y) = exp((x.y)/theta^2) cos((x2 y1 - x1 y2)/theta^2) on [-1,1]^2;
// argumentwise harmonic.
Kernel make_harmonic_kernel(double theta = 1.0);

}  // namespace invgp

#endif
