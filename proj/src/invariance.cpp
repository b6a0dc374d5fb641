#include "invgp/invariance.hpp"

#include <cmath>

namespace invgp {

std::function<double(const Vec&)> apply_T_to_kernel_arg(const PathOperator& T,
                                                        const Kernel& k,
                                                        const Vec& xprime) {
  const PathOperator* op = &T;
  return [op, k, xprime](const Vec& x) {
    auto section = [&k, &xprime](const Vec& u) { return k(u, xprime); };
    return op->apply(section, x);
  };
}

InvarianceReport check_argumentwise_invariance(const PathOperator& T, const Kernel& k,
                                               int n_probe, double tol,
                                               std::uint64_t seed) {
  if (n_probe < 1) throw std::invalid_argument("check_argumentwise_invariance: n_probe >= 1");
  const Box& box = k.domain();
  double margin = T.boundary_margin();
  Box probe_box = box;
  if (margin > 0.0) {
    Vec lo = box.lower.array() + 2.0 * margin;
    Vec up = box.upper.array() - 2.0 * margin;
    probe_box = Box(lo, up);
  }
  std::mt19937_64 rng(splitmix64(seed));
  InvarianceReport rep;
  rep.n_probe = n_probe;
  rep.passed = true;
  for (int i = 0; i < n_probe; ++i) {
    Vec x = probe_box.sample(rng);
    Vec xp = box.sample(rng);
    auto section = [&](const Vec& u) { return k(u, xp); };
    double lhs = T.apply(section, x);
    double ref = k(x, xp);
    double viol = std::abs(lhs - ref);
    double rel = viol / (1.0 + std::abs(ref));
    rep.max_violation = std::max(rep.max_violation, viol);
    rep.max_relative = std::max(rep.max_relative, rel);
    if (rel > tol) rep.passed = false;
  }
  return rep;
}

namespace {

class SymmetrizedKernel final : public KernelImpl {
 public:
  SymmetrizedKernel(Kernel base, GroupAction group)
      : KernelImpl(base.dim(), base.domain()),
        base_(std::move(base)),
        group_(std::move(group)) {}

  double eval(const Vec& x, const Vec& y) const override {
    int m = group_.size();
    double s = 0.0;
    for (const auto& gi : group_.elements) {
      Vec gx = gi(x);
      for (const auto& gj : group_.elements) {
        s += base_(gx, gj(y));
      }
    }
    return s / (static_cast<double>(m) * m);
  }

  Mat cross(const Mat& X, const Mat& Y) const override {
    int m = group_.size();
    Mat K = Mat::Zero(X.rows(), Y.rows());
    Mat GX(X.rows(), dim_), GY(Y.rows(), dim_);
    for (const auto& gi : group_.elements) {
      for (int r = 0; r < X.rows(); ++r) GX.row(r) = gi(X.row(r).transpose()).transpose();
      for (const auto& gj : group_.elements) {
        for (int r = 0; r < Y.rows(); ++r) GY.row(r) = gj(Y.row(r).transpose()).transpose();
        K += base_.cross(GX, GY);
      }
    }
    return K / (static_cast<double>(m) * m);
  }

  nlohmann::json spec() const override {
    nlohmann::json symbols = nlohmann::json::array();
    for (const auto& g : group_.elements) {
      if (!g.serializable()) {
        return KernelImpl::spec();  // throws
      }
      symbols.push_back(g.spec);
    }
    return nlohmann::json{{"type", "symmetrized"},
                          {"params", {{"symbols", symbols}}},
                          {"domain",
                           {{"lower", std::vector<double>(domain_.lower.data(),
                                                          domain_.lower.data() + dim_)},
                            {"upper", std::vector<double>(domain_.upper.data(),
                                                          domain_.upper.data() + dim_)}}},
                          {"children", nlohmann::json::array({base_.spec()})}};
  }

  std::string name() const override { return "symmetrized"; }

 private:
  Kernel base_;
  GroupAction group_;
};

}  // namespace

Kernel symmetrize_kernel(const Kernel& k, const GroupAction& g) {
  return Kernel(std::make_shared<SymmetrizedKernel>(k, g));
}

double fd_operator_residual(const LinearDifferentialCheck& check,
                            const std::function<double(const Vec&)>& f, const Vec& x,
                            const Box* box) {
  double reach = (check.order == 4 ? 2.0 : 1.0) * check.h;
  if (box != nullptr) {
    for (int i = 0; i < x.size(); ++i) {
      if (x[i] - 2.0 * reach < box->lower[i] || x[i] + 2.0 * reach > box->upper[i]) {
        throw std::domain_error("fd_operator_residual: stencil exits domain");
      }
    }
  }
  auto d2 = [&](int axis) {
    Vec xp = x, xm = x;
    xp[axis] += check.h;
    xm[axis] -= check.h;
    double v = (f(xp) - 2.0 * f(x) + f(xm)) / (check.h * check.h);
    if (check.order == 2) return v;
    Vec xpp = x, xmm = x;
    xpp[axis] += 2.0 * check.h;
    xmm[axis] -= 2.0 * check.h;
    return (-f(xpp) + 16.0 * f(xp) - 30.0 * f(x) + 16.0 * f(xm) - f(xmm)) /
           (12.0 * check.h * check.h);
  };
  if (check.op == LinearDifferentialCheck::Operator::kOscillator) {
    return d2(0) + f(x);
  }
  double lap = 0.0;
  for (int axis = 0; axis < x.size(); ++axis) lap += d2(axis);
  return lap;
}

}  // namespace invgp
