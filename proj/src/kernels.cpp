#include "invgp/kernels.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

namespace invgp {

using nlohmann::json;

namespace {

json box_to_json(const Box& b) {
  return json{{"lower", std::vector<double>(b.lower.data(), b.lower.data() + b.lower.size())},
              {"upper", std::vector<double>(b.upper.data(), b.upper.data() + b.upper.size())}};
}

void check_dims(const KernelImpl& k, const Vec& x, const Vec& y) {
  if (x.size() != k.dim() || y.size() != k.dim()) {
    throw std::invalid_argument("kernel eval: dimension mismatch (kernel dim " +
                                std::to_string(k.dim()) + ")");
  }
}

}  // namespace

Mat KernelImpl::cross(const Mat& X, const Mat& Y) const {
  if (X.cols() != dim_ || Y.cols() != dim_) {
    throw std::invalid_argument("kernel cross: dimension mismatch");
  }
  Mat K(X.rows(), Y.rows());
  for (int i = 0; i < X.rows(); ++i) {
    Vec xi = X.row(i).transpose();
    for (int j = 0; j < Y.rows(); ++j) {
      K(i, j) = eval(xi, Y.row(j).transpose());
    }
  }
  return K;
}

json KernelImpl::spec() const {
  throw std::runtime_error("kernel '" + name() + "' has no serializable spec");
}

double Kernel::operator()(const Vec& x, const Vec& y) const {
  check_dims(*impl_, x, y);
  return impl_->eval(x, y);
}

Mat Kernel::cross(const Mat& X, const Mat& Y) const { return impl_->cross(X, Y); }

json Kernel::spec() const { return impl_->spec(); }

GramMatrix gram(const Kernel& k, const Mat& points) {
  Mat K = k.cross(points, points);
  // Mirror the upper triangle so the stored matrix is bitwise symmetric.
  for (int i = 0; i < K.rows(); ++i) {
    for (int j = i + 1; j < K.cols(); ++j) K(j, i) = K(i, j);
  }
  return GramMatrix{std::move(K), points};
}

double min_eigenvalue(const Mat& K) {
  Eigen::SelfAdjointEigenSolver<Mat> es(K, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool min_eig_check(const GramMatrix& g, double tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(g.K, Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().minCoeff();
  double hi = es.eigenvalues().maxCoeff();
  return lo >= -tol * std::max(hi, 0.0);
}

// --- squared exponential ----------------------------------------------------

namespace {

class SqExpKernel final : public KernelImpl {
 public:
  SqExpKernel(double sigma2, Vec theta, Box domain)
      : KernelImpl(static_cast<int>(theta.size()), std::move(domain)),
        sigma2_(sigma2),
        theta_(std::move(theta)) {
    if (!(sigma2_ > 0.0)) throw std::invalid_argument("se kernel: sigma2 must be > 0");
    for (int i = 0; i < theta_.size(); ++i) {
      if (!(theta_[i] > 0.0)) throw std::invalid_argument("se kernel: lengthscales must be > 0");
    }
  }

  double eval(const Vec& x, const Vec& y) const override {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) {
      double d = (x[i] - y[i]) / theta_[i];
      s += d * d;
    }
    return sigma2_ * std::exp(-s);
  }

  Mat cross(const Mat& X, const Mat& Y) const override {
    Mat S = Mat::Zero(X.rows(), Y.rows());
    for (int c = 0; c < dim_; ++c) {
      Vec xc = X.col(c) / theta_[c];
      Vec yc = Y.col(c) / theta_[c];
      S.noalias() += (xc.array().square().matrix() * Eigen::RowVectorXd::Ones(Y.rows()) +
                      Vec::Ones(X.rows()) * yc.array().square().matrix().transpose() -
                      2.0 * xc * yc.transpose());
    }
    return sigma2_ * (-S.array()).exp();
  }

  json spec() const override {
    return json{{"type", "squared_exponential"},
                {"params",
                 {{"sigma2", sigma2_},
                  {"lengthscales", std::vector<double>(theta_.data(), theta_.data() + theta_.size())}}},
                {"domain", box_to_json(domain_)},
                {"children", json::array()}};
  }

  std::string name() const override { return "squared_exponential"; }

 private:
  double sigma2_;
  Vec theta_;
};

class ConstantKernel final : public KernelImpl {
 public:
  ConstantKernel(double value, Box domain)
      : KernelImpl(domain.dim(), domain), value_(value) {
    if (!(value_ >= 0.0)) throw std::invalid_argument("constant kernel: value must be >= 0");
  }

  double eval(const Vec&, const Vec&) const override { return value_; }

  Mat cross(const Mat& X, const Mat& Y) const override {
    return Mat::Constant(X.rows(), Y.rows(), value_);
  }

  json spec() const override {
    return json{{"type", "constant"},
                {"params", {{"value", value_}}},
                {"domain", box_to_json(domain_)},
                {"children", json::array()}};
  }

  std::string name() const override { return "constant"; }

 private:
  double value_;
};

class BrownianKernel final : public KernelImpl {
 public:
  explicit BrownianKernel(double horizon)
      : KernelImpl(1, Box::cube(1, 0.0, horizon)) {}

  double eval(const Vec& x, const Vec& y) const override {
    return std::min(x[0], y[0]);
  }

  json spec() const override {
    return json{{"type", "brownian"},
                {"params", json::object()},
                {"domain", box_to_json(domain_)},
                {"children", json::array()}};
  }

  std::string name() const override { return "brownian"; }
};

// Polar coordinates with the angle folded into [0, pi/2).  At the origin the
// angle is set to 0; the kernel value there is 0 either way.
void polar_folded(const Vec& x, double& rho, double& ang) {
  rho = std::hypot(x[0], x[1]);
  if (rho == 0.0) {
    ang = 0.0;
    return;
  }
  double th = std::atan2(x[1], x[0]);
  const double two_pi = 2.0 * std::numbers::pi;
  th = std::fmod(th, two_pi);
  if (th < 0.0) th += two_pi;
  ang = std::fmod(th, std::numbers::pi / 2.0);
}

class PolarSheetKernel final : public KernelImpl {
 public:
  PolarSheetKernel() : KernelImpl(2, Box::cube(2, -1.0, 1.0)) {}

  double eval(const Vec& x, const Vec& y) const override {
    double rx, ax, ry, ay;
    polar_folded(x, rx, ax);
    polar_folded(y, ry, ay);
    return std::min(rx * std::cos(ax), ry * std::cos(ay)) *
           std::min(rx * std::sin(ax), ry * std::sin(ay));
  }

  json spec() const override {
    return json{{"type", "polar_sheet"},
                {"params", json::object()},
                {"domain", box_to_json(domain_)},
                {"children", json::array()}};
  }

  std::string name() const override { return "polar_sheet"; }
};

class PolarRadialKernel final : public KernelImpl {
 public:
  PolarRadialKernel() : KernelImpl(2, Box::cube(2, -1.0, 1.0)) {}

  double eval(const Vec& x, const Vec& y) const override {
    return std::min(std::hypot(x[0], x[1]), std::hypot(y[0], y[1]));
  }

  json spec() const override {
    return json{{"type", "polar_radial"},
                {"params", json::object()},
                {"domain", box_to_json(domain_)},
                {"children", json::array()}};
  }

  std::string name() const override { return "polar_radial"; }
};

class ClosureKernel final : public KernelImpl {
 public:
  ClosureKernel(int dim, Box domain, std::function<double(const Vec&, const Vec&)> fn,
                std::string label)
      : KernelImpl(dim, std::move(domain)), fn_(std::move(fn)), label_(std::move(label)) {}

  double eval(const Vec& x, const Vec& y) const override { return fn_(x, y); }
  std::string name() const override { return label_; }

 private:
  std::function<double(const Vec&, const Vec&)> fn_;
  std::string label_;
};

void require_same_domain(const Kernel& a, const Kernel& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

class SumKernel final : public KernelImpl {
 public:
  explicit SumKernel(std::vector<Kernel> terms)
      : KernelImpl(terms.at(0).dim(), terms.at(0).domain()), terms_(std::move(terms)) {
    for (const auto& t : terms_) require_same_domain(terms_[0], t, "sum kernel");
  }

  double eval(const Vec& x, const Vec& y) const override {
    double s = 0.0;
    for (const auto& t : terms_) s += t(x, y);
    return s;
  }

  Mat cross(const Mat& X, const Mat& Y) const override {
    Mat K = terms_[0].cross(X, Y);
    for (std::size_t i = 1; i < terms_.size(); ++i) K += terms_[i].cross(X, Y);
    return K;
  }

  json spec() const override {
    json children = json::array();
    for (const auto& t : terms_) children.push_back(t.spec());
    return json{{"type", "sum"},
                {"params", json::object()},
                {"domain", box_to_json(domain_)},
                {"children", children}};
  }

  std::string name() const override { return "sum"; }

 private:
  std::vector<Kernel> terms_;
};

class ProductKernel final : public KernelImpl {
 public:
  explicit ProductKernel(std::vector<Kernel> factors)
      : KernelImpl(factors.at(0).dim(), factors.at(0).domain()),
        factors_(std::move(factors)) {
    for (const auto& f : factors_) require_same_domain(factors_[0], f, "product kernel");
  }

  double eval(const Vec& x, const Vec& y) const override {
    double p = 1.0;
    for (const auto& f : factors_) p *= f(x, y);
    return p;
  }

  Mat cross(const Mat& X, const Mat& Y) const override {
    Mat K = factors_[0].cross(X, Y);
    for (std::size_t i = 1; i < factors_.size(); ++i) {
      K = K.cwiseProduct(factors_[i].cross(X, Y));
    }
    return K;
  }

  json spec() const override {
    json children = json::array();
    for (const auto& f : factors_) children.push_back(f.spec());
    return json{{"type", "product"},
                {"params", json::object()},
                {"domain", box_to_json(domain_)},
                {"children", children}};
  }

  std::string name() const override { return "product"; }

 private:
  std::vector<Kernel> factors_;
};

class ScaledKernel final : public KernelImpl {
 public:
  ScaledKernel(double c, Kernel base)
      : KernelImpl(base.dim(), base.domain()), c_(c), base_(std::move(base)) {
    if (!(c_ >= 0.0)) throw std::invalid_argument("scale: factor must be >= 0");
  }

  double eval(const Vec& x, const Vec& y) const override { return c_ * base_(x, y); }

  Mat cross(const Mat& X, const Mat& Y) const override {
    return c_ * base_.cross(X, Y);
  }

  json spec() const override {
    return json{{"type", "scale"},
                {"params", {{"factor", c_}}},
                {"domain", box_to_json(domain_)},
                {"children", json::array({base_.spec()})}};
  }

  std::string name() const override { return "scale"; }

 private:
  double c_;
  Kernel base_;
};

class CoordinateLiftKernel final : public KernelImpl {
 public:
  CoordinateLiftKernel(Kernel base1d, int index, Box domain)
      : KernelImpl(domain.dim(), domain),
        base_(std::move(base1d)),
        index_(index) {
    if (base_.dim() != 1) throw std::invalid_argument("lift: base kernel must be 1-D");
    if (index_ < 0 || index_ >= dim_) throw std::invalid_argument("lift: bad coordinate index");
  }

  double eval(const Vec& x, const Vec& y) const override {
    Vec xs(1), ys(1);
    xs[0] = x[index_];
    ys[0] = y[index_];
    return base_(xs, ys);
  }

  Mat cross(const Mat& X, const Mat& Y) const override {
    return base_.cross(X.col(index_), Y.col(index_));
  }

  json spec() const override {
    return json{{"type", "coordinate_lift"},
                {"params", {{"index", index_}}},
                {"domain", box_to_json(domain_)},
                {"children", json::array({base_.spec()})}};
  }

  std::string name() const override { return "coordinate_lift"; }

 private:
  Kernel base_;
  int index_;
};

class CenteredKernel final : public KernelImpl {
 public:
  CenteredKernel(Kernel base, QuadratureMeasure nu)
      : KernelImpl(base.dim(), base.domain()), base_(std::move(base)), nu_(std::move(nu)) {
    if (nu_.dim() != dim_) {
      throw std::invalid_argument("centered kernel: measure dimension mismatch");
    }
    Mat node_cross = base_.cross(nu_.nodes, nu_.nodes);
    node_means_ = node_cross * nu_.weights;                    // m(u) at nodes
    double_integral_ = nu_.weights.dot(node_means_);           // c
  }

  double mean_embed(const Vec& x) const {
    Mat xr(1, dim_);
    xr.row(0) = x.transpose();
    return (base_.cross(xr, nu_.nodes) * nu_.weights)(0, 0);
  }

  double eval(const Vec& x, const Vec& y) const override {
    return base_(x, y) - mean_embed(x) - mean_embed(y) + double_integral_;
  }

  Mat cross(const Mat& X, const Mat& Y) const override {
    Mat K = base_.cross(X, Y);
    Vec mx = base_.cross(X, nu_.nodes) * nu_.weights;
    Vec my = base_.cross(Y, nu_.nodes) * nu_.weights;
    K.colwise() -= mx;
    K.rowwise() -= my.transpose();
    K.array() += double_integral_;
    return K;
  }

  json spec() const override {
    std::vector<std::vector<double>> nodes(nu_.size());
    for (int i = 0; i < nu_.size(); ++i) {
      nodes[i].assign(nu_.nodes.row(i).data(), nu_.nodes.row(i).data() + nu_.dim());
    }
    return json{{"type", "centered"},
                {"params",
                 {{"nodes", nodes},
                  {"weights", std::vector<double>(nu_.weights.data(),
                                                  nu_.weights.data() + nu_.size())}}},
                {"domain", box_to_json(domain_)},
                {"children", json::array({base_.spec()})}};
  }

  std::string name() const override { return "centered"; }

  const QuadratureMeasure& measure() const { return nu_; }

 private:
  Kernel base_;
  QuadratureMeasure nu_;
  Vec node_means_;
  double double_integral_ = 0.0;
};

class AdditiveBlockKernel final : public KernelImpl {
 public:
  AdditiveBlockKernel(std::vector<std::vector<Kernel>> blocks, Box domain)
      : KernelImpl(domain.dim(), domain), blocks_(std::move(blocks)) {
    if (static_cast<int>(blocks_.size()) != dim_) {
      throw std::invalid_argument("additive kernel: blocks must be d x d");
    }
    for (const auto& row : blocks_) {
      if (static_cast<int>(row.size()) != dim_) {
        throw std::invalid_argument("additive kernel: blocks must be d x d");
      }
      for (const auto& b : row) {
        if (b.valid() && b.dim() != 1) {
          throw std::invalid_argument("additive kernel: blocks must be 1-D kernels");
        }
      }
    }
  }

  double eval(const Vec& x, const Vec& y) const override {
    double s = 0.0;
    Vec xs(1), ys(1);
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) {
        if (!blocks_[i][j].valid()) continue;
        xs[0] = x[i];
        ys[0] = y[j];
        s += blocks_[i][j](xs, ys);
      }
    }
    return s;
  }

  Mat cross(const Mat& X, const Mat& Y) const override {
    Mat K = Mat::Zero(X.rows(), Y.rows());
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) {
        if (!blocks_[i][j].valid()) continue;
        K += blocks_[i][j].cross(X.col(i), Y.col(j));
      }
    }
    return K;
  }

  json spec() const override {
    json children = json::array();
    json layout = json::array();
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) {
        if (!blocks_[i][j].valid()) continue;
        children.push_back(blocks_[i][j].spec());
        layout.push_back(json::array({i, j}));
      }
    }
    return json{{"type", "additive_blocks"},
                {"params", {{"layout", layout}}},
                {"domain", box_to_json(domain_)},
                {"children", children}};
  }

  std::string name() const override { return "additive_blocks"; }

 private:
  std::vector<std::vector<Kernel>> blocks_;
};

class OdeSpanKernel final : public KernelImpl {
 public:
  OdeSpanKernel(Mat sigma, double a, double b)
      : KernelImpl(1, Box(Vec::Constant(1, a), Vec::Constant(1, b))),
        sigma_(std::move(sigma)) {
    if (sigma_.rows() != 2 || sigma_.cols() != 2) {
      throw std::invalid_argument("ode span kernel: Sigma must be 2x2");
    }
    if (std::abs(sigma_(0, 1) - sigma_(1, 0)) > 1e-12 * (1.0 + sigma_.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument("ode span kernel: Sigma must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(sigma_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12) {
      throw std::invalid_argument("ode span kernel: Sigma must be PSD");
    }
  }

  double eval(const Vec& x, const Vec& y) const override {
    Eigen::Vector2d fs(std::cos(x[0]), std::sin(x[0]));
    Eigen::Vector2d ft(std::cos(y[0]), std::sin(y[0]));
    return fs.dot(sigma_ * ft);
  }

  Mat cross(const Mat& X, const Mat& Y) const override {
    Mat FX(X.rows(), 2), FY(Y.rows(), 2);
    FX.col(0) = X.col(0).array().cos();
    FX.col(1) = X.col(0).array().sin();
    FY.col(0) = Y.col(0).array().cos();
    FY.col(1) = Y.col(0).array().sin();
    return FX * sigma_ * FY.transpose();
  }

  json spec() const override {
    return json{{"type", "ode_span"},
                {"params",
                 {{"sigma", {{sigma_(0, 0), sigma_(0, 1)}, {sigma_(1, 0), sigma_(1, 1)}}}}},
                {"domain", box_to_json(domain_)},
                {"children", json::array()}};
  }

  std::string name() const override { return "ode_span"; }

 private:
  Mat sigma_;
};

class HarmonicKernel final : public KernelImpl {
 public:
  explicit HarmonicKernel(double theta)
      : KernelImpl(2, Box::cube(2, -1.0, 1.0)), theta2_(theta * theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("harmonic kernel: theta must be > 0");
  }

  double eval(const Vec& x, const Vec& y) const override {
    double dot = (x[0] * y[0] + x[1] * y[1]) / theta2_;
    double crossp = (x[1] * y[0] - x[0] * y[1]) / theta2_;
    return std::exp(dot) * std::cos(crossp);
  }

  json spec() const override {
    return json{{"type", "harmonic"},
                {"params", {{"theta", std::sqrt(theta2_)}}},
                {"domain", box_to_json(domain_)},
                {"children", json::array()}};
  }

  std::string name() const override { return "harmonic"; }

 private:
  double theta2_;
};

}  // namespace

Kernel make_se_kernel(double sigma2, const Vec& lengthscales, const Box& domain) {
  if (domain.dim() != lengthscales.size()) {
    throw std::invalid_argument("se kernel: domain/lengthscale dimension mismatch");
  }
  return Kernel(std::make_shared<SqExpKernel>(sigma2, lengthscales, domain));
}

Kernel make_se_kernel_1d(double sigma2, double theta, double a, double b) {
  return make_se_kernel(sigma2, Vec::Constant(1, theta), Box(Vec::Constant(1, a), Vec::Constant(1, b)));
}

Kernel make_constant_kernel(double value, const Box& domain) {
  return Kernel(std::make_shared<ConstantKernel>(value, domain));
}

Kernel make_brownian_kernel(double horizon) {
  return Kernel(std::make_shared<BrownianKernel>(horizon));
}

std::pair<Kernel, Kernel> make_polar_kernels() {
  return {Kernel(std::make_shared<PolarSheetKernel>()),
          Kernel(std::make_shared<PolarRadialKernel>())};
}

Kernel make_kernel_from_function(int dim, const Box& domain,
                                 std::function<double(const Vec&, const Vec&)> fn,
                                 const std::string& label) {
  return Kernel(std::make_shared<ClosureKernel>(dim, domain, std::move(fn), label));
}

Kernel add(const Kernel& a, const Kernel& b) { return add(std::vector<Kernel>{a, b}); }

Kernel add(const std::vector<Kernel>& terms) {
  return Kernel(std::make_shared<SumKernel>(terms));
}

Kernel mul(const Kernel& a, const Kernel& b) { return mul(std::vector<Kernel>{a, b}); }

Kernel mul(const std::vector<Kernel>& factors) {
  return Kernel(std::make_shared<ProductKernel>(factors));
}

Kernel scale(double c, const Kernel& k) {
  return Kernel(std::make_shared<ScaledKernel>(c, k));
}

Kernel shift_mean_embed(double c, const Kernel& k) {
  return add(make_constant_kernel(c, k.domain()), k);
}

Kernel lift_to_coordinate(const Kernel& base1d, int index, const Box& domain) {
  return Kernel(std::make_shared<CoordinateLiftKernel>(base1d, index, domain));
}

Kernel make_centered_kernel(const Kernel& k, const QuadratureMeasure& nu,
                            bool allow_unnormalized) {
  if (!nu.is_probability()) {
    if (!allow_unnormalized) {
      throw std::invalid_argument(
          "centered kernel: measure is not a probability measure "
          "(pass allow_unnormalized to normalize internally)");
    }
    return Kernel(std::make_shared<CenteredKernel>(k, nu.normalized()));
  }
  return Kernel(std::make_shared<CenteredKernel>(k, nu));
}

Kernel make_additive_kernel(const std::vector<std::vector<Kernel>>& blocks,
                            const Box& domain) {
  Kernel k(std::make_shared<AdditiveBlockKernel>(blocks, domain));
  // Blocks being individually PSD is not sufficient; check the assembly.
  Mat probe = uniform_points(domain, 30, 0x5eedULL);
  GramMatrix g = gram(k, probe);
  Eigen::SelfAdjointEigenSolver<Mat> es(g.K, Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().minCoeff();
  double hi = std::max(es.eigenvalues().maxCoeff(), 0.0);
  if (lo < -1e-8 * std::max(hi, 1e-300)) {
    throw std::invalid_argument("additive kernel: empirical PSD check failed, lambda_min = " +
                                std::to_string(lo));
  }
  return k;
}

Kernel make_ode_span_kernel(const Mat& sigma, double a, double b) {
  return Kernel(std::make_shared<OdeSpanKernel>(sigma, a, b));
}

Kernel make_harmonic_kernel(double theta) {
  return Kernel(std::make_shared<HarmonicKernel>(theta));
}

}  // namespace invgp
