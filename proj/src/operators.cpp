#include "invgp/operators.hpp"

#include <cmath>
#include <numbers>

namespace invgp {

using nlohmann::json;

SymbolMap identity_symbol(int dim) {
  return SymbolMap{[](const Vec& x) { return x; },
                   "identity",
                   json{{"type", "identity"}, {"dim", dim}}};
}

SymbolMap rotation_symbol(double angle) {
  double c = std::cos(angle), s = std::sin(angle);
  return SymbolMap{[c, s](const Vec& x) {
                     Vec y(2);
                     y[0] = c * x[0] - s * x[1];
                     y[1] = s * x[0] + c * x[1];
                     return y;
                   },
                   "rotation(" + std::to_string(angle) + ")",
                   json{{"type", "rotation"}, {"angle", angle}}};
}

SymbolMap negation_symbol(int dim) {
  return SymbolMap{[](const Vec& x) { return Vec(-x); },
                   "negation",
                   json{{"type", "negation"}, {"dim", dim}}};
}

SymbolMap coordinate_slot_symbol(int index, const Vec& anchor) {
  std::vector<double> a(anchor.data(), anchor.data() + anchor.size());
  return SymbolMap{[index, anchor](const Vec& x) {
                     Vec y = anchor;
                     y[index] = x[index];
                     return y;
                   },
                   "coordinate_slot(" + std::to_string(index) + ")",
                   json{{"type", "coordinate_slot"}, {"index", index}, {"anchor", a}}};
}

SymbolMap constant_symbol(const Vec& anchor) {
  std::vector<double> a(anchor.data(), anchor.data() + anchor.size());
  return SymbolMap{[anchor](const Vec&) { return anchor; },
                   "constant",
                   json{{"type", "constant"}, {"anchor", a}}};
}

CompositionCombination::CompositionCombination(std::vector<SymbolMap> symbols, Vec weights)
    : symbols_(std::move(symbols)), weights_(std::move(weights)) {
  if (symbols_.empty() || static_cast<int>(symbols_.size()) != weights_.size()) {
    throw std::invalid_argument("composition combination: symbol/weight count mismatch");
  }
  for (int i = 0; i < weights_.size(); ++i) {
    if (!std::isfinite(weights_[i])) {
      throw std::invalid_argument("composition combination: weights must be finite");
    }
  }
}

double CompositionCombination::apply(const std::function<double(const Vec&)>& f,
                                     const Vec& x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    s += weights_[static_cast<int>(i)] * f(symbols_[i](x));
  }
  return s;
}

double CompositionCombination::apply_checked(const std::function<double(const Vec&)>& f,
                                             const Vec& x, const Box& box,
                                             double slack) const {
  double s = 0.0;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    Vec img = symbols_[i](x);
    if (!box.contains(img, slack)) {
      throw std::domain_error("composition combination: symbol '" + symbols_[i].label +
                              "' maps point out of domain");
    }
    s += weights_[static_cast<int>(i)] * f(img);
  }
  return s;
}

json CompositionCombination::spec() const {
  json symbols = json::array();
  for (const auto& v : symbols_) {
    if (!v.serializable()) {
      throw std::runtime_error("composition combination: symbol '" + v.label +
                               "' is not serializable");
    }
    symbols.push_back(v.spec);
  }
  return json{{"op", "composition_combination"},
              {"symbols", symbols},
              {"weights", std::vector<double>(weights_.data(), weights_.data() + weights_.size())}};
}

CenteringOperator::CenteringOperator(QuadratureMeasure nu) : nu_(std::move(nu)) {
  if (!nu_.is_probability()) nu_ = nu_.normalized();
}

double CenteringOperator::apply(const std::function<double(const Vec&)>& f,
                                const Vec& x) const {
  double integral = 0.0;
  for (int i = 0; i < nu_.size(); ++i) {
    integral += nu_.weights[i] * f(nu_.nodes.row(i).transpose());
  }
  return f(x) - integral;
}

DifferentialPathOperator::DifferentialPathOperator(Tag tag, double h, int order)
    : tag_(tag), h_(h), order_(order) {
  if (!(h_ > 0.0)) throw std::invalid_argument("differential operator: h must be > 0");
  if (order_ != 2 && order_ != 4) {
    throw std::invalid_argument("differential operator: order must be 2 or 4");
  }
}

namespace {

double second_derivative(const std::function<double(const Vec&)>& f, const Vec& x,
                         int axis, double h, int order) {
  Vec xp = x, xm = x;
  xp[axis] += h;
  xm[axis] -= h;
  double d2 = (f(xp) - 2.0 * f(x) + f(xm)) / (h * h);
  if (order == 2) return d2;
  Vec xpp = x, xmm = x;
  xpp[axis] += 2.0 * h;
  xmm[axis] -= 2.0 * h;
  // 4th order: (-f(x+2h) + 16 f(x+h) - 30 f(x) + 16 f(x-h) - f(x-2h)) / 12h^2
  return (-f(xpp) + 16.0 * f(xp) - 30.0 * f(x) + 16.0 * f(xm) - f(xmm)) / (12.0 * h * h);
}

}  // namespace

double DifferentialPathOperator::apply(const std::function<double(const Vec&)>& f,
                                       const Vec& x) const {
  switch (tag_) {
    case Tag::kNegSecondDerivative:
      return -second_derivative(f, x, 0, h_, order_);
    case Tag::kLaplacianShift: {
      double lap = 0.0;
      for (int axis = 0; axis < x.size(); ++axis) {
        lap += second_derivative(f, x, axis, h_, order_);
      }
      return f(x) + lap;
    }
  }
  return 0.0;
}

std::string DifferentialPathOperator::name() const {
  return tag_ == Tag::kNegSecondDerivative ? "neg_second_derivative" : "laplacian_shift";
}

GroupAction make_group_action(std::vector<SymbolMap> elements, const Box& box,
                              int n_samples, double tol, std::uint64_t seed) {
  if (elements.empty()) throw std::invalid_argument("group action: empty element list");
  std::mt19937_64 rng(splitmix64(seed));
  std::vector<Vec> probes;
  for (int s = 0; s < n_samples; ++s) probes.push_back(box.sample(rng));

  // Identity present?
  bool has_identity = false;
  for (const auto& g : elements) {
    bool ok = true;
    for (const auto& x : probes) {
      if ((g(x) - x).cwiseAbs().maxCoeff() > tol) {
        ok = false;
        break;
      }
    }
    if (ok) {
      has_identity = true;
      break;
    }
  }
  if (!has_identity) {
    throw std::invalid_argument("group action: no identity element found");
  }

  // Sampled closure: g_i o g_j must coincide with some g_k on every probe.
  for (const auto& gi : elements) {
    for (const auto& gj : elements) {
      bool closed = false;
      for (const auto& gk : elements) {
        bool all_match = true;
        for (const auto& x : probes) {
          if ((gi(gj(x)) - gk(x)).cwiseAbs().maxCoeff() > tol) {
            all_match = false;
            break;
          }
        }
        if (all_match) {
          closed = true;
          break;
        }
      }
      if (!closed) {
        throw std::invalid_argument("group action: sampled closure check failed for " +
                                    gi.label + " o " + gj.label);
      }
    }
  }
  return GroupAction{std::move(elements)};
}

GroupAction rotation_group(int n, int) {
  std::vector<SymbolMap> elems;
  for (int i = 0; i < n; ++i) {
    elems.push_back(rotation_symbol(2.0 * std::numbers::pi * i / n));
  }
  // Rotations preserve radius, so closure sampling on any centred box works.
  return make_group_action(std::move(elems), Box::cube(2, -1.0, 1.0));
}

CompositionCombination additivity_operator(const Vec& anchor) {
  int d = static_cast<int>(anchor.size());
  std::vector<SymbolMap> symbols;
  Vec weights(d + 1);
  for (int i = 0; i < d; ++i) {
    symbols.push_back(coordinate_slot_symbol(i, anchor));
    weights[i] = 1.0;
  }
  symbols.push_back(constant_symbol(anchor));
  weights[d] = -(d - 1.0);
  return CompositionCombination(std::move(symbols), std::move(weights));
}

double apply_T_to_function(const CompositionCombination& T,
                           const std::function<double(const Vec&)>& f, const Vec& x) {
  return T.apply(f, x);
}

Mat orbit_closure(const Mat& seed_points, const std::vector<SymbolMap>& symbols,
                  double match_tol, int max_points) {
  std::vector<Vec> pts;
  auto contains = [&](const Vec& p) {
    for (const auto& q : pts) {
      if ((p - q).cwiseAbs().maxCoeff() <= match_tol) return true;
    }
    return false;
  };
  for (int i = 0; i < seed_points.rows(); ++i) {
    Vec p = seed_points.row(i).transpose();
    if (!contains(p)) pts.push_back(p);
  }
  std::size_t frontier_begin = 0;
  while (frontier_begin < pts.size()) {
    std::size_t frontier_end = pts.size();
    for (std::size_t i = frontier_begin; i < frontier_end; ++i) {
      for (const auto& v : symbols) {
        Vec img = v(pts[i]);
        if (!contains(img)) {
          pts.push_back(img);
          if (static_cast<int>(pts.size()) > max_points) {
            throw std::runtime_error("orbit_closure: orbit exceeds max_points");
          }
        }
      }
    }
    frontier_begin = frontier_end;
  }
  Mat out(static_cast<int>(pts.size()), seed_points.cols());
  for (std::size_t i = 0; i < pts.size(); ++i) out.row(static_cast<int>(i)) = pts[i].transpose();
  return out;
}

}  // namespace invgp
