#include "invgp/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace invgp {

QuadratureMeasure::QuadratureMeasure(Mat n, Vec w)
    : nodes(std::move(n)), weights(std::move(w)) {
  if (nodes.rows() != weights.size()) {
    throw std::invalid_argument("QuadratureMeasure: node/weight count mismatch");
  }
  for (int i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw std::invalid_argument("QuadratureMeasure: weights must be >= 0");
    }
  }
}

QuadratureMeasure QuadratureMeasure::normalized() const {
  double m = total_mass();
  if (m <= 0.0) throw std::invalid_argument("QuadratureMeasure: zero mass");
  return QuadratureMeasure(nodes, weights / m);
}

QuadratureMeasure QuadratureMeasure::uniform_1d(double a, double b, int n,
                                                bool normalize) {
  if (n < 1 || !(a < b)) throw std::invalid_argument("uniform_1d: bad arguments");
  Mat nodes(n, 1);
  double h = (b - a) / n;
  for (int i = 0; i < n; ++i) nodes(i, 0) = a + (i + 0.5) * h;
  double w = normalize ? 1.0 / n : h;
  return QuadratureMeasure(nodes, Vec::Constant(n, w));
}

void gauss_legendre_nodes(int n, Vec& nodes, Vec& weights) {
  // Newton iteration on Legendre polynomials, standard construction.
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

QuadratureMeasure QuadratureMeasure::gauss_legendre_1d(double a, double b, int n,
                                                       bool normalize) {
  Vec x, w;
  gauss_legendre_nodes(n, x, w);
  Mat nodes(n, 1);
  Vec weights(n);
  for (int i = 0; i < n; ++i) {
    nodes(i, 0) = 0.5 * (a + b) + 0.5 * (b - a) * x[i];
    weights[i] = 0.5 * (b - a) * w[i];
  }
  if (normalize) weights /= weights.sum();
  return QuadratureMeasure(nodes, weights);
}

QuadratureMeasure QuadratureMeasure::tensor(
    const std::vector<QuadratureMeasure>& rules) {
  if (rules.empty()) throw std::invalid_argument("tensor: no rules");
  long total = 1;
  int d = 0;
  for (const auto& r : rules) {
    total *= r.size();
    d += r.dim();
  }
  Mat nodes(total, d);
  Vec weights = Vec::Ones(total);
  long repeat = total;
  int col = 0;
  for (const auto& r : rules) {
    repeat /= r.size();
    long block = r.size() * repeat;
    for (long i = 0; i < total; ++i) {
      long j = (i % block) / repeat;
      nodes.block(i, col, 1, r.dim()) = r.nodes.row(j);
      weights[i] *= r.weights[j];
    }
    col += r.dim();
  }
  return QuadratureMeasure(std::move(nodes), std::move(weights));
}

QuadratureMeasure QuadratureMeasure::uniform_grid(const Box& box, int n_per_dim,
                                                  bool normalize) {
  std::vector<QuadratureMeasure> rules;
  for (int i = 0; i < box.dim(); ++i) {
    rules.push_back(uniform_1d(box.lower[i], box.upper[i], n_per_dim, normalize));
  }
  return tensor(rules);
}

}  // namespace invgp
