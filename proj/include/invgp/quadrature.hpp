#ifndef INVGP_QUADRATURE_HPP
#define INVGP_QUADRATURE_HPP

#include "invgp/common.hpp"

namespace invgp {

// Discrete representation of a finite measure on a box: nodes (rows) and
// nonnegative weights.  All integral operators in this library act through
// objects of this type.
struct QuadratureMeasure {
  Mat nodes;    // m x d
  Vec weights;  // m

  QuadratureMeasure() = default;
  QuadratureMeasure(Mat n, Vec w);

  int size() const { return static_cast<int>(weights.size()); }
  int dim() const { return static_cast<int>(nodes.cols()); }
  double total_mass() const { return weights.sum(); }
  bool is_probability(double tol = 1e-12) const {
    return std::abs(total_mass() - 1.0) <= tol;
  }

  // Same nodes, weights scaled to total mass one.
  QuadratureMeasure normalized() const;

  // Midpoint rule on [a,b], uniform weights.  Probability measure if
  // normalize, otherwise Lebesgue mass (b - a).
  static QuadratureMeasure uniform_1d(double a, double b, int n,
                                      bool normalize = true);

  // Gauss-Legendre on [a,b].
  static QuadratureMeasure gauss_legendre_1d(double a, double b, int n,
                                             bool normalize = false);

  // Tensor product of 1-D rules.
  static QuadratureMeasure tensor(const std::vector<QuadratureMeasure>& rules);

  // Tensor midpoint rule on a box, n nodes per axis.
  static QuadratureMeasure uniform_grid(const Box& box, int n_per_dim,
                                        bool normalize = true);
};

// Nodes and weights of the n-point Gauss-Legendre rule on [-1,1].
void gauss_legendre_nodes(int n, Vec& nodes, Vec& weights);

}  // namespace invgp

#endif
