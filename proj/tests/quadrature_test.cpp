#include <doctest.h>

#include <cmath>

#include "invgp/quadrature.hpp"

using namespace invgp;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  QuadratureMeasure q = QuadratureMeasure::gauss_legendre_1d(0.0, 1.0, 5);
  CHECK(q.total_mass() == doctest::Approx(1.0).epsilon(1e-14));

  // Degree 9 is exact for a 5-point rule.
  double integral = 0.0;
  for (int i = 0; i < q.size(); ++i) {
    integral += q.weights[i] * std::pow(q.nodes(i, 0), 9);
  }
  CHECK(integral == doctest::Approx(0.1).epsilon(1e-13));
}

TEST_CASE("uniform midpoint rule") {
  QuadratureMeasure prob = QuadratureMeasure::uniform_1d(-2.0, 2.0, 8, true);
  CHECK(prob.is_probability());
  QuadratureMeasure leb = QuadratureMeasure::uniform_1d(-2.0, 2.0, 8, false);
  CHECK(leb.total_mass() == doctest::Approx(4.0).epsilon(1e-14));
  CHECK_FALSE(leb.is_probability());
  CHECK(leb.normalized().is_probability());

  // Midpoints stay strictly inside the interval.
  CHECK(leb.nodes.col(0).minCoeff() > -2.0);
  CHECK(leb.nodes.col(0).maxCoeff() < 2.0);
}

TEST_CASE("tensor rule multiplies weights and dimensions") {
  QuadratureMeasure a = QuadratureMeasure::uniform_1d(0.0, 1.0, 3, true);
  QuadratureMeasure b = QuadratureMeasure::gauss_legendre_1d(0.0, 1.0, 4);
  QuadratureMeasure t = QuadratureMeasure::tensor({a, b});
  CHECK(t.dim() == 2);
  CHECK(t.size() == 12);
  CHECK(t.total_mass() == doctest::Approx(1.0).epsilon(1e-13));

  QuadratureMeasure grid = QuadratureMeasure::uniform_grid(Box::cube(3, 0.0, 2.0), 4, true);
  CHECK(grid.dim() == 3);
  CHECK(grid.size() == 64);
  CHECK(grid.is_probability(1e-12));
}

TEST_CASE("measure validation") {
  Mat nodes(2, 1);
  nodes << 0.0, 1.0;
  Vec w(2);
  w << 0.5, -0.1;
  CHECK_THROWS(QuadratureMeasure(nodes, w));

  Vec w3 = Vec::Ones(3);
  CHECK_THROWS(QuadratureMeasure(nodes, w3));
}
