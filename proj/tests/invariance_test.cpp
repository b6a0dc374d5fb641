#include <doctest.h>

#include <cmath>
#include <numbers>

#include "invgp/invariance.hpp"
#include "invgp/kernels.hpp"

using namespace invgp;

TEST_CASE("argumentwise invariance: centered kernel vs centering operator") {
  Kernel se = make_se_kernel_1d(1.0, 0.5, -std::numbers::pi, std::numbers::pi);
  QuadratureMeasure nu =
      QuadratureMeasure::uniform_1d(-std::numbers::pi, std::numbers::pi, 61, true);
  Kernel k0 = make_centered_kernel(se, nu);
  CenteringOperator T(nu);

  InvarianceReport good = check_argumentwise_invariance(T, k0, 100, 1e-10);
  CHECK(good.passed);
  CHECK(good.n_probe == 100);

  InvarianceReport bad = check_argumentwise_invariance(T, se, 100, 1e-10);
  CHECK_FALSE(bad.passed);
  CHECK(bad.max_violation > 1e-3);
}

TEST_CASE("argumentwise invariance: rotation symbols") {
  auto [k1, k2] = make_polar_kernels();
  CompositionCombination quarter({rotation_symbol(std::numbers::pi / 2)}, Vec::Ones(1));
  CompositionCombination seventh({rotation_symbol(2.0 * std::numbers::pi / 7)},
                                 Vec::Ones(1));

  CHECK(check_argumentwise_invariance(quarter, k1, 100, 1e-8).passed);
  CHECK(check_argumentwise_invariance(seventh, k2, 100, 1e-8).passed);
  // The sheet kernel is only invariant under quarter turns.
  CHECK_FALSE(check_argumentwise_invariance(seventh, k1, 100, 1e-8).passed);

  Kernel se = make_se_kernel(1.0, Vec::Constant(2, 0.5), Box::cube(2, -1.0, 1.0));
  CHECK_FALSE(check_argumentwise_invariance(quarter, se, 100, 1e-8).passed);
}

TEST_CASE("symmetrized kernel becomes invariant and stays PSD") {
  Kernel se = make_se_kernel(1.0, Vec::Constant(2, 0.5), Box::cube(2, -1.0, 1.0));
  GroupAction g4 = rotation_group(4);
  Kernel sym = symmetrize_kernel(se, g4);

  CompositionCombination quarter({rotation_symbol(std::numbers::pi / 2)}, Vec::Ones(1));
  CHECK(check_argumentwise_invariance(quarter, sym, 100, 1e-8).passed);

  Mat pts = uniform_points(sym.domain(), 25, 13);
  CHECK(min_eig_check(gram(sym, pts), 1e-8));
}

TEST_CASE("argumentwise invariance: additive kernel vs additivity operator") {
  Box box = Box::cube(2, 0.0, 1.0);
  std::vector<std::vector<Kernel>> blocks(2, std::vector<Kernel>(2));
  blocks[0][0] = make_se_kernel_1d(1.0, 0.3, 0.0, 1.0);
  blocks[1][1] = make_se_kernel_1d(0.7, 0.5, 0.0, 1.0);
  Kernel k = make_additive_kernel(blocks, box);

  CompositionCombination T = additivity_operator(box.center());
  CHECK(check_argumentwise_invariance(T, k, 100, 1e-8).passed);

  Kernel se = make_se_kernel(1.0, Vec::Constant(2, 0.5), box);
  CHECK_FALSE(check_argumentwise_invariance(T, se, 100, 1e-8).passed);
}

TEST_CASE("differential invariance of the ode span and harmonic kernels") {
  Kernel kode = make_ode_span_kernel(Mat::Identity(2, 2));
  DifferentialPathOperator Tode(DifferentialPathOperator::Tag::kNegSecondDerivative,
                                5e-3, 4);
  CHECK(check_argumentwise_invariance(Tode, kode, 60, 1e-6).passed);

  Kernel kharm = make_harmonic_kernel(1.0);
  DifferentialPathOperator Tharm(DifferentialPathOperator::Tag::kLaplacianShift, 5e-3, 4);
  CHECK(check_argumentwise_invariance(Tharm, kharm, 60, 1e-6).passed);

  Kernel se1 = make_se_kernel_1d(1.0, 0.5, 0.0, 2.0 * std::numbers::pi);
  CHECK_FALSE(check_argumentwise_invariance(Tode, se1, 60, 1e-6).passed);
}
