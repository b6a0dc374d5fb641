#include <doctest.h>

#include <cmath>

#include "invgp/mercer.hpp"

using namespace invgp;

namespace {

MercerDecomposition se_decomposition(int n_nodes, int N) {
  Kernel k = make_se_kernel_1d(1.0, 0.6, -1.0, 1.0);
  QuadratureMeasure nu = QuadratureMeasure::uniform_1d(-1.0, 1.0, n_nodes, true);
  return discrete_mercer(k, nu, N);
}

}  // namespace

TEST_CASE("discrete Mercer trace identity") {
  Kernel k = make_se_kernel_1d(1.7, 0.6, -1.0, 1.0);
  QuadratureMeasure nu = QuadratureMeasure::uniform_1d(-1.0, 1.0, 25, true);
  MercerDecomposition d = discrete_mercer(k, nu, nu.size());

  double weighted_diag = 0.0;
  for (int i = 0; i < nu.size(); ++i) {
    Vec u = nu.nodes.row(i).transpose();
    weighted_diag += nu.weights[i] * k(u, u);
  }
  CHECK(std::abs(d.eigenvalues.sum() - weighted_diag) < 1e-10 * weighted_diag);
}

TEST_CASE("full decomposition reconstructs the Gram matrix") {
  Kernel k = make_se_kernel_1d(1.0, 0.6, -1.0, 1.0);
  QuadratureMeasure nu = QuadratureMeasure::uniform_1d(-1.0, 1.0, 20, true);
  MercerDecomposition d = discrete_mercer(k, nu, nu.size());
  Mat K = gram(k, nu.nodes).K;
  CHECK((d.reconstruct() - K).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("eigenfunctions are orthonormal in L2(nu)") {
  MercerDecomposition d = se_decomposition(25, 10);
  Mat G = d.eigenfunctions.transpose() * d.nu.weights.asDiagonal() * d.eigenfunctions;
  CHECK((G - Mat::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("eigenvalues are nonnegative and sorted descending") {
  MercerDecomposition d = se_decomposition(25, 25);
  for (int n = 0; n < d.eigenvalues.size(); ++n) {
    CHECK(d.eigenvalues[n] >= 0.0);
    if (n > 0) CHECK(d.eigenvalues[n] <= d.eigenvalues[n - 1]);
  }
  CHECK_THROWS(se_decomposition(10, 11));
}

TEST_CASE("KL sampling is deterministic and matches the kernel covariance") {
  MercerDecomposition d = se_decomposition(15, 15);
  Mat a = kl_sample(d, 3, 5);
  Mat b = kl_sample(d, 3, 5);
  CHECK((a - b).norm() == 0.0);

  Kernel k = make_se_kernel_1d(1.0, 0.6, -1.0, 1.0);
  Mat K = gram(k, d.nu.nodes).K;
  int n_draws = 4000;
  Mat paths = kl_sample(d, 11, n_draws);
  Mat emp = paths.transpose() * paths / n_draws;
  CHECK((emp - K).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("Nystrom path extension agrees with KL values at the nodes") {
  // Keep only well-resolved modes so the node values are determined by them.
  MercerDecomposition full = se_decomposition(25, 25);
  int N = 0;
  while (N < 25 && full.eigenvalues[N] > 1e-8 * full.eigenvalues[0]) ++N;
  MercerDecomposition d = se_decomposition(25, N);

  Kernel k = make_se_kernel_1d(1.0, 0.6, -1.0, 1.0);
  Mat node_paths = kl_sample(d, 17, 3);
  for (int p = 0; p < 3; ++p) {
    auto f = kl_path_function(d, k, 17, p, 1e-12);
    for (int i = 0; i < d.nu.size(); ++i) {
      CHECK(std::abs(f(d.nu.nodes.row(i).transpose()) - node_paths(p, i)) < 1e-6);
    }
  }
}
