#include "invgp/mercer.hpp"

#include <cmath>

namespace invgp {

Mat MercerDecomposition::reconstruct() const {
  return eigenfunctions * eigenvalues.asDiagonal() * eigenfunctions.transpose();
}

MercerDecomposition discrete_mercer(const Kernel& k, const QuadratureMeasure& nu, int N) {
  int m = nu.size();
  if (N > m) throw std::invalid_argument("discrete_mercer: N exceeds node count");
  for (int i = 0; i < m; ++i) {
    if (!(nu.weights[i] > 0.0)) {
      throw std::invalid_argument("discrete_mercer: weights must be strictly positive");
    }
  }
  Mat K = gram(k, nu.nodes).K;
  Vec sw = nu.weights.cwiseSqrt();
  Mat B = sw.asDiagonal() * K * sw.asDiagonal();
  // Exact symmetry for the eigensolver.
  B = 0.5 * (B + B.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es(B);

  MercerDecomposition d;
  d.nu = nu;
  d.truncation = N;
  d.eigenvalues.resize(N);
  d.eigenfunctions.resize(m, N);
  // Eigen sorts ascending; take the top N in descending order.
  for (int n = 0; n < N; ++n) {
    int src = m - 1 - n;
    d.eigenvalues[n] = std::max(es.eigenvalues()[src], 0.0);
    d.eigenfunctions.col(n) = es.eigenvectors().col(src).cwiseQuotient(sw);
  }
  return d;
}

namespace {

Vec kl_coefficients(const MercerDecomposition& d, std::uint64_t seed, int path_index) {
  auto rng = substream(seed, static_cast<std::uint64_t>(path_index));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec zeta(d.truncation);
  for (int n = 0; n < d.truncation; ++n) zeta[n] = gauss(rng);
  return zeta;
}

}  // namespace

Mat kl_sample(const MercerDecomposition& d, std::uint64_t seed, int n_paths) {
  int m = d.nu.size();
  Mat paths = Mat::Zero(n_paths, m);
  Vec amp = d.eigenvalues.cwiseSqrt();
  for (int p = 0; p < n_paths; ++p) {
    Vec zeta = kl_coefficients(d, seed, p);
    paths.row(p) = (d.eigenfunctions * amp.cwiseProduct(zeta)).transpose();
  }
  return paths;
}

std::function<double(const Vec&)> kl_path_function(const MercerDecomposition& d,
                                                   const Kernel& k, std::uint64_t seed,
                                                   int path_index, double rank_tol) {
  Vec zeta = kl_coefficients(d, seed, path_index);
  // path(x) = sum_n sqrt(g_n) zeta_n phi_n(x) with the Nystrom extension
  // phi_n(x) = (1/g_n) sum_u w_u k(x,u) phi_n(u), which collapses to a
  // single vector of section coefficients.
  double gmax = d.eigenvalues.size() > 0 ? d.eigenvalues[0] : 0.0;
  Vec mix = Vec::Zero(d.truncation);
  for (int n = 0; n < d.truncation; ++n) {
    if (d.eigenvalues[n] > rank_tol * gmax && d.eigenvalues[n] > 0.0) {
      mix[n] = zeta[n] / std::sqrt(d.eigenvalues[n]);
    }
  }
  Vec coeffs = d.nu.weights.asDiagonal() * (d.eigenfunctions * mix);
  Mat nodes = d.nu.nodes;
  return [k, nodes, coeffs](const Vec& x) {
    Mat xr(1, x.size());
    xr.row(0) = x.transpose();
    return (k.cross(xr, nodes) * coeffs)(0, 0);
  };
}

}  // namespace invgp
