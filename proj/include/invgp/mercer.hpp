#ifndef INVGP_MERCER_HPP
#define INVGP_MERCER_HPP

#include "invgp/kernels.hpp"
#include "invgp/quadrature.hpp"

namespace invgp {

// Discrete Mercer decomposition of a kernel against a quadrature measure:
// eigenpairs of W^{1/2} K W^{1/2}, eigenvalues clipped at zero and sorted
// descending, eigenfunctions stored by their values at the nodes and
// orthonormal in L2(nu).
struct MercerDecomposition {
  Vec eigenvalues;        // N, descending, >= 0
  Mat eigenfunctions;     // m x N, column n holds phi_n at the nodes
  QuadratureMeasure nu;
  int truncation = 0;

  // Reconstruction sum_n gamma_n phi_n(u_i) phi_n(u_j) at the nodes.
  Mat reconstruct() const;
};

MercerDecomposition discrete_mercer(const Kernel& k, const QuadratureMeasure& nu, int N);

// Karhunen-Loeve draws sum_n sqrt(gamma_n) zeta_n phi_n at the nodes, one
// path per row.
Mat kl_sample(const MercerDecomposition& decomp, std::uint64_t seed, int n_paths);

// A single KL path extended off the nodes by Nystrom's rule.  The result is
// a finite combination x -> sum_u c_u k(x, u) of kernel sections, so it is
// smooth and inherits the kernel's argumentwise structural properties.
std::function<double(const Vec&)> kl_path_function(const MercerDecomposition& decomp,
                                                   const Kernel& k, std::uint64_t seed,
                                                   int path_index,
                                                   double rank_tol = 1e-12);

}  // namespace invgp

#endif
