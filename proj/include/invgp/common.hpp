#ifndef INVGP_COMMON_HPP
#define INVGP_COMMON_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace invgp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Axis-aligned box domain in R^d.
struct Box {
  Vec lower;
  Vec upper;

  Box() = default;
  Box(Vec lo, Vec up) : lower(std::move(lo)), upper(std::move(up)) {
    if (lower.size() != upper.size() || lower.size() == 0) {
      throw std::invalid_argument("Box: bound size mismatch");
    }
    for (int i = 0; i < lower.size(); ++i) {
      if (!(lower[i] < upper[i])) {
        throw std::invalid_argument("Box: lower must be < upper componentwise");
      }
    }
  }

  static Box cube(int d, double lo, double hi) {
    return Box(Vec::Constant(d, lo), Vec::Constant(d, hi));
  }

  int dim() const { return static_cast<int>(lower.size()); }

  bool contains(const Vec& x, double slack = 0.0) const {
    if (x.size() != lower.size()) return false;
    for (int i = 0; i < x.size(); ++i) {
      if (x[i] < lower[i] - slack || x[i] > upper[i] + slack) return false;
    }
    return true;
  }

  Vec center() const { return 0.5 * (lower + upper); }

  // Uniform draw inside the box.
  Vec sample(std::mt19937_64& rng) const {
    Vec x(dim());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < dim(); ++i) {
      x[i] = lower[i] + (upper[i] - lower[i]) * u(rng);
    }
    return x;
  }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent substream for unit `idx` of a seeded computation.  Used so
// that per-path / per-restart randomness does not depend on scheduling.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t idx) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(idx + 1)));
}

// n uniform points in a box, rows of the returned matrix.
inline Mat uniform_points(const Box& box, int n, std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed));
  Mat X(n, box.dim());
  for (int i = 0; i < n; ++i) X.row(i) = box.sample(rng).transpose();
  return X;
}

}  // namespace invgp

#endif
