#pragma once

#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "simop/potential.hpp"

namespace simop::testing {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Potential with coefficients on |n| <= band, complex Gaussian entries, scaled
/// so that (sum ||V^(n)||^2)^{1/2} = hs.
inline PotentialSpec random_potential(unsigned seed, int dim, int half_width, int band = 3, double hs = 0.2) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const TruncationWindow w(kTwoPi, dim, half_width);
  PotentialSpec spec(w);
  for (int n = -band; n <= band; ++n) {
    Block b(dim, dim);
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) b(r, c) = cplx(gauss(rng), gauss(rng));
    }
    spec.set_coefficient(n, b);
  }
  const double scale = hs / std::sqrt(check_admissibility(spec).sum_sq);
  const std::map<int, Block> raw = spec.coeffs();
  for (const auto& [n, b] : raw) spec.set_coefficient(n, b * scale);
  return spec;
}

/// The five potentials shared by the oracle-equivalence checks.
inline PotentialSpec criterion_potential(int i) {
  return random_potential(1000u + static_cast<unsigned>(i), i % 2 == 0 ? 1 : 2, 32);
}

inline Eigen::VectorXcd random_vector(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(gauss(rng), gauss(rng));
  return v;
}

inline Eigen::MatrixXcd random_dense(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  const Eigen::VectorXcd v = random_vector(rows * cols, seed);
  return Eigen::Map<const Eigen::MatrixXcd>(v.data(), rows, cols);
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace simop::testing
