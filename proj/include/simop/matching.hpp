#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace simop {

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian
/// method, O(n^3)). Returns col_of_row.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

struct SpectrumMatch {
  std::vector<int> partner;  ///< index into `b` matched with each element of `a`
  std::vector<double> distance;
  double max_distance = 0.0;
};

/// Optimal matching of two eigenvalue multisets of equal size minimizing the
/// total |a_i - b_j|.
SpectrumMatch match_spectra(std::span<const std::complex<double>> a, std::span<const std::complex<double>> b);

}  // namespace simop
