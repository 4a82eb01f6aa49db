#pragma once

#include <istream>
#include <map>
#include <span>
#include <vector>

#include "simop/blockspace.hpp"

namespace simop {

/// Fourier coefficients of the matrix potential V(s) on the band |n| <= 2N,
/// wide enough that every V_{jl} = V^(j+l) in the window is defined.
class PotentialSpec {
 public:
  explicit PotentialSpec(TruncationWindow window) : window_(window) {}
  PotentialSpec(TruncationWindow window, std::map<int, Block> coeffs);

  const TruncationWindow& window() const noexcept { return window_; }
  int band() const noexcept { return 2 * window_.half_width(); }
  const std::map<int, Block>& coeffs() const noexcept { return coeffs_; }

  /// V^(n); zero for indices that carry no coefficient.
  Block coefficient(int n) const;
  void set_coefficient(int n, Block value);

  /// Largest |n| with a nonzero coefficient (0 for the zero potential).
  int support_radius() const;

 private:
  TruncationWindow window_;
  std::map<int, Block> coeffs_;
};

/// V(s) = (1/c) I_d.
PotentialSpec constant_over_c(const TruncationWindow& window, double c);

/// Discrete Fourier coefficients of M >= 4N+1 equispaced samples of V on
/// [0, omega): coeffs[n] = (1/M) sum_p samples[p] exp(-2 pi i n p / M).
PotentialSpec coefficients_from_samples(const TruncationWindow& window, std::span<const Block> samples);

/// Reads a sample file: one row per sample point, 2 d^2 comma separated
/// numbers per row (row-major entries, re/im interleaved). Lines starting
/// with '#' are skipped.
std::vector<Block> read_potential_samples(std::istream& in, int dim);

/// Hankel block matrix V_{jl} = V^(j+l).
BlockMatrix build_v_matrix(const PotentialSpec& spec);

enum class SufficientCondition { AbsolutelySummable, HilbertSchmidtValued, Neither };
const char* to_string(SufficientCondition c);

struct AdmissibilityReport {
  double sum_sq = 0.0;      ///< sum ||V^(n)||^2 over the stored band
  double l1_norm = 0.0;     ///< sum ||V^(n)||
  double cond4_norm = 0.0;  ///< hs_norm of Z = V Gamma V
  SufficientCondition sufficient = SufficientCondition::Neither;
};

/// Z_{jl} = sum_{n != l, |n| <= N} V^(j+n) V^(n+l) / (lambda_n - lambda_l),
/// evaluated directly from the coefficients.
BlockMatrix condition4_matrix(const PotentialSpec& spec);

/// Windowed values of the two standing conditions on the potential. Report
/// only; the method proceeds regardless.
AdmissibilityReport check_admissibility(const PotentialSpec& spec);

}  // namespace simop
