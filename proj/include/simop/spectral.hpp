#pragma once

#include <map>
#include <optional>
#include <vector>

#include "simop/blockspace.hpp"
#include "simop/similarity.hpp"

namespace simop {

/// Spectrum of L read off the block-diagonal similar operator: eigenvalues of
/// Lambda_(k) - V0_(k) on the central cell and of lambda_l I - V0_l on each
/// outer mode.
struct SpectrumReport {
  int k = 0;
  std::vector<cplx> central;
  std::map<int, std::vector<cplx>> outer;
  /// tail_sq[i] = sum_{k < |l| <= k+1+i} ||V0_l||^2
  std::vector<double> tail_sq;

  /// All eigenvalues, central first, then outer blocks in increasing l.
  std::vector<cplx> all() const;
  /// Mode label per entry of all(); nullopt for the central cell.
  std::vector<std::optional<int>> labels() const;
};

SpectrumReport spectrum(const SimilarityResult& sim);

/// A cell of the coarsened resolution: the merged central cell or one outer mode.
struct SpectralCell {
  bool central = true;
  int ell = 0;

  static SpectralCell central_cell() { return {true, 0}; }
  static SpectralCell mode(int ell) { return {false, ell}; }
};

/// Spectral projection U P_cell U^{-1} of L.
BlockMatrix spectral_projection(const SimilarityResult& sim, SpectralCell cell);

struct ProjectionGap {
  int n = 0;
  double gap = 0.0;   ///< ||P~_(k) + sum_{k<|l|<=n} P~_l - P_(k) - sum P_l||
  double rate = 0.0;  ///< alpha(Omega, Gamma V) + alpha(Omega, V)^2, Omega = {|j| > n}
  double bound = 0.0; ///< fitted constant times rate
};

/// Gap at cutoff n in (k, N]; bound is left equal to rate (unit constant).
ProjectionGap equiconvergence_gap(const SimilarityResult& sim, int n);

/// Absolute allowance for rounding when comparing gaps with fitted bounds.
inline constexpr double kGapRoundingSlack = 1e-12;

/// Gaps for every n in (k, N]; the constant is fitted at n = k+1 and
/// bound = constant * rate thereafter.
std::vector<ProjectionGap> equiconvergence_sweep(const SimilarityResult& sim);

/// Largest |j + l| over the stored blocks of V (the coefficient band).
int coefficient_band(const BlockMatrix& v);

/// Half-width of the interior square used for residual checks:
/// N - band(V) - k, clamped at 0.
int interior_radius(const SimilarityResult& sim);

/// HS norm of (Lambda - V) U - U (Lambda - V0) on the interior square.
double similarity_residual(const BlockMatrix& v, const SimilarityResult& sim);

}  // namespace simop
