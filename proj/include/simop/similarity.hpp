#pragma once

#include <map>
#include <vector>

#include "simop/blockspace.hpp"

namespace simop {

/// Decay weights of a perturbation used to build the space of admissible
/// perturbations for the second similarity stage.
///
/// alpha_n = ||X||^{-1/2} max{ (sum_{|l|>=n} ||P_l X||^2)^{1/4},
///                             (sum_{|l|>=n} ||X P_l||^2)^{1/4} },
/// alpha'_n = max_{|i|>=n, |j|<n} |alpha_i - alpha_j| / |i - j|,
/// alpha~_n = (omega / 2 pi) (2 alpha_n + alpha'_n).
struct AlphaWeights {
  double omega = 0.0;
  int half_width = 0;
  double floor = 0.0;              ///< value small alphas were raised to
  std::vector<double> alpha;       ///< alpha_{|n|}, n = 0..N (after flooring)
  std::vector<double> alpha_raw;   ///< alpha_{|n|} before flooring
  std::vector<double> alpha_prime; ///< index n = 1..N; slot 0 unused
  std::vector<double> alpha_tilde; ///< index n = 1..N; slot 0 unused

  double at(int n) const { return alpha.at(static_cast<std::size_t>(n < 0 ? -n : n)); }
  double tilde(int n) const { return alpha_tilde.at(static_cast<std::size_t>(n)); }
  double prime(int n) const { return alpha_prime.at(static_cast<std::size_t>(n)); }
};

/// Relative floor applied to alpha_n before reweighting by 1/alpha_n.
inline constexpr double kAlphaFloor = 1e-8;

AlphaWeights alpha_weights(const BlockMatrix& x);

/// max(||X_l||, ||X_r||) with X_l = sum (1/alpha_n) X P_n and
/// X_r = sum (1/alpha_n) P_n X.
double m_norm(const BlockMatrix& x, const AlphaWeights& w);

/// Smallest m in [0, N-1] with ||Gamma_m V|| <= theta.
int select_m(const BlockMatrix& v, double theta);

struct PreliminaryTransform {
  BlockMatrix v_tilde;       ///< J_m V + (I + Gamma_m V)^{-1}(V Gamma_m V - (Gamma_m V) J_m V)
  BlockMatrix first_factor;  ///< I + Gamma_m V
  BlockMatrix gamma_v;       ///< Gamma_m V
  BlockMatrix inverse_delta; ///< (I + Gamma_m V)^{-1} - I
};

/// First similarity stage: (Lambda - V)(I + Gamma_m V) = (I + Gamma_m V)(Lambda - V~).
PreliminaryTransform preliminary_transform(const BlockMatrix& v, int m);

/// Smallest k in [m, N-1] with 4 alpha~_{k+1} ||V~||_M < 1.
int select_k(const BlockMatrix& v_tilde, const AlphaWeights& w, int m);

/// Phi(X) = B Gamma_k X - (Gamma_k X)(J_k B) - (Gamma_k X) J_k(B Gamma_k X) + B.
BlockMatrix phi_map(const BlockMatrix& x, const BlockMatrix& b, int k);

struct FixedPointLog {
  std::vector<double> residuals;  ///< ||Phi(X_n) - X_n|| per iteration
  std::vector<double> ball_radii; ///< ||X_n - B|| per iteration
  bool strictly_decreasing = true;
};

struct FixedPointResult {
  BlockMatrix x;
  FixedPointLog log;
};

/// Simple iterations X_0 = 0, X_{n+1} = Phi(X_n) until ||Phi(X) - X|| <= tol.
/// Throws MaxIterExceeded, or BallEscape if an iterate leaves ||X - B|| <= 3||B||.
FixedPointResult fixed_point(const BlockMatrix& b, int k, double tol, int max_iter);

/// Block diagonal part of the fixed point: the dense central square of
/// (2k+1)d rows and the dim x dim blocks P_l X P_l for |l| > k.
struct DiagonalBlocks {
  int k = 0;
  Eigen::MatrixXcd central;
  std::map<int, Block> outer;

  BlockMatrix assemble(const TruncationWindow& w) const;
};

DiagonalBlocks v0_blocks(const BlockMatrix& x_star, int k);

struct SimilarityTransform {
  BlockMatrix u;
  BlockMatrix u_inv;
  double w_norm = 0.0;      ///< ||U - I||
  double w_inv_norm = 0.0;  ///< ||U^{-1} - I||
};

/// U = (I + Gamma_m V)(I + Gamma_k X*) and its inverse.
SimilarityTransform assemble_u(const BlockMatrix& v, const BlockMatrix& x_star, int m, int k);

struct SimilarityOptions {
  double theta = 0.5;
  double fixed_point_tol = 1e-12;  ///< relative to ||V~||
  int max_iter = 200;
};

struct SimilarityDiagnostics {
  double gamma_m_norm = 0.0;      ///< ||Gamma_m V||
  double v_norm = 0.0;            ///< ||V||
  double v_tilde_norm = 0.0;      ///< ||V~||
  double v_tilde_m_norm = 0.0;    ///< ||V~||_M
  double alpha_tilde_k1 = 0.0;    ///< alpha~_{k+1}
  double contraction = 0.0;       ///< 4 alpha~_{k+1} ||V~||_M
  FixedPointLog fixed_point;
};

struct SimilarityResult {
  int m = 0;
  int k = 0;
  BlockMatrix v;
  BlockMatrix gamma_v;
  BlockMatrix v_tilde;
  BlockMatrix x_star;
  BlockMatrix u;
  BlockMatrix u_inv;
  DiagonalBlocks v0;
  double w_norm = 0.0;
  double w_inv_norm = 0.0;
  SimilarityDiagnostics log;

  const TruncationWindow& window() const noexcept { return v.window(); }
};

/// Runs both stages on the Hankel matrix V and assembles U.
SimilarityResult run_similarity(const BlockMatrix& v, const SimilarityOptions& options = {});

}  // namespace simop
