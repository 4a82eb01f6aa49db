#pragma once

#include <map>
#include <vector>

#include "simop/blockspace.hpp"
#include "simop/evolution.hpp"
#include "simop/potential.hpp"

namespace simop {

/// Dense ((2N+1)d)^2 matrix of Lambda - V on the window, assembled straight
/// from the Fourier coefficients.
struct DenseTruncation {
  TruncationWindow window;
  Eigen::MatrixXcd matrix;
};

DenseTruncation dense_truncation(const PotentialSpec& spec);

/// Eigenvalues of the full truncation, sorted by imaginary then real part.
std::vector<cplx> oracle_spectrum(const DenseTruncation& dt);

/// e^{t A} phi with A the dense truncation (scaling and squaring).
EvolutionState oracle_evolve(const DenseTruncation& dt, const EvolutionState& phi, double t);

/// Reference values for the constant potential V = 1/c, omega = 2 pi, d = 1.
/// Dense matrices use the window layout (row/column l + N).
struct ClosedFormExample {
  ClosedFormExample(double c_value, TruncationWindow w) : c(c_value), window(w) {}

  double c;
  TruncationWindow window;
  std::vector<cplx> spectrum;    ///< -1/c and i j sqrt(1 - 1/(c^2 j^2)), 1 <= |j| <= N
  std::map<int, cplx> x;         ///< diagonal of the fixed point, |j| <= N
  std::map<int, double> y;       ///< antidiagonal of the fixed point, j >= 1 (y_{-j} = y_j)
  Eigen::MatrixXcd v_tilde;
  Eigen::MatrixXcd gamma_v;
  Eigen::MatrixXcd j_v;
  Eigen::MatrixXcd v_gamma_v;
  Eigen::MatrixXcd inverse_factor;  ///< (I + Gamma V)^{-1}
  double alpha_tilde_1 = 0.0;
  double v_tilde_m_norm = 0.0;
  double contraction = 0.0;      ///< 4 alpha~_1 ||V~||_M
};

/// Throws MethodError(ContractionViolated) when 4 alpha~_1 ||V~||_M >= 1 at
/// this window, and std::invalid_argument unless d = 1, omega = 2 pi, c >= 1.
ClosedFormExample closed_form_example(double c, const TruncationWindow& window);

}  // namespace simop
