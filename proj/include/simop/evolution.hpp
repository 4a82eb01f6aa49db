#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "simop/blockspace.hpp"
#include "simop/similarity.hpp"

namespace simop {

/// Fourier coefficients x^(l) in C^d, |l| <= N, of a function in
/// L^2([0, omega], C^d). The l2 norm of the coefficients is the normalized
/// L^2 norm ((1/omega) int |x(s)|^2 ds)^{1/2}.
struct EvolutionState {
  TruncationWindow window;
  Eigen::VectorXcd coeffs;

  static EvolutionState zero(const TruncationWindow& w);
  /// Single mode ell with the given vector value.
  static EvolutionState mode(const TruncationWindow& w, int ell, const Eigen::VectorXcd& value);

  Eigen::VectorXcd mode_coeff(int ell) const;
  void set_mode_coeff(int ell, const Eigen::VectorXcd& value);
  double norm() const { return coeffs.norm(); }

  /// Point values x(s) = sum_l x^(l) exp(i 2 pi l s / omega).
  Eigen::VectorXcd evaluate(double s) const;
};

/// Generators of the block-diagonal group: Lambda_(k) - V0_(k) on the central
/// cell and lambda_l I - V0_l on each outer mode.
struct GroupBlocks {
  int k = 0;
  Eigen::MatrixXcd central;
  std::map<int, Eigen::MatrixXcd> outer;

  static GroupBlocks from(const SimilarityResult& sim);
};

/// e^{tG}. Uses the eigendecomposition when the eigenvector matrix has
/// condition number at most 1e6, scaling and squaring otherwise.
Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& g, double t);

/// Exponential of one generator block; `ell` empty selects the central cell.
Eigen::MatrixXcd block_exponential(const GroupBlocks& g, std::optional<int> ell, double t);

/// T(t) = U (block-diagonal exponentials) U^{-1}, with the block
/// factorizations cached so repeated applications stay cheap.
class GroupEvolver {
 public:
  explicit GroupEvolver(const SimilarityResult& sim);

  const GroupBlocks& blocks() const noexcept { return blocks_; }

  /// Coefficients of T(t) phi.
  EvolutionState apply(double t, const EvolutionState& phi) const;
  /// Coefficients of T~(t) y for y in the block-diagonal coordinates.
  Eigen::VectorXcd apply_diagonal(double t, const Eigen::VectorXcd& y) const;
  /// Dense matrix of T(t) on the window.
  Eigen::MatrixXcd dense(double t) const;

  const TruncationWindow& window() const noexcept { return u_.window(); }

 private:
  struct Factored {
    bool diagonalizable = false;
    Eigen::VectorXcd eigenvalues;
    Eigen::MatrixXcd vectors;
    Eigen::MatrixXcd inverse;
    Eigen::MatrixXcd generator;
    Eigen::MatrixXcd exp(double t) const;
  };
  static Factored factor(const Eigen::MatrixXcd& g);

  BlockMatrix u_;
  BlockMatrix u_inv_;
  GroupBlocks blocks_;
  Factored central_;
  std::map<int, Factored> outer_;
};

EvolutionState group_apply(const SimilarityResult& sim, double t, const EvolutionState& phi);

std::vector<EvolutionState> solve_homogeneous(const SimilarityResult& sim, const EvolutionState& phi,
                                              const std::vector<double>& times);

/// Forcing term f~(tau) as a coefficient state.
using Forcing = std::function<EvolutionState(double)>;

struct QuadratureOptions {
  double tol = 1e-8;      ///< stop when successive composite values differ by at most tol
  int max_halvings = 16;
};

/// Composite 5-point Gauss-Legendre quadrature of a vector-valued function,
/// halving panels until successive values agree within options.tol.
Eigen::VectorXcd integrate(const std::function<Eigen::VectorXcd(double)>& f, double a, double b,
                           const QuadratureOptions& options = {});

/// Mild solution u(t) = T(t) phi + int_0^t T(t - tau) f(tau) dtau on an
/// ascending grid of times >= 0.
std::vector<EvolutionState> solve_inhomogeneous(const SimilarityResult& sim, const EvolutionState& phi,
                                                const Forcing& f, const std::vector<double>& t_grid,
                                                const QuadratureOptions& options = {});

/// l2 norm of u(t) - phi - L int_0^t u - int_0^t f with L = Lambda - V, all
/// integrals by the same quadrature.
double mild_identity_residual(const SimilarityResult& sim, const EvolutionState& phi, const Forcing& f, double t,
                              const QuadratureOptions& options = {});

struct TailBound {
  double bound = 0.0;       ///< C e^{kappa_{n+1}|t|} (sum_{|l|>n} |psi^(l)|^2 + beta_l^2 |psi|^2)^{1/2}
  double true_error = 0.0;  ///< |T(t) U psi - U(central + sum_{k<|l|<=n}) psi|
  double constant = 0.0;    ///< C = (1 + |W|)(1 + |(I + W)^{-1}|)
  double kappa = 0.0;       ///< sup_{|l| > n} |V0_l|
};

/// Truncation error of the generalized Fourier series after the modes
/// |l| <= n, together with its a priori bound. Requires k < n < N.
TailBound tail_bound(const SimilarityResult& sim, const EvolutionState& psi, int n, double t);

/// Least-squares slope of log ||T(t)|| over t in [horizon/2, horizon].
double measured_growth_rate(const SimilarityResult& sim, double horizon, int samples = 11);

}  // namespace simop
