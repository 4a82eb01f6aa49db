#include "simop/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace simop {

DenseTruncation dense_truncation(const PotentialSpec& spec) {
  const TruncationWindow& w = spec.window();
  const int n = w.half_width();
  const int d = w.dim();
  const Eigen::Index size = static_cast<Eigen::Index>(2 * n + 1) * d;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(size, size);
  for (int j = -n; j <= n; ++j) {
    for (int l = -n; l <= n; ++l) {
      const Eigen::Index r = static_cast<Eigen::Index>(j + n) * d;
      const Eigen::Index c = static_cast<Eigen::Index>(l + n) * d;
      a.block(r, c, d, d) = -spec.coefficient(j + l);
      if (j == l) {
        const cplx lam(0.0, 2.0 * std::numbers::pi * j / w.omega());
        for (int i = 0; i < d; ++i) a(r + i, c + i) += lam;
      }
    }
  }
  return {w, std::move(a)};
}

std::vector<cplx> oracle_spectrum(const DenseTruncation& dt) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(dt.matrix, false);
  if (solver.info() != Eigen::Success) {
    throw MethodError(FailureKind::EigensolverFailure, "dense eigensolve of the truncation failed");
  }
  const Eigen::VectorXcd& ev = solver.eigenvalues();
  std::vector<cplx> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
  });
  return out;
}

EvolutionState oracle_evolve(const DenseTruncation& dt, const EvolutionState& phi, double t) {
  if (!(phi.window == dt.window)) throw WindowMismatch("oracle_evolve: state and truncation use different windows");
  if (t == 0.0) return phi;
  const Eigen::MatrixXcd e = (t * dt.matrix).exp();
  return {dt.window, e * phi.coeffs};
}

ClosedFormExample closed_form_example(double c, const TruncationWindow& window) {
  if (window.dim() != 1 || std::abs(window.omega() - 2.0 * std::numbers::pi) > 1e-15) {
    throw std::invalid_argument("closed_form_example: needs d = 1 and omega = 2 pi");
  }
  if (!(c >= 1.0)) throw std::invalid_argument("closed_form_example: needs c >= 1");
  const int n = window.half_width();
  const Eigen::Index size = 2 * n + 1;
  auto at = [n](int j) { return static_cast<Eigen::Index>(j + n); };
  const cplx i(0.0, 1.0);

  ClosedFormExample out(c, window);
  out.v_tilde = Eigen::MatrixXcd::Zero(size, size);
  out.gamma_v = Eigen::MatrixXcd::Zero(size, size);
  out.j_v = Eigen::MatrixXcd::Zero(size, size);
  out.v_gamma_v = Eigen::MatrixXcd::Zero(size, size);
  out.inverse_factor = Eigen::MatrixXcd::Identity(size, size);

  out.spectrum.push_back(-1.0 / c);
  out.x[0] = 1.0 / c;
  out.j_v(at(0), at(0)) = 1.0 / c;
  out.v_tilde(at(0), at(0)) = 1.0 / c;
  for (int j = -n; j <= n; ++j) {
    if (j == 0) continue;
    const double jd = j;
    const double root = std::sqrt(1.0 - 1.0 / (c * c * jd * jd));
    const double q = 4.0 * jd * jd * c * c - 1.0;
    const double v = 1.0 / (c * q);
    out.spectrum.push_back(i * jd * root);
    // 1 - sqrt(1 - z) = z / (1 + sqrt(1 - z))
    out.x[j] = i / (c * c * jd * (1.0 + root));
    if (j > 0) {
      const double b = 1.0 - 2.0 * c * v;
      out.y[j] = 2.0 * v / (b + std::sqrt(b * b - v * v / (jd * jd)));
    }
    out.gamma_v(at(j), at(-j)) = 1.0 / (2.0 * jd * c * i);
    out.v_gamma_v(at(j), at(j)) = i / (2.0 * jd * c * c);
    out.inverse_factor(at(j), at(j)) = 4.0 * jd * jd * c * c / q;
    out.inverse_factor(at(j), at(-j)) = 2.0 * jd * c * i / q;
    out.v_tilde(at(j), at(j)) = 2.0 * jd * i / q;
    out.v_tilde(at(j), at(-j)) = v;
  }
  std::sort(out.spectrum.begin(), out.spectrum.end(), [](cplx a, cplx b) {
    return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
  });

  // Contraction constant at m = k = 0 from the closed-form V~ alone.
  const Eigen::VectorXd rows = out.v_tilde.cwiseAbs2().rowwise().sum();
  const Eigen::VectorXd cols = out.v_tilde.cwiseAbs2().colwise().sum().transpose();
  const double hs = std::sqrt(rows.sum());
  std::vector<double> alpha(static_cast<std::size_t>(n + 1));
  double row_tail = 0.0, col_tail = 0.0;
  for (int r = n; r >= 0; --r) {
    row_tail += rows(at(r)) + (r ? rows(at(-r)) : 0.0);
    col_tail += cols(at(r)) + (r ? cols(at(-r)) : 0.0);
    alpha[static_cast<std::size_t>(r)] = std::max(std::pow(row_tail, 0.25), std::pow(col_tail, 0.25)) / std::sqrt(hs);
  }
  const double floor = 1e-8 * alpha[0];
  for (double& a : alpha) a = std::max(a, floor);
  double alpha_prime = 0.0;
  for (int r = 1; r <= n; ++r) {
    alpha_prime = std::max(alpha_prime, std::abs(alpha[static_cast<std::size_t>(r)] - alpha[0]) / r);
  }
  out.alpha_tilde_1 = 2.0 * alpha[1] + alpha_prime;
  double left = 0.0, right = 0.0;
  for (int r = -n; r <= n; ++r) {
    for (int s = -n; s <= n; ++s) {
      const double e = std::norm(out.v_tilde(at(r), at(s)));
      left += e / std::pow(alpha[static_cast<std::size_t>(std::abs(s))], 2);
      right += e / std::pow(alpha[static_cast<std::size_t>(std::abs(r))], 2);
    }
  }
  out.v_tilde_m_norm = std::sqrt(std::max(left, right));
  out.contraction = 4.0 * out.alpha_tilde_1 * out.v_tilde_m_norm;
  if (!(out.contraction < 1.0)) {
    std::ostringstream msg;
    msg << "closed-form example with c = " << c << " fails the contraction test (" << out.contraction << " >= 1)";
    throw MethodError(FailureKind::ContractionViolated, msg.str(), out.contraction);
  }
  return out;
}

}  // namespace simop
