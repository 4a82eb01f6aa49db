#include "simop/evolution.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace simop {

EvolutionState EvolutionState::zero(const TruncationWindow& w) {
  return {w, Eigen::VectorXcd::Zero(w.size())};
}

EvolutionState EvolutionState::mode(const TruncationWindow& w, int ell, const Eigen::VectorXcd& value) {
  EvolutionState s = zero(w);
  s.set_mode_coeff(ell, value);
  return s;
}

Eigen::VectorXcd EvolutionState::mode_coeff(int ell) const {
  if (!window.contains(ell)) throw std::out_of_range("mode outside the window");
  return coeffs.segment(window.offset(ell), window.dim());
}

void EvolutionState::set_mode_coeff(int ell, const Eigen::VectorXcd& value) {
  if (!window.contains(ell)) throw std::out_of_range("mode outside the window");
  if (value.size() != window.dim()) throw std::invalid_argument("mode coefficient must have dim entries");
  coeffs.segment(window.offset(ell), window.dim()) = value;
}

Eigen::VectorXcd EvolutionState::evaluate(double s) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(window.dim());
  const int n = window.half_width();
  for (int l = -n; l <= n; ++l) {
    const double phase = 2.0 * std::numbers::pi * l * s / window.omega();
    out += std::polar(1.0, phase) * coeffs.segment(window.offset(l), window.dim());
  }
  return out;
}

GroupBlocks GroupBlocks::from(const SimilarityResult& sim) {
  const TruncationWindow& w = sim.window();
  const int d = w.dim();
  GroupBlocks g;
  g.k = sim.k;
  g.central = -sim.v0.central;
  for (int l = -sim.k; l <= sim.k; ++l) {
    for (int c = 0; c < d; ++c) {
      const Eigen::Index i = static_cast<Eigen::Index>(l + sim.k) * d + c;
      g.central(i, i) += w.lambda(l);
    }
  }
  for (const auto& [ell, b] : sim.v0.outer) {
    Eigen::MatrixXcd gen = -b;
    gen.diagonal().array() += w.lambda(ell);
    g.outer.emplace(ell, std::move(gen));
  }
  return g;
}

namespace {

constexpr double kMaxEigenvectorCondition = 1e6;

double condition_number(const Eigen::MatrixXcd& m) {
  if (m.rows() == 1) return 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

}  // namespace

GroupEvolver::Factored GroupEvolver::factor(const Eigen::MatrixXcd& g) {
  Factored f;
  f.generator = g;
  if (g.rows() == 0) return f;
  if (g.rows() == 1) {
    f.diagonalizable = true;
    f.eigenvalues = g.diagonal();
    f.vectors = Eigen::MatrixXcd::Identity(1, 1);
    f.inverse = f.vectors;
    return f;
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(g);
  if (solver.info() == Eigen::Success && condition_number(solver.eigenvectors()) <= kMaxEigenvectorCondition) {
    f.diagonalizable = true;
    f.eigenvalues = solver.eigenvalues();
    f.vectors = solver.eigenvectors();
    f.inverse = f.vectors.inverse();
  }
  return f;
}

Eigen::MatrixXcd GroupEvolver::Factored::exp(double t) const {
  if (generator.rows() == 0) return generator;
  if (t == 0.0) return Eigen::MatrixXcd::Identity(generator.rows(), generator.cols());
  if (diagonalizable) {
    const Eigen::VectorXcd e = (t * eigenvalues).array().exp();
    return vectors * e.asDiagonal() * inverse;
  }
  return (t * generator).exp();
}


Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& g, double t) {
  if (g.rows() != g.cols()) throw std::invalid_argument("matrix_exponential: matrix must be square");
  if (g.rows() == 0) return g;
  if (g.rows() == 1) return Eigen::MatrixXcd::Constant(1, 1, std::exp(t * g(0, 0)));
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(g);
  if (solver.info() == Eigen::Success && condition_number(solver.eigenvectors()) <= kMaxEigenvectorCondition) {
    const Eigen::VectorXcd e = (t * solver.eigenvalues()).array().exp();
    return solver.eigenvectors() * e.asDiagonal() * solver.eigenvectors().inverse();
  }
  return (t * g).exp();
}

Eigen::MatrixXcd block_exponential(const GroupBlocks& g, std::optional<int> ell, double t) {
  if (!ell) return matrix_exponential(g.central, t);
  const auto it = g.outer.find(*ell);
  if (it == g.outer.end()) throw std::out_of_range("block_exponential: no outer block for this mode");
  return matrix_exponential(it->second, t);
}

GroupEvolver::GroupEvolver(const SimilarityResult& sim)
    : u_(sim.u), u_inv_(sim.u_inv), blocks_(GroupBlocks::from(sim)), central_(factor(blocks_.central)) {
  for (const auto& [ell, g] : blocks_.outer) outer_.emplace(ell, factor(g));
}

Eigen::VectorXcd GroupEvolver::apply_diagonal(double t, const Eigen::VectorXcd& y) const {
  const TruncationWindow& w = window();
  if (y.size() != w.size()) throw std::invalid_argument("apply_diagonal: vector length does not match the window");
  Eigen::VectorXcd out(y.size());
  const Eigen::Index c0 = w.offset(-blocks_.k);
  const Eigen::Index cn = central_.generator.rows();
  out.segment(c0, cn) = central_.exp(t) * y.segment(c0, cn);
  for (const auto& [ell, f] : outer_) {
    out.segment(w.offset(ell), w.dim()) = f.exp(t) * y.segment(w.offset(ell), w.dim());
  }
  return out;
}

EvolutionState GroupEvolver::apply(double t, const EvolutionState& phi) const {
  require_same_window(phi.window, window());
  return {window(), u_.apply(apply_diagonal(t, u_inv_.apply(phi.coeffs)))};
}

Eigen::MatrixXcd GroupEvolver::dense(double t) const {
  const TruncationWindow& w = window();
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(w.size(), w.size());
  const Eigen::Index c0 = w.offset(-blocks_.k);
  const Eigen::Index cn = central_.generator.rows();
  d.block(c0, c0, cn, cn) = central_.exp(t);
  for (const auto& [ell, f] : outer_) d.block(w.offset(ell), w.offset(ell), w.dim(), w.dim()) = f.exp(t);
  return u_.to_dense() * d * u_inv_.to_dense();
}

EvolutionState group_apply(const SimilarityResult& sim, double t, const EvolutionState& phi) {
  return GroupEvolver(sim).apply(t, phi);
}

std::vector<EvolutionState> solve_homogeneous(const SimilarityResult& sim, const EvolutionState& phi,
                                              const std::vector<double>& times) {
  const GroupEvolver evolver(sim);
  std::vector<EvolutionState> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(evolver.apply(t, phi));
  return out;
}

namespace {

constexpr std::array<double, 5> kGaussNodes = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                               0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                 0.4786286704993665, 0.2369268850561891};

Eigen::VectorXcd composite_gauss(const std::function<Eigen::VectorXcd(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  Eigen::VectorXcd acc;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
      Eigen::VectorXcd v = f(mid + 0.5 * h * kGaussNodes[i]);
      if (acc.size() == 0) acc = Eigen::VectorXcd::Zero(v.size());
      acc += (0.5 * h * kGaussWeights[i]) * v;
    }
  }
  return acc;
}

void check_grid(const std::vector<double>& t_grid) {
  double prev = 0.0;
  for (double t : t_grid) {
    if (!std::isfinite(t) || t < prev) throw std::invalid_argument("time grid must be ascending and non-negative");
    prev = t;
  }
}

}  // namespace

Eigen::VectorXcd integrate(const std::function<Eigen::VectorXcd(double)>& f, double a, double b,
                           const QuadratureOptions& options) {
  if (a == b) return Eigen::VectorXcd::Zero(f(a).size());
  int panels = 1;
  Eigen::VectorXcd prev = composite_gauss(f, a, b, panels);
  double diff = 0.0;
  for (int h = 0; h < options.max_halvings; ++h) {
    panels *= 2;
    Eigen::VectorXcd next = composite_gauss(f, a, b, panels);
    diff = (next - prev).norm();
    if (diff <= options.tol) return next;
    prev = std::move(next);
  }
  std::ostringstream msg;
  msg << "quadrature on [" << a << ", " << b << "] did not settle after " << options.max_halvings
      << " halvings (last difference " << diff << ")";
  throw MethodError(FailureKind::QuadratureNonConvergence, msg.str(), diff);
}

std::vector<EvolutionState> solve_inhomogeneous(const SimilarityResult& sim, const EvolutionState& phi,
                                                const Forcing& f, const std::vector<double>& t_grid,
                                                const QuadratureOptions& options) {
  check_grid(t_grid);
  const GroupEvolver evolver(sim);
  const TruncationWindow& w = sim.window();
  require_same_window(phi.window, w);

  // Work in the block-diagonal coordinates y = U^{-1} x, where T~ is cheap.
  const Eigen::VectorXcd y0 = sim.u_inv.apply(phi.coeffs);
  Eigen::VectorXcd duhamel = Eigen::VectorXcd::Zero(w.size());
  double prev = 0.0;
  std::vector<EvolutionState> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    if (t > prev) {
      auto integrand = [&](double tau) {
        const EvolutionState ft = f(tau);
        require_same_window(ft.window, w);
        return evolver.apply_diagonal(t - tau, sim.u_inv.apply(ft.coeffs));
      };
      duhamel = evolver.apply_diagonal(t - prev, duhamel) + integrate(integrand, prev, t, options);
      prev = t;
    }
    out.push_back({w, sim.u.apply(evolver.apply_diagonal(t, y0) + duhamel)});
  }
  return out;
}

double mild_identity_residual(const SimilarityResult& sim, const EvolutionState& phi, const Forcing& f, double t,
                              const QuadratureOptions& options) {
  if (!(t >= 0.0)) throw std::invalid_argument("mild_identity_residual: t must be non-negative");
  const TruncationWindow& w = sim.window();
  const auto u_at = [&](double s) { return solve_inhomogeneous(sim, phi, f, {s}, options).front().coeffs; };
  const auto f_at = [&](double s) { return f(s).coeffs; };
  BlockMatrix l = BlockMatrix::lambda(w);
  l -= sim.v;
  const Eigen::VectorXcd res =
      u_at(t) - phi.coeffs - l.apply(integrate(u_at, 0.0, t, options)) - integrate(f_at, 0.0, t, options);
  return res.norm();
}

TailBound tail_bound(const SimilarityResult& sim, const EvolutionState& psi, int n, double t) {
  const TruncationWindow& w = sim.window();
  require_same_window(psi.window, w);
  if (n <= sim.k || n >= w.half_width()) throw std::invalid_argument("tail_bound: need k < n < N");
  const GroupBlocks g = GroupBlocks::from(sim);

  Eigen::VectorXcd tail = Eigen::VectorXcd::Zero(w.size());
  double psi_tail_sq = 0.0;
  double beta_sq = 0.0;
  TailBound out;
  const BlockMatrix w_mat = sim.u - BlockMatrix::identity(w);
  const std::vector<double> rows = row_norms_sq(w_mat);
  for (int l = -w.half_width(); l <= w.half_width(); ++l) {
    if (std::abs(l) <= n) continue;
    const Eigen::VectorXcd p = psi.mode_coeff(l);
    tail.segment(w.offset(l), w.dim()) = matrix_exponential(g.outer.at(l), t) * p;
    psi_tail_sq += p.squaredNorm();
    beta_sq += rows[static_cast<std::size_t>(l + w.half_width())];
    out.kappa = std::max(out.kappa, spectral_norm(sim.v0.outer.at(l)));
  }
  out.true_error = sim.u.apply(tail).norm();
  out.constant = (1.0 + sim.w_norm) * (2.0 + sim.w_inv_norm);
  out.bound = out.constant * std::exp(out.kappa * std::abs(t)) *
              std::sqrt(psi_tail_sq + beta_sq * psi.coeffs.squaredNorm());
  return out;
}

double measured_growth_rate(const SimilarityResult& sim, double horizon, int samples) {
  if (!(horizon > 0.0) || samples < 2) throw std::invalid_argument("measured_growth_rate: need horizon > 0, samples >= 2");
  const GroupEvolver evolver(sim);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < samples; ++i) {
    const double t = 0.5 * horizon + 0.5 * horizon * i / (samples - 1);
    const Eigen::MatrixXcd m = evolver.dense(t);
    const double y = std::log(Eigen::BDCSVD<Eigen::MatrixXcd>(m).singularValues()(0));
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
  }
  return (samples * sxy - sx * sy) / (samples * sxx - sx * sx);
}

}  // namespace simop
