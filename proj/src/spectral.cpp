#include "simop/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "simop/transforms.hpp"

namespace simop {

namespace {

std::vector<cplx> eigenvalues(const Eigen::MatrixXcd& m, const std::string& where) {
  if (m.rows() == 0) return {};
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw MethodError(FailureKind::EigensolverFailure, "eigensolver failed on " + where);
  }
  std::vector<cplx> out(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
  });
  return out;
}

BlockMatrix cell_projector(const TruncationWindow& w, int lo_abs, int hi_abs) {
  // Identity blocks on the modes lo_abs <= |l| <= hi_abs.
  BlockMatrix p(w);
  for (int l = -hi_abs; l <= hi_abs; ++l) {
    if (std::abs(l) < lo_abs) continue;
    p.set_block(l, l, Block::Identity(w.dim(), w.dim()));
  }
  return p;
}

double tail_alpha(const BlockMatrix& x, int n) {
  // alpha(Omega, X) = max_{|j| > n} alpha_j(X) = alpha_{n+1}(X); empty in the window at n = N.
  if (n >= x.window().half_width() || hs_norm(x) == 0.0) return 0.0;
  return alpha_weights(x).alpha_raw[static_cast<std::size_t>(n + 1)];
}

}  // namespace

std::vector<cplx> SpectrumReport::all() const {
  std::vector<cplx> out = central;
  for (const auto& [ell, values] : outer) out.insert(out.end(), values.begin(), values.end());
  return out;
}

std::vector<std::optional<int>> SpectrumReport::labels() const {
  std::vector<std::optional<int>> out(central.size(), std::nullopt);
  for (const auto& [ell, values] : outer) out.insert(out.end(), values.size(), ell);
  return out;
}

SpectrumReport spectrum(const SimilarityResult& sim) {
  const TruncationWindow& w = sim.window();
  const int k = sim.k;
  const int d = w.dim();
  SpectrumReport report;
  report.k = k;

  Eigen::MatrixXcd central = -sim.v0.central;
  for (int l = -k; l <= k; ++l) {
    for (int c = 0; c < d; ++c) {
      const Eigen::Index i = static_cast<Eigen::Index>(l + k) * d + c;
      central(i, i) += w.lambda(l);
    }
  }
  report.central = eigenvalues(central, "the central block");

  for (const auto& [ell, b] : sim.v0.outer) {
    Eigen::MatrixXcd g = -b;
    g.diagonal().array() += w.lambda(ell);
    report.outer.emplace(ell, eigenvalues(g, "block " + std::to_string(ell)));
  }

  double acc = 0.0;
  for (int n = k + 1; n <= w.half_width(); ++n) {
    for (int ell : {-n, n}) {
      const double nb = spectral_norm(sim.v0.outer.at(ell));
      acc += nb * nb;
    }
    report.tail_sq.push_back(acc);
  }
  return report;
}

BlockMatrix spectral_projection(const SimilarityResult& sim, SpectralCell cell) {
  const TruncationWindow& w = sim.window();
  BlockMatrix p(w);
  if (cell.central) {
    p = cell_projector(w, 0, sim.k);
  } else {
    if (std::abs(cell.ell) <= sim.k || !w.contains(cell.ell)) {
      std::ostringstream msg;
      msg << "mode " << cell.ell << " is not an outer cell (k = " << sim.k << ")";
      throw std::invalid_argument(msg.str());
    }
    p.set_block(cell.ell, cell.ell, Block::Identity(w.dim(), w.dim()));
  }
  return sim.u * p * sim.u_inv;
}

ProjectionGap equiconvergence_gap(const SimilarityResult& sim, int n) {
  const TruncationWindow& w = sim.window();
  if (n <= sim.k || n > w.half_width()) throw std::invalid_argument("equiconvergence_gap: need k < n <= N");
  // Sum of the perturbed projections up to n is U P_(n) U^{-1}.
  const BlockMatrix p_n = cell_projector(w, 0, n);
  BlockMatrix diff = sim.u * p_n * sim.u_inv;
  diff -= p_n;

  ProjectionGap out;
  out.n = n;
  out.gap = hs_norm(diff);
  const double a_gv = tail_alpha(transform_gamma(sim.v, 0), n);
  const double a_v = tail_alpha(sim.v, n);
  out.rate = a_gv + a_v * a_v;
  out.bound = out.rate;
  return out;
}

std::vector<ProjectionGap> equiconvergence_sweep(const SimilarityResult& sim) {
  std::vector<ProjectionGap> out;
  for (int n = sim.k + 1; n <= sim.window().half_width(); ++n) out.push_back(equiconvergence_gap(sim, n));
  if (out.empty()) return out;
  const double c3 = out.front().rate > 0.0 ? out.front().gap / out.front().rate : 0.0;
  for (auto& g : out) g.bound = c3 * g.rate;
  return out;
}

int coefficient_band(const BlockMatrix& v) {
  int band = 0;
  for (const auto& [idx, b] : v.blocks()) band = std::max(band, std::abs(idx.row + idx.col));
  return band;
}

int interior_radius(const SimilarityResult& sim) {
  return std::max(0, sim.window().half_width() - coefficient_band(sim.v) - sim.k);
}

double similarity_residual(const BlockMatrix& v, const SimilarityResult& sim) {
  const TruncationWindow& w = sim.window();
  require_same_window(v.window(), w);
  const BlockMatrix lam = BlockMatrix::lambda(w);
  BlockMatrix lhs = lam;
  lhs -= v;
  BlockMatrix generator = lam;
  generator -= sim.v0.assemble(w);
  BlockMatrix defect = lhs * sim.u;
  defect -= sim.u * generator;
  return hs_norm(defect.restricted(interior_radius(sim)));
}

}  // namespace simop
