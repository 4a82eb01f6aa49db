#include "simop/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "simop/transforms.hpp"

namespace simop {

AlphaWeights alpha_weights(const BlockMatrix& x) {
  const TruncationWindow& w = x.window();
  const int n_max = w.half_width();
  const double norm = hs_norm(x);
  if (norm == 0.0) throw std::invalid_argument("alpha_weights: X must be nonzero");

  const std::vector<double> rows = row_norms_sq(x);
  const std::vector<double> cols = col_norms_sq(x);
  auto idx = [&](int ell) { return static_cast<std::size_t>(ell + n_max); };

  AlphaWeights out;
  out.omega = w.omega();
  out.half_width = n_max;
  out.alpha_raw.assign(static_cast<std::size_t>(n_max + 1), 0.0);

  // Tails over |l| >= n, accumulated from the edge inwards.
  double row_tail = 0.0;
  double col_tail = 0.0;
  for (int n = n_max; n >= 0; --n) {
    row_tail += rows[idx(n)];
    col_tail += cols[idx(n)];
    if (n != 0) {
      row_tail += rows[idx(-n)];
      col_tail += cols[idx(-n)];
    }
    out.alpha_raw[static_cast<std::size_t>(n)] =
        std::max(std::pow(row_tail, 0.25), std::pow(col_tail, 0.25)) / std::sqrt(norm);
  }

  out.floor = kAlphaFloor * out.alpha_raw[0];
  out.alpha = out.alpha_raw;
  for (double& a : out.alpha) a = std::max(a, out.floor);

  out.alpha_prime.assign(static_cast<std::size_t>(n_max + 1), 0.0);
  out.alpha_tilde.assign(static_cast<std::size_t>(n_max + 1), 0.0);
  const double scale = w.omega() / (2.0 * std::numbers::pi);
  for (int n = 1; n <= n_max; ++n) {
    double best = 0.0;
    for (int i = n; i <= n_max; ++i) {
      // alpha is even in its index, so i >= n covers |i| >= n once j takes
      // both signs.
      for (int j = -(n - 1); j <= n - 1; ++j) {
        best = std::max(best, std::abs(out.at(i) - out.at(j)) / std::abs(i - j));
      }
    }
    out.alpha_prime[static_cast<std::size_t>(n)] = best;
    out.alpha_tilde[static_cast<std::size_t>(n)] = scale * (2.0 * out.at(n) + best);
  }
  return out;
}

double m_norm(const BlockMatrix& x, const AlphaWeights& w) {
  if (w.half_width != x.window().half_width()) throw WindowMismatch("alpha weights built for another window");
  BlockMatrix left(x.window());
  BlockMatrix right(x.window());
  for (const auto& [idx, b] : x.blocks()) {
    left.set_block(idx.row, idx.col, b / w.at(idx.col));
    right.set_block(idx.row, idx.col, b / w.at(idx.row));
  }
  return std::max(hs_norm(left), hs_norm(right));
}

int select_m(const BlockMatrix& v, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("select_m: theta must lie in (0, 1)");
  const int n_max = v.window().half_width();
  double best = 0.0;
  for (int m = 0; m < n_max; ++m) {
    const double g = hs_norm(transform_gamma(v, m));
    if (g <= theta) return m;
    best = g;
  }
  std::ostringstream msg;
  msg << "no central radius m in [0, " << n_max - 1 << "] gives ||Gamma_m V|| <= " << theta
      << " (at m = " << n_max - 1 << ": " << best << ")";
  throw MethodError(FailureKind::NoAdmissibleM, msg.str(), best);
}

PreliminaryTransform preliminary_transform(const BlockMatrix& v, int m) {
  const TruncationWindow& w = v.window();
  BlockMatrix gamma_v = transform_gamma(v, m);
  const double g = hs_norm(gamma_v);
  if (!(g < 1.0)) {
    std::ostringstream msg;
    msg << "||Gamma_m V|| = " << g << " is not below 1 at m = " << m;
    throw MethodError(FailureKind::ContractionViolated, msg.str(), g);
  }
  const BlockMatrix jv = transform_j(v, m);
  BlockMatrix inverse_delta = neumann_or_direct_inverse(gamma_v);

  BlockMatrix inner = v * gamma_v;
  inner -= gamma_v * jv;
  BlockMatrix v_tilde = jv;
  v_tilde += inner;
  v_tilde += inverse_delta * inner;

  BlockMatrix first_factor = BlockMatrix::identity(w);
  first_factor += gamma_v;
  return {std::move(v_tilde), std::move(first_factor), std::move(gamma_v), std::move(inverse_delta)};
}

int select_k(const BlockMatrix& v_tilde, const AlphaWeights& w, int m) {
  const int n_max = v_tilde.window().half_width();
  const double mn = m_norm(v_tilde, w);
  double best = 0.0;
  bool have_best = false;
  for (int k = m; k < n_max; ++k) {
    const double c = 4.0 * w.tilde(k + 1) * mn;
    if (c < 1.0) return k;
    if (!have_best || c < best) best = c;
    have_best = true;
  }
  std::ostringstream msg;
  msg << "no k in [" << m << ", " << n_max - 1 << "] satisfies 4 alpha~_{k+1} ||V~||_M < 1 (smallest value "
      << best << ", ||V~||_M = " << mn << ")";
  throw MethodError(FailureKind::NoAdmissibleK, msg.str(), best);
}

BlockMatrix phi_map(const BlockMatrix& x, const BlockMatrix& b, int k) {
  require_same_window(x.window(), b.window());
  const BlockMatrix gx = transform_gamma(x, k);
  const BlockMatrix b_gx = b * gx;
  BlockMatrix out = b_gx;
  out -= gx * transform_j(b, k);
  out -= gx * transform_j(b_gx, k);
  out += b;
  return out;
}

FixedPointResult fixed_point(const BlockMatrix& b, int k, double tol, int max_iter) {
  FixedPointResult result{BlockMatrix(b.window()), {}};
  const double b_norm = hs_norm(b);
  if (b_norm == 0.0) return result;

  // Rounding allowance on the ball test so that an iterate sitting on the
  // boundary is not reported as an escape.
  const double radius = 3.0 * b_norm * (1.0 + 1e-12);
  BlockMatrix x(b.window());
  for (int it = 0; it < max_iter; ++it) {
    BlockMatrix next = phi_map(x, b, k);
    const double residual = hs_norm(next - x);
    auto& log = result.log;
    if (!log.residuals.empty() && !(residual < log.residuals.back())) log.strictly_decreasing = false;
    log.residuals.push_back(residual);
    log.ball_radii.push_back(hs_norm(x - b));
    if (log.ball_radii.back() > radius) {
      std::ostringstream msg;
      msg << "iterate " << it << " left the ball ||X - B|| <= 3||B|| (distance " << log.ball_radii.back()
          << ", radius " << 3.0 * b_norm << ")";
      throw MethodError(FailureKind::BallEscape, msg.str(), log.ball_radii.back());
    }
    if (residual <= tol) {
      result.x = std::move(x);
      return result;
    }
    x = std::move(next);
  }
  std::ostringstream msg;
  msg << "fixed point iteration did not reach tolerance " << tol << " in " << max_iter << " iterations (last residual "
      << result.log.residuals.back() << ")";
  throw MethodError(FailureKind::MaxIterExceeded, msg.str(), result.log.residuals.back());
}

BlockMatrix DiagonalBlocks::assemble(const TruncationWindow& w) const {
  BlockMatrix out(w);
  const int d = w.dim();
  for (int j = -k; j <= k; ++j) {
    for (int l = -k; l <= k; ++l) {
      Block b = central.block(static_cast<Eigen::Index>(j + k) * d, static_cast<Eigen::Index>(l + k) * d, d, d);
      if (!b.isZero(0.0)) out.set_block(j, l, std::move(b));
    }
  }
  for (const auto& [ell, b] : outer) {
    if (!b.isZero(0.0)) out.set_block(ell, ell, b);
  }
  return out;
}

DiagonalBlocks v0_blocks(const BlockMatrix& x_star, int k) {
  const TruncationWindow& w = x_star.window();
  if (k < 0 || k > w.half_width()) throw std::invalid_argument("v0_blocks: k must lie in [0, N]");
  const int d = w.dim();
  DiagonalBlocks out;
  out.k = k;
  out.central = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(2 * k + 1) * d, static_cast<Eigen::Index>(2 * k + 1) * d);
  for (const auto& [idx, b] : x_star.blocks()) {
    if (std::abs(idx.row) <= k && std::abs(idx.col) <= k) {
      out.central.block(static_cast<Eigen::Index>(idx.row + k) * d, static_cast<Eigen::Index>(idx.col + k) * d, d, d) = b;
    }
  }
  for (int ell = k + 1; ell <= w.half_width(); ++ell) {
    out.outer.emplace(-ell, x_star.block(-ell, -ell));
    out.outer.emplace(ell, x_star.block(ell, ell));
  }
  return out;
}

SimilarityTransform assemble_u(const BlockMatrix& v, const BlockMatrix& x_star, int m, int k) {
  require_same_window(v.window(), x_star.window());
  const TruncationWindow& w = v.window();
  const BlockMatrix first = transform_gamma(v, m);
  const BlockMatrix second = transform_gamma(x_star, k);
  // W = Gamma_m V + Gamma_k X* + (Gamma_m V)(Gamma_k X*)
  BlockMatrix wm = first;
  wm += second;
  wm += first * second;
  SimilarityTransform out{BlockMatrix::identity(w), BlockMatrix::identity(w), hs_norm(wm), 0.0};
  const BlockMatrix w_inv = neumann_or_direct_inverse(wm);
  out.w_inv_norm = hs_norm(w_inv);
  out.u += wm;
  out.u_inv += w_inv;
  return out;
}

SimilarityResult run_similarity(const BlockMatrix& v, const SimilarityOptions& options) {
  SimilarityResult r{.v = v,
                     .gamma_v = BlockMatrix(v.window()),
                     .v_tilde = BlockMatrix(v.window()),
                     .x_star = BlockMatrix(v.window()),
                     .u = BlockMatrix(v.window()),
                     .u_inv = BlockMatrix(v.window()),
                     .v0 = {},
                     .log = {}};
  r.log.v_norm = hs_norm(v);

  r.m = select_m(v, options.theta);
  PreliminaryTransform pre = preliminary_transform(v, r.m);
  r.gamma_v = std::move(pre.gamma_v);
  r.v_tilde = std::move(pre.v_tilde);
  r.log.gamma_m_norm = hs_norm(r.gamma_v);
  r.log.v_tilde_norm = hs_norm(r.v_tilde);

  if (r.log.v_tilde_norm == 0.0) {
    // Nothing left to diagonalize; the second stage is the identity.
    r.k = r.m;
  } else {
    const AlphaWeights weights = alpha_weights(r.v_tilde);
    r.log.v_tilde_m_norm = m_norm(r.v_tilde, weights);
    r.k = select_k(r.v_tilde, weights, r.m);
    r.log.alpha_tilde_k1 = weights.tilde(r.k + 1);
    r.log.contraction = 4.0 * r.log.alpha_tilde_k1 * r.log.v_tilde_m_norm;
    FixedPointResult fp = fixed_point(r.v_tilde, r.k, options.fixed_point_tol * r.log.v_tilde_norm, options.max_iter);
    r.x_star = std::move(fp.x);
    r.log.fixed_point = std::move(fp.log);
  }

  r.v0 = v0_blocks(r.x_star, r.k);
  SimilarityTransform t = assemble_u(v, r.x_star, r.m, r.k);
  r.u = std::move(t.u);
  r.u_inv = std::move(t.u_inv);
  r.w_norm = t.w_norm;
  r.w_inv_norm = t.w_inv_norm;
  return r;
}

}  // namespace simop
