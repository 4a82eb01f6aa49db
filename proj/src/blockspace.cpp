#include "simop/blockspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

namespace simop {

const char* to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::NoAdmissibleM: return "NoAdmissibleM";
    case FailureKind::NoAdmissibleK: return "NoAdmissibleK";
    case FailureKind::ContractionViolated: return "ContractionViolated";
    case FailureKind::MaxIterExceeded: return "MaxIterExceeded";
    case FailureKind::BallEscape: return "BallEscape";
    case FailureKind::InversionFailure: return "InversionFailure";
    case FailureKind::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case FailureKind::EigensolverFailure: return "EigensolverFailure";
  }
  return "Unknown";
}

bool is_precondition_failure(FailureKind kind) {
  return kind == FailureKind::NoAdmissibleM || kind == FailureKind::NoAdmissibleK ||
         kind == FailureKind::ContractionViolated;
}

TruncationWindow::TruncationWindow(double omega, int dim, int half_width)
    : omega_(omega), dim_(dim), half_width_(half_width) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw std::invalid_argument("TruncationWindow: omega must be a positive finite number");
  }
  if (dim < 1) throw std::invalid_argument("TruncationWindow: dim must be >= 1");
  if (half_width < 1) throw std::invalid_argument("TruncationWindow: half_width must be >= 1");
}

cplx TruncationWindow::lambda(int ell) const noexcept {
  return {0.0, 2.0 * std::numbers::pi * ell / omega_};
}

void require_same_window(const TruncationWindow& a, const TruncationWindow& b) {
  if (!(a == b)) throw WindowMismatch("operands belong to different truncation windows");
}

BlockMatrix::BlockMatrix(TruncationWindow window) : window_(window) {}

BlockMatrix BlockMatrix::identity(const TruncationWindow& window) {
  BlockMatrix id(window);
  const int n = window.half_width();
  for (int l = -n; l <= n; ++l) id.blocks_.emplace(BlockIndex{l, l}, Block::Identity(window.dim(), window.dim()));
  return id;
}

BlockMatrix BlockMatrix::lambda(const TruncationWindow& window) {
  BlockMatrix lam(window);
  const int n = window.half_width();
  for (int l = -n; l <= n; ++l) {
    if (l == 0) continue;
    lam.blocks_.emplace(BlockIndex{l, l}, window.lambda(l) * Block::Identity(window.dim(), window.dim()));
  }
  return lam;
}

BlockMatrix BlockMatrix::from_dense(const TruncationWindow& window, const Eigen::MatrixXcd& dense) {
  if (dense.rows() != window.size() || dense.cols() != window.size()) {
    throw std::invalid_argument("BlockMatrix::from_dense: dimension does not match the window");
  }
  BlockMatrix out(window);
  const int n = window.half_width();
  const int d = window.dim();
  for (int j = -n; j <= n; ++j) {
    for (int l = -n; l <= n; ++l) {
      auto b = dense.block(window.offset(j), window.offset(l), d, d);
      if ((b.array() != cplx(0.0)).any()) out.blocks_.emplace(BlockIndex{j, l}, b);
    }
  }
  return out;
}

void BlockMatrix::check_index(int j, int l) const {
  if (!window_.contains(j) || !window_.contains(l)) {
    std::ostringstream msg;
    msg << "block index (" << j << ", " << l << ") outside window of half-width " << window_.half_width();
    throw std::out_of_range(msg.str());
  }
}

Block BlockMatrix::block(int j, int l) const {
  check_index(j, l);
  if (const Block* b = find(j, l)) return *b;
  return Block::Zero(window_.dim(), window_.dim());
}

const Block* BlockMatrix::find(int j, int l) const {
  auto it = blocks_.find({j, l});
  return it == blocks_.end() ? nullptr : &it->second;
}

void BlockMatrix::set_block(int j, int l, Block value) {
  check_index(j, l);
  if (value.rows() != window_.dim() || value.cols() != window_.dim()) {
    throw std::invalid_argument("BlockMatrix::set_block: block is not dim x dim");
  }
  blocks_[{j, l}] = std::move(value);
}

void BlockMatrix::add_to_block(int j, int l, const Block& value) {
  check_index(j, l);
  auto [it, inserted] = blocks_.try_emplace(BlockIndex{j, l}, value);
  if (!inserted) it->second += value;
}

Eigen::MatrixXcd BlockMatrix::to_dense() const {
  Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(window_.size(), window_.size());
  const int d = window_.dim();
  for (const auto& [idx, b] : blocks_) dense.block(window_.offset(idx.row), window_.offset(idx.col), d, d) = b;
  return dense;
}

Eigen::VectorXcd BlockMatrix::apply(const Eigen::VectorXcd& x) const {
  if (x.size() != window_.size()) throw std::invalid_argument("BlockMatrix::apply: vector size mismatch");
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(window_.size());
  const int d = window_.dim();
  for (const auto& [idx, b] : blocks_) {
    y.segment(window_.offset(idx.row), d) += b * x.segment(window_.offset(idx.col), d);
  }
  return y;
}

BlockMatrix BlockMatrix::restricted(int radius) const {
  BlockMatrix out(window_);
  for (const auto& [idx, b] : blocks_) {
    if (std::abs(idx.row) <= radius && std::abs(idx.col) <= radius) out.blocks_.emplace(idx, b);
  }
  return out;
}

BlockMatrix& BlockMatrix::operator+=(const BlockMatrix& other) {
  require_same_window(window_, other.window_);
  for (const auto& [idx, b] : other.blocks_) add_to_block(idx.row, idx.col, b);
  return *this;
}

BlockMatrix& BlockMatrix::operator-=(const BlockMatrix& other) {
  require_same_window(window_, other.window_);
  for (const auto& [idx, b] : other.blocks_) add_to_block(idx.row, idx.col, -b);
  return *this;
}

BlockMatrix& BlockMatrix::operator*=(cplx scalar) {
  for (auto& [idx, b] : blocks_) b *= scalar;
  return *this;
}

BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b) {
  require_same_window(a.window_, b.window_);
  if (a.empty() || b.empty()) return BlockMatrix(a.window_);
  // Structural zeros of the operands stay exact zeros in the dense product,
  // so from_dense recovers the sparsity pattern.
  return BlockMatrix::from_dense(a.window_, a.to_dense() * b.to_dense());
}

Resolution::Resolution(TruncationWindow window, int central_radius)
    : window_(window), central_radius_(central_radius) {
  if (central_radius < 0 || central_radius > window.half_width()) {
    throw std::invalid_argument("Resolution: central radius must lie in [0, N]");
  }
}

int Resolution::cell_of(int ell) const noexcept {
  return std::abs(ell) <= central_radius_ ? 0 : ell;
}

double spectral_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  if (m.size() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

double hs_norm(const BlockMatrix& x, const Resolution& r) {
  require_same_window(x.window(), r.window());
  const TruncationWindow& w = x.window();
  const int m = r.central_radius();
  const int d = w.dim();
  const Eigen::Index central_size = static_cast<Eigen::Index>(2 * m + 1) * d;

  double sum = 0.0;
  // Cell blocks touching the merged central cell are assembled before taking
  // their operator norm; everything else is a single dim x dim block.
  std::map<std::pair<int, int>, Eigen::MatrixXcd> merged;
  auto local = [&](int ell) { return static_cast<Eigen::Index>(ell + m) * d; };
  for (const auto& [idx, b] : x.blocks()) {
    const int cr = r.cell_of(idx.row);
    const int cc = r.cell_of(idx.col);
    const bool row_central = std::abs(idx.row) <= m;
    const bool col_central = std::abs(idx.col) <= m;
    if (m == 0 || (!row_central && !col_central)) {
      const double nb = spectral_norm(b);
      sum += nb * nb;
      continue;
    }
    auto key = std::make_pair(cr, cc);
    auto it = merged.find(key);
    if (it == merged.end()) {
      const Eigen::Index rows = row_central ? central_size : d;
      const Eigen::Index cols = col_central ? central_size : d;
      it = merged.emplace(key, Eigen::MatrixXcd::Zero(rows, cols)).first;
    }
    const Eigen::Index ro = row_central ? local(idx.row) : 0;
    const Eigen::Index co = col_central ? local(idx.col) : 0;
    it->second.block(ro, co, d, d) = b;
  }
  for (const auto& [key, cell_block] : merged) {
    const double nb = spectral_norm(cell_block);
    sum += nb * nb;
  }
  return std::sqrt(sum);
}

double hs_norm(const BlockMatrix& x) { return hs_norm(x, Resolution::singletons(x.window())); }

double operator_norm_bound(const BlockMatrix& x, const Resolution& r) { return hs_norm(x, r); }

BlockMatrix neumann_or_direct_inverse(const BlockMatrix& w) {
  const TruncationWindow& win = w.window();
  if (w.empty()) return BlockMatrix(win);

  const double norm_w = hs_norm(w);
  if (norm_w <= 0.5) {
    // (I + W)^{-1} - I = sum_{n >= 1} (-W)^n
    BlockMatrix sum(win);
    BlockMatrix term = w * cplx(-1.0);
    for (int n = 1; n < 200; ++n) {
      sum += term;
      const double tn = hs_norm(term);
      if (tn <= 1e-17 * (1.0 + hs_norm(sum))) break;
      term = term * w;
      term *= cplx(-1.0);
    }
    return sum;
  }

  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(win.size(), win.size());
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(id + w.to_dense());
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double rcond = std::min(lu.rcond(), pivots.minCoeff() / pivots.maxCoeff());
  if (!(rcond > 1e-14)) {
    std::ostringstream msg;
    msg << "I + W is singular to working precision (reciprocal condition estimate " << rcond << ")";
    throw MethodError(FailureKind::InversionFailure, msg.str(), rcond);
  }
  return BlockMatrix::from_dense(win, lu.solve(id) - id);
}

std::vector<double> row_norms_sq(const BlockMatrix& x) {
  const TruncationWindow& w = x.window();
  std::vector<double> out(static_cast<std::size_t>(w.modes()), 0.0);
  for (const auto& [idx, b] : x.blocks()) {
    const double nb = spectral_norm(b);
    out[static_cast<std::size_t>(idx.row + w.half_width())] += nb * nb;
  }
  return out;
}

std::vector<double> col_norms_sq(const BlockMatrix& x) {
  const TruncationWindow& w = x.window();
  std::vector<double> out(static_cast<std::size_t>(w.modes()), 0.0);
  for (const auto& [idx, b] : x.blocks()) {
    const double nb = spectral_norm(b);
    out[static_cast<std::size_t>(idx.col + w.half_width())] += nb * nb;
  }
  return out;
}

}  // namespace simop
