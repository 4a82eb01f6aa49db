#pragma once

#include <complex>
#include <compare>
#include <cstddef>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "simop/errors.hpp"

namespace simop {

using cplx = std::complex<double>;
using Block = Eigen::MatrixXcd;

/// Finite section of the Fourier lattice: modes |l| <= half_width of
/// omega-periodic functions with values in C^dim.
class TruncationWindow {
 public:
  TruncationWindow(double omega, int dim, int half_width);

  double omega() const noexcept { return omega_; }
  int dim() const noexcept { return dim_; }
  int half_width() const noexcept { return half_width_; }

  /// Number of modes 2N+1.
  int modes() const noexcept { return 2 * half_width_ + 1; }
  /// Dense dimension (2N+1)d.
  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(modes()) * dim_; }
  /// Row/column offset of mode `ell` in the dense layout.
  Eigen::Index offset(int ell) const noexcept {
    return static_cast<Eigen::Index>(ell + half_width_) * dim_;
  }
  bool contains(int ell) const noexcept { return ell >= -half_width_ && ell <= half_width_; }

  /// Eigenvalue i*2*pi*ell/omega of d/ds on the mode ell.
  cplx lambda(int ell) const noexcept;

  bool operator==(const TruncationWindow&) const = default;

 private:
  double omega_;
  int dim_;
  int half_width_;
};

struct BlockIndex {
  int row;
  int col;
  auto operator<=>(const BlockIndex&) const = default;
};

/// Operator on the truncated space stored as a sparse table of dim x dim
/// blocks X_{jl} = P_j X P_l. Absent entries are zero blocks.
class BlockMatrix {
 public:
  using Storage = std::map<BlockIndex, Block>;

  explicit BlockMatrix(TruncationWindow window);

  static BlockMatrix identity(const TruncationWindow& window);
  /// Diagonal matrix of lambda_l I_d, the truncation of d/ds.
  static BlockMatrix lambda(const TruncationWindow& window);
  /// Splits a dense matrix into blocks, dropping blocks that are exactly zero.
  static BlockMatrix from_dense(const TruncationWindow& window, const Eigen::MatrixXcd& dense);

  const TruncationWindow& window() const noexcept { return window_; }
  const Storage& blocks() const noexcept { return blocks_; }
  std::size_t stored_blocks() const noexcept { return blocks_.size(); }
  bool empty() const noexcept { return blocks_.empty(); }

  /// Block at (j, l); a zero block when nothing is stored there.
  Block block(int j, int l) const;
  const Block* find(int j, int l) const;

  void set_block(int j, int l, Block value);
  void add_to_block(int j, int l, const Block& value);

  Eigen::MatrixXcd to_dense() const;
  /// Dense matrix-vector product on the coefficient layout of the window.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;

  /// Restriction to the square of modes |j|, |l| <= radius (other blocks dropped).
  BlockMatrix restricted(int radius) const;

  BlockMatrix& operator+=(const BlockMatrix& other);
  BlockMatrix& operator-=(const BlockMatrix& other);
  BlockMatrix& operator*=(cplx scalar);

  friend BlockMatrix operator+(BlockMatrix a, const BlockMatrix& b) { return a += b; }
  friend BlockMatrix operator-(BlockMatrix a, const BlockMatrix& b) { return a -= b; }
  friend BlockMatrix operator*(BlockMatrix a, cplx s) { return a *= s; }
  friend BlockMatrix operator*(cplx s, BlockMatrix a) { return a *= s; }
  friend BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b);

 private:
  void check_index(int j, int l) const;

  TruncationWindow window_;
  Storage blocks_;
};

void require_same_window(const TruncationWindow& a, const TruncationWindow& b);

/// Coarsened resolution of the identity: the modes |l| <= central_radius form
/// one cell, every other mode is its own cell.
class Resolution {
 public:
  Resolution(TruncationWindow window, int central_radius);
  /// All cells singletons.
  static Resolution singletons(const TruncationWindow& window) { return {window, 0}; }

  const TruncationWindow& window() const noexcept { return window_; }
  int central_radius() const noexcept { return central_radius_; }

  /// Cell id of mode ell: 0 for the central cell, ell itself otherwise.
  int cell_of(int ell) const noexcept;
  int cell_count() const noexcept { return window_.modes() - 2 * central_radius_; }

 private:
  TruncationWindow window_;
  int central_radius_;
};

/// Spectral norm; modulus for 1 x 1 blocks.
double spectral_norm(const Eigen::MatrixXcd& m);

/// Hilbert-Schmidt norm with respect to a resolution:
/// (sum over cell pairs of ||P_a X P_b||^2)^{1/2}, with operator norms of the
/// cell blocks.
double hs_norm(const BlockMatrix& x, const Resolution& r);
/// hs_norm for the resolution by single modes.
double hs_norm(const BlockMatrix& x);

/// Upper bound for the operator norm of x (the HS norm dominates it).
double operator_norm_bound(const BlockMatrix& x, const Resolution& r);

/// Given W, returns W' with (I + W)(I + W') = I. Uses the Neumann series when
/// hs_norm(W) <= 1/2 and a pivoted dense solve otherwise. Throws
/// MethodError(InversionFailure) when I + W is numerically singular.
BlockMatrix neumann_or_direct_inverse(const BlockMatrix& w);

/// Row norms sum_j ||X_{lj}||^2 and column norms sum_j ||X_{jl}||^2 per mode l,
/// indexed by l + N.
std::vector<double> row_norms_sq(const BlockMatrix& x);
std::vector<double> col_norms_sq(const BlockMatrix& x);

}  // namespace simop
