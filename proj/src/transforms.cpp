#include "simop/transforms.hpp"

#include <cstdlib>
#include <stdexcept>

namespace simop {

namespace {

void check_radius(const BlockMatrix& x, int m) {
  if (m < 0 || m > x.window().half_width()) throw std::invalid_argument("central radius m must lie in [0, N]");
}

bool in_central_square(int j, int l, int m) { return std::abs(j) <= m && std::abs(l) <= m; }

}  // namespace

BlockMatrix transform_j(const BlockMatrix& x, int m) {
  check_radius(x, m);
  BlockMatrix out(x.window());
  for (const auto& [idx, b] : x.blocks()) {
    if (idx.row == idx.col || in_central_square(idx.row, idx.col, m)) out.set_block(idx.row, idx.col, b);
  }
  return out;
}

BlockMatrix transform_gamma(const BlockMatrix& x, int m) {
  check_radius(x, m);
  const TruncationWindow& w = x.window();
  BlockMatrix out(w);
  for (const auto& [idx, b] : x.blocks()) {
    if (idx.row == idx.col || in_central_square(idx.row, idx.col, m)) continue;
    out.set_block(idx.row, idx.col, b / (w.lambda(idx.row) - w.lambda(idx.col)));
  }
  return out;
}

double commutator_defect(const BlockMatrix& x, int m) {
  const BlockMatrix lam = BlockMatrix::lambda(x.window());
  const BlockMatrix y = transform_gamma(x, m);
  BlockMatrix defect = lam * y - y * lam;
  defect -= x;
  defect += transform_j(x, m);
  return hs_norm(defect);
}

}  // namespace simop
