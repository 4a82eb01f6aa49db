#pragma once

#include "simop/blockspace.hpp"

namespace simop {

/// J_m: keeps the central (2m+1)-mode square and the diagonal blocks outside
/// it, zeroes everything else.
BlockMatrix transform_j(const BlockMatrix& x, int m);

/// Gamma_m: block (j, l) becomes X_{jl} / (lambda_j - lambda_l) when j != l
/// and max(|j|, |l|) > m, zero otherwise. Solves
///   Lambda Y - Y Lambda = X - J_m X,  J_m Y = 0.
BlockMatrix transform_gamma(const BlockMatrix& x, int m);

/// hs_norm of Lambda Gamma_m X - (Gamma_m X) Lambda - (X - J_m X); zero up to
/// rounding.
double commutator_defect(const BlockMatrix& x, int m);

}  // namespace simop
