#include <gtest/gtest.h>

#include <sstream>

#include "simop/potential.hpp"
#include "simop/transforms.hpp"
#include "support.hpp"

using namespace simop;
using simop::testing::kTwoPi;

namespace {

std::vector<Block> sample(int m, const std::function<Block(double)>& f) {
  std::vector<Block> out;
  for (int p = 0; p < m; ++p) out.push_back(f(kTwoPi * p / m));
  return out;
}

}  // namespace

TEST(CoefficientsFromSamples, ConstantFunction) {
  const TruncationWindow w(kTwoPi, 2, 4);
  const PotentialSpec spec =
      coefficients_from_samples(w, sample(17, [](double) -> Block { return 0.1 * Block::Identity(2, 2); }));
  for (int n = -8; n <= 8; ++n) {
    const Block expected = n == 0 ? Block(0.1 * Block::Identity(2, 2)) : Block(Block::Zero(2, 2));
    EXPECT_LT((spec.coefficient(n) - expected).norm(), 1e-15) << n;
  }
}

TEST(CoefficientsFromSamples, SingleHarmonic) {
  const TruncationWindow w(kTwoPi, 2, 4);
  Block a(2, 2);
  a << cplx(1, 2), cplx(0, -1), cplx(0.5, 0), cplx(-3, 1);
  const PotentialSpec spec =
      coefficients_from_samples(w, sample(20, [&](double s) -> Block { return a * std::polar(1.0, s); }));
  for (int n = -8; n <= 8; ++n) EXPECT_LT((spec.coefficient(n) - (n == 1 ? a : Block(Block::Zero(2, 2)))).norm(), 1e-13);
}

TEST(CoefficientsFromSamples, Cosine) {
  const TruncationWindow w(kTwoPi, 1, 8);
  const PotentialSpec spec =
      coefficients_from_samples(w, sample(64, [](double s) -> Block { return Block::Constant(1, 1, std::cos(s)); }));
  for (int n = -16; n <= 16; ++n) {
    const double expected = std::abs(n) == 1 ? 0.5 : 0.0;
    EXPECT_LT(std::abs(spec.coefficient(n)(0, 0) - expected), 1e-12) << n;
  }
}

TEST(CoefficientsFromSamples, ExactOnTrigonometricPolynomials) {
  const TruncationWindow w(kTwoPi, 1, 6);
  std::map<int, cplx> truth{{-6, {0.1, 0.2}}, {-1, {0.3, 0}}, {0, {1, -1}}, {4, {0, 0.7}}, {6, {-0.2, 0.05}}};
  auto f = [&](double s) -> Block {
    cplx acc = 0;
    for (const auto& [n, c] : truth) acc += c * std::polar(1.0, n * s);
    return Block::Constant(1, 1, acc);
  };
  const PotentialSpec spec = coefficients_from_samples(w, sample(25, f));
  for (int n = -12; n <= 12; ++n) {
    const cplx expected = truth.count(n) ? truth.at(n) : cplx(0);
    EXPECT_LT(std::abs(spec.coefficient(n)(0, 0) - expected), 1e-12) << n;
  }
}

TEST(CoefficientsFromSamples, RealPotentialHasConjugateSymmetricCoefficients) {
  const TruncationWindow w(kTwoPi, 1, 5);
  const PotentialSpec spec = coefficients_from_samples(
      w, sample(30, [](double s) -> Block { return Block::Constant(1, 1, std::exp(std::sin(s)) + 0.3 * std::cos(3 * s)); }));
  for (int n = 0; n <= 10; ++n) EXPECT_LT(std::abs(spec.coefficient(-n)(0, 0) - std::conj(spec.coefficient(n)(0, 0))), 1e-14);
}

TEST(CoefficientsFromSamples, TooFewSamples) {
  const TruncationWindow w(kTwoPi, 1, 4);
  const std::vector<Block> samples(16, Block::Identity(1, 1));
  EXPECT_THROW(coefficients_from_samples(w, samples), std::invalid_argument);
}

TEST(ReadPotentialSamples, ParsesInterleavedColumns) {
  std::istringstream in("# header\n1,0,0,2,0,0,3,-1\n0.5,0.5,0,0,0,0,1,1\n");
  const std::vector<Block> s = read_potential_samples(in, 2);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0](0, 1), cplx(0, 2));
  EXPECT_EQ(s[0](1, 1), cplx(3, -1));
  EXPECT_EQ(s[1](0, 0), cplx(0.5, 0.5));
  std::istringstream bad("1,2,3\n");
  EXPECT_THROW(read_potential_samples(bad, 1), std::invalid_argument);
}

TEST(BuildVMatrix, ConstantPotential) {
  const TruncationWindow w(kTwoPi, 1, 8);
  const BlockMatrix v = build_v_matrix(constant_over_c(w, 10.0));
  for (int j = -8; j <= 8; ++j) {
    for (int l = -8; l <= 8; ++l) EXPECT_EQ(v.block(j, l)(0, 0), j + l == 0 ? cplx(0.1) : cplx(0.0));
  }
}

TEST(BuildVMatrix, ZeroPotential) {
  EXPECT_TRUE(build_v_matrix(PotentialSpec(TruncationWindow(kTwoPi, 2, 5))).empty());
}

TEST(BuildVMatrix, SingleHarmonicFillsOneAntiDiagonal) {
  const TruncationWindow w(kTwoPi, 2, 4);
  PotentialSpec spec(w);
  const Block a = simop::testing::random_dense(2, 2, 5);
  spec.set_coefficient(1, a);
  const BlockMatrix v = build_v_matrix(spec);
  EXPECT_EQ(v.stored_blocks(), 8u);
  for (const auto& [idx, b] : v.blocks()) {
    EXPECT_EQ(idx.row + idx.col, 1);
    EXPECT_EQ((b - a).norm(), 0.0);
  }
}

TEST(BuildVMatrix, HankelProperty) {
  const PotentialSpec spec = simop::testing::random_potential(3, 2, 6, 5);
  const BlockMatrix v = build_v_matrix(spec);
  for (int j = -6; j <= 6; ++j) {
    for (int l = -6; l <= 6; ++l) {
      for (int j2 = -6; j2 <= 6; ++j2) {
        const int l2 = j + l - j2;
        if (l2 < -6 || l2 > 6) continue;
        EXPECT_EQ((v.block(j, l) - v.block(j2, l2)).norm(), 0.0);
      }
    }
  }
}

TEST(CheckAdmissibility, ZeroPotential) {
  const AdmissibilityReport r = check_admissibility(PotentialSpec(TruncationWindow(kTwoPi, 1, 8)));
  EXPECT_EQ(r.sum_sq, 0.0);
  EXPECT_EQ(r.cond4_norm, 0.0);
}

TEST(CheckAdmissibility, ConstantPotentialZIsDiagonal) {
  const TruncationWindow w(kTwoPi, 1, 8);
  const double c = 10.0;
  const BlockMatrix z = condition4_matrix(constant_over_c(w, c));
  for (const auto& [idx, b] : z.blocks()) {
    if (std::abs(b(0, 0)) == 0.0) continue;
    EXPECT_EQ(idx.row, idx.col);
  }
  for (int j = -8; j <= 8; ++j) {
    const cplx expected = j == 0 ? cplx(0) : cplx(0.0, 1.0 / (2.0 * j * c * c));
    EXPECT_LT(std::abs(z.block(j, j)(0, 0) - expected), 1e-16) << j;
  }
}

TEST(CheckAdmissibility, CosinePotentialAgainstDirectDoubleSum) {
  const TruncationWindow w(kTwoPi, 1, 8);
  PotentialSpec spec(w);
  spec.set_coefficient(-1, Block::Constant(1, 1, 0.5));
  spec.set_coefficient(1, Block::Constant(1, 1, 0.5));
  const AdmissibilityReport r = check_admissibility(spec);
  EXPECT_NEAR(r.sum_sq, 0.5, 1e-15);
  EXPECT_EQ(r.sufficient, SufficientCondition::AbsolutelySummable);

  // Z_{jl} = sum_{n != l} V^(j+n) V^(n+l) / (i (n - l)), omega = 2 pi.
  double sq = 0.0;
  for (int j = -8; j <= 8; ++j) {
    for (int l = -8; l <= 8; ++l) {
      cplx z = 0.0;
      for (int n = -8; n <= 8; ++n) {
        if (n == l) continue;
        const cplx a = std::abs(j + n) == 1 ? 0.5 : 0.0;
        const cplx b = std::abs(n + l) == 1 ? 0.5 : 0.0;
        z += a * b / cplx(0.0, n - l);
      }
      sq += std::norm(z);
    }
  }
  EXPECT_NEAR(r.cond4_norm, std::sqrt(sq), 1e-14);
  EXPECT_TRUE(std::isfinite(r.cond4_norm));
}

TEST(CheckAdmissibility, ZMatchesBlockProductOnInterior) {
  const PotentialSpec spec = simop::testing::random_potential(9, 2, 12);
  const BlockMatrix v = build_v_matrix(spec);
  const BlockMatrix z = condition4_matrix(spec);
  const BlockMatrix prod = v * transform_gamma(v, 0);
  for (int j = -6; j <= 6; ++j) {
    for (int l = -6; l <= 6; ++l) EXPECT_LT((z.block(j, l) - prod.block(j, l)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(PotentialSpec, RejectsIndicesOutsideBand) {
  PotentialSpec spec(TruncationWindow(kTwoPi, 1, 3));
  EXPECT_THROW(spec.set_coefficient(7, Block::Identity(1, 1)), std::out_of_range);
  EXPECT_THROW(spec.set_coefficient(0, Block::Identity(2, 2)), std::invalid_argument);
}
