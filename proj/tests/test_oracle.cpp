#include <gtest/gtest.h>

#include <algorithm>

#include "simop/matching.hpp"
#include "simop/oracle.hpp"
#include "simop/potential.hpp"
#include "support.hpp"

using namespace simop;
using simop::testing::kTwoPi;

TEST(DenseTruncation, ZeroPotentialIsDiagonalLattice) {
  const TruncationWindow w(kTwoPi, 2, 3);
  const DenseTruncation dt = dense_truncation(PotentialSpec(w));
  const Eigen::MatrixXcd expected = BlockMatrix::lambda(w).to_dense();
  EXPECT_EQ((dt.matrix - expected).cwiseAbs().maxCoeff(), 0.0);
}

TEST(DenseTruncation, ConstantPotentialEntries) {
  const TruncationWindow w(kTwoPi, 1, 4);
  const DenseTruncation dt = dense_truncation(constant_over_c(w, 10.0));
  EXPECT_EQ(dt.matrix(w.offset(2), w.offset(-2)), cplx(-0.1));
  EXPECT_EQ(dt.matrix(w.offset(2), w.offset(2)), w.lambda(2));
  EXPECT_EQ(dt.matrix(w.offset(0), w.offset(0)), cplx(-0.1));
  EXPECT_EQ(dt.matrix(w.offset(1), w.offset(0)), cplx(0.0));
}

TEST(DenseTruncation, AgreesWithBlockAssembly) {
  const PotentialSpec spec = simop::testing::random_potential(2, 2, 6);
  const Eigen::MatrixXcd blocks = (BlockMatrix::lambda(spec.window()) - build_v_matrix(spec)).to_dense();
  EXPECT_LT((dense_truncation(spec).matrix - blocks).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(OracleSpectrum, ConstantPotential) {
  const TruncationWindow w(kTwoPi, 1, 10);
  const std::vector<cplx> got = oracle_spectrum(dense_truncation(constant_over_c(w, 10.0)));
  const ClosedFormExample ex = closed_form_example(10.0, w);
  EXPECT_LT(match_spectra(got, ex.spectrum).max_distance, 1e-10);
  for (std::size_t i = 1; i < got.size(); ++i) EXPECT_LE(got[i - 1].imag(), got[i].imag());
}

TEST(OracleSpectrum, InteriorStableUnderWindowGrowth) {
  const auto spec_for = [](int n) {
    PotentialSpec spec(TruncationWindow(kTwoPi, 1, n));
    spec.set_coefficient(1, Block::Constant(1, 1, 0.1));
    spec.set_coefficient(-1, Block::Constant(1, 1, 0.1));
    return spec;
  };
  const std::vector<cplx> small = oracle_spectrum(dense_truncation(spec_for(16)));
  const std::vector<cplx> large = oracle_spectrum(dense_truncation(spec_for(24)));
  for (const cplx& mu : small) {
    if (std::abs(mu.imag()) > 8.0) continue;
    double best = 1e300;
    for (const cplx& nu : large) best = std::min(best, std::abs(mu - nu));
    EXPECT_LT(best, 1e-8) << mu;
  }
}

TEST(OracleEvolve, IdentityTranslationAndGroupLaw) {
  const TruncationWindow w(kTwoPi, 1, 5);
  EvolutionState phi = EvolutionState::zero(w);
  phi.coeffs = simop::testing::random_vector(w.size(), 3);
  const DenseTruncation free = dense_truncation(PotentialSpec(w));
  EXPECT_LT((oracle_evolve(free, phi, 0.0).coeffs - phi.coeffs).norm(), 1e-15);
  const EvolutionState moved = oracle_evolve(free, phi, 0.4);
  EXPECT_LT((moved.evaluate(1.0) - phi.evaluate(1.4)).norm(), 1e-13);

  const DenseTruncation dt = dense_truncation(simop::testing::random_potential(4, 1, 5));
  const EvolutionState two_steps = oracle_evolve(dt, oracle_evolve(dt, phi, 0.3), 0.5);
  EXPECT_LT((two_steps.coeffs - oracle_evolve(dt, phi, 0.8).coeffs).norm(), 1e-12);
}

TEST(ClosedForm, ReferenceValues) {
  const TruncationWindow w(kTwoPi, 1, 8);
  const ClosedFormExample ex = closed_form_example(10.0, w);
  const double root = std::sqrt(1.0 - 1.0 / 400.0);
  const auto contains = [&](cplx z) {
    return std::any_of(ex.spectrum.begin(), ex.spectrum.end(), [&](cplx mu) { return std::abs(mu - z) < 1e-15; });
  };
  EXPECT_EQ(ex.spectrum.size(), 17u);
  EXPECT_TRUE(contains(-0.1));
  EXPECT_TRUE(contains(cplx(0.0, 2.0 * root)));
  EXPECT_NEAR(2.0 * root, 1.9974984355438179, 1e-15);
  EXPECT_EQ(ex.j_v(w.offset(1), w.offset(1)), cplx(0.0));
  EXPECT_EQ(ex.x.at(0), cplx(0.1));
  EXPECT_LT(std::abs(ex.x.at(-1) + ex.x.at(1)), 1e-18);
  EXPECT_LT(ex.contraction, 1.0);
  EXPECT_NEAR(ex.contraction, 4.0 * ex.alpha_tilde_1 * ex.v_tilde_m_norm, 1e-15);
}

TEST(ClosedForm, FixedPointRelations) {
  // x_j and y_j solve the 2x2 fixed point problem on the (j, -j) block:
  // (x_j, y_j) = Phi(x_j, y_j) with B the corresponding block of V~.
  const double c = 10.0;
  const ClosedFormExample ex = closed_form_example(c, TruncationWindow(kTwoPi, 1, 6));
  const cplx i(0.0, 1.0);
  for (const auto& [j, y] : ex.y) {
    const double jd = j;
    const double v = 1.0 / (c * (4.0 * jd * jd * c * c - 1.0));
    const double b = 1.0 - 2.0 * c * v;
    // y = 2cvy + (v / 4j^2) y^2 + v, rearranged
    EXPECT_NEAR(v / (4.0 * jd * jd) * y * y - b * y + v, 0.0, 1e-18) << j;
    const cplx x = ex.x.at(j);
    EXPECT_LT(std::abs(x - (i * v / (2.0 * jd) * y + 2.0 * c * jd * i * v)), 1e-16) << j;
  }
}

TEST(ClosedForm, RejectsUnsupportedParameters) {
  EXPECT_THROW(closed_form_example(0.5, TruncationWindow(kTwoPi, 1, 8)), std::invalid_argument);
  EXPECT_THROW(closed_form_example(10.0, TruncationWindow(3.0, 1, 8)), std::invalid_argument);
  EXPECT_THROW(closed_form_example(10.0, TruncationWindow(kTwoPi, 2, 8)), std::invalid_argument);
}

TEST(ClosedForm, ReportsContractionFailure) {
  try {
    closed_form_example(1.0, TruncationWindow(kTwoPi, 1, 8));
    FAIL() << "expected ContractionViolated";
  } catch (const MethodError& e) {
    EXPECT_EQ(e.kind(), FailureKind::ContractionViolated);
    EXPECT_GE(e.value(), 1.0);
  }
}
