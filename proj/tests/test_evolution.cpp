#include <gtest/gtest.h>

#include "simop/evolution.hpp"
#include "simop/oracle.hpp"
#include "simop/potential.hpp"
#include "simop/spectral.hpp"
#include "support.hpp"

using namespace simop;
using simop::testing::kTwoPi;

namespace {

const cplx I(0.0, 1.0);

SimilarityResult similar(const PotentialSpec& spec) { return run_similarity(build_v_matrix(spec)); }

Eigen::VectorXcd one(cplx z) { return Eigen::VectorXcd::Constant(1, z); }

EvolutionState random_state(const TruncationWindow& w, unsigned seed) {
  EvolutionState s = EvolutionState::zero(w);
  s.coeffs = simop::testing::random_vector(w.size(), seed);
  return s;
}

}  // namespace

TEST(EvolutionState, ModesAndPointValues) {
  const TruncationWindow w(kTwoPi, 1, 3);
  EvolutionState s = EvolutionState::mode(w, 2, one(3.0));
  s.set_mode_coeff(-1, one(cplx(0.0, 1.0)));
  EXPECT_EQ(s.mode_coeff(2)(0), cplx(3.0));
  const double x = 0.7;
  const cplx expected = 3.0 * std::exp(2.0 * I * x) + I * std::exp(-I * x);
  EXPECT_LT(std::abs(s.evaluate(x)(0) - expected), 1e-14);
  EXPECT_THROW(s.set_mode_coeff(4, one(1.0)), std::out_of_range);
  EXPECT_THROW(EvolutionState::mode(w, 0, Eigen::VectorXcd::Zero(2)), std::invalid_argument);
}

TEST(EvolutionState, Parseval) {
  const TruncationWindow w(3.0, 2, 4);
  const EvolutionState s = random_state(w, 1);
  const auto integrand = [&](double x) -> Eigen::VectorXcd { return one(s.evaluate(x).squaredNorm()); };
  const double mean_sq = integrate(integrand, 0.0, 3.0, {1e-13, 20})(0).real() / 3.0;
  EXPECT_NEAR(std::sqrt(mean_sq), s.norm(), 1e-12);
}

TEST(MatrixExponential, IdentityScalarAndDefective) {
  const Eigen::MatrixXcd g = simop::testing::random_dense(4, 4, 2);
  EXPECT_LT((matrix_exponential(g, 0.0) - Eigen::MatrixXcd::Identity(4, 4)).norm(), 1e-14);
  const cplx z(-0.3, 2.0);
  EXPECT_LT(std::abs(matrix_exponential(Eigen::MatrixXcd::Constant(1, 1, z), 1.5)(0, 0) - std::exp(1.5 * z)), 1e-14);
  Eigen::MatrixXcd jordan = Eigen::MatrixXcd::Zero(2, 2);
  jordan(0, 0) = jordan(1, 1) = I;
  jordan(0, 1) = 1.0;
  const Eigen::MatrixXcd e = matrix_exponential(jordan, 2.0);
  EXPECT_LT(std::abs(e(0, 1) - 2.0 * std::exp(2.0 * I)), 1e-13);
  EXPECT_LT(std::abs(e(1, 0)), 1e-13);
}

TEST(MatrixExponential, GroupLaw) {
  const Eigen::MatrixXcd g = simop::testing::random_dense(5, 5, 3);
  const Eigen::MatrixXcd lhs = matrix_exponential(g, 0.7) * matrix_exponential(g, -0.2);
  EXPECT_LT((lhs - matrix_exponential(g, 0.5)).norm(), 1e-12 * matrix_exponential(g, 0.5).norm());
}

TEST(BlockExponential, ConstantPotential) {
  const TruncationWindow w(kTwoPi, 1, 6);
  const ClosedFormExample ex = closed_form_example(10.0, w);
  const GroupBlocks g = GroupBlocks::from(similar(constant_over_c(w, 10.0)));
  const double t = 1.3;
  EXPECT_LT(std::abs(block_exponential(g, std::nullopt, t)(0, 0) - std::exp(-0.1 * t)), 1e-15);
  for (int j : {-6, -1, 2, 5}) {
    const cplx mu = I * static_cast<double>(j) - ex.x.at(j);
    EXPECT_LT(std::abs(block_exponential(g, j, t)(0, 0) - std::exp(t * mu)), 1e-14) << j;
  }
  EXPECT_THROW(block_exponential(g, 0, t), std::out_of_range);
}

TEST(GroupEvolver, ZeroPotentialIsTranslation) {
  const TruncationWindow w(kTwoPi, 2, 5);
  const SimilarityResult sim = similar(PotentialSpec(w));
  const EvolutionState phi = random_state(w, 4);
  const double t = 0.9;
  const EvolutionState out = group_apply(sim, t, phi);
  for (double s : {0.0, 1.1, 4.0}) EXPECT_LT((out.evaluate(s) - phi.evaluate(s + t)).norm(), 1e-13);
}

TEST(GroupEvolver, EigenvectorEvolvesByItsEigenvalue) {
  const TruncationWindow w(kTwoPi, 1, 8);
  const SimilarityResult sim = similar(constant_over_c(w, 10.0));
  const SpectrumReport spec = spectrum(sim);
  const int j = 3;
  EvolutionState phi = EvolutionState::zero(w);
  phi.coeffs = sim.u.to_dense().col(w.offset(j));
  const GroupEvolver evolver(sim);
  for (double t : {-2.0, 0.5, 7.0}) {
    const EvolutionState out = evolver.apply(t, phi);
    EXPECT_LT((out.coeffs - std::exp(t * spec.outer.at(j)[0]) * phi.coeffs).norm(), 1e-13) << t;
    EXPECT_NEAR(out.norm(), phi.norm(), 1e-13);
  }
}

TEST(GroupEvolver, AgreesWithDenseExponential) {
  const PotentialSpec spec = simop::testing::random_potential(8, 2, 10);
  const SimilarityResult sim = similar(spec);
  const DenseTruncation dt = dense_truncation(spec);
  const EvolutionState phi = random_state(spec.window(), 5);
  const GroupEvolver evolver(sim);
  for (double t : {-1.0, 0.25, 2.0}) {
    const EvolutionState got = evolver.apply(t, phi);
    const EvolutionState ref = oracle_evolve(dt, phi, t);
    EXPECT_LT((got.coeffs - ref.coeffs).norm(), 1e-11 * ref.norm()) << t;
  }
  const Eigen::MatrixXcd lhs = evolver.dense(0.4) * evolver.dense(0.6);
  EXPECT_LT((lhs - evolver.dense(1.0)).norm(), 1e-12 * evolver.dense(1.0).norm());
}

TEST(SolveHomogeneous, OneStatePerTime) {
  const TruncationWindow w(kTwoPi, 1, 4);
  const SimilarityResult sim = similar(PotentialSpec(w));
  const auto out = solve_homogeneous(sim, EvolutionState::mode(w, 1, one(1.0)), {0.0, std::numbers::pi});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_LT(std::abs(out[1].mode_coeff(1)(0) + 1.0), 1e-15);
}

TEST(Integrate, ExactOnLowDegreeAndReportsFailure) {
  const auto poly = [](double x) -> Eigen::VectorXcd { return one(10.0 * std::pow(x, 9)); };
  EXPECT_NEAR(integrate(poly, 0.0, 1.0)(0).real(), 1.0, 1e-14);
  const auto wild = [](double x) -> Eigen::VectorXcd { return one(std::sin(1.0 / (x + 1e-4))); };
  try {
    integrate(wild, 0.0, 1.0, {1e-14, 2});
    FAIL() << "expected QuadratureNonConvergence";
  } catch (const MethodError& e) {
    EXPECT_EQ(e.kind(), FailureKind::QuadratureNonConvergence);
  }
}

TEST(SolveInhomogeneous, ZeroForcingMatchesHomogeneous) {
  const PotentialSpec spec = simop::testing::random_potential(12, 1, 8);
  const SimilarityResult sim = similar(spec);
  const EvolutionState phi = random_state(spec.window(), 6);
  const Forcing zero = [&](double) { return EvolutionState::zero(spec.window()); };
  const auto a = solve_inhomogeneous(sim, phi, zero, {0.0, 0.5, 1.5});
  const auto b = solve_homogeneous(sim, phi, {0.0, 0.5, 1.5});
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT((a[i].coeffs - b[i].coeffs).norm(), 1e-13);
}

TEST(SolveInhomogeneous, ZeroPotentialClosedForm) {
  // u' = Lambda u + e^{is}, u(0) = 0  =>  u(t, s) = e^{i(t+s)} (1 - e^{-it}) / i
  const TruncationWindow w(kTwoPi, 1, 4);
  const SimilarityResult sim = similar(PotentialSpec(w));
  const Forcing f = [&](double) { return EvolutionState::mode(w, 1, one(1.0)); };
  const auto out = solve_inhomogeneous(sim, EvolutionState::zero(w), f, {0.0, 1.0, 2.5}, {1e-12, 20});
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double t = std::vector<double>{0.0, 1.0, 2.5}[i];
    const double s = 0.3;
    const cplx expected = std::exp(I * (t + s)) * (1.0 - std::exp(-I * t)) / I;
    EXPECT_LT(std::abs(out[i].evaluate(s)(0) - expected), 1e-12) << t;
  }
  EXPECT_THROW(solve_inhomogeneous(sim, EvolutionState::zero(w), f, {1.0, 0.5}), std::invalid_argument);
}

TEST(SolveInhomogeneous, MildIdentityHolds) {
  const PotentialSpec spec = simop::testing::random_potential(13, 2, 8);
  const SimilarityResult sim = similar(spec);
  const TruncationWindow& w = spec.window();
  const EvolutionState phi = random_state(w, 7);
  const Forcing f = [&](double tau) {
    EvolutionState s = EvolutionState::zero(w);
    s.set_mode_coeff(1, Eigen::VectorXcd::Constant(2, std::cos(tau)));
    s.set_mode_coeff(-2, Eigen::VectorXcd::Constant(2, cplx(tau, 1.0)));
    return s;
  };
  EXPECT_LT(mild_identity_residual(sim, phi, f, 1.0, {1e-10, 20}), 1e-8);
}

TEST(TailBound, ZeroPotential) {
  const TruncationWindow w(kTwoPi, 1, 8);
  const SimilarityResult sim = similar(PotentialSpec(w));
  const TailBound inner = tail_bound(sim, EvolutionState::mode(w, 2, one(1.0)), 4, 1.0);
  EXPECT_EQ(inner.true_error, 0.0);
  EXPECT_EQ(inner.bound, 0.0);
  EvolutionState psi = EvolutionState::mode(w, 6, one(3.0));
  psi.set_mode_coeff(-7, one(4.0));
  psi.set_mode_coeff(1, one(10.0));
  const TailBound outer = tail_bound(sim, psi, 4, 2.0);
  EXPECT_NEAR(outer.true_error, 5.0, 1e-14);
  EXPECT_NEAR(outer.bound, 10.0, 1e-14);
  EXPECT_EQ(outer.constant, 2.0);
  EXPECT_THROW(tail_bound(sim, psi, 8, 0.0), std::invalid_argument);
}

TEST(TailBound, DominatesTrueError) {
  const PotentialSpec spec = simop::testing::random_potential(14, 2, 12);
  const SimilarityResult sim = similar(spec);
  const EvolutionState psi = random_state(spec.window(), 8);
  for (int n = sim.k + 1; n < 12; ++n) {
    for (double t : {0.0, 1.0, 3.0}) {
      const TailBound b = tail_bound(sim, psi, n, t);
      EXPECT_LE(b.true_error, b.bound) << n << " " << t;
    }
  }
}

TEST(GrowthRate, MatchesSpectralAbscissa) {
  const SimilarityResult zero = similar(PotentialSpec(TruncationWindow(kTwoPi, 1, 6)));
  EXPECT_NEAR(measured_growth_rate(zero, 10.0), 0.0, 1e-12);
  const PotentialSpec spec = simop::testing::random_potential(15, 1, 12);
  const SimilarityResult sim = similar(spec);
  double abscissa = -1e300;
  for (const cplx& mu : spectrum(sim).all()) abscissa = std::max(abscissa, mu.real());
  EXPECT_NEAR(measured_growth_rate(sim, 10.0), abscissa, 1e-2);
}
