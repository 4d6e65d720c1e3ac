#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "satin/cavity.hpp"
#include "satin/noise.hpp"

using namespace satin;

namespace {

CavityConfig tied(double x_a, int n = 220, double photons = 100.0) {
  CavityConfig c;
  c.n_atoms = n;
  c.x_a = x_a;
  c.x_c = tied_cavity_detuning(x_a, c);
  c.n_tr_tot = photons;
  return c;
}

// Second, independent transcription of the symmetric-cavity transmission.
double transmission_reference(double n, double eta, double x_a, double x_c) {
  const double la = 1.0 / (1.0 + x_a * x_a);
  const double ld = -x_a / (1.0 + x_a * x_a);
  const double re = 1.0 + n / 2.0 * eta * la;
  const double im = x_c + n / 2.0 * eta * ld;
  return 1.0 / (re * re + im * im);
}

}  // namespace

TEST(Lorentz, FixedPoints) {
  EXPECT_EQ(lorentz_dispersive(0.0), 0.0);
  EXPECT_EQ(lorentz_absorptive(0.0), 1.0);
  EXPECT_DOUBLE_EQ(lorentz_dispersive(1.0), -0.5);
  EXPECT_DOUBLE_EQ(lorentz_absorptive(1.0), 0.5);
}

TEST(Lorentz, DispersiveIsOdd) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 200; ++i) {
    const double x = u(gen);
    EXPECT_EQ(lorentz_dispersive(-x), -lorentz_dispersive(x));
    EXPECT_EQ(lorentz_absorptive(-x), lorentz_absorptive(x));
  }
}

TEST(Transmission, EmptyCavity) {
  CavityConfig c;
  c.n_atoms = 0;
  c.x_c = 0.0;
  EXPECT_DOUBLE_EQ(symmetric_transmission(c), 1.0);
  c.x_c = 1.0;
  EXPECT_DOUBLE_EQ(symmetric_transmission(c), 0.5);
}

TEST(Transmission, MatchesIndependentFormulaAtOptimum) {
  CavityConfig base;
  base.n_atoms = 220;
  const DetuningResult d = optimize_detuning(base, 0.7);
  const double t0 = symmetric_transmission(d.cfg);
  EXPECT_NEAR(t0, transmission_reference(220, 7.7, d.cfg.x_a, d.cfg.x_c), 1e-15);
  EXPECT_GT(t0, 0.0);
  EXPECT_LE(t0, 1.0);
}

TEST(Shearing, ZeroPhotonsGiveNothing) {
  const CavityConfig c = tied(30.0, 220, 0.0);
  EXPECT_EQ(shearing_strength(c), 0.0);
  EXPECT_EQ(excess_broadening(c), 0.0);
  EXPECT_EQ(scattered_photons(c), 0.0);
  EXPECT_EQ(twist_budget(c).contrast_sc, 1.0);
}

TEST(Shearing, AntisymmetricUnderMirroredDetuning) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> ux(-300.0, 300.0), ueta(0.5, 100.0), un(10.0, 500.0);
  for (int i = 0; i < 200; ++i) {
    CavityConfig c;
    c.eta = ueta(gen);
    c.n_atoms = static_cast<int>(un(gen));
    c.x_a = ux(gen);
    c.x_c = ux(gen) / 10.0;
    c.n_tr_tot = 150.0;
    CavityConfig m = c;
    m.x_a = -c.x_a;
    m.x_c = -c.x_c;
    EXPECT_NEAR(shearing_strength(m), -shearing_strength(c), 1e-14 * std::abs(shearing_strength(c)) + 1e-300);
    EXPECT_NEAR(excess_broadening(m), excess_broadening(c), 1e-14 * excess_broadening(c));
    EXPECT_GE(excess_broadening(c), 0.0);
  }
}

TEST(Shearing, SignChangesAcrossResonance) {
  EXPECT_LT(shearing_strength(tied(50.0)) * shearing_strength(tied(-50.0)), 0.0);
}

TEST(Shearing, LinearInPhotonNumber) {
  const CavityConfig one = tied(40.0, 220, 123.0);
  const CavityConfig two = tied(40.0, 220, 246.0);
  EXPECT_DOUBLE_EQ(shearing_strength(two), 2.0 * shearing_strength(one));
  EXPECT_DOUBLE_EQ(excess_broadening(two), 2.0 * excess_broadening(one));
  EXPECT_DOUBLE_EQ(scattered_photons(two), 2.0 * scattered_photons(one));
}

TEST(Shearing, PhotonRuleOfThumbAtHalfTwist) {
  CavityConfig base;
  base.n_atoms = 220;
  const DetuningResult d = optimize_detuning(base, 0.5);
  const double rule = 1.6 * 220 * 0.5;
  EXPECT_NEAR(d.budget.n_tr_plus, rule, 0.25 * rule);
  EXPECT_NEAR(shearing_strength(d.cfg), 0.5, 1e-12);
}

TEST(Contrast, IsExponentialInScattering) {
  EXPECT_DOUBLE_EQ(contrast_from_scattering(0.0, 220), 1.0);
  EXPECT_DOUBLE_EQ(contrast_from_scattering(110.0, 220), std::exp(-1.0));
  const TwistBudget b = twist_budget(tied(25.0, 220, 300.0));
  EXPECT_DOUBLE_EQ(b.contrast_sc, std::exp(-2.0 * b.n_scattered / 220));
}

TEST(Contrast, IndependentOfAtomNumberAtOptimum) {
  CavityConfig small, large;
  small.n_atoms = 100;
  large.n_atoms = 400;
  const double c_small = optimize_detuning(small, 0.5).budget.contrast_sc;
  const double c_large = optimize_detuning(large, 0.5).budget.contrast_sc;
  EXPECT_NEAR(c_small / c_large, 1.0, 0.01);
}

TEST(PhotonsForTwist, WrongSignIsInfinite) {
  const CavityConfig c = tied(30.0);
  const double q = shearing_strength(tied(30.0, 220, 1.0));
  EXPECT_NEAR(photons_for_twist(c, q * 17.0), 17.0, 1e-12);
  EXPECT_TRUE(std::isinf(photons_for_twist(c, -q)));
  EXPECT_EQ(photons_for_twist(c, 0.0), 0.0);
}

TEST(PulsePair, UntwistBudgetScalesWithItsMagnitude) {
  const CavityConfig c = tied(30.0);
  const PulsePairBudget a = pulse_pair_budget(c, 0.5, -0.5);
  const PulsePairBudget b = pulse_pair_budget(c, 0.5, -1.0);
  EXPECT_NEAR(a.i_plus, a.i_minus, 1e-15);
  EXPECT_NEAR(b.i_minus, 2.0 * a.i_minus, 1e-14);
  EXPECT_NEAR(b.n_tr_minus, 2.0 * a.n_tr_minus, 1e-12);
  EXPECT_LT(b.contrast_sc, a.contrast_sc);
}

TEST(Optimizer, MirroredTargetMirrorsDetuning) {
  CavityConfig base;
  const DetuningResult p = optimize_detuning(base, 0.6);
  const DetuningResult m = optimize_detuning(base, -0.6);
  EXPECT_NEAR(m.cfg.x_a, -p.cfg.x_a, 1e-9 * std::abs(p.cfg.x_a));
  EXPECT_NEAR(m.cfg.x_c, -p.cfg.x_c, 1e-9 * std::abs(p.cfg.x_c));
  EXPECT_NEAR(m.gain_db, p.gain_db, 1e-9);
  EXPECT_NEAR(shearing_strength(m.cfg), -0.6, 1e-12);
}

TEST(Optimizer, CavityGainNearSevenTenthsTwist) {
  CavityConfig base;
  base.n_atoms = 220;
  const DetuningResult d = optimize_detuning(base, 0.7);
  EXPECT_NEAR(d.gain_db, 10.8, 1.0);
}

TEST(Optimizer, FinerGridAgrees) {
  CavityConfig base;
  DetuningSearch coarse;
  DetuningSearch fine = coarse;
  fine.grid_points *= 10;
  for (double q : {0.3, 0.7, 1.1}) {
    EXPECT_NEAR(optimize_detuning(base, q, coarse).gain_db, optimize_detuning(base, q, fine).gain_db, 0.05) << q;
  }
}

TEST(Optimizer, InfeasibleTargetThrows) {
  CavityConfig base;
  EXPECT_THROW(optimize_detuning(base, 0.0), NoSolutionError);
  CavityConfig empty;
  empty.n_atoms = 0;
  EXPECT_THROW(optimize_detuning(empty, 0.5), NoSolutionError);
}

TEST(Validate, RejectsNonPhysicalParameters) {
  CavityConfig c;
  c.eta = 0.0;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = CavityConfig{};
  c.n_tr_tot = -1.0;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = CavityConfig{};
  c.x_a = std::nan("");
  EXPECT_THROW(validate(c), std::invalid_argument);
}
