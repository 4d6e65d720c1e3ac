#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "satin/cavity.hpp"
#include "satin/noise.hpp"

using namespace satin;

namespace {

CavityConfig optimized(int n, double q_plus) {
  CavityConfig base;
  base.n_atoms = n;
  return optimize_detuning(base, q_plus).cfg;
}

double argmin_q_minus(const CavityConfig& cfg, double q_plus, double meas, double step) {
  double best_q = 0.0, best = INFINITY;
  const int count = static_cast<int>(std::llround(2.0 * q_plus / step));
  for (int k = 0; k <= count; ++k) {
    const double qm = -2.0 * q_plus + k * step;
    const double v = predict_untwist_variance(cfg, q_plus, qm, meas).sigma_y_sq;
    if (v < best) best = v, best_q = qm;
  }
  return best_q;
}

}  // namespace

TEST(PhaseVariance, CoherentStateValue) {
  EXPECT_DOUBLE_EQ(phase_variance(110.0, 0.0, 0.0, 1.0), 1.0 / 220.0);
  EXPECT_DOUBLE_EQ(phase_variance(110.0, 0.0, 0.1, 1.0), 1.0 / 220.0 + 0.01);
}

TEST(PhaseVariance, WithContrastAndBroadening) {
  // (1 + 0.9) / (2 * 0.85 * 110)
  EXPECT_NEAR(phase_variance(110.0, 0.9, 0.0, 0.85), 1.9 / 187.0, 1e-16);
}

TEST(PhaseVariance, RejectsZeroContrast) {
  EXPECT_THROW(phase_variance(110.0, 0.0, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(phase_variance(0.0, 0.0, 0.0, 1.0), std::invalid_argument);
}

TEST(Mixture, CoherentStateMissesOneByOrderOneOverN) {
  const double s0 = 110.0;
  const double v = sigma_y_from_phase(1.0 / (2.0 * s0), s0, 1.0);
  EXPECT_NEAR(v, 1.0 - 1.0 / (2.0 * s0), 1.0 / (s0 * s0));
  EXPECT_NEAR(v, 0.9955, 1e-4);
}

TEST(Mixture, NoiselessLimitIsZero) { EXPECT_EQ(sigma_y_from_phase(0.0, 110.0, 1.0), 0.0); }

TEST(Mixture, IncoherentFractionHasUnitVariance) {
  EXPECT_NEAR(sigma_y_from_phase(0.0, 110.0, 0.6), 0.4, 1e-15);
}

TEST(HolsteinPrimakoff, DirectSubstitution) {
  EXPECT_DOUBLE_EQ(sigma_y_hp(110.0, 0.9, 0.0, 1.0), 1.9);
  EXPECT_DOUBLE_EQ(sigma_y_hp(110.0, 0.0, 0.1, 0.5), 1.0 + 2.0 * 110.0 * 0.25 * 0.01);
}

TEST(Predict, IdealReversalGivesResolutionFloor) {
  NoiseBudget nb = noiseless_budget();
  nb.sigma_meas_sq = 0.15;
  const VariancePrediction p = predict_variance(110.0, nb, 0.0);
  EXPECT_DOUBLE_EQ(p.sigma_y_sq_hp, 1.15);
  EXPECT_NEAR(p.sigma_y_sq, 1.15, 1.0 / 220.0);
}

TEST(Predict, ReductionWithoutContrastOrResolution) {
  NoiseBudget nb = noiseless_budget();
  nb.i_plus = 0.3;
  const double s0 = 90.0, q = 0.05;
  const double dt = (1.0 + 0.3) / (2.0 * s0) + q * q;
  EXPECT_NEAR(predict_variance(s0, nb, q).sigma_y_sq, s0 * (1.0 - std::exp(-2.0 * dt)), 1e-12);
}

TEST(Predict, MonotoneInBroadeningAndTwistMismatch) {
  NoiseBudget nb;
  nb.contrast_sc = 0.8;
  double prev = -1.0;
  for (double i = 0.0; i <= 3.0; i += 0.25) {
    nb.i_plus = i;
    const double v = predict_variance(110.0, nb, 0.05).sigma_y_sq;
    EXPECT_GE(v, prev);
    prev = v;
  }
  nb.i_plus = 0.5;
  prev = -1.0;
  for (double q = 0.0; q <= 1.0; q += 0.05) {
    const double v = predict_variance(110.0, nb, -q).sigma_y_sq;
    EXPECT_GE(v, prev);
    EXPECT_DOUBLE_EQ(v, predict_variance(110.0, nb, q).sigma_y_sq);
    prev = v;
  }
}

TEST(Predict, MixtureAndHolsteinPrimakoffAgreeForSmallFluctuations) {
  for (double s0 : {50.0, 110.0, 200.0}) {
    for (double i : {0.0, 0.5, 1.0}) {
      for (double c : {0.95, 1.0}) {
        for (double sq : {0.0, 0.05, 0.1}) {
          NoiseBudget nb = noiseless_budget();
          nb.i_plus = i;
          nb.contrast_sc = c;
          const VariancePrediction p = predict_variance(s0, nb, std::sqrt(sq / s0));
          EXPECT_NEAR(p.sigma_y_sq / p.sigma_y_sq_hp, 1.0, 0.05) << s0 << " " << i << " " << c << " " << sq;
        }
      }
    }
  }
}

TEST(Untwist, MinimumAtMatchedReversal) {
  const double step = 0.01;
  for (int n : {100, 220}) {
    for (double qp : {0.3, 0.5, 0.9}) {
      const CavityConfig cfg = optimized(n, qp);
      // The untwist's own broadening grows with |q_minus| and pulls the minimum
      // slightly toward smaller untwists, by less than one grid step here.
      EXPECT_NEAR(argmin_q_minus(cfg, qp, 0.15, step), -qp, step + 1e-9) << n << " " << qp;
    }
  }
}

TEST(Untwist, MinimumDoesNotMoveWithResolution) {
  const CavityConfig cfg = optimized(220, 0.5);
  EXPECT_EQ(argmin_q_minus(cfg, 0.5, 0.15, 0.01), argmin_q_minus(cfg, 0.5, 0.30, 0.01));
}

TEST(Untwist, DecompositionAddsUp) {
  const CavityConfig cfg = optimized(220, 0.5);
  const UntwistDecomposition d = decompose_untwist(cfg, 0.5, 0.15);
  EXPECT_DOUBLE_EQ(d.resolution, 0.15);
  EXPECT_LT(d.contrast_sc, 1.0);
  EXPECT_LT(d.contrast_shift, 0.0);
  const PulsePairBudget b = pulse_pair_budget(cfg, 0.5, -0.5);
  EXPECT_NEAR(d.i_tot, b.i_plus + b.i_minus, 1e-14);
  EXPECT_NEAR(d.sigma_y_sq, predict_untwist_variance(cfg, 0.5, -0.5, 0.15).sigma_y_sq, 1e-14);
}

TEST(ProjectionNoise, SlopeFormula) {
  EXPECT_NEAR(projection_noise_slope(7.7, 0.15), 2.21375, 1e-12);
  EXPECT_DOUBLE_EQ(projection_noise_slope(7.7, 0.0), 7.7 / 4.0);
  EXPECT_THROW(projection_noise_slope(0.0, 0.1), std::invalid_argument);
}

TEST(ProjectionNoise, MonteCarloRecoversSlope) {
  std::vector<int> ns;
  for (int n = 50; n <= 400; n += 25) ns.push_back(n);
  const ProjectionNoiseFit fit = projection_noise_monte_carlo(7.7, 0.15, ns, 150, 12345);
  EXPECT_NEAR(fit.slope, 2.21375, 3.0 * fit.slope_stderr);
  EXPECT_LT(std::abs(fit.quadratic), 3.0 * fit.quadratic_stderr);
  EXPECT_EQ(fit.x.size(), ns.size());
}

TEST(ProjectionNoise, DeterministicPerSeed) {
  const std::vector<int> ns{50, 100, 200};
  const auto a = projection_noise_monte_carlo(7.7, 0.15, ns, 50, 3);
  const auto b = projection_noise_monte_carlo(7.7, 0.15, ns, 50, 3);
  EXPECT_EQ(a.variance, b.variance);
}

TEST(Validate, RejectsBadBudgets) {
  NoiseBudget nb;
  nb.contrast_sc = 1.5;
  EXPECT_THROW(validate(nb), std::invalid_argument);
  nb = NoiseBudget{};
  nb.i_minus = -0.1;
  EXPECT_THROW(validate(nb), std::invalid_argument);
}
