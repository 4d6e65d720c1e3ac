#pragma once

#include <cstdint>
#include <vector>

#include "satin/cavity.hpp"

namespace satin {

/// Algebraic decoherence overlay. Variances are in CSS units (a CSS has 1).
struct NoiseBudget {
  double i_plus = 0.0;
  double i_minus = 0.0;
  double contrast_sc = 1.0;
  double sigma_meas_sq = 0.15;
  double sigma_d_sq = 0.15;

  double i_tot() const { return i_plus + i_minus; }
};

/// Ideal overlay: no broadening, full contrast, perfect detection.
NoiseBudget noiseless_budget();

void validate(const NoiseBudget& noise);

struct VariancePrediction {
  double delta_tau_sq = 0.0;
  /// Mixture-formula variance plus measurement resolution.
  double sigma_y_sq = 0.0;
  /// Small-fluctuation (Holstein-Primakoff) variance plus measurement resolution.
  double sigma_y_sq_hp = 0.0;
};

/// (1 + I_tot) / (2 C S0) + Q_tot^2.
double phase_variance(double s0, double i_tot, double q_tot, double contrast);

/// 1 - C + S0 C^2 (1 - exp(-2 dtau^2)), without measurement resolution.
double sigma_y_from_phase(double delta_tau_sq, double s0, double contrast);

/// 1 + 2 S0 C^2 Q_tot^2 + C I_tot, without measurement resolution.
double sigma_y_hp(double s0, double i_tot, double q_tot, double contrast);

VariancePrediction predict_variance(double s0, const NoiseBudget& noise, double q_tot);

/// Variance after a twist q_plus and an untwist q_minus at the detuning in cfg.
VariancePrediction predict_untwist_variance(const CavityConfig& cfg, double q_plus, double q_minus,
                                            double sigma_meas_sq = 0.15);

/// Noise budget of a twist/untwist pair at the detuning in cfg.
NoiseBudget pair_noise(const CavityConfig& cfg, double q_plus, double q_minus, double sigma_meas_sq = 0.15);

/// Splits the predicted excess over the CSS value into additive parts.
struct UntwistDecomposition {
  double sigma_y_sq = 0.0;
  double resolution = 0.0;
  double i_tot = 0.0;
  double contrast_sc = 1.0;
  /// Change of the variance when the contrast loss is switched on.
  double contrast_shift = 0.0;
};
UntwistDecomposition decompose_untwist(const CavityConfig& cfg, double q_plus, double sigma_meas_sq = 0.15);

/// eta (1 + sigma_d^2) / 4.
double projection_noise_slope(double eta, double sigma_d_sq);

struct ProjectionNoiseFit {
  std::vector<double> x;         // N eta
  std::vector<double> variance;  // sample var(eta S_z)
  double slope = 0.0;
  double slope_stderr = 0.0;
  double intercept = 0.0;
  /// Coefficient of an added quadratic term and its standard error.
  double quadratic = 0.0;
  double quadratic_stderr = 0.0;
};

/// Samples CSS shots with Gaussian detection noise and regresses var(eta S_z) on N eta.
ProjectionNoiseFit projection_noise_monte_carlo(double eta, double sigma_d_sq, const std::vector<int>& atom_numbers,
                                                int shots, std::uint64_t seed);

}  // namespace satin
