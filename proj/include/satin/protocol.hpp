#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "satin/cavity.hpp"
#include "satin/dicke.hpp"
#include "satin/noise.hpp"
#include "satin/stats.hpp"

namespace satin {

namespace step {
struct Rotate {
  Axis axis = Axis::y;
  double angle = 0.0;
};
struct Twist {
  double q_tilde = 0.0;
};
/// Signal phase accumulated about z.
struct ImprintPhase {
  double phi = 0.0;
};
/// Differential light shift of a twisting pulse, a z-rotation by 8 pi q.
struct LightShift {
  double q_tilde = 0.0;
};
/// pi pulse about x.
struct EchoPi {};
struct Measure {
  Axis axis = Axis::y;
};
}  // namespace step

using Step = std::variant<step::Rotate, step::Twist, step::ImprintPhase, step::LightShift, step::EchoPi, step::Measure>;

struct ProtocolSequence {
  std::vector<Step> steps;
};

/// Throws std::invalid_argument unless the sequence ends in its only Measure and all
/// parameters are finite.
void validate(const ProtocolSequence& seq);

struct RunOptions {
  std::optional<NoiseBudget> noise;
  std::optional<std::uint64_t> seed;
  int n_shots = 0;
  int n_resamples = 1000;
};

struct RunResult {
  Axis axis = Axis::y;
  /// Mean of the measured spin component over S0, after the noise overlay.
  double mean_sy_norm = 0.0;
  /// 2 var / S0 of the measured component, after the noise overlay.
  double sigma_y_sq = 0.0;
  std::optional<double> amplification_m;
  std::optional<double> gain_db;
  /// Noiseless moments of the final state.
  SpinMoments moments;
  /// Noiseless outcome distribution of the measured component.
  std::vector<double> distribution;
  /// Sampled outcomes in spin units, including the noise overlay.
  std::vector<double> shots;
  std::optional<Interval> ci_mean;
  std::optional<Interval> ci_variance;
};

/// Applies every step before the terminal Measure.
DickeState evolve(const ProtocolSequence& seq, const DickeState& initial);

/// Runs the sequence from a CSS along x. With a noise budget the moments are mapped
/// through the algebraic overlay; with a seed and n_shots > 0 shots are sampled.
RunResult run_sequence(const ProtocolSequence& seq, int n_atoms, const RunOptions& options = {});

/// [Twist(q_plus), Rotate(y, phi), Twist(q_minus), Measure(y)].
ProtocolSequence satin_sequence(double q_plus, double q_minus, double phi);

/// [Rotate(z, phi), Measure(y)]: the unentangled reference with m = 1.
ProtocolSequence css_sequence(double phi);

/// Ramsey spin-echo with twist and untwist. An ac signal flips sign with the echo and
/// accumulates; a static one does not.
ProtocolSequence ramsey_sequence(double q_plus, double q_minus, double phase, bool ac_signal = true);

/// C N sin(q / sqrt N) cos^N(q / sqrt N).
double amplification_analytic(double q_tilde, int n_atoms, double contrast = 1.0);

/// 10 log10(m^2 / sigma_y_sq).
double gain_db(double m, double sigma_y_sq);

/// Slope of signal(phi) at phi = 0 from a quintic least-squares fit over [0, 0.05 / |m_guess|],
/// where m_guess is a finite-difference estimate.
double fit_amplification(const std::function<double(double)>& signal);

/// Noiseless amplification of a SATIN sequence from exact simulation.
double exact_amplification(double q_plus, double q_minus, int n_atoms);

/// SATIN run at displacement phi with amplification and gain from exact simulation.
RunResult satin_run(double q_plus, double q_minus, double phi, int n_atoms, const RunOptions& options = {});

/// Ramsey spin-echo run; amplification is the slope against the signal phase.
RunResult ramsey_echo_run(double q_tilde, double phase, int n_atoms, const NoiseBudget& noise, std::uint64_t seed,
                          int n_shots = 0);

struct LightShiftCheck {
  RunResult reference;
  RunResult with_echo;
  RunResult without_echo;
  /// Largest moment difference between the echoed run and the reference, with means
  /// over S0 and variances in CSS units.
  double echo_deviation = 0.0;
  /// Azimuth of the mean spin without echo relative to the reference, in [0, 2 pi).
  double rotation_without_echo = 0.0;
  /// 8 pi q mod 2 pi.
  double expected_rotation = 0.0;
};
LightShiftCheck lightshift_echo_check(double q_tilde, int n_atoms);

/// Best twist of the noiseless protocol from exact simulation.
struct IdealOptimum {
  int n_atoms = 0;
  double q = 0.0;
  double m = 0.0;
  double gain_db = 0.0;
};
IdealOptimum ideal_optimum(int n_atoms);

/// Analytic cavity model at one twist strength, with the detuning optimized for it.
struct ModelPoint {
  int n_atoms = 0;
  double q = 0.0;
  DetuningResult detuning;
  double m = 0.0;
  double sigma_y_sq = 0.0;
  double gain_db = 0.0;
};
ModelPoint cavity_model_point(const CavityConfig& base, double q_tilde, const DetuningSearch& search = {});

/// Cavity model maximized over the twist strength in [q_lo, q_hi].
ModelPoint cavity_model_optimum(const CavityConfig& base, const DetuningSearch& search = {}, double q_lo = 0.2,
                               double q_hi = 1.6);

enum class NoiseSource { ideal, cavity_model };

struct ScalingResult {
  std::vector<int> atom_numbers;
  std::vector<double> optimal_q;
  std::vector<double> gains_db;
  std::vector<double> hl_distance_db;
  double fit_slope = 0.0;
  double fit_intercept = 0.0;
};

struct ScalingPoint {
  int n_atoms = 0;
  double q = 0.0;
  double gain_db = 0.0;
};
ScalingPoint scaling_point(int n_atoms, NoiseSource source, const CavityConfig& base = {},
                           const DetuningSearch& search = {});

/// Assembles points and fits gain_db against 10 log10 N.
ScalingResult assemble_scaling(const std::vector<ScalingPoint>& points);

ScalingResult heisenberg_sweep(const std::vector<int>& atom_numbers, NoiseSource source,
                               const CavityConfig& base = {}, const DetuningSearch& search = {});

/// Distance from the Heisenberg limit split into additive dB contributions.
struct HlBudget {
  int n_atoms = 0;
  double q_ideal = 0.0;
  double q_model = 0.0;
  double ideal_db = 0.0;
  /// Loss from running at q_model instead of q_ideal.
  double q_shift_db = 0.0;
  /// -20 log10 C.
  double contrast_db = 0.0;
  /// Broadening from light-atom entanglement and contrast dilution, without resolution.
  double non_unitary_db = 0.0;
  double resolution_db = 0.0;
  double hl_distance_db = 0.0;
};
HlBudget hl_budget(const CavityConfig& base, const DetuningSearch& search = {});

/// Maximizes f over [lo, hi]: a uniform grid with `grid` points, then golden-section
/// refinement on the bracket around the best point. Returns the argmax.
double maximize_1d(const std::function<double(double)>& f, double lo, double hi, int grid, int iterations = 50);

}  // namespace satin
