#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace satin {

/// Physical parameters of the atom-cavity system. Detunings are normalized:
/// x_a = 2 Delta / Gamma (laser vs atom), x_c = 2 delta / kappa (laser vs cavity).
struct CavityConfig {
  double eta = 7.7;
  double kappa = 2.0 * std::numbers::pi * 530e3;
  double gamma = 2.0 * std::numbers::pi * 184e3;
  double finesse = 11400.0;
  int n_atoms = 220;
  double x_a = 0.0;
  double x_c = 0.0;
  /// Transmitted photons of one light pulse.
  double n_tr_tot = 0.0;
};

struct TwistBudget {
  double q_tilde = 0.0;
  double excess_broadening = 0.0;
  double n_scattered = 0.0;
  double contrast_sc = 1.0;
};

/// Raised when no detuning can produce the requested twist.
class NoSolutionError : public std::runtime_error {
 public:
  explicit NoSolutionError(const std::string& what) : std::runtime_error(what) {}
};

void validate(const CavityConfig& cfg);

double lorentz_dispersive(double x);
double lorentz_absorptive(double x);

/// Cavity detuning when the laser is swept with the cavity held on the atomic resonance.
double tied_cavity_detuning(double x_a, const CavityConfig& cfg);

double symmetric_transmission(const CavityConfig& cfg);

/// Signed twisting strength of one pulse, linear in n_tr_tot.
double shearing_strength(const CavityConfig& cfg);

/// Light-induced phase broadening of one pulse in CSS variance units, linear in n_tr_tot.
double excess_broadening(const CavityConfig& cfg);

/// Photons scattered into free space during one pulse.
///
/// The transmission denominator splits cavity losses into mirror transmission
/// (the leading 1) and atomic absorption ((N/2) eta L_a). Their ratio converts
/// transmitted photons into scattered ones. With this ratio the contrast at a
/// fixed twist no longer depends on N at the gain-optimal detuning.
double scattered_photons(const CavityConfig& cfg);

/// exp(-2 n_sc / N).
double contrast_from_scattering(double n_scattered, int n_atoms);

/// Budget of a single pulse.
TwistBudget twist_budget(const CavityConfig& cfg);

/// Transmitted photons needed to reach q_target at the detuning in cfg.
/// Infinite when the detuning produces the wrong sign or no twist.
double photons_for_twist(const CavityConfig& cfg, double q_target);

/// Combined noise of a twist pulse and an untwist pulse.
///
/// The twist uses the detuning in cfg. The untwist uses the same detuning or its
/// mirror image, whichever gives the sign of q_minus, so its budget scales with |q_minus|.
struct PulsePairBudget {
  double i_plus = 0.0;
  double i_minus = 0.0;
  double n_tr_plus = 0.0;
  double n_tr_minus = 0.0;
  double n_scattered = 0.0;
  double contrast_sc = 1.0;
};
PulsePairBudget pulse_pair_budget(const CavityConfig& cfg, double q_plus, double q_minus);

struct DetuningSearch {
  /// Grid points per sign of x_a on a log scale between x_min and x_max.
  int grid_points = 400;
  double x_min = 0.1;
  double x_max = 2000.0;
  int refine_iterations = 60;
  /// Measurement resolution added to the predicted variance.
  double sigma_meas_sq = 0.15;
};

struct DetuningResult {
  CavityConfig cfg;
  PulsePairBudget budget;
  double gain_db = 0.0;
};

/// Picks the tied detuning maximizing the predicted gain of a matched twist/untwist pair
/// at |Q| = |q_target|. Throws NoSolutionError when the target cannot be reached.
DetuningResult optimize_detuning(const CavityConfig& cfg_base, double q_target, const DetuningSearch& search = {});

}  // namespace satin
