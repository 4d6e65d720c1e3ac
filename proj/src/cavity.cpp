#include "satin/cavity.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "satin/noise.hpp"
#include "satin/protocol.hpp"

namespace satin {

namespace {

struct PerPhoton {
  double q = 0.0;
  double broadening = 0.0;
  double scattered = 0.0;
};

double denominator(const CavityConfig& cfg) {
  const double half_n_eta = 0.5 * cfg.n_atoms * cfg.eta;
  const double absorb = 1.0 + half_n_eta * lorentz_absorptive(cfg.x_a);
  const double disp = cfg.x_c + half_n_eta * lorentz_dispersive(cfg.x_a);
  return absorb * absorb + disp * disp;
}

PerPhoton per_photon(const CavityConfig& cfg) {
  PerPhoton p;
  if (cfg.n_atoms <= 0) return p;
  const double n = cfg.n_atoms;
  const double la = lorentz_absorptive(cfg.x_a);
  const double ld = lorentz_dispersive(cfg.x_a);
  const double den = denominator(cfg);
  const double coupling = 0.5 * n * cfg.eta * cfg.eta / den;
  p.q = ld * la * coupling * (1.0 + 0.5 * n * cfg.eta - cfg.x_a * cfg.x_c) / std::sqrt(n);
  p.broadening = 2.0 * la * la * coupling * (1.0 + 0.5 * n * cfg.eta + cfg.x_a * cfg.x_a);
  p.scattered = 0.5 * n * cfg.eta * la;
  return p;
}

CavityConfig with_detuning(CavityConfig cfg, double x_a) {
  cfg.x_a = x_a;
  cfg.x_c = tied_cavity_detuning(x_a, cfg);
  return cfg;
}

// Predicted gain of a matched pair at the detuning in cfg; -inf when unreachable.
double predicted_gain(const CavityConfig& cfg, double q_target, double sigma_meas_sq) {
  if (!std::isfinite(photons_for_twist(cfg, q_target))) return -std::numeric_limits<double>::infinity();
  const PulsePairBudget b = pulse_pair_budget(cfg, q_target, -q_target);
  if (!(b.contrast_sc > 1e-12)) return -std::numeric_limits<double>::infinity();
  NoiseBudget noise;
  noise.i_plus = b.i_plus;
  noise.i_minus = b.i_minus;
  noise.contrast_sc = b.contrast_sc;
  noise.sigma_meas_sq = sigma_meas_sq;
  const double s0 = 0.5 * cfg.n_atoms;
  const double var = predict_variance(s0, noise, 0.0).sigma_y_sq;
  const double m = amplification_analytic(q_target, cfg.n_atoms, b.contrast_sc);
  if (!(var > 0.0) || m == 0.0) return -std::numeric_limits<double>::infinity();
  return gain_db(m, var);
}

}  // namespace

void validate(const CavityConfig& cfg) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(cfg.eta, "eta");
  positive(cfg.kappa, "kappa");
  positive(cfg.gamma, "gamma");
  positive(cfg.finesse, "finesse");
  if (cfg.n_atoms < 0) throw std::invalid_argument("n_atoms must be >= 0");
  if (!std::isfinite(cfg.x_a) || !std::isfinite(cfg.x_c)) throw std::invalid_argument("detunings must be finite");
  if (!(cfg.n_tr_tot >= 0.0) || !std::isfinite(cfg.n_tr_tot)) {
    throw std::invalid_argument("n_tr_tot must be finite and >= 0");
  }
}

double lorentz_dispersive(double x) { return -x / (1.0 + x * x); }

double lorentz_absorptive(double x) { return 1.0 / (1.0 + x * x); }

double tied_cavity_detuning(double x_a, const CavityConfig& cfg) { return x_a * cfg.gamma / cfg.kappa; }

double symmetric_transmission(const CavityConfig& cfg) { return 1.0 / denominator(cfg); }

double shearing_strength(const CavityConfig& cfg) { return cfg.n_tr_tot * per_photon(cfg).q; }

double excess_broadening(const CavityConfig& cfg) { return cfg.n_tr_tot * per_photon(cfg).broadening; }

double scattered_photons(const CavityConfig& cfg) { return cfg.n_tr_tot * per_photon(cfg).scattered; }

double contrast_from_scattering(double n_scattered, int n_atoms) {
  if (n_atoms <= 0) return 1.0;
  return std::exp(-2.0 * n_scattered / n_atoms);
}

TwistBudget twist_budget(const CavityConfig& cfg) {
  const PerPhoton p = per_photon(cfg);
  TwistBudget b;
  b.q_tilde = cfg.n_tr_tot * p.q;
  b.excess_broadening = cfg.n_tr_tot * p.broadening;
  b.n_scattered = cfg.n_tr_tot * p.scattered;
  b.contrast_sc = contrast_from_scattering(b.n_scattered, cfg.n_atoms);
  return b;
}

double photons_for_twist(const CavityConfig& cfg, double q_target) {
  if (q_target == 0.0) return 0.0;
  const double q = per_photon(cfg).q;
  if (!(q * q_target > 0.0)) return std::numeric_limits<double>::infinity();
  return q_target / q;
}

PulsePairBudget pulse_pair_budget(const CavityConfig& cfg, double q_plus, double q_minus) {
  const PerPhoton p = per_photon(cfg);
  PulsePairBudget b;
  if (q_plus == 0.0 && q_minus == 0.0) return b;
  if (p.q == 0.0) throw NoSolutionError("detuning produces no twist");
  // Mirroring the detuning flips the sign of the twist and keeps all magnitudes.
  const double q_abs = std::abs(p.q);
  b.n_tr_plus = std::abs(q_plus) / q_abs;
  b.n_tr_minus = std::abs(q_minus) / q_abs;
  b.i_plus = b.n_tr_plus * p.broadening;
  b.i_minus = b.n_tr_minus * p.broadening;
  b.n_scattered = (b.n_tr_plus + b.n_tr_minus) * p.scattered;
  b.contrast_sc = contrast_from_scattering(b.n_scattered, cfg.n_atoms);
  return b;
}

DetuningResult optimize_detuning(const CavityConfig& cfg_base, double q_target, const DetuningSearch& search) {
  validate(cfg_base);
  if (q_target == 0.0 || !std::isfinite(q_target)) throw NoSolutionError("twist target must be finite and nonzero");
  if (cfg_base.n_atoms < 1) throw NoSolutionError("no atoms to twist");
  if (search.grid_points < 4 || !(search.x_min > 0.0) || !(search.x_max > search.x_min)) {
    throw std::invalid_argument("invalid detuning search range");
  }

  const double lo = std::log(search.x_min);
  const double hi = std::log(search.x_max);
  const double step = (hi - lo) / (search.grid_points - 1);
  auto gain_at = [&](double sign, double log_x) {
    return predicted_gain(with_detuning(cfg_base, sign * std::exp(log_x)), q_target, search.sigma_meas_sq);
  };

  double best_gain = -std::numeric_limits<double>::infinity();
  double best_sign = 1.0;
  int best_index = -1;
  for (double sign : {-1.0, 1.0}) {
    for (int i = 0; i < search.grid_points; ++i) {
      const double g = gain_at(sign, lo + step * i);
      if (g > best_gain) {
        best_gain = g;
        best_sign = sign;
        best_index = i;
      }
    }
  }
  if (best_index < 0 || !std::isfinite(best_gain)) {
    throw NoSolutionError("no detuning reaches Q = " + std::to_string(q_target));
  }

  // Golden-section refinement on the bracket around the best grid point.
  double a = lo + step * std::max(best_index - 1, 0);
  double b = lo + step * std::min(best_index + 1, search.grid_points - 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double gc = gain_at(best_sign, c);
  double gd = gain_at(best_sign, d);
  for (int it = 0; it < search.refine_iterations; ++it) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = gain_at(best_sign, c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = gain_at(best_sign, d);
    }
  }
  double best_log = lo + step * best_index;
  if (gc > best_gain) best_gain = gc, best_log = c;
  if (gd > best_gain) best_gain = gd, best_log = d;

  DetuningResult out;
  out.cfg = with_detuning(cfg_base, best_sign * std::exp(best_log));
  out.cfg.n_tr_tot = photons_for_twist(out.cfg, q_target);
  out.budget = pulse_pair_budget(out.cfg, q_target, -q_target);
  out.gain_db = best_gain;
  return out;
}

}  // namespace satin
