#include "satin/protocol.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "satin/rng.hpp"

namespace satin {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double axis_mean(const SpinMoments& s, Axis axis) {
  switch (axis) {
    case Axis::x: return s.mean_sx;
    case Axis::y: return s.mean_sy;
    case Axis::z: return s.mean_sz;
  }
  return 0.0;
}

double axis_var(const SpinMoments& s, Axis axis) {
  switch (axis) {
    case Axis::x: return s.var_sx;
    case Axis::y: return s.var_sy;
    case Axis::z: return s.var_sz;
  }
  return 0.0;
}

Axis measured_axis(const ProtocolSequence& seq) { return std::get<step::Measure>(seq.steps.back()).axis; }

double wrap_angle(double a) {
  double r = std::fmod(a, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  return r;
}

// Signal of the measured component over S0 for a family of sequences.
double normalized_signal(const ProtocolSequence& seq, int n_atoms) {
  const DickeState out = evolve(seq, make_css(n_atoms, kPi / 2, 0.0));
  return axis_mean(moments(out), measured_axis(seq)) / (0.5 * n_atoms);
}

}  // namespace

void validate(const ProtocolSequence& seq) {
  if (seq.steps.empty()) throw std::invalid_argument("sequence is empty");
  int n_measure = 0;
  for (const auto& s : seq.steps) {
    std::visit(overloaded{
                   [](const step::Rotate& r) {
                     if (!std::isfinite(r.angle)) throw std::invalid_argument("rotation angle must be finite");
                   },
                   [](const step::Twist& t) {
                     if (!std::isfinite(t.q_tilde)) throw std::invalid_argument("twist strength must be finite");
                   },
                   [](const step::ImprintPhase& p) {
                     if (!std::isfinite(p.phi)) throw std::invalid_argument("imprinted phase must be finite");
                   },
                   [](const step::LightShift& l) {
                     if (!std::isfinite(l.q_tilde)) throw std::invalid_argument("light shift must be finite");
                   },
                   [](const step::EchoPi&) {},
                   [&](const step::Measure&) { ++n_measure; },
               },
               s);
  }
  if (n_measure != 1 || !std::holds_alternative<step::Measure>(seq.steps.back())) {
    throw std::invalid_argument("sequence must end in exactly one Measure");
  }
}

DickeState evolve(const ProtocolSequence& seq, const DickeState& initial) {
  validate(seq);
  DickeState state = initial;
  for (const auto& s : seq.steps) {
    std::visit(overloaded{
                   [&](const step::Rotate& r) { state = rotate(state, {r.axis, r.angle}); },
                   [&](const step::Twist& t) { state = oat_evolve(state, t.q_tilde); },
                   [&](const step::ImprintPhase& p) { state = rotate_z(state, p.phi); },
                   [&](const step::LightShift& l) { state = rotate_z(state, 8.0 * kPi * l.q_tilde); },
                   [&](const step::EchoPi&) { state = rotate_x(state, kPi); },
                   [](const step::Measure&) {},
               },
               s);
  }
  return state;
}

RunResult run_sequence(const ProtocolSequence& seq, int n_atoms, const RunOptions& options) {
  if (n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1");
  if (options.n_shots < 0) throw std::invalid_argument("n_shots must be >= 0");
  if (options.n_shots > 0 && !options.seed) throw std::invalid_argument("a seed is required when shots are drawn");
  if (options.noise) validate(*options.noise);

  const DickeState out = evolve(seq, make_css(n_atoms, kPi / 2, 0.0));
  const double s0 = 0.5 * n_atoms;
  RunResult r;
  r.axis = measured_axis(seq);
  r.moments = moments(out);
  r.distribution = measure_distribution(out, r.axis);

  const double mean_exact = axis_mean(r.moments, r.axis);
  const double var_exact = axis_var(r.moments, r.axis);
  const double sigma_exact = 2.0 * var_exact / s0;
  double c = 1.0;
  double sigma = sigma_exact;
  if (options.noise) {
    // Contrast shrinks the coherent part; broadening and resolution add on top.
    const NoiseBudget& nb = *options.noise;
    c = nb.contrast_sc;
    sigma = 1.0 + c * nb.i_tot() + c * c * (sigma_exact - 1.0) + nb.sigma_meas_sq;
  }
  r.mean_sy_norm = c * mean_exact / s0;
  r.sigma_y_sq = sigma;

  if (options.n_shots > 0) {
    r.shots = sample_shots(r.distribution, options.n_shots, derive_seed(*options.seed, 0));
    if (options.noise) {
      const double extra_var = std::max(0.0, 0.5 * s0 * sigma - c * c * var_exact);
      const double sd = std::sqrt(extra_var);
      Rng rng(derive_seed(*options.seed, 1));
      for (auto& x : r.shots) x = c * x + sd * rng.normal();
    }
    if (r.shots.size() >= 2) {
      r.ci_mean = bootstrap_ci(r.shots, Statistic::mean, options.n_resamples, derive_seed(*options.seed, 2));
      r.ci_variance = bootstrap_ci(r.shots, Statistic::variance, options.n_resamples, derive_seed(*options.seed, 3));
    }
  }
  return r;
}

ProtocolSequence satin_sequence(double q_plus, double q_minus, double phi) {
  return {{step::Twist{q_plus}, step::Rotate{Axis::y, phi}, step::Twist{q_minus}, step::Measure{Axis::y}}};
}

ProtocolSequence css_sequence(double phi) { return {{step::Rotate{Axis::z, phi}, step::Measure{Axis::y}}}; }

ProtocolSequence ramsey_sequence(double q_plus, double q_minus, double phase, bool ac_signal) {
  const double second_half = ac_signal ? -0.5 * phase : 0.5 * phase;
  return {{step::Twist{q_plus}, step::Rotate{Axis::x, kPi / 2}, step::ImprintPhase{0.5 * phase}, step::EchoPi{},
           step::ImprintPhase{second_half}, step::Rotate{Axis::x, -kPi / 2}, step::Twist{q_minus},
           step::Measure{Axis::y}}};
}

double amplification_analytic(double q_tilde, int n_atoms, double contrast) {
  if (n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1");
  const double mu = q_tilde / std::sqrt(static_cast<double>(n_atoms));
  const double c = std::cos(mu);
  if (c == 0.0) return 0.0;
  double cos_pow = std::exp(n_atoms * std::log(std::abs(c)));
  if (c < 0.0 && n_atoms % 2 == 1) cos_pow = -cos_pow;
  return contrast * n_atoms * std::sin(mu) * cos_pow;
}

double gain_db(double m, double sigma_y_sq) {
  if (!(sigma_y_sq > 0.0)) throw std::invalid_argument("sigma_y_sq must be positive");
  return 10.0 * std::log10(m * m / sigma_y_sq);
}

double fit_amplification(const std::function<double(double)>& signal) {
  const double h = 1e-6;
  const double guess = (signal(h) - signal(-h)) / (2.0 * h);
  const double window = 0.05 / std::max(std::abs(guess), 1.0);
  const double offset = signal(0.0);

  // Powers 1..5 of the window-scaled displacement, no intercept.
  constexpr int kPoints = 12;
  constexpr int kOrder = 5;
  Eigen::Matrix<double, kPoints, kOrder> design;
  Eigen::Matrix<double, kPoints, 1> y;
  for (int i = 0; i < kPoints; ++i) {
    const double t = static_cast<double>(i + 1) / kPoints;
    double p = 1.0;
    for (int k = 0; k < kOrder; ++k) design(i, k) = (p *= t);
    y(i) = signal(window * t) - offset;
  }
  const Eigen::Matrix<double, kOrder, 1> coef = design.colPivHouseholderQr().solve(y);
  return coef(0) / window;
}

double exact_amplification(double q_plus, double q_minus, int n_atoms) {
  if (n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1");
  const double s0 = 0.5 * n_atoms;
  const DickeState twisted = oat_evolve(make_css(n_atoms, kPi / 2, 0.0), q_plus);
  return fit_amplification([&](double phi) {
    return moments(oat_evolve(rotate_y(twisted, phi), q_minus)).mean_sy / s0;
  });
}

RunResult satin_run(double q_plus, double q_minus, double phi, int n_atoms, const RunOptions& options) {
  RunResult r = run_sequence(satin_sequence(q_plus, q_minus, phi), n_atoms, options);
  const double c = options.noise ? options.noise->contrast_sc : 1.0;
  r.amplification_m = c * exact_amplification(q_plus, q_minus, n_atoms);
  r.gain_db = gain_db(*r.amplification_m, r.sigma_y_sq);
  return r;
}

RunResult ramsey_echo_run(double q_tilde, double phase, int n_atoms, const NoiseBudget& noise, std::uint64_t seed,
                          int n_shots) {
  RunOptions opts;
  opts.noise = noise;
  opts.seed = seed;
  opts.n_shots = n_shots;
  RunResult r = run_sequence(ramsey_sequence(q_tilde, -q_tilde, phase), n_atoms, opts);
  const double m = fit_amplification(
      [&](double p) { return normalized_signal(ramsey_sequence(q_tilde, -q_tilde, p), n_atoms); });
  r.amplification_m = noise.contrast_sc * m;
  r.gain_db = gain_db(*r.amplification_m, r.sigma_y_sq);
  return r;
}

LightShiftCheck lightshift_echo_check(double q_tilde, int n_atoms) {
  if (!std::isfinite(q_tilde)) throw std::invalid_argument("q_tilde must be finite");
  const double half = 0.5 * q_tilde;
  const ProtocolSequence reference{
      {step::Twist{half}, step::EchoPi{}, step::Twist{half}, step::EchoPi{}, step::Measure{Axis::y}}};
  const ProtocolSequence echoed{{step::Twist{half}, step::LightShift{half}, step::EchoPi{}, step::Twist{half},
                                 step::LightShift{half}, step::EchoPi{}, step::Measure{Axis::y}}};
  const ProtocolSequence bare{
      {step::Twist{half}, step::LightShift{half}, step::Twist{half}, step::LightShift{half}, step::Measure{Axis::y}}};
  const ProtocolSequence bare_reference{{step::Twist{half}, step::Twist{half}, step::Measure{Axis::y}}};

  LightShiftCheck out;
  out.reference = run_sequence(reference, n_atoms);
  out.with_echo = run_sequence(echoed, n_atoms);
  out.without_echo = run_sequence(bare, n_atoms);
  const RunResult plain = run_sequence(bare_reference, n_atoms);

  const SpinMoments& a = out.reference.moments;
  const SpinMoments& b = out.with_echo.moments;
  const double s0 = 0.5 * n_atoms;
  for (double d : {(a.mean_sx - b.mean_sx) / s0, (a.mean_sy - b.mean_sy) / s0, (a.mean_sz - b.mean_sz) / s0,
                   (a.var_sx - b.var_sx) / (0.5 * s0), (a.var_sy - b.var_sy) / (0.5 * s0),
                   (a.var_sz - b.var_sz) / (0.5 * s0)}) {
    out.echo_deviation = std::max(out.echo_deviation, std::abs(d));
  }
  const SpinMoments& w = out.without_echo.moments;
  const SpinMoments& p = plain.moments;
  out.rotation_without_echo = wrap_angle(std::atan2(w.mean_sy, w.mean_sx) - std::atan2(p.mean_sy, p.mean_sx));
  out.expected_rotation = wrap_angle(8.0 * kPi * q_tilde);
  return out;
}

double maximize_1d(const std::function<double(double)>& f, double lo, double hi, int grid, int iterations) {
  if (grid < 3 || !(hi > lo)) throw std::invalid_argument("invalid search interval");
  const double step = (hi - lo) / (grid - 1);
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    const double v = f(lo + step * i);
    if (v > best_val) best_val = v, best = i;
  }
  double a = lo + step * std::max(best - 1, 0);
  double b = lo + step * std::min(best + 1, grid - 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < iterations; ++it) {
    if (fc > fd) {
      b = d, d = c, fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  double x = lo + step * best;
  if (fc > best_val) best_val = fc, x = c;
  if (fd > best_val) best_val = fd, x = d;
  return x;
}

IdealOptimum ideal_optimum(int n_atoms) {
  IdealOptimum out;
  out.n_atoms = n_atoms;
  out.q = maximize_1d(
      [&](double q) {
        const double m = exact_amplification(q, -q, n_atoms);
        return m * m;
      },
      0.3, 1.8, 16, 40);
  const RunResult r = satin_run(out.q, -out.q, 0.0, n_atoms);
  out.m = *r.amplification_m;
  out.gain_db = *r.gain_db;
  return out;
}

ModelPoint cavity_model_point(const CavityConfig& base, double q_tilde, const DetuningSearch& search) {
  ModelPoint p;
  p.n_atoms = base.n_atoms;
  p.q = q_tilde;
  p.detuning = optimize_detuning(base, q_tilde, search);
  const NoiseBudget noise = pair_noise(p.detuning.cfg, q_tilde, -q_tilde, search.sigma_meas_sq);
  p.m = amplification_analytic(q_tilde, base.n_atoms, noise.contrast_sc);
  p.sigma_y_sq = predict_variance(0.5 * base.n_atoms, noise, 0.0).sigma_y_sq;
  p.gain_db = gain_db(p.m, p.sigma_y_sq);
  return p;
}

ModelPoint cavity_model_optimum(const CavityConfig& base, const DetuningSearch& search, double q_lo, double q_hi) {
  const double q = maximize_1d(
      [&](double x) {
        try {
          return cavity_model_point(base, x, search).gain_db;
        } catch (const NoSolutionError&) {
          return -std::numeric_limits<double>::infinity();
        }
      },
      q_lo, q_hi, 15, 40);
  return cavity_model_point(base, q, search);
}

ScalingPoint scaling_point(int n_atoms, NoiseSource source, const CavityConfig& base, const DetuningSearch& search) {
  if (n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1");
  ScalingPoint p;
  p.n_atoms = n_atoms;
  if (source == NoiseSource::ideal) {
    const IdealOptimum o = ideal_optimum(n_atoms);
    p.q = o.q;
    p.gain_db = o.gain_db;
  } else {
    CavityConfig cfg = base;
    cfg.n_atoms = n_atoms;
    const ModelPoint m = cavity_model_optimum(cfg, search);
    p.q = m.q;
    p.gain_db = m.gain_db;
  }
  return p;
}

ScalingResult assemble_scaling(const std::vector<ScalingPoint>& points) {
  ScalingResult r;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double x = 10.0 * std::log10(static_cast<double>(p.n_atoms));
    r.atom_numbers.push_back(p.n_atoms);
    r.optimal_q.push_back(p.q);
    r.gains_db.push_back(p.gain_db);
    r.hl_distance_db.push_back(x - p.gain_db);
    sx += x;
    sy += p.gain_db;
    sxx += x * x;
    sxy += x * p.gain_db;
  }
  const double n = static_cast<double>(points.size());
  if (points.size() >= 2) {
    r.fit_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    r.fit_intercept = (sy - r.fit_slope * sx) / n;
  }
  return r;
}

ScalingResult heisenberg_sweep(const std::vector<int>& atom_numbers, NoiseSource source, const CavityConfig& base,
                               const DetuningSearch& search) {
  std::vector<ScalingPoint> points;
  points.reserve(atom_numbers.size());
  for (int n : atom_numbers) {
    if (n < 10) throw std::invalid_argument("atom numbers must be >= 10");
    points.push_back(scaling_point(n, source, base, search));
  }
  return assemble_scaling(points);
}

HlBudget hl_budget(const CavityConfig& base, const DetuningSearch& search) {
  const int n = base.n_atoms;
  HlBudget b;
  b.n_atoms = n;
  b.q_ideal = maximize_1d([&](double q) { return amplification_analytic(q, n); }, 0.3, 1.8, 16, 60);
  const double m_ideal = amplification_analytic(b.q_ideal, n);
  const ModelPoint model = cavity_model_optimum(base, search);
  b.q_model = model.q;
  const double contrast = model.detuning.budget.contrast_sc;

  b.ideal_db = 10.0 * std::log10(static_cast<double>(n)) - 20.0 * std::log10(m_ideal);
  b.q_shift_db = 20.0 * std::log10(m_ideal / amplification_analytic(b.q_model, n));
  b.contrast_db = -20.0 * std::log10(contrast);
  // Resolution is booked as the variance it would add to an otherwise perfect state.
  b.resolution_db = 10.0 * std::log10(1.0 + search.sigma_meas_sq);
  b.non_unitary_db = 10.0 * std::log10(model.sigma_y_sq) - b.resolution_db;
  b.hl_distance_db = 10.0 * std::log10(static_cast<double>(n)) - model.gain_db;
  return b;
}

}  // namespace satin
