#include "satin/app/runner.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>

#include "satin/rng.hpp"
#include "satin/stats.hpp"

#ifndef SATIN_VERSION
#define SATIN_VERSION "0.0.0"
#endif

namespace satin::app {

namespace {

using json = nlohmann::ordered_json;
using i64 = std::int64_t;

std::uint64_t root_seed(const ExperimentConfig& cfg) { return cfg.seed.value_or(0); }

CavityConfig cavity_for(const ExperimentConfig& cfg, int n_atoms) {
  CavityConfig c = cfg.cavity;
  c.n_atoms = n_atoms;
  return c;
}

NoiseBudget ideal_detection() {
  NoiseBudget nb = noiseless_budget();
  nb.sigma_meas_sq = 0.0;
  return nb;
}

// Overlay for a twist/untwist pair under the configured noise model.
std::optional<NoiseBudget> overlay_for(const ExperimentConfig& cfg, int n_atoms, double q_plus, double q_minus) {
  switch (cfg.noise_model) {
    case NoiseModel::none: return std::nullopt;
    case NoiseModel::budget: return cfg.noise;
    case NoiseModel::cavity: {
      NoiseBudget nb = cfg.noise;
      nb.i_plus = nb.i_minus = 0.0;
      nb.contrast_sc = 1.0;
      if (q_plus == 0.0) return nb;
      const DetuningResult det = optimize_detuning(cavity_for(cfg, n_atoms), q_plus, cfg.search);
      const NoiseBudget pair = pair_noise(det.cfg, q_plus, q_minus, cfg.noise.sigma_meas_sq);
      nb.i_plus = pair.i_plus;
      nb.i_minus = pair.i_minus;
      nb.contrast_sc = pair.contrast_sc;
      return nb;
    }
  }
  return std::nullopt;
}

NoiseBudget overlay_or_ideal(const ExperimentConfig& cfg, int n_atoms, double q_plus, double q_minus) {
  return overlay_for(cfg, n_atoms, q_plus, q_minus).value_or(ideal_detection());
}

// Twist in front of the first non-twist step and the sum of the later ones.
std::pair<double, double> twists_of(const ProtocolSequence& seq) {
  double q_plus = 0.0, q_minus = 0.0;
  bool before = true;
  for (const auto& s : seq.steps) {
    if (const auto* t = std::get_if<step::Twist>(&s)) {
      (before ? q_plus : q_minus) += t->q_tilde;
    } else if (!std::holds_alternative<step::Measure>(s)) {
      before = false;
    }
  }
  return {q_plus, q_minus};
}

double ramsey_twist(const ExperimentConfig& cfg) {
  if (cfg.q) return *cfg.q;
  return cavity_model_optimum(cavity_for(cfg, cfg.n_atoms), cfg.search).q;
}

void add_interval_columns(Table& t, const std::string& stem, const std::string& unit) {
  t.columns.push_back(stem + "[" + unit + "]");
  t.columns.push_back(stem + "_lo[" + unit + "]");
  t.columns.push_back(stem + "_hi[" + unit + "]");
}

void push_interval(std::vector<Cell>& row, const std::optional<Interval>& ci, double scale) {
  row.emplace_back(ci->estimate * scale);
  row.emplace_back(ci->lo * scale);
  row.emplace_back(ci->hi * scale);
}

Report run_simulate(const ExperimentConfig& cfg) {
  const auto [q_plus, q_minus] = twists_of(cfg.sequence);
  RunOptions opts;
  opts.noise = overlay_for(cfg, cfg.n_atoms, q_plus, q_minus);
  opts.seed = cfg.seed;
  opts.n_shots = cfg.shots;
  opts.n_resamples = cfg.resamples;
  const RunResult r = run_sequence(cfg.sequence, cfg.n_atoms, opts);

  Report rep;
  rep.table.columns = {"outcome[spin]", "probability[1]"};
  const double j = 0.5 * cfg.n_atoms;
  for (std::size_t k = 0; k < r.distribution.size(); ++k) {
    rep.table.rows.push_back({static_cast<double>(k) - j, r.distribution[k]});
  }
  auto& s = rep.summary;
  s.add("n_atoms", static_cast<i64>(cfg.n_atoms));
  s.add("mean[S0]", r.mean_sy_norm);
  s.add("sigma_y_sq[CSS]", r.sigma_y_sq);
  s.add("mean_sx[spin]", r.moments.mean_sx);
  s.add("mean_sy[spin]", r.moments.mean_sy);
  s.add("mean_sz[spin]", r.moments.mean_sz);
  s.add("var_sx[spin^2]", r.moments.var_sx);
  s.add("var_sy[spin^2]", r.moments.var_sy);
  s.add("var_sz[spin^2]", r.moments.var_sz);
  s.add("contrast[1]", r.moments.contrast);
  if (r.ci_mean) {
    s.add("shots", static_cast<i64>(cfg.shots));
    s.add("shot_mean[spin]", r.ci_mean->estimate);
    s.add("shot_mean_lo[spin]", r.ci_mean->lo);
    s.add("shot_mean_hi[spin]", r.ci_mean->hi);
    s.add("shot_var[spin^2]", r.ci_variance->estimate);
    s.add("shot_var_lo[spin^2]", r.ci_variance->lo);
    s.add("shot_var_hi[spin^2]", r.ci_variance->hi);
  }
  return rep;
}

Report run_sweep_q(const ExperimentConfig& cfg, int workers) {
  const int n = cfg.n_atoms;
  const CavityConfig cav = cavity_for(cfg, n);
  auto rows = parallel_map<std::vector<Cell>>(cfg.q_list.size(), workers, [&](std::size_t i) {
    const double q = cfg.q_list[i];
    const double m_exact = exact_amplification(q, -q, n);
    const double m_analytic = amplification_analytic(q, n);
    const ModelPoint model = cavity_model_point(cav, q, cfg.search);
    const RunResult ideal = run_sequence(satin_sequence(q, -q, 0.0), n);
    return std::vector<Cell>{q,
                             m_exact,
                             m_analytic,
                             model.m,
                             gain_db(m_exact, ideal.sigma_y_sq),
                             model.gain_db,
                             model.detuning.cfg.x_a,
                             model.detuning.budget.contrast_sc};
  });
  Report rep;
  rep.table.columns = {"q_plus[1]",     "m_exact[1]",     "m_analytic[1]", "m_model[1]",
                       "gain_ideal[dB]", "gain_model[dB]", "x_a[1]",        "contrast_sc[1]"};
  rep.table.rows = std::move(rows);
  rep.summary.add("n_atoms", static_cast<i64>(n));
  return rep;
}

Report run_sweep_untwist(const ExperimentConfig& cfg, int workers) {
  const int n = cfg.n_atoms;
  const double s0 = 0.5 * n;
  const double q_plus = *cfg.q_plus;
  const bool sampled = cfg.shots > 0;
  auto rows = parallel_map<std::vector<Cell>>(cfg.q_minus_list.size(), workers, [&](std::size_t i) {
    const double q_minus = cfg.q_minus_list[i];
    const NoiseBudget nb = overlay_or_ideal(cfg, n, q_plus, q_minus);
    const VariancePrediction pred = predict_variance(s0, nb, q_plus + q_minus);
    const RunResult exact = run_sequence(satin_sequence(q_plus, q_minus, 0.0), n);
    RunOptions opts;
    opts.noise = nb;
    opts.n_shots = cfg.shots;
    opts.n_resamples = cfg.resamples;
    if (sampled) opts.seed = derive_seed(root_seed(cfg), i);
    const RunResult noisy = run_sequence(satin_sequence(q_plus, q_minus, 0.0), n, opts);
    std::vector<Cell> row{q_minus, exact.sigma_y_sq, pred.sigma_y_sq, pred.sigma_y_sq_hp, noisy.sigma_y_sq};
    if (sampled) push_interval(row, noisy.ci_variance, 2.0 / s0);
    return row;
  });
  Report rep;
  rep.table.columns = {"q_minus[1]", "sigma_exact[CSS]", "sigma_model[CSS]", "sigma_hp[CSS]", "sigma_overlay[CSS]"};
  if (sampled) add_interval_columns(rep.table, "sigma_shots", "CSS");
  rep.table.rows = std::move(rows);
  rep.summary.add("n_atoms", static_cast<i64>(n));
  rep.summary.add("q_plus[1]", q_plus);
  const UntwistDecomposition d =
      cfg.noise_model == NoiseModel::cavity
          ? decompose_untwist(optimize_detuning(cavity_for(cfg, n), q_plus, cfg.search).cfg, q_plus,
                              cfg.noise.sigma_meas_sq)
          : UntwistDecomposition{};
  if (cfg.noise_model == NoiseModel::cavity) {
    rep.summary.add("untwisted_sigma[CSS]", d.sigma_y_sq);
    rep.summary.add("resolution[CSS]", d.resolution);
    rep.summary.add("i_tot[CSS]", d.i_tot);
    rep.summary.add("contrast_sc[1]", d.contrast_sc);
    rep.summary.add("contrast_shift[CSS]", d.contrast_shift);
  }
  return rep;
}

Report run_sweep_n(const ExperimentConfig& cfg, int workers) {
  std::vector<std::pair<int, NoiseSource>> tasks;
  for (NoiseSource src : {NoiseSource::ideal, NoiseSource::cavity_model}) {
    const bool wanted = cfg.source == "both" || (cfg.source == "ideal") == (src == NoiseSource::ideal);
    if (!wanted) continue;
    for (int n : cfg.n_list) tasks.emplace_back(n, src);
  }
  const auto points = parallel_map<ScalingPoint>(tasks.size(), workers, [&](std::size_t i) {
    return scaling_point(tasks[i].first, tasks[i].second, cfg.cavity, cfg.search);
  });

  Report rep;
  rep.table.columns = {"source", "n_atoms", "q_opt[1]", "gain[dB]", "hl_distance[dB]"};
  for (NoiseSource src : {NoiseSource::ideal, NoiseSource::cavity_model}) {
    std::vector<ScalingPoint> sel;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].second == src) sel.push_back(points[i]);
    }
    if (sel.empty()) continue;
    const std::string name = src == NoiseSource::ideal ? "ideal" : "cavity";
    const ScalingResult fit = assemble_scaling(sel);
    for (std::size_t i = 0; i < fit.atom_numbers.size(); ++i) {
      rep.table.rows.push_back(
          {name, static_cast<i64>(fit.atom_numbers[i]), fit.optimal_q[i], fit.gains_db[i], fit.hl_distance_db[i]});
    }
    if (sel.size() >= 2) {
      rep.summary.add(name + "_slope[dB/dB]", fit.fit_slope);
      rep.summary.add(name + "_intercept[dB]", fit.fit_intercept);
    }
  }
  return rep;
}

Report run_amplify(const ExperimentConfig& cfg, int workers) {
  const int n = cfg.n_atoms;
  const std::size_t n_phi = cfg.phi_list.size();
  const std::size_t n_tasks = cfg.q_list.size() * n_phi;
  const auto budgets = parallel_map<NoiseBudget>(cfg.q_list.size(), workers, [&](std::size_t i) {
    return overlay_or_ideal(cfg, n, cfg.q_list[i], -cfg.q_list[i]);
  });
  auto rows = parallel_map<std::vector<Cell>>(n_tasks, workers, [&](std::size_t t) {
    const std::size_t iq = t / n_phi;
    const double q = cfg.q_list[iq];
    const double phi = cfg.phi_list[t % n_phi];
    RunOptions opts;
    opts.noise = budgets[iq];
    const RunResult satin = run_sequence(satin_sequence(q, -q, phi), n, opts);
    const RunResult css = run_sequence(css_sequence(phi), n);
    return std::vector<Cell>{q, phi, satin.mean_sy_norm, css.mean_sy_norm, satin.sigma_y_sq};
  });
  const auto slopes = parallel_map<double>(cfg.q_list.size(), workers, [&](std::size_t i) {
    return budgets[i].contrast_sc * exact_amplification(cfg.q_list[i], -cfg.q_list[i], n);
  });

  Report rep;
  rep.table.columns = {"q_plus[1]", "phi[rad]", "signal_satin[S0]", "signal_css[S0]", "sigma_y_sq[CSS]"};
  rep.table.rows = std::move(rows);
  rep.summary.add("n_atoms", static_cast<i64>(n));
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    char key[64];
    std::snprintf(key, sizeof key, "m_at_q=%.6g[1]", cfg.q_list[i]);
    rep.summary.add(key, slopes[i]);
  }
  return rep;
}

Report run_ramsey(const ExperimentConfig& cfg, int workers) {
  const int n = cfg.n_atoms;
  const double s0 = 0.5 * n;
  const double q = ramsey_twist(cfg);
  const NoiseBudget nb = overlay_or_ideal(cfg, n, q, -q);
  const bool sampled = cfg.shots > 0;
  auto rows = parallel_map<std::vector<Cell>>(cfg.phi_list.size(), workers, [&](std::size_t i) {
    const double phase = cfg.phi_list[i];
    RunOptions opts;
    opts.noise = nb;
    opts.n_shots = cfg.shots;
    opts.n_resamples = cfg.resamples;
    if (sampled) opts.seed = derive_seed(root_seed(cfg), i);
    const RunResult ac = run_sequence(ramsey_sequence(q, -q, phase, true), n, opts);
    const RunResult dc = run_sequence(ramsey_sequence(q, -q, phase, false), n);
    std::vector<Cell> row{phase, ac.mean_sy_norm, dc.mean_sy_norm, ac.sigma_y_sq};
    if (sampled) push_interval(row, ac.ci_mean, 1.0 / s0);
    return row;
  });
  const RunResult ref = ramsey_echo_run(q, 0.0, n, nb, 0, 0);

  Report rep;
  rep.table.columns = {"phase[rad]", "signal_ac[S0]", "signal_static[S0]", "sigma_y_sq[CSS]"};
  if (sampled) add_interval_columns(rep.table, "shot_mean", "S0");
  rep.table.rows = std::move(rows);
  rep.summary.add("n_atoms", static_cast<i64>(n));
  rep.summary.add("q_plus[1]", q);
  rep.summary.add("m[1]", *ref.amplification_m);
  rep.summary.add("sigma_y_sq[CSS]", ref.sigma_y_sq);
  rep.summary.add("gain[dB]", *ref.gain_db);
  return rep;
}

Report run_wigner(const ExperimentConfig& cfg) {
  const DickeState psi =
      rotate_z(oat_evolve(make_css(cfg.n_atoms, std::numbers::pi / 2, 0.0), *cfg.q), cfg.rotate_phi);
  Report rep;
  rep.grid = wigner_grid(psi, cfg.n_polar, cfg.n_azimuth);
  const SphereGrid& g = *rep.grid;
  std::size_t best = 0;
  for (std::size_t k = 1; k < g.values.size(); ++k) {
    if (g.values[k] > g.values[best]) best = k;
  }
  const int bi = static_cast<int>(best / g.n_azimuth);
  const int bj = static_cast<int>(best % g.n_azimuth);
  rep.table.columns = {"n_atoms", "q[1]", "integral[1]", "max_imag[1]", "w_max[1/sr]", "theta_max[rad]",
                       "phi_max[rad]"};
  rep.table.rows.push_back({static_cast<i64>(cfg.n_atoms), *cfg.q, integrate(g), g.max_imag, g.values[best],
                            g.theta(bi), g.phi(bj)});
  return rep;
}

Report run_allan(const ExperimentConfig& cfg, int workers) {
  const int n = cfg.n_atoms;
  const double s0 = 0.5 * n;
  const double q = ramsey_twist(cfg);
  const NoiseBudget nb = overlay_or_ideal(cfg, n, q, -q);
  const std::uint64_t seed = root_seed(cfg);

  struct Trace {
    std::vector<double> phase;
    double m = 1.0;
    double gain = 0.0;
  };
  const auto traces = parallel_map<Trace>(2, workers, [&](std::size_t i) {
    Trace t;
    std::vector<double> shots;
    if (i == 0) {
      const RunResult r = ramsey_echo_run(q, 0.0, n, nb, derive_seed(seed, 0), cfg.shots);
      t.m = *r.amplification_m;
      t.gain = *r.gain_db;
      shots = r.shots;
    } else {
      RunOptions opts;
      opts.seed = derive_seed(seed, 1);
      opts.n_shots = cfg.shots;
      opts.n_resamples = 2;
      shots = run_sequence(css_sequence(0.0), n, opts).shots;
    }
    for (double x : shots) t.phase.push_back(x / (s0 * t.m));
    return t;
  });
  const AllanResult satin = allan_deviation(traces[0].phase, cfg.sample_period);
  const AllanResult css = allan_deviation(traces[1].phase, cfg.sample_period);

  Report rep;
  rep.table.columns = {"tau[s]", "adev_satin[rad]", "adev_css[rad]", "ratio[1]"};
  for (std::size_t k = 0; k < satin.tau.size(); ++k) {
    rep.table.rows.push_back({satin.tau[k], satin.adev[k], css.adev[k], satin.adev[k] / css.adev[k]});
  }
  const double tau_max = satin.tau.back();
  rep.summary.add("n_atoms", static_cast<i64>(n));
  rep.summary.add("q_plus[1]", q);
  rep.summary.add("gain[dB]", traces[0].gain);
  rep.summary.add("expected_ratio[1]", std::pow(10.0, -traces[0].gain / 20.0));
  rep.summary.add("ratio_tau1[1]", satin.adev[0] / css.adev[0]);
  rep.summary.add("slope_satin[1]", loglog_slope(satin, tau_max));
  rep.summary.add("slope_css[1]", loglog_slope(css, tau_max));
  return rep;
}

Report run_optimize(const ExperimentConfig& cfg, int workers) {
  const CavityConfig cav = cavity_for(cfg, cfg.n_atoms);
  auto rows = parallel_map<std::vector<Cell>>(cfg.q_list.size(), workers, [&](std::size_t i) {
    const double q = cfg.q_list[i];
    const DetuningResult d = optimize_detuning(cav, q, cfg.search);
    return std::vector<Cell>{q,
                             d.cfg.x_a,
                             d.cfg.x_c,
                             d.budget.n_tr_plus,
                             d.budget.n_tr_minus,
                             d.budget.i_plus + d.budget.i_minus,
                             d.budget.contrast_sc,
                             d.gain_db};
  });
  Report rep;
  rep.table.columns = {"q_plus[1]",   "x_a[1]",       "x_c[1]",         "n_tr_plus[photons]",
                       "n_tr_minus[photons]", "i_tot[CSS]", "contrast_sc[1]", "gain[dB]"};
  rep.table.rows = std::move(rows);

  const HlBudget b = hl_budget(cav, cfg.search);
  auto& s = rep.summary;
  s.add("n_atoms", static_cast<i64>(cfg.n_atoms));
  s.add("q_ideal[1]", b.q_ideal);
  s.add("q_model[1]", b.q_model);
  s.add("gain_model[dB]", 10.0 * std::log10(cfg.n_atoms) - b.hl_distance_db);
  s.add("ideal_distance[dB]", b.ideal_db);
  s.add("q_shift[dB]", b.q_shift_db);
  s.add("contrast[dB]", b.contrast_db);
  s.add("non_unitary[dB]", b.non_unitary_db);
  s.add("resolution[dB]", b.resolution_db);
  s.add("hl_distance[dB]", b.hl_distance_db);
  return rep;
}

void check_finite(const std::string& where, const Cell& c) {
  if (const double* d = std::get_if<double>(&c); d && !std::isfinite(*d)) {
    throw NumericError("non-finite value in " + where);
  }
}

void check_report(const Report& rep) {
  for (std::size_t r = 0; r < rep.table.rows.size(); ++r) {
    for (std::size_t c = 0; c < rep.table.rows[r].size(); ++c) {
      check_finite("column " + rep.table.columns[c] + ", row " + std::to_string(r), rep.table.rows[r][c]);
    }
  }
  for (const auto& [k, v] : rep.summary.entries) check_finite(k, v);
  if (rep.grid) {
    for (double w : rep.grid->values) check_finite("Wigner grid", w);
  }
}

std::string format_cell(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  if (const i64* i = std::get_if<i64>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

json to_json(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return *d;
  if (const i64* i = std::get_if<i64>(&c)) return *i;
  return std::get<std::string>(c);
}

std::ofstream open_out(const std::filesystem::path& p, bool binary = false) {
  std::ofstream out(p, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

void write_csv_table(const Table& t, const std::filesystem::path& p) {
  auto out = open_out(p);
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_cell(row[c]);
    out << '\n';
  }
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg, int workers) {
  switch (cfg.mode) {
    case Mode::simulate: return run_simulate(cfg);
    case Mode::sweep_q: return run_sweep_q(cfg, workers);
    case Mode::sweep_untwist: return run_sweep_untwist(cfg, workers);
    case Mode::sweep_n: return run_sweep_n(cfg, workers);
    case Mode::amplify: return run_amplify(cfg, workers);
    case Mode::ramsey: return run_ramsey(cfg, workers);
    case Mode::wigner: return run_wigner(cfg);
    case Mode::allan: return run_allan(cfg, workers);
    case Mode::optimize: return run_optimize(cfg, workers);
  }
  throw std::logic_error("unhandled mode");
}

std::vector<std::filesystem::path> write_report(const ExperimentConfig& cfg, const Report& report) {
  check_report(report);
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;

  if (cfg.format == Format::csv) {
    written.push_back(dir / (cfg.name + ".csv"));
    write_csv_table(report.table, written.back());
    if (!report.summary.entries.empty()) {
      Table s{{"key", "value"}, {}};
      for (const auto& [k, v] : report.summary.entries) s.rows.push_back({k, v});
      written.push_back(dir / (cfg.name + "_summary.csv"));
      write_csv_table(s, written.back());
    }
  } else {
    json doc;
    doc["mode"] = mode_name(cfg.mode);
    doc["columns"] = report.table.columns;
    json rows = json::array();
    for (const auto& row : report.table.rows) {
      json r = json::array();
      for (const auto& c : row) r.push_back(to_json(c));
      rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    json summary = json::object();
    for (const auto& [k, v] : report.summary.entries) summary[k] = to_json(v);
    doc["summary"] = std::move(summary);
    written.push_back(dir / (cfg.name + ".json"));
    open_out(written.back()) << doc.dump(2) << '\n';
  }

  if (report.grid) {
    const bool binary = cfg.grid_format == "binary";
    written.push_back(dir / (cfg.name + (binary ? "_grid.bin" : "_grid.csv")));
    auto out = open_out(written.back(), binary);
    if (binary) {
      write_binary(*report.grid, out);
    } else {
      write_csv(*report.grid, out);
    }
  }
  return written;
}

void write_manifest(const ExperimentConfig& cfg, const std::string& config_text, int workers, double wall_seconds,
                    const std::vector<std::filesystem::path>& outputs) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(config_text)));
  json doc;
  doc["artifact_version"] = SATIN_VERSION;
  doc["schema_version"] = kSchemaVersion;
  doc["mode"] = mode_name(cfg.mode);
  doc["config_hash_fnv1a64"] = hash;
  doc["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
  doc["workers"] = workers;
  doc["wall_time_s"] = wall_seconds;
  json files = json::array();
  for (const auto& p : outputs) files.push_back(p.filename().string());
  doc["outputs"] = std::move(files);
  open_out(std::filesystem::path(cfg.out_dir) / "manifest.json") << doc.dump(2) << '\n';
}

std::string artifact_version() { return SATIN_VERSION; }

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

int default_workers() {
  const char* env = std::getenv("SATIN_WORKERS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 1024) throw ConfigError("SATIN_WORKERS must be an integer in [1, 1024]", 0);
  return static_cast<int>(v);
}

}  // namespace satin::app
