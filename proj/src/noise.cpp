#include "satin/noise.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "satin/dicke.hpp"
#include "satin/rng.hpp"

namespace satin {

namespace {

struct LinearFit {
  Eigen::VectorXd coef;
  Eigen::VectorXd stderr_;
};

// Weighted least squares with known per-point variances.
LinearFit weighted_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, const Eigen::VectorXd& var) {
  const Eigen::VectorXd w = var.cwiseInverse();
  const Eigen::MatrixXd normal = design.transpose() * w.asDiagonal() * design;
  const Eigen::MatrixXd cov = normal.inverse();
  LinearFit fit;
  fit.coef = cov * design.transpose() * w.asDiagonal() * y;
  fit.stderr_ = cov.diagonal().cwiseSqrt();
  return fit;
}

}  // namespace

NoiseBudget noiseless_budget() {
  NoiseBudget b;
  b.sigma_meas_sq = 0.0;
  b.sigma_d_sq = 0.0;
  return b;
}

void validate(const NoiseBudget& noise) {
  for (double v : {noise.i_plus, noise.i_minus, noise.sigma_meas_sq, noise.sigma_d_sq}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("noise terms must be finite and >= 0");
  }
  if (!(noise.contrast_sc > 0.0) || noise.contrast_sc > 1.0) throw std::invalid_argument("contrast must be in (0, 1]");
}

double phase_variance(double s0, double i_tot, double q_tot, double contrast) {
  if (!(s0 > 0.0)) throw std::invalid_argument("s0 must be positive");
  if (!(contrast > 0.0) || contrast > 1.0) throw std::invalid_argument("contrast must be in (0, 1]");
  return (1.0 + i_tot) / (2.0 * contrast * s0) + q_tot * q_tot;
}

double sigma_y_from_phase(double delta_tau_sq, double s0, double contrast) {
  return 1.0 - contrast + s0 * contrast * contrast * (-std::expm1(-2.0 * delta_tau_sq));
}

double sigma_y_hp(double s0, double i_tot, double q_tot, double contrast) {
  return 1.0 + 2.0 * s0 * contrast * contrast * q_tot * q_tot + contrast * i_tot;
}

VariancePrediction predict_variance(double s0, const NoiseBudget& noise, double q_tot) {
  validate(noise);
  VariancePrediction p;
  p.delta_tau_sq = phase_variance(s0, noise.i_tot(), q_tot, noise.contrast_sc);
  p.sigma_y_sq = sigma_y_from_phase(p.delta_tau_sq, s0, noise.contrast_sc) + noise.sigma_meas_sq;
  p.sigma_y_sq_hp = sigma_y_hp(s0, noise.i_tot(), q_tot, noise.contrast_sc) + noise.sigma_meas_sq;
  return p;
}

NoiseBudget pair_noise(const CavityConfig& cfg, double q_plus, double q_minus, double sigma_meas_sq) {
  const PulsePairBudget b = pulse_pair_budget(cfg, q_plus, q_minus);
  NoiseBudget noise;
  noise.i_plus = b.i_plus;
  noise.i_minus = b.i_minus;
  noise.contrast_sc = b.contrast_sc;
  noise.sigma_meas_sq = sigma_meas_sq;
  return noise;
}

VariancePrediction predict_untwist_variance(const CavityConfig& cfg, double q_plus, double q_minus,
                                            double sigma_meas_sq) {
  validate(cfg);
  if (cfg.n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1");
  return predict_variance(0.5 * cfg.n_atoms, pair_noise(cfg, q_plus, q_minus, sigma_meas_sq), q_plus + q_minus);
}

UntwistDecomposition decompose_untwist(const CavityConfig& cfg, double q_plus, double sigma_meas_sq) {
  const double s0 = 0.5 * cfg.n_atoms;
  const NoiseBudget full = pair_noise(cfg, q_plus, -q_plus, sigma_meas_sq);
  NoiseBudget no_contrast = full;
  no_contrast.contrast_sc = 1.0;

  UntwistDecomposition d;
  d.sigma_y_sq = predict_variance(s0, full, 0.0).sigma_y_sq;
  d.resolution = sigma_meas_sq;
  d.i_tot = full.i_tot();
  d.contrast_sc = full.contrast_sc;
  d.contrast_shift = d.sigma_y_sq - predict_variance(s0, no_contrast, 0.0).sigma_y_sq;
  return d;
}

double projection_noise_slope(double eta, double sigma_d_sq) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  return eta * (1.0 + sigma_d_sq) / 4.0;
}

ProjectionNoiseFit projection_noise_monte_carlo(double eta, double sigma_d_sq, const std::vector<int>& atom_numbers,
                                                int shots, std::uint64_t seed) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (atom_numbers.size() < 3) throw std::invalid_argument("need at least 3 atom numbers");
  if (shots < 3) throw std::invalid_argument("need at least 3 shots per atom number");

  ProjectionNoiseFit fit;
  const std::size_t n_points = atom_numbers.size();
  for (std::size_t i = 0; i < n_points; ++i) {
    const int n = atom_numbers[i];
    const DickeState css = make_css(n, std::numbers::pi / 2, 0.0);
    const auto dist = measure_distribution(css, Axis::z);
    const std::uint64_t task_seed = derive_seed(seed, i);
    const auto sz = sample_shots(dist, shots, task_seed);
    Rng detect(derive_seed(task_seed, 0x5eed));
    const double sd = std::sqrt(sigma_d_sq * n / 4.0);
    double mean = 0.0;
    std::vector<double> v(sz.size());
    for (std::size_t s = 0; s < sz.size(); ++s) {
      v[s] = eta * (sz[s] + sd * detect.normal());
      mean += v[s];
    }
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    fit.x.push_back(n * eta);
    fit.variance.push_back(ss / static_cast<double>(v.size() - 1));
  }

  // A sample variance of Gaussian data has variance 2 v^2 / (n - 1); weights use the
  // unweighted first-pass prediction so that they do not correlate with the noise.
  Eigen::MatrixXd lin(n_points, 2), quad(n_points, 3);
  Eigen::VectorXd y(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    lin(i, 0) = quad(i, 0) = 1.0;
    lin(i, 1) = quad(i, 1) = fit.x[i];
    quad(i, 2) = fit.x[i] * fit.x[i];
    y(i) = fit.variance[i];
  }
  const Eigen::VectorXd ols = lin.colPivHouseholderQr().solve(y);
  Eigen::VectorXd var(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double pred = std::max(ols(0) + ols(1) * fit.x[i], 1e-12);
    var(i) = 2.0 * pred * pred / (shots - 1);
  }
  const LinearFit l = weighted_fit(lin, y, var);
  fit.intercept = l.coef(0);
  fit.slope = l.coef(1);
  fit.slope_stderr = l.stderr_(1);
  const LinearFit q = weighted_fit(quad, y, var);
  fit.quadratic = q.coef(2);
  fit.quadratic_stderr = q.stderr_(2);
  return fit;
}

}  // namespace satin
