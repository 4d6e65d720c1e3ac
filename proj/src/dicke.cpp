#include "satin/dicke.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "satin/rng.hpp"

namespace satin {

namespace {

constexpr double kPi = std::numbers::pi;

void require_valid_atoms(int n_atoms) {
  if (n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1, got " + std::to_string(n_atoms));
}

void require_finite(double angle, const char* what) {
  if (!std::isfinite(angle)) throw std::invalid_argument(std::string(what) + " must be finite");
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// i^n for integer n.
cplx i_pow(long n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

std::vector<double> build_half_pi_small_d(int n_atoms) {
  const int n = n_atoms;
  const std::size_t dim = static_cast<std::size_t>(n) + 1;
  const double j = 0.5 * n;
  std::vector<double> d(dim * dim, 0.0);
  auto at = [&](std::size_t row, std::size_t col) -> double& { return d[row * dim + col]; };

  // Column m = j: sqrt(C(2j, j+m')) / 2^j, all positive.
  for (std::size_t r = 0; r < dim; ++r) {
    at(r, n) = std::exp(0.5 * log_binomial(n, static_cast<int>(r)) - j * std::numbers::ln2);
  }

  // c+(m) d_{m',m+1} + c-(m) d_{m',m-1} = -2 m' d_{m',m}, run inward from m = j.
  // Moving from the edge toward m = 0 the solution grows, which keeps the
  // recursion stable; the m < 0 half follows from d_{m',-m} = (-1)^{j+m'} d_{m',m}.
  const std::size_t k_low = static_cast<std::size_t>((n + 1) / 2);
  for (std::size_t r = 0; r < dim; ++r) {
    const double mp = static_cast<double>(r) - j;
    for (std::size_t k = n; k > k_low; --k) {
      const double m = static_cast<double>(k) - j;
      const double c_plus = std::sqrt((j - m) * (j + m + 1.0));
      const double c_minus = std::sqrt((j + m) * (j - m + 1.0));
      const double next = (k + 1 < dim) ? at(r, k + 1) : 0.0;
      at(r, k - 1) = (-2.0 * mp * at(r, k) - c_plus * next) / c_minus;
    }
  }
  for (std::size_t r = 0; r < dim; ++r) {
    const double sign = (r % 2 == 0) ? 1.0 : -1.0;
    for (std::size_t k = 0; 2 * k < static_cast<std::size_t>(n); ++k) {
      at(r, k) = sign * at(r, n - k);
    }
  }
  return d;
}

std::shared_ptr<const std::vector<double>> cached_half_pi(int n_atoms) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const std::vector<double>>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(n_atoms); it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const std::vector<double>>(build_half_pi_small_d(n_atoms));
  std::lock_guard lock(mutex);
  if (cache.size() > 64) cache.clear();
  return cache.emplace(n_atoms, built).first->second;
}

}  // namespace

DickeState::DickeState(int n_atoms, std::vector<cplx> amplitudes)
    : n_atoms_(n_atoms), amps_(std::move(amplitudes)) {
  require_valid_atoms(n_atoms);
  if (amps_.size() != static_cast<std::size_t>(n_atoms) + 1) {
    throw std::invalid_argument("amplitude vector must have n_atoms + 1 entries");
  }
  const double nrm = norm_sq();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw std::invalid_argument("state has zero or non-finite norm");
  const double scale = 1.0 / std::sqrt(nrm);
  for (auto& a : amps_) a *= scale;
}

DickeState::DickeState(int n_atoms, std::vector<cplx> amplitudes, Unchecked)
    : n_atoms_(n_atoms), amps_(std::move(amplitudes)) {}

double DickeState::norm_sq() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

DickeState make_css(int n_atoms, double polar, double azimuth) {
  require_valid_atoms(n_atoms);
  require_finite(polar, "polar angle");
  require_finite(azimuth, "azimuth");
  // |theta, phi> = sum_k sqrt(C(N,k)) cos(theta/2)^k sin(theta/2)^(N-k) e^{-i m phi} |m = k - S>,
  // with overall phase chosen so that (pi/2, 0) gives real positive binomial amplitudes.
  const double c = std::cos(0.5 * polar);
  const double s = std::sin(0.5 * polar);
  const double j = 0.5 * n_atoms;
  std::vector<cplx> amps(static_cast<std::size_t>(n_atoms) + 1);
  for (int k = 0; k <= n_atoms; ++k) {
    const int n_down = n_atoms - k;
    double mag = 0.0;
    if ((k > 0 && c == 0.0) || (n_down > 0 && s == 0.0)) {
      mag = 0.0;
    } else {
      double log_mag = 0.5 * log_binomial(n_atoms, k);
      if (k > 0) log_mag += k * std::log(std::abs(c));
      if (n_down > 0) log_mag += n_down * std::log(std::abs(s));
      mag = std::exp(log_mag);
      if (c < 0.0 && (k % 2 == 1)) mag = -mag;
      if (s < 0.0 && (n_down % 2 == 1)) mag = -mag;
    }
    const double m = k - j;
    amps[k] = mag * std::polar(1.0, -m * azimuth);
  }
  return DickeState(n_atoms, std::move(amps));
}

DickeState rotate_z(const DickeState& state, double angle) {
  require_finite(angle, "rotation angle");
  std::vector<cplx> out(state.amps_);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= std::polar(1.0, -angle * state.m_of(k));
  return DickeState(state.n_atoms_, std::move(out), DickeState::Unchecked{});
}

DickeState rotate_y(const DickeState& state, double angle) {
  require_finite(angle, "rotation angle");
  if (angle == 0.0) return state;
  const int n = state.n_atoms_;
  const std::size_t dim = state.dim();
  const auto delta_ptr = cached_half_pi(n);
  const auto& delta = *delta_ptr;

  // exp(-i b S_y) = V^dagger exp(-i b S_z) V with V = exp(-i pi/2 S_x),
  // V_{ab} = i^{a-b} d_{ab}(pi/2).
  std::vector<cplx> phase_in(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    phase_in[k] = i_pow(-static_cast<long>(k)) * state.amps_[k];
  }
  std::vector<cplx> mid(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    const double* row = &delta[a * dim];
    cplx acc{0.0, 0.0};
    for (std::size_t b = 0; b < dim; ++b) acc += row[b] * phase_in[b];
    mid[a] = i_pow(static_cast<long>(a)) * acc * std::polar(1.0, -angle * state.m_of(a));
  }
  // (V^dagger x)_b = sum_a i^{b-a} d_{ab} x_a
  for (std::size_t a = 0; a < dim; ++a) mid[a] *= i_pow(-static_cast<long>(a));
  std::vector<cplx> out(dim, cplx{0.0, 0.0});
  for (std::size_t a = 0; a < dim; ++a) {
    const double* row = &delta[a * dim];
    const cplx x = mid[a];
    for (std::size_t b = 0; b < dim; ++b) out[b] += row[b] * x;
  }
  for (std::size_t b = 0; b < dim; ++b) out[b] *= i_pow(static_cast<long>(b));
  return DickeState(n, std::move(out), DickeState::Unchecked{});
}

DickeState rotate_x(const DickeState& state, double angle) {
  require_finite(angle, "rotation angle");
  return rotate_z(rotate_y(rotate_z(state, kPi / 2), angle), -kPi / 2);
}

DickeState rotate(const DickeState& state, RotationSpec spec) {
  switch (spec.axis) {
    case Axis::x: return rotate_x(state, spec.angle);
    case Axis::y: return rotate_y(state, spec.angle);
    case Axis::z: return rotate_z(state, spec.angle);
  }
  throw std::invalid_argument("unknown rotation axis");
}

DickeState oat_evolve(const DickeState& state, double q_tilde) {
  require_finite(q_tilde, "twisting strength");
  const double rate = q_tilde / std::sqrt(static_cast<double>(state.n_atoms_));
  std::vector<cplx> out(state.amps_);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double m = state.m_of(k);
    out[k] *= std::polar(1.0, -rate * m * m);
  }
  return DickeState(state.n_atoms_, std::move(out), DickeState::Unchecked{});
}

std::vector<double> measure_distribution(const DickeState& state, Axis axis) {
  // S_x = R^dag S_z R for R = exp(+i pi/2 S_y); S_y likewise for R = exp(-i pi/2 S_x).
  const DickeState rotated = axis == Axis::z   ? state
                             : axis == Axis::x ? rotate_y(state, -kPi / 2)
                                               : rotate_x(state, kPi / 2);
  std::vector<double> p(rotated.dim());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::norm(rotated[k]);
  return p;
}

SpinMoments moments(const DickeState& state) {
  const double j = state.spin();
  const std::size_t dim = state.dim();
  const auto a = state.amplitudes();

  double mz = 0.0, mz2 = 0.0;
  cplx s_plus{0.0, 0.0}, s_plus2{0.0, 0.0};
  for (std::size_t k = 0; k < dim; ++k) {
    const double m = state.m_of(k);
    const double p = std::norm(a[k]);
    mz += m * p;
    mz2 += m * m * p;
    if (k + 1 < dim) {
      const double c1 = std::sqrt((j - m) * (j + m + 1.0));
      s_plus += c1 * std::conj(a[k + 1]) * a[k];
      if (k + 2 < dim) {
        const double c2 = std::sqrt((j - m - 1.0) * (j + m + 2.0));
        s_plus2 += c1 * c2 * std::conj(a[k + 2]) * a[k];
      }
    }
  }
  // S+ S- + S- S+ = 2 (S^2 - S_z^2)
  const double cross = 2.0 * (j * (j + 1.0) - mz2);
  const double sx2 = 0.25 * (2.0 * s_plus2.real() + cross);
  const double sy2 = 0.25 * (-2.0 * s_plus2.real() + cross);

  SpinMoments out;
  out.mean_sx = s_plus.real();
  out.mean_sy = s_plus.imag();
  out.mean_sz = mz;
  out.var_sx = std::max(0.0, sx2 - out.mean_sx * out.mean_sx);
  out.var_sy = std::max(0.0, sy2 - out.mean_sy * out.mean_sy);
  out.var_sz = std::max(0.0, mz2 - mz * mz);
  const double len = std::sqrt(out.mean_sx * out.mean_sx + out.mean_sy * out.mean_sy + out.mean_sz * out.mean_sz);
  out.contrast = len / j;
  return out;
}

std::vector<double> sample_shots(std::span<const double> dist, int n_shots, std::uint64_t seed) {
  if (n_shots < 1) throw std::invalid_argument("n_shots must be >= 1");
  if (dist.empty()) throw std::invalid_argument("distribution is empty");
  double total = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("distribution has negative or non-finite entries");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("distribution does not sum to 1");

  std::vector<double> cdf(dist.size());
  std::partial_sum(dist.begin(), dist.end(), cdf.begin());
  const double j = 0.5 * static_cast<double>(dist.size() - 1);

  Rng rng(seed);
  std::vector<double> shots(static_cast<std::size_t>(n_shots));
  for (auto& s : shots) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) it = std::prev(cdf.end());
    // skip zero-probability bins that share a cdf value with their predecessor
    while (it != cdf.begin() && dist[static_cast<std::size_t>(it - cdf.begin())] == 0.0) --it;
    s = static_cast<double>(it - cdf.begin()) - j;
  }
  return shots;
}

std::vector<double> half_pi_small_d(int n_atoms) {
  require_valid_atoms(n_atoms);
  return *cached_half_pi(n_atoms);
}

std::vector<double> wigner_small_d(int n_atoms, double beta) {
  require_valid_atoms(n_atoms);
  require_finite(beta, "beta");
  const std::size_t dim = static_cast<std::size_t>(n_atoms) + 1;
  const auto delta_ptr = cached_half_pi(n_atoms);
  const auto& delta = *delta_ptr;
  const double j = 0.5 * n_atoms;

  // d_{m'm}(b) = i^{m'-m} sum_{m''} D_{m''m'} D_{m''m} e^{-i b m''}
  std::vector<cplx> phase(dim);
  for (std::size_t a = 0; a < dim; ++a) phase[a] = std::polar(1.0, -beta * (static_cast<double>(a) - j));
  std::vector<double> d(dim * dim);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      cplx acc{0.0, 0.0};
      for (std::size_t a = 0; a < dim; ++a) acc += delta[a * dim + r] * delta[a * dim + c] * phase[a];
      d[r * dim + c] = (i_pow(static_cast<long>(r) - static_cast<long>(c)) * acc).real();
    }
  }
  return d;
}

double overlap_abs(const DickeState& a, const DickeState& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("states differ in size");
  cplx acc{0.0, 0.0};
  for (std::size_t k = 0; k < a.dim(); ++k) acc += std::conj(a[k]) * b[k];
  return std::abs(acc);
}

}  // namespace satin
