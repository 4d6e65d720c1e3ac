#include "satin/wigner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace satin {

static_assert(std::endian::native == std::endian::little, "binary grid export assumes a little-endian host");

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHuge = 0x1p+250;
constexpr double kTiny = 0x1p-250;

bool is_odd(double x) { return (static_cast<long long>(std::llround(x)) & 1LL) != 0; }

}  // namespace

ThreeJ wigner_3j_l1(double l2, double l3, double m2, double m3) {
  if (l2 < std::abs(m2) || l3 < std::abs(m3)) throw std::invalid_argument("|m| exceeds l in 3j symbol");
  const double m1 = -m2 - m3;
  const double l1_min = std::max(std::abs(l2 - l3), std::abs(m1));
  const double l1_max = l2 + l3;
  ThreeJ out;
  out.l1_min = l1_min;
  if (l1_max < l1_min - 1e-9) return out;
  const int n = static_cast<int>(std::llround(l1_max - l1_min)) + 1;
  std::vector<double>& f = out.values;
  f.assign(static_cast<std::size_t>(n), 0.0);

  // Schulten-Gordon three-term recursion
  //   l1 A(l1+1) f(l1+1) + B(l1) f(l1) + (l1+1) A(l1) f(l1-1) = 0.
  const double diff_sq = (l2 - l3) * (l2 - l3);
  const double sum_sq = (l2 + l3 + 1.0) * (l2 + l3 + 1.0);
  const double pre = m1 * (l2 * (l2 + 1.0) - l3 * (l3 + 1.0));
  const double dm = m3 - m2;
  auto a_of = [&](double l1) {
    const double l1sq = l1 * l1;
    return std::sqrt(std::max(0.0, (l1sq - diff_sq) * (sum_sq - l1sq) * (l1sq - m1 * m1)));
  };
  // -B(l1)
  auto minus_b = [&](double l1) { return (2.0 * l1 + 1.0) * (pre - l1 * (l1 + 1.0) * dm); };

  double norm_fwd = 0.0;
  f[0] = 1.0;
  norm_fwd = (2.0 * l1_min + 1.0);
  int i = 0;
  double ratio_prev = std::numeric_limits<double>::infinity();
  bool split = false;
  if (n > 1) {
    const double l1 = l1_min + 1.0;
    // l1_min = 0 needs the limit of the recursion at l1 = 0.
    const double c = l1_min > 0.25 ? minus_b(l1_min) / (l1_min * a_of(l1)) : -dm / a_of(l1);
    f[1] = f[0] * c;
    norm_fwd += (2.0 * l1 + 1.0) * f[1] * f[1];
    ratio_prev = std::abs(c);
    i = 1;
  }
  // Forward while the ratio f(l1)/f(l1-1) keeps shrinking; past that point the
  // forward direction turns unstable and the backward pass takes over.
  while (i + 1 < n) {
    const double l = l1_min + i;  // current top
    const double c1 = minus_b(l) / (l * a_of(l + 1.0));
    const double c2 = (l + 1.0) * a_of(l) / (l * a_of(l + 1.0));
    f[i + 1] = c1 * f[i] - c2 * f[i - 1];
    ++i;
    norm_fwd += (2.0 * (l + 1.0) + 1.0) * f[i] * f[i];
    if (std::abs(f[i]) > kHuge) {
      for (int k = 0; k <= i; ++k) f[k] *= kTiny;
      norm_fwd *= kTiny * kTiny;
    }
    if (std::abs(c1) >= ratio_prev && i + 1 < n && i >= 2) {
      split = true;
      break;
    }
    ratio_prev = std::abs(c1);
  }

  double norm = norm_fwd;
  if (split) {
    // Backward from l1_max down to i - 2; the three overlap points fix the scale.
    const int stop = i - 2;
    const double x0 = f[stop], x1 = f[stop + 1], x2 = f[stop + 2];
    std::vector<double> g(static_cast<std::size_t>(n), 0.0);
    g[n - 1] = 1.0;
    double norm_bwd = (2.0 * l1_max + 1.0);
    {
      const double l = l1_max - 1.0;
      g[n - 2] = minus_b(l + 1.0) / ((l + 2.0) * a_of(l + 1.0)) * g[n - 1];
      norm_bwd += (2.0 * l + 1.0) * g[n - 2] * g[n - 2];
    }
    for (int k = n - 3; k >= stop; --k) {
      const double l = l1_min + k;
      const double denom = (l + 2.0) * a_of(l + 1.0);
      g[k] = (minus_b(l + 1.0) * g[k + 1] - (l + 1.0) * a_of(l + 2.0) * g[k + 2]) / denom;
      norm_bwd += (2.0 * l + 1.0) * g[k] * g[k];
      if (std::abs(g[k]) > kHuge) {
        for (int t = k; t < n; ++t) g[t] *= kTiny;
        norm_bwd *= kTiny * kTiny;
      }
    }
    // Remove the overlap from the backward sum, then match forward = ratio * backward.
    for (int k = stop; k < stop + 3; ++k) {
      const double l = l1_min + k;
      norm_bwd -= (2.0 * l + 1.0) * g[k] * g[k];
    }
    // Forward norm already counts up to index i = stop + 2.
    const double ratio = (x0 * g[stop] + x1 * g[stop + 1] + x2 * g[stop + 2]) /
                         (g[stop] * g[stop] + g[stop + 1] * g[stop + 1] + g[stop + 2] * g[stop + 2]);
    for (int k = stop + 3; k < n; ++k) f[k] = ratio * g[k];
    norm = norm_fwd + ratio * ratio * norm_bwd;
  }

  // Sign convention: sign f(l1_max) = (-1)^(l2 - l3 + m2 + m3).
  double scale = 1.0 / std::sqrt(norm);
  const bool want_negative = is_odd(l2 - l3 + m2 + m3);
  if ((f[n - 1] < 0.0) != want_negative) scale = -scale;
  for (auto& v : f) v *= scale;
  return out;
}

std::vector<cplx> multipole_coefficients(const DickeState& state) {
  const int n = state.n_atoms();
  const double j = state.spin();
  const std::size_t width = 2 * static_cast<std::size_t>(n) + 1;
  std::vector<cplx> rho((static_cast<std::size_t>(n) + 1) * width, cplx{0.0, 0.0});
  const auto psi = state.amplitudes();

  // rho_kq = sqrt(2k+1) sum_m (-1)^(j-m) (j k j; -m q m-q) psi_m conj(psi_{m-q}),
  // with the 3j symbol permuted cyclically to (k j j; q, m-q, -m).
  for (int q = -n; q <= n; ++q) {
    const int lo = std::max(0, q);
    const int hi = std::min(n, n + q);
    for (int km = lo; km <= hi; ++km) {
      const int kmq = km - q;
      const cplx pair = psi[km] * std::conj(psi[kmq]);
      if (pair == cplx{0.0, 0.0}) continue;
      const double m = km - j;
      const double sign = ((n - km) % 2 == 0) ? 1.0 : -1.0;  // (-1)^(j-m)
      const ThreeJ tj = wigner_3j_l1(j, j, m - q, -m);
      const int k0 = static_cast<int>(std::llround(tj.l1_min));
      for (std::size_t t = 0; t < tj.values.size(); ++t) {
        const int k = k0 + static_cast<int>(t);
        rho[static_cast<std::size_t>(k) * width + (q + n)] += sign * std::sqrt(2.0 * k + 1.0) * tj.values[t] * pair;
      }
    }
  }
  return rho;
}

double SphereGrid::theta(int i) const { return kPi * i / (n_polar - 1); }

double SphereGrid::phi(int j) const { return 2.0 * kPi * j / n_azimuth; }

SphereGrid wigner_grid(const DickeState& state, int n_polar, int n_azimuth) {
  if (n_polar < 8 || n_azimuth < 8) throw std::invalid_argument("grid resolution must be at least 8 x 8");
  const int n = state.n_atoms();
  const double j = state.spin();
  const std::size_t width = 2 * static_cast<std::size_t>(n) + 1;
  const std::vector<cplx> rho = multipole_coefficients(state);

  SphereGrid grid;
  grid.n_atoms = n;
  grid.n_polar = n_polar;
  grid.n_azimuth = n_azimuth;
  grid.values.assign(static_cast<std::size_t>(n_polar) * n_azimuth, 0.0);
  const double prefactor = std::sqrt((2.0 * j + 1.0) / (4.0 * kPi));

  // log of sqrt((2q-1)!! / (2q)!!), accumulated over q
  std::vector<double> log_dfact(static_cast<std::size_t>(n) + 1, 0.0);
  for (int q = 1; q <= n; ++q) log_dfact[q] = log_dfact[q - 1] + 0.5 * std::log((2.0 * q - 1.0) / (2.0 * q));

  std::vector<cplx> c(width);
  std::vector<double> legendre(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n_polar; ++i) {
    const double theta = grid.theta(i);
    const double x = std::cos(theta);
    const double s = std::sin(theta);
    std::fill(c.begin(), c.end(), cplx{0.0, 0.0});

    for (int q = 0; q <= n; ++q) {
      // Normalized associated Legendre functions P_kq(x) for k = q..N, Condon-Shortley phase.
      // The start value lives in log space; a running exponent keeps the recursion in range.
      if (q > 0 && s < 1e-300) continue;
      double log_scale = 0.5 * std::log((2.0 * q + 1.0) / (4.0 * kPi)) + log_dfact[q] + (q > 0 ? q * std::log(s) : 0.0);
      double p_prev = 0.0;
      double p_cur = (q % 2 == 0) ? 1.0 : -1.0;
      legendre[q] = p_cur * std::exp(log_scale);
      for (int k = q + 1; k <= n; ++k) {
        const double a_k = std::sqrt((4.0 * k * k - 1.0) / (static_cast<double>(k) * k - static_cast<double>(q) * q));
        double p_next;
        if (k == q + 1) {
          p_next = x * std::sqrt(2.0 * q + 3.0) * p_cur;
        } else {
          const double a_prev = std::sqrt((4.0 * (k - 1.0) * (k - 1.0) - 1.0) /
                                          ((k - 1.0) * (k - 1.0) - static_cast<double>(q) * q));
          p_next = a_k * (x * p_cur - p_prev / a_prev);
        }
        p_prev = p_cur;
        p_cur = p_next;
        if (std::abs(p_cur) > kHuge) {
          p_cur *= kTiny;
          p_prev *= kTiny;
          log_scale -= std::log(kTiny);
        }
        legendre[k] = p_cur * std::exp(log_scale);
      }
      cplx acc_pos{0.0, 0.0}, acc_neg{0.0, 0.0};
      for (int k = q; k <= n; ++k) {
        const std::size_t row = static_cast<std::size_t>(k) * width;
        acc_pos += rho[row + (q + n)] * legendre[k];
        if (q > 0) acc_neg += rho[row + (n - q)] * legendre[k];
      }
      c[q + n] = acc_pos;
      // Y_{k,-q} = (-1)^q conj(Y_kq)
      if (q > 0) c[n - q] = ((q % 2 == 0) ? 1.0 : -1.0) * acc_neg;
    }

    for (int jj = 0; jj < n_azimuth; ++jj) {
      const double phi = grid.phi(jj);
      cplx w{0.0, 0.0};
      for (int q = -n; q <= n; ++q) w += c[q + n] * std::polar(1.0, q * phi);
      w *= prefactor;
      grid.values[static_cast<std::size_t>(i) * n_azimuth + jj] = w.real();
      grid.max_imag = std::max(grid.max_imag, std::abs(w.imag()));
    }
  }
  return grid;
}

std::vector<double> polar_weights(int n_polar) {
  if (n_polar < 2) throw std::invalid_argument("need at least 2 polar nodes");
  const int n = n_polar - 1;
  std::vector<double> w(static_cast<std::size_t>(n_polar));
  for (int i = 0; i <= n; ++i) {
    const double theta = kPi * i / n;
    double sum = 0.0;
    for (int k = 1; 2 * k <= n; ++k) {
      const double b = (2 * k == n) ? 1.0 : 2.0;
      sum += b / (4.0 * k * k - 1.0) * std::cos(2.0 * k * theta);
    }
    const double edge = (i == 0 || i == n) ? 1.0 : 2.0;
    w[i] = edge / n * (1.0 - sum);
  }
  return w;
}

double integrate(const SphereGrid& grid) {
  const std::vector<double> w = polar_weights(grid.n_polar);
  const double dphi = 2.0 * kPi / grid.n_azimuth;
  double total = 0.0;
  for (int i = 0; i < grid.n_polar; ++i) {
    double row = 0.0;
    for (int j = 0; j < grid.n_azimuth; ++j) row += grid.at(i, j);
    total += w[i] * row * dphi;
  }
  return total;
}

void write_csv(const SphereGrid& grid, std::ostream& out) {
  out << "theta_rad,phi_rad,w\n";
  char buf[96];
  for (int i = 0; i < grid.n_polar; ++i) {
    for (int j = 0; j < grid.n_azimuth; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid.theta(i), grid.phi(j), grid.at(i, j));
      out << buf;
    }
  }
}

void write_binary(const SphereGrid& grid, std::ostream& out) {
  const double header[8] = {kGridMagic, kGridVersion, static_cast<double>(grid.n_atoms),
                            static_cast<double>(grid.n_polar), static_cast<double>(grid.n_azimuth), 0.0, 0.0, 0.0};
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  out.write(reinterpret_cast<const char*>(grid.values.data()),
            static_cast<std::streamsize>(grid.values.size() * sizeof(double)));
}

SphereGrid read_binary(std::istream& in) {
  double header[8];
  if (!in.read(reinterpret_cast<char*>(header), sizeof header)) throw std::runtime_error("truncated grid header");
  if (header[0] != kGridMagic) throw std::runtime_error("not a Wigner grid file");
  if (header[1] != kGridVersion) throw std::runtime_error("unsupported grid file version");
  SphereGrid g;
  g.n_atoms = static_cast<int>(header[2]);
  g.n_polar = static_cast<int>(header[3]);
  g.n_azimuth = static_cast<int>(header[4]);
  if (g.n_polar < 1 || g.n_azimuth < 1) throw std::runtime_error("invalid grid dimensions");
  g.values.resize(static_cast<std::size_t>(g.n_polar) * g.n_azimuth);
  if (!in.read(reinterpret_cast<char*>(g.values.data()), static_cast<std::streamsize>(g.values.size() * sizeof(double)))) {
    throw std::runtime_error("truncated grid values");
  }
  return g;
}

}  // namespace satin
