#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "satin/dicke.hpp"

namespace satin {

/// Wigner 3j symbols (l1 l2 l3; m1 m2 m3) for all admissible l1 at fixed (l2, l3, m2, m3),
/// m1 = -m2 - m3. Arguments may be half-integers. Element i holds l1 = l1_min + i.
struct ThreeJ {
  double l1_min = 0.0;
  std::vector<double> values;
};
ThreeJ wigner_3j_l1(double l2, double l3, double m2, double m3);

/// Multipole coefficients rho_kq of |psi><psi|, stored densely:
/// index (k, q) -> k * (2 N + 1) + (q + N) for k = 0..N, q = -N..N.
std::vector<cplx> multipole_coefficients(const DickeState& state);

/// W(theta_i, phi_j) on theta_i = pi i / (n_polar - 1), phi_j = 2 pi j / n_azimuth.
struct SphereGrid {
  int n_atoms = 0;
  int n_polar = 0;
  int n_azimuth = 0;
  /// Row-major, n_polar rows of n_azimuth values.
  std::vector<double> values;
  /// Largest imaginary part discarded when the values were made real.
  double max_imag = 0.0;

  double theta(int i) const;
  double phi(int j) const;
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n_azimuth + j]; }
};

/// Spherical Wigner function normalized so that its integral over the sphere is 1.
/// Throws std::invalid_argument when either resolution is below 8.
SphereGrid wigner_grid(const DickeState& state, int n_polar, int n_azimuth);

/// Clenshaw-Curtis weights in cos(theta) for the polar nodes of a grid with n_polar rows.
std::vector<double> polar_weights(int n_polar);

/// Integral of W over the sphere. Exact for a state of N atoms when n_polar > N and n_azimuth > N.
double integrate(const SphereGrid& grid);

void write_csv(const SphereGrid& grid, std::ostream& out);

/// Eight float64 header values (magic, version, N, n_polar, n_azimuth, 0, 0, 0) followed by
/// the values, all little-endian float64.
void write_binary(const SphereGrid& grid, std::ostream& out);
SphereGrid read_binary(std::istream& in);

inline constexpr double kGridMagic = 1396790359.0;  // 0x53415457, ASCII "SATW"
inline constexpr double kGridVersion = 1.0;

}  // namespace satin
