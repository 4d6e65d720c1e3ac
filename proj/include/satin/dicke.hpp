#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace satin {

using cplx = std::complex<double>;

enum class Axis { x, y, z };

/// Pure state of N spin-1/2 atoms restricted to the symmetric (Dicke) manifold.
///
/// Amplitudes are stored over the S_z eigenbasis with S = N/2, ascending in m:
/// index k holds the amplitude of |S, m = k - S>. Instances are immutable
/// values; every dynamical operation returns a new state.
class DickeState {
 public:
  /// Takes ownership of the amplitudes and renormalizes them.
  /// Throws std::invalid_argument if the size is not n_atoms + 1 or the norm is zero.
  DickeState(int n_atoms, std::vector<cplx> amplitudes);

  int n_atoms() const { return n_atoms_; }
  double spin() const { return 0.5 * n_atoms_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const cplx> amplitudes() const { return amps_; }
  const cplx& operator[](std::size_t k) const { return amps_[k]; }
  double m_of(std::size_t k) const { return static_cast<double>(k) - spin(); }
  double norm_sq() const;

 private:
  struct Unchecked {};
  DickeState(int n_atoms, std::vector<cplx> amplitudes, Unchecked);

  int n_atoms_;
  std::vector<cplx> amps_;

  friend DickeState rotate_z(const DickeState&, double);
  friend DickeState rotate_y(const DickeState&, double);
  friend DickeState oat_evolve(const DickeState&, double);
};

struct SpinMoments {
  double mean_sx = 0, mean_sy = 0, mean_sz = 0;
  double var_sx = 0, var_sy = 0, var_sz = 0;
  /// |<S>| / S0 with S0 = N/2.
  double contrast = 0;
};

struct RotationSpec {
  Axis axis = Axis::y;
  double angle = 0;
};

/// Spin-coherent state pointing along (polar, azimuth) on the Bloch sphere.
DickeState make_css(int n_atoms, double polar, double azimuth);

/// Active rotation exp(-i angle S_axis).
DickeState rotate(const DickeState& state, RotationSpec spec);
DickeState rotate_z(const DickeState& state, double angle);
DickeState rotate_y(const DickeState& state, double angle);
DickeState rotate_x(const DickeState& state, double angle);

/// One-axis twisting exp(-i (q_tilde / sqrt(N)) S_z^2). Negative q_tilde
/// runs the interaction backwards.
DickeState oat_evolve(const DickeState& state, double q_tilde);

/// Outcome probabilities of an S_axis measurement, indexed like the amplitudes.
std::vector<double> measure_distribution(const DickeState& state, Axis axis);

SpinMoments moments(const DickeState& state);

/// Draws n_shots outcomes m (half-integers for odd N) from a distribution over
/// m = -S..S. The sequence depends only on (dist, n_shots, seed).
std::vector<double> sample_shots(std::span<const double> dist, int n_shots, std::uint64_t seed);

/// Wigner small-d matrix at beta = pi/2, row-major (N+1)x(N+1), rows m', columns m.
/// Built by a three-term recursion in m seeded from log-space binomials.
std::vector<double> half_pi_small_d(int n_atoms);

/// Full small-d matrix d^S_{m'm}(beta), row-major, assembled from the pi/2 matrix.
std::vector<double> wigner_small_d(int n_atoms, double beta);

/// |<a|b>| for states of the same size; 1 means equal up to global phase.
double overlap_abs(const DickeState& a, const DickeState& b);

}  // namespace satin
