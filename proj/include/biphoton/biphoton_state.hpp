#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "biphoton/jones.hpp"

namespace biphoton {

enum class Pol : int { H = 0, V = 1 };

// Source crystal for degenerate collinear type-II down-conversion.
class CrystalParams {
 public:
  // pump_wavelength [m], inverse group-velocity difference 1/u_V - 1/u_H [s/m], length [m].
  // Throws ConfigurationError unless all are finite and positive.
  CrystalParams(double pump_wavelength, double inverse_group_velocity_difference, double length);

  double pump_wavelength() const { return pump_wavelength_; }
  double degenerate_wavelength() const { return 2.0 * pump_wavelength_; }
  double inverse_group_velocity_difference() const { return D_; }
  double length() const { return length_; }
  // Mean delay between the orthogonally polarized photons, D * L / 2 [s].
  double tau0() const { return 0.5 * D_ * length_; }
  // omega_p / 2 [rad/s].
  double degenerate_angular_frequency() const;

 private:
  double pump_wavelength_;
  double D_;
  double length_;
};

// Uniform detuning grid of n = 2^m samples. Index 0 is a padding slot at -n/2 * spacing that
// always carries zero amplitude; indices 1..n-1 are symmetric about Omega = 0 at index n/2.
class FrequencyGrid {
 public:
  // Throws ConfigurationError unless n is a power of two >= 256 and omega_max > 0.
  FrequencyGrid(std::size_t n, double omega_max);

  std::size_t size() const { return n_; }
  double omega_max() const { return omega_max_; }
  double spacing() const { return spacing_; }
  std::size_t center() const { return n_ / 2; }
  double omega(std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(n_ / 2)) * spacing_;
  }

 private:
  std::size_t n_;
  double omega_max_;
  double spacing_;
};

// Two-photon polarization amplitude Psi[s1][s2] at a single detuning (photon 1 at
// omega_0 + Omega, photon 2 at omega_0 - Omega).
struct PairAmplitude {
  complex hh{};
  complex hv{};
  complex vh{};
  complex vv{};

  complex& at(Pol a, Pol b);
  complex at(Pol a, Pol b) const;
  double norm2() const;
  PairAmplitude operator+(const PairAmplitude& o) const;
  PairAmplitude operator*(complex s) const;
};

// The same single-photon operator u applied to both photons: Psi' = u Psi u^T.
PairAmplitude transform(const PairAmplitude& psi, const JonesMatrix& u);

// <e(theta1) e(theta2)| psi> for linear analyzers at theta1 (photon 1) and theta2 (photon 2).
complex project(const PairAmplitude& psi, double theta1, double theta2);

enum class Bell { psi_plus, psi_minus };

struct BellTarget {
  Bell which;
  PairAmplitude amplitude;
  // omega_0 +- pi / (2 tau0) for the singlet selected at tau = +-pi tau_f / 2.
  std::optional<std::pair<double, double>> mode_frequencies;
};

BellTarget bell_target(Bell which);
BellTarget bell_target(Bell which, const CrystalParams& crystal);

// <target | slice / |slice|>. Throws DegenerateInputError for a zero-norm slice.
complex polarization_overlap(const PairAmplitude& slice, const BellTarget& target);

// Spectral amplitude F(Omega) of the pair source.
using SpectralAmplitude = std::function<complex(double omega)>;

// sin(x) / x with the removable point at 0.
double sinc(double x);

// Polarization-indexed two-photon spectral amplitude on a detuning grid. Only the two-photon
// part of the down-converted state is held; observables are conditioned on a pair being present.
class BiphotonState {
 public:
  BiphotonState(FrequencyGrid grid, CrystalParams crystal);

  const FrequencyGrid& grid() const { return grid_; }
  const CrystalParams& crystal() const { return crystal_; }

  complex amplitude(Pol a, Pol b, std::size_t k) const { return amp_[index(a, b, k)]; }
  void set_amplitude(Pol a, Pol b, std::size_t k, complex value);
  PairAmplitude slice(std::size_t k) const;
  void set_slice(std::size_t k, const PairAmplitude& psi);

  // Sum |Psi|^2 dOmega over all components.
  double norm() const;
  // Throws DegenerateInputError if the norm is zero or non-finite.
  BiphotonState normalized() const;

  // Accumulated k'' z from dispersive propagation [s^2].
  double dispersion() const { return dispersion_; }
  void add_dispersion(double k2z) { dispersion_ += k2z; }

 private:
  std::size_t index(Pol a, Pol b, std::size_t k) const {
    return (2 * static_cast<std::size_t>(a) + static_cast<std::size_t>(b)) * grid_.size() + k;
  }

  FrequencyGrid grid_;
  CrystalParams crystal_;
  std::vector<complex> amp_;
  double dispersion_ = 0.0;
};

// Psi_HV = F e^{i Omega tau0}, Psi_VH = F e^{-i Omega tau0}, Psi_HH = Psi_VV = 0, normalized.
// F defaults to sinc(Omega tau0). Throws ConfigurationError if omega_max * tau0 < pi.
BiphotonState pdc_state(const CrystalParams& crystal, const FrequencyGrid& grid,
                        const SpectralAmplitude& spectrum = {});

// u applied to both photons at every detuning.
BiphotonState apply_local(const BiphotonState& state, const JonesMatrix& u);

}  // namespace biphoton
