#pragma once

#include "sboi/numerics.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <numbers>
#include <vector>

namespace sboi {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double planck = 6.62607015e-34;        // J s
inline constexpr double boltzmann = 1.380649e-23;       // J / K
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double standard_gravity = 9.80665;     // m / s^2
inline constexpr double pi = std::numbers::pi;
}  // namespace constants

/// Physical scenario of a condensate in a tilted one-dimensional lattice.
///
/// All fields are SI. Internally the dynamics run in reduced units with
/// hbar = 1 and energies measured in units of the tilt, so time is
/// delta * t / hbar and one Bloch period equals 2 pi. Times passed across the
/// public API are in Bloch periods.
struct LatticeParams {
  double tunneling = 0.0;     // J, joules
  double tilt = 0.0;          // delta = m g x0, joules
  double spacing = 0.0;       // x0, metres
  double mass = 0.0;          // kg
  double acceleration = 0.0;  // g, m/s^2
  std::int64_t atom_number = 1;

  /// delta = mass * acceleration * spacing.
  static LatticeParams from_physical(double mass, double acceleration, double spacing,
                                     double tunneling, std::int64_t atom_number);

  /// Scenario fixed by J/delta alone. Uses 39 u atoms, a 1 um spacing and
  /// standard gravity; relative sensitivities do not depend on these.
  static LatticeParams from_ratio(double hopping_ratio, std::int64_t atom_number);

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  double hopping_ratio() const { return tunneling / tilt; }
  /// T_B = h / delta, seconds.
  double bloch_period() const { return constants::planck / tilt; }

  /// Same lattice (J, x0, m) under a different acceleration.
  LatticeParams with_acceleration(double g) const;
  LatticeParams with_tunneling(double j) const;
  LatticeParams with_atom_number(std::int64_t n) const;
};

/// Finite slice [k_min, k_max] of the infinite lattice; always contains site 0.
struct SiteWindow {
  int k_min = -1;
  int k_max = 1;

  static SiteWindow symmetric(int half_width) { return {-half_width, half_width}; }

  void validate() const;
  int size() const { return k_max - k_min + 1; }
  int index_of(int site) const { return site - k_min; }
  int site_at(int index) const { return k_min + index; }
  bool operator==(const SiteWindow&) const = default;
};

/// Normalised single-particle amplitudes alpha_k over a window.
struct ModeAmplitudes {
  SiteWindow window;
  Eigen::VectorXcd amps;

  double norm() const { return amps.norm(); }
};

/// Tight-binding Hamiltonian: diagonal tilt * k, off-diagonal -tunneling.
/// Energies come out in whatever unit the two inputs share.
numerics::SymTridiagonal build_hamiltonian(double tunneling, double tilt, const SiteWindow& window);

/// Reduced Hamiltonian in units of the tilt: diag k, off-diagonal -J/delta.
numerics::SymTridiagonal build_hamiltonian(const LatticeParams& params, const SiteWindow& window);

ModeAmplitudes single_site_state(const SiteWindow& window);

/// alpha_k proportional to exp(-k^2 / (2 sigma^2)); the window must reach
/// 6 sigma on both sides of the origin.
ModeAmplitudes gaussian_state(double sigma, const SiteWindow& window);

/// Smallest symmetric window keeping the population of the two edge sites
/// below `tol` at all times up to `t_max` Bloch periods. `initial_sigma` == 0
/// selects the single-site start. Throws NumericalError when the window would
/// exceed kMaxWindowSize sites.
SiteWindow choose_window(const LatticeParams& params, double t_max, double initial_sigma,
                         double tol = 1e-12);

inline constexpr int kMaxWindowSize = 16384;

/// Exact evolution through the eigendecomposition of the windowed
/// Hamiltonian. Immutable; safe to share between threads.
class Propagator {
 public:
  Propagator(const LatticeParams& params, const SiteWindow& window);

  const LatticeParams& params() const { return params_; }
  const SiteWindow& window() const { return window_; }
  const numerics::Spectrum& spectrum() const { return spectrum_; }

  /// U(t) = Q exp(-i Lambda t) Q^T, t in Bloch periods.
  Eigen::MatrixXcd evolution_matrix(double t) const;

  /// g dU/dg at time t (equal to delta dU/ddelta, J held fixed).
  Eigen::MatrixXcd evolution_log_derivative(double t) const;

  Eigen::VectorXcd evolve(const Eigen::VectorXcd& amps0, double t) const;

  struct Evolved {
    Eigen::VectorXcd amps;        // U(t) alpha(0)
    Eigen::VectorXcd derivative;  // g dU/dg alpha(0)
  };
  Evolved evolve_with_derivative(const Eigen::VectorXcd& amps0, double t) const;

 private:
  Eigen::MatrixXcd derivative_kernel(double t) const;

  LatticeParams params_;
  SiteWindow window_;
  numerics::Spectrum spectrum_;
  Eigen::MatrixXd tilt_eigenbasis_;  // Q^T diag(k) Q
};

/// alpha(t) for an initial state on the propagator's window.
ModeAmplitudes propagate(const ModeAmplitudes& state0, const Propagator& prop, double t);

/// p_k = |alpha_k|^2.
std::vector<double> populations(const ModeAmplitudes& state);

enum class DerivativeMethod { exact, finite_difference };

/// g dp_k/dg at time t. Divide by g for the SI derivative (s^2/m).
///
/// `exact` differentiates the propagator in its eigenbasis; `finite_difference`
/// rebuilds the lattice at g (1 +- 1e-6) and Richardson-extrapolates the
/// central difference.
std::vector<double> population_derivative(const ModeAmplitudes& state0, const Propagator& prop,
                                          double t,
                                          DerivativeMethod method = DerivativeMethod::exact);

}  // namespace sboi
