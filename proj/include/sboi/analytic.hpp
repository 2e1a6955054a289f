#pragma once

#include "sboi/lattice.hpp"

#include <cstdint>
#include <vector>

// Closed-form results for a condensate released from a single site.
namespace sboi::analytic {

/// y(t) = 4 (J/delta) sin(pi t / T_B), the Bessel argument of the
/// single-site dynamics; t in Bloch periods.
double bessel_argument(double t, double hopping_ratio);

/// p_k(t) = J_k(y(t))^2. Periodic in t with period one.
double population(int k, double t, double hopping_ratio);

/// Populations on every site of `window`.
std::vector<double> populations(const SiteWindow& window, double t, double hopping_ratio);

/// Shape factor f(t) of the Fisher information,
/// F1 ~ 16 N (J/g)^2 (t/hbar)^2 f(t), summed over |k| <= k_cutoff.
/// A negative cutoff selects ceil(|y|) + 40.
double f_of_t(double t, double hopping_ratio, int k_cutoff = -1);

/// Delta g / g = hbar / (2 sqrt(2N) J t) for the site-resolved estimator at
/// a revival (t in Bloch periods).
double sens_ml_analytic(const LatticeParams& params, double t);

/// The same bound obtained from the atoms tunnelling into the two
/// neighbouring sites just after the nearest revival: N_{+-1} grows as
/// N J^2 (t - n T_B)^2 / hbar^2 and both sites are counted with shot noise.
double near_revival_bound(const LatticeParams& params, double t);

/// Delta g / g = hbar / (sqrt(N) F d t) of a two-mode interferometer with
/// arm separation d (m) under force F (N) for t seconds.
double sens_mzi(double force, double separation, std::int64_t atom_number, double t_seconds);

/// Delta g / g = (dJ/J) (t - n T_B) / t from shot-to-shot tunnelling noise
/// (t in Bloch periods, t >= n).
double tunneling_noise_bound(double dj_over_j, double t, int n);

struct DesignReport {
  double tau = 0.0;            // coherence time, s
  double mass = 0.0;           // kg
  std::int64_t atom_number = 0;
  double g_min = 0.0;          // m/s^2
  double optimal_spacing = 0.0;  // m
  double bloch_period = 0.0;   // s
  double relative_uncertainty = 0.0;
  double single_shot_dg = 0.0;       // m/s^2
  double single_shot_dg_in_g = 0.0;  // units of standard gravity
};

/// Smallest usable acceleration, optimal spacing and single-shot precision
/// for a coherence time `tau` when J is pushed to its largest value at that
/// spacing and J = delta.
DesignReport design_report(double tau, double mass, std::int64_t atom_number);

/// Largest tunnelling energy at spacing x0: hbar^2 pi^2 / (8 m x0^2).
double max_tunneling(double spacing, double mass);

struct DepthSensitivity {
  double exact = 0.0;        // |3/4 - sqrt(s)| ds/s
  double large_depth = 0.0;  // sqrt(s) ds/s
};

/// Relative tunnelling fluctuation caused by a relative lattice-depth
/// fluctuation, from J ~ s^{3/4} exp(-2 sqrt(s)) with s in recoil units.
DepthSensitivity tunneling_depth_sensitivity(double depth, double ds_over_s);

/// Thermal coherence length h / sqrt(2 pi m k_B T), metres.
double coherence_length(double temperature, double mass);

}  // namespace sboi::analytic
