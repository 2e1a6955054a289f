#include "sboi/analytic.hpp"
#include "sboi/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace sboi::analytic {

using constants::hbar;
using constants::pi;

double bessel_argument(double t, double hopping_ratio) {
  return 4.0 * hopping_ratio * std::sin(pi * t);
}

double population(int k, double t, double hopping_ratio) {
  const double j = numerics::bessel_j_signed(k, bessel_argument(t, hopping_ratio));
  return j * j;
}

std::vector<double> populations(const SiteWindow& window, double t, double hopping_ratio) {
  window.validate();
  const double y = bessel_argument(t, hopping_ratio);
  const int reach = std::max(-window.k_min, window.k_max);
  const auto seq = numerics::bessel_j_sequence(reach, y);
  std::vector<double> p(static_cast<std::size_t>(window.size()));
  for (int i = 0; i < window.size(); ++i) {
    const double v = seq[static_cast<std::size_t>(std::abs(window.site_at(i)))];
    p[static_cast<std::size_t>(i)] = v * v;
  }
  return p;
}

double f_of_t(double t, double hopping_ratio, int k_cutoff) {
  const double y = bessel_argument(t, hopping_ratio);
  const double c = std::cos(pi * t);
  // At y = 0 the k = 0 term is 0/0 with limit 2; the k = +-1 terms give 1 each.
  if (std::abs(y) < 1e-150) return c * c;

  const int cutoff = k_cutoff >= 0 ? k_cutoff : static_cast<int>(std::ceil(std::abs(y))) + 40;
  const auto seq = numerics::bessel_j_sequence(cutoff + 1, y);
  auto bessel = [&](int k) {
    const double v = seq[static_cast<std::size_t>(std::abs(k))];
    return (k < 0 && (-k) % 2 == 1) ? -v : v;
  };
  // 1 - J_k^2 is formed from the other orders so that the k = 0 term keeps
  // its accuracy as y -> 0.
  double off_centre = 0.0;
  for (int m = 1; m <= cutoff + 1; ++m) off_centre += 2.0 * bessel(m) * bessel(m);
  const double centre = bessel(0) * bessel(0);

  double sum = 0.0;
  for (int k = -cutoff; k <= cutoff; ++k) {
    const double jk = bessel(k);
    const double rest = k == 0 ? off_centre : centre + (off_centre - jk * jk);
    if (rest <= 0.0) continue;
    const double diff = bessel(k - 1) - bessel(k + 1);
    sum += diff * diff / rest;
  }
  return 0.25 * c * c * sum;
}

double sens_ml_analytic(const LatticeParams& params, double t) {
  params.validate();
  if (!(t > 0.0)) throw std::invalid_argument("sens_ml_analytic: t must be positive");
  const double seconds = t * params.bloch_period();
  const double atoms = static_cast<double>(params.atom_number);
  return hbar / (2.0 * std::sqrt(2.0 * atoms) * params.tunneling * seconds);
}

double near_revival_bound(const LatticeParams& params, double t) {
  params.validate();
  if (!(t > 0.5)) throw std::invalid_argument("near_revival_bound: t must be past the first half period");
  const double period = params.bloch_period();
  double offset = (t - std::round(t)) * period;
  if (offset == 0.0) offset = 1e-3 * period;  // the bound does not depend on it
  const double atoms = static_cast<double>(params.atom_number);
  const double neighbours = atoms * std::pow(params.tunneling * offset / hbar, 2);
  // Delta(offset)/offset = Delta N / (2 N) per site with Delta N = sqrt(N);
  // two independent sites improve it by sqrt(2).
  const double relative_timing = 1.0 / (2.0 * std::sqrt(neighbours)) / std::sqrt(2.0);
  return std::abs(offset) * relative_timing / (t * period);
}

double sens_mzi(double force, double separation, std::int64_t atom_number, double t_seconds) {
  if (!(force > 0.0 && separation > 0.0 && atom_number > 0 && t_seconds > 0.0)) {
    throw std::invalid_argument("sens_mzi: all inputs must be positive");
  }
  return hbar / (std::sqrt(static_cast<double>(atom_number)) * force * separation * t_seconds);
}

double tunneling_noise_bound(double dj_over_j, double t, int n) {
  if (!(t >= n) || !(t > 0.0)) throw std::invalid_argument("tunneling_noise_bound: need t >= n T_B");
  return dj_over_j * (t - n) / t;
}

DesignReport design_report(double tau, double mass, std::int64_t atom_number) {
  if (!(tau > 0.0 && mass > 0.0 && atom_number > 0)) {
    throw std::invalid_argument("design_report: all inputs must be positive");
  }
  DesignReport r;
  r.tau = tau;
  r.mass = mass;
  r.atom_number = atom_number;
  r.g_min = 8.0 / std::pow(tau, 1.5) * std::sqrt(pi * hbar / mass);
  r.optimal_spacing = std::sqrt(pi * hbar * tau / mass) / 4.0;
  const double tilt = mass * r.g_min * r.optimal_spacing;
  const auto params = LatticeParams::from_physical(mass, r.g_min, r.optimal_spacing, tilt, atom_number);
  r.bloch_period = params.bloch_period();
  r.relative_uncertainty = sens_ml_analytic(params, tau / r.bloch_period);
  r.single_shot_dg = r.relative_uncertainty * r.g_min;
  r.single_shot_dg_in_g = r.single_shot_dg / constants::standard_gravity;
  return r;
}

double max_tunneling(double spacing, double mass) {
  if (!(spacing > 0.0 && mass > 0.0)) throw std::invalid_argument("max_tunneling: inputs must be positive");
  return hbar * hbar * pi * pi / (8.0 * mass * spacing * spacing);
}

DepthSensitivity tunneling_depth_sensitivity(double depth, double ds_over_s) {
  if (!(depth > 0.0)) throw std::invalid_argument("tunneling_depth_sensitivity: depth must be positive");
  const double root = std::sqrt(depth);
  return {std::abs(0.75 - root) * ds_over_s, root * ds_over_s};
}

double coherence_length(double temperature, double mass) {
  if (!(temperature > 0.0 && mass > 0.0)) throw std::invalid_argument("coherence_length: inputs must be positive");
  return constants::planck / std::sqrt(2.0 * pi * mass * constants::boltzmann * temperature);
}

}  // namespace sboi::analytic
