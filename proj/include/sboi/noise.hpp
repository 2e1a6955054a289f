#pragma once

#include "sboi/lattice.hpp"
#include "sboi/metrology.hpp"
#include "sboi/numerics.hpp"

#include <span>
#include <vector>

namespace sboi {

/// Shot-to-shot Gaussian fluctuations of the tunnelling energy around the
/// scenario's J0, with width relative_sigma * J0.
struct TunnelingNoise {
  double relative_sigma = 0.0;
  int quadrature_order = 21;

  /// sigma_J < J0 / 3 and quadrature order in [5, 128].
  void validate() const;
};

/// Detector counting noise with variance lambda * <n_k> on each site.
struct ResolutionModel {
  double lambda = 0.0;

  void validate() const;
};

/// Gauss-Hermite nodes of P(J) with one propagator per node, all on a common
/// window. Built eagerly and immutable afterwards, so scans may share it
/// between threads.
class TunnelingMixture {
 public:
  TunnelingMixture(const LatticeParams& params, const SiteWindow& window,
                   const TunnelingNoise& noise);

  std::size_t size() const { return propagators_.size(); }
  double weight(std::size_t i) const { return weights_[i]; }
  double tunneling(std::size_t i) const { return propagators_[i].params().tunneling; }
  const Propagator& propagator(std::size_t i) const { return propagators_[i]; }
  const SiteWindow& window() const { return window_; }
  const LatticeParams& params() const { return params_; }
  const TunnelingNoise& noise() const { return noise_; }

 private:
  LatticeParams params_;
  SiteWindow window_;
  TunnelingNoise noise_;
  std::vector<double> weights_;
  std::vector<Propagator> propagators_;
};

/// Window wide enough for the largest quadrature node of the mixture.
SiteWindow mixture_window(const LatticeParams& params, const TunnelingNoise& noise, double t_max,
                          double initial_sigma, double tol = 1e-12);

/// Width moments of the J-mixture at time t together with g d<w>/dg.
struct MixtureWidth {
  WidthMoments moments;
  double derivative = 0.0;  // g d<w>/dg
  bool point_mass = false;  // every node has collapsed onto a single site
};

MixtureWidth mixture_width(const ModeAmplitudes& state0, const TunnelingMixture& mixture, double t,
                           WidthVarianceMode mode = WidthVarianceMode::approximate,
                           const ResolutionModel& resolution = {});

/// Mean and variance of w averaged over P(J). The variance keeps the
/// N-independent spread of the mean width between J values.
WidthMoments mixture_width_moments(const ModeAmplitudes& state0, const LatticeParams& params,
                                   const SiteWindow& window, double t, const TunnelingNoise& noise,
                                   WidthVarianceMode mode = WidthVarianceMode::approximate);

/// Means unchanged, per-site variance increased by lambda <n_k>, cross-site
/// covariances untouched.
PopulationStats resolution_adjusted_stats(const PopulationStats& stats, const ResolutionModel& res);

/// Width-protocol Delta g / g under tunnelling noise and detector resolution.
/// Point-mass instants use the same one-sided limit as evaluate_point.
SensitivityCurve width_sensitivity_curve(const ModeAmplitudes& state0,
                                         const TunnelingMixture& mixture,
                                         std::span<const double> times,
                                         const ResolutionModel& resolution,
                                         const ProtocolOptions& options = {}, int threads = 1);

SensitivityCurve noisy_width_sensitivity_curve(const ModeAmplitudes& state0,
                                               const TunnelingMixture& mixture,
                                               std::span<const double> times,
                                               const ProtocolOptions& options = {},
                                               int threads = 1);

SensitivityCurve combined_sensitivity_curve(const ModeAmplitudes& state0,
                                            const TunnelingMixture& mixture,
                                            const ResolutionModel& resolution,
                                            std::span<const double> times,
                                            const ProtocolOptions& options = {}, int threads = 1);

}  // namespace sboi
