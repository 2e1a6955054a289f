#include "sboi/noise.hpp"
#include "sboi/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sboi {

void TunnelingNoise::validate() const {
  if (!(relative_sigma >= 0.0) || !(relative_sigma < 1.0 / 3.0)) {
    throw std::invalid_argument("TunnelingNoise: sigma_J must lie in [0, J0/3)");
  }
  if (quadrature_order < 5 || quadrature_order > 128) {
    throw std::invalid_argument("TunnelingNoise: quadrature order must lie in [5, 128]");
  }
}

void ResolutionModel::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("ResolutionModel: lambda must be finite and >= 0");
  }
}

TunnelingMixture::TunnelingMixture(const LatticeParams& params, const SiteWindow& window,
                                   const TunnelingNoise& noise)
    : params_(params), window_(window), noise_(noise) {
  noise_.validate();
  params_.validate();
  if (noise_.relative_sigma == 0.0 || params_.tunneling == 0.0) {
    weights_ = {1.0};
    propagators_.emplace_back(params_, window_);
    return;
  }
  const auto rule = numerics::gauss_hermite(noise_.quadrature_order);
  const double sigma = noise_.relative_sigma * params_.tunneling;
  weights_ = rule.weights;
  propagators_.reserve(rule.size());
  for (double x : rule.nodes) {
    propagators_.emplace_back(params_.with_tunneling(params_.tunneling + sigma * x), window_);
  }
}

SiteWindow mixture_window(const LatticeParams& params, const TunnelingNoise& noise, double t_max,
                          double initial_sigma, double tol) {
  noise.validate();
  double largest = 0.0;
  if (noise.relative_sigma > 0.0) {
    const auto rule = numerics::gauss_hermite(noise.quadrature_order);
    largest = *std::max_element(rule.nodes.begin(), rule.nodes.end());
  }
  const auto widest = params.with_tunneling(params.tunneling * (1.0 + noise.relative_sigma * largest));
  return choose_window(widest, t_max, initial_sigma, tol);
}

namespace {

struct NodeWidth {
  double s2 = 0.0;  // sum p k^2
  double s4 = 0.0;  // sum p k^4
  double ds2 = 0.0;
  bool point_mass = true;
};

NodeWidth node_width(const ModeAmplitudes& state0, const Propagator& prop, double t) {
  const auto ev = prop.evolve_with_derivative(state0.amps, t);
  const SiteWindow& window = prop.window();
  NodeWidth out;
  std::vector<double> p(static_cast<std::size_t>(window.size()));
  for (int i = 0; i < window.size(); ++i) {
    const double k2 = std::pow(window.site_at(i), 2);
    const double pk = std::norm(ev.amps(i));
    p[static_cast<std::size_t>(i)] = pk;
    out.s2 += pk * k2;
    out.s4 += pk * k2 * k2;
    out.ds2 += 2.0 * std::real(std::conj(ev.amps(i)) * ev.derivative(i)) * k2;
  }
  const PopulationStats stats(std::move(p), 1);
  out.point_mass = !stats.fisher_defined();
  return out;
}

}  // namespace

MixtureWidth mixture_width(const ModeAmplitudes& state0, const TunnelingMixture& mixture, double t,
                           WidthVarianceMode mode, const ResolutionModel& resolution) {
  if (!(state0.window == mixture.window())) throw std::invalid_argument("mixture_width: window mismatch");
  resolution.validate();
  std::vector<NodeWidth> nodes;
  nodes.reserve(mixture.size());
  for (std::size_t i = 0; i < mixture.size(); ++i) {
    nodes.push_back(node_width(state0, mixture.propagator(i), t));
  }
  MixtureWidth out;
  out.moments.mode = mode;
  out.point_mass = std::all_of(nodes.begin(), nodes.end(), [](const NodeWidth& n) { return n.point_mass; });
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out.moments.mean += mixture.weight(i) * nodes[i].s2;
    out.derivative += mixture.weight(i) * nodes[i].ds2;
  }
  const double atoms = static_cast<double>(mixture.params().atom_number);
  double spread = 0.0;
  double shot = 0.0;
  double detector = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double w = mixture.weight(i);
    if (mixture.size() > 1) spread += w * std::pow(nodes[i].s2 - out.moments.mean, 2);
    shot += w * (mode == WidthVarianceMode::approximate
                     ? nodes[i].s4
                     : std::max(0.0, nodes[i].s4 - nodes[i].s2 * nodes[i].s2));
    detector += w * resolution.lambda * nodes[i].s4;
  }
  out.moments.variance = spread + (shot + detector) / atoms;
  return out;
}

WidthMoments mixture_width_moments(const ModeAmplitudes& state0, const LatticeParams& params,
                                   const SiteWindow& window, double t, const TunnelingNoise& noise,
                                   WidthVarianceMode mode) {
  const TunnelingMixture mixture(params, window, noise);
  return mixture_width(state0, mixture, t, mode).moments;
}

PopulationStats resolution_adjusted_stats(const PopulationStats& stats, const ResolutionModel& res) {
  res.validate();
  std::vector<double> extra(stats.mean());
  for (double& v : extra) v *= res.lambda;
  return stats.with_added_variance(extra);
}

SensitivityCurve width_sensitivity_curve(const ModeAmplitudes& state0,
                                         const TunnelingMixture& mixture,
                                         std::span<const double> times,
                                         const ResolutionModel& resolution,
                                         const ProtocolOptions& options, int threads) {
  if (options.nu < 1) throw std::invalid_argument("width_sensitivity_curve: nu must be >= 1");
  resolution.validate();
  SensitivityCurve curve;
  curve.times.assign(times.begin(), times.end());
  curve.protocols = {Protocol::width};
  curve.scenario = mixture.params();
  curve.nu = options.nu;
  curve.dg_over_g.assign(1, std::vector<double>(times.size()));
  auto& column = curve.dg_over_g.front();
  parallel_for(times.size(), threads, [&](std::size_t i) {
    MixtureWidth w = mixture_width(state0, mixture, times[i], options.width_mode, resolution);
    if (w.point_mass) {
      w = mixture_width(state0, mixture, times[i] + kRevivalOffset, options.width_mode, resolution);
    }
    column[i] = w.point_mass ? std::numeric_limits<double>::infinity()
                             : std::sqrt(width_point_sensitivity(w.moments, w.derivative) / options.nu);
  });
  return curve;
}

SensitivityCurve noisy_width_sensitivity_curve(const ModeAmplitudes& state0,
                                               const TunnelingMixture& mixture,
                                               std::span<const double> times,
                                               const ProtocolOptions& options, int threads) {
  return width_sensitivity_curve(state0, mixture, times, ResolutionModel{}, options, threads);
}

SensitivityCurve combined_sensitivity_curve(const ModeAmplitudes& state0,
                                            const TunnelingMixture& mixture,
                                            const ResolutionModel& resolution,
                                            std::span<const double> times,
                                            const ProtocolOptions& options, int threads) {
  return width_sensitivity_curve(state0, mixture, times, resolution, options, threads);
}

}  // namespace sboi
