#include "sboi/metrology.hpp"
#include "sboi/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

namespace sboi {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string_view protocol_name(Protocol p) {
  switch (p) {
    case Protocol::qfi: return "qfi";
    case Protocol::ml: return "ml";
    case Protocol::width: return "width";
  }
  return "unknown";
}

std::string_view width_mode_name(WidthVarianceMode mode) {
  return mode == WidthVarianceMode::approximate ? "approximate" : "exact_multinomial";
}

PopulationStats::PopulationStats(std::vector<double> probabilities, std::int64_t atom_number)
    : p_(std::move(probabilities)), atoms_(atom_number) {
  if (atoms_ < 1) throw std::invalid_argument("PopulationStats: atom number must be >= 1");
  const double total = std::accumulate(p_.begin(), p_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("PopulationStats: probabilities must sum to one");
  }
  const auto n = p_.size();
  const double atoms = static_cast<double>(atoms_);
  // 1 - p_k from the other sites; avoids cancellation when p_k is close to one.
  std::vector<double> prefix(n + 1, 0.0);
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) prefix[k + 1] = prefix[k] + p_[k];
  for (std::size_t k = n; k-- > 0;) suffix[k] = suffix[k + 1] + p_[k];
  mean_.resize(n);
  variance_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double rest = prefix[k] + suffix[k + 1];
    mean_[k] = atoms * p_[k];
    variance_[k] = atoms * p_[k] * rest;
  }
}

double PopulationStats::cross(std::size_t k, std::size_t l) const {
  if (k == l) return variance_[k];
  return -static_cast<double>(atoms_) * p_[k] * p_[l];
}

PopulationStats PopulationStats::with_added_variance(std::span<const double> extra) const {
  if (extra.size() != size()) throw std::invalid_argument("with_added_variance: size mismatch");
  PopulationStats out = *this;
  for (std::size_t k = 0; k < size(); ++k) out.variance_[k] += extra[k];
  return out;
}

bool PopulationStats::included(std::size_t k) const {
  return variance_[k] >= kVarianceFloor * static_cast<double>(atoms_);
}

bool PopulationStats::fisher_defined() const {
  for (std::size_t k = 0; k < size(); ++k) {
    if (included(k)) return true;
  }
  return false;
}

double f1(const PopulationStats& stats, std::span<const double> dmean) {
  if (dmean.size() != stats.size()) throw std::invalid_argument("f1: size mismatch");
  if (!stats.fisher_defined()) throw DegenerateFisherError("f1: every site variance is below the floor");
  double sum = 0.0;
  for (std::size_t k = 0; k < stats.size(); ++k) {
    if (stats.included(k)) sum += dmean[k] * dmean[k] / stats.variance()[k];
  }
  return sum;
}

double f2(const PopulationStats& stats, std::span<const double> dmean) {
  if (dmean.size() != stats.size()) throw std::invalid_argument("f2: size mismatch");
  if (!stats.fisher_defined()) throw DegenerateFisherError("f2: every site variance is below the floor");
  double linear = 0.0;
  double squares = 0.0;
  for (std::size_t k = 0; k < stats.size(); ++k) {
    if (!stats.included(k)) continue;
    const double b = stats.probabilities()[k] * dmean[k] / stats.variance()[k];
    linear += b;
    squares += b * b;
  }
  const double atoms = static_cast<double>(stats.atom_number());
  return atoms * (squares - linear * linear);
}

double ml_sensitivity(double f1_value, double f2_value, int nu) {
  if (!(f1_value > 0.0)) throw std::domain_error("ml_sensitivity: F1 must be positive");
  if (nu < 1) throw std::invalid_argument("ml_sensitivity: nu must be >= 1");
  return std::max(0.0, f1_value + f2_value) / (nu * f1_value * f1_value);
}

Eigen::MatrixXcd generator_matrix(const Propagator& prop, double t) {
  const Eigen::MatrixXcd du = prop.evolution_log_derivative(t);
  const Eigen::MatrixXcd u = prop.evolution_matrix(t);
  return std::complex<double>(0.0, 1.0) * du * u.adjoint();
}

double qfi(const ModeAmplitudes& state0, const Propagator& prop, double t) {
  if (!(state0.window == prop.window())) throw std::invalid_argument("qfi: window mismatch");
  const auto ev = prop.evolve_with_derivative(state0.amps, t);
  // h|phi> = i dU alpha(0), so Var h = |dU alpha|^2 - |<phi|dU alpha>|^2.
  const double variance = ev.derivative.squaredNorm() - std::norm(ev.amps.dot(ev.derivative));
  return 4.0 * static_cast<double>(prop.params().atom_number) * std::max(0.0, variance);
}

double crlb(double fisher, double g) {
  if (!(fisher > 0.0)) throw std::domain_error("crlb: Fisher information must be positive");
  return 1.0 / (g * std::sqrt(fisher));
}

WidthMoments width_moments(std::span<const double> p, const SiteWindow& window,
                           std::int64_t atom_number, WidthVarianceMode mode) {
  if (p.size() != static_cast<std::size_t>(window.size())) {
    throw std::invalid_argument("width_moments: size mismatch");
  }
  if (atom_number < 1) throw std::invalid_argument("width_moments: atom number must be >= 1");
  double s2 = 0.0;
  double s4 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double k2 = std::pow(window.site_at(static_cast<int>(i)), 2);
    s2 += p[i] * k2;
    s4 += p[i] * k2 * k2;
  }
  const double atoms = static_cast<double>(atom_number);
  WidthMoments m;
  m.mode = mode;
  m.mean = s2;
  m.variance = mode == WidthVarianceMode::approximate ? s4 / atoms
                                                            : std::max(0.0, s4 - s2 * s2) / atoms;
  return m;
}

WidthSecondMoment width_second_moment(const PopulationStats& stats, const SiteWindow& window) {
  if (stats.size() != static_cast<std::size_t>(window.size())) {
    throw std::invalid_argument("width_second_moment: size mismatch");
  }
  const double atoms = static_cast<double>(stats.atom_number());
  const auto& p = stats.probabilities();
  double pa = 0.0;
  double p2a2 = 0.0;
  double diag = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = std::pow(window.site_at(static_cast<int>(i)), 2);
    pa += p[i] * a;
    p2a2 += p[i] * p[i] * a * a;
    const double second = stats.variance()[i] + stats.mean()[i] * stats.mean()[i];
    diag += second * a * a;
  }
  // <n_k n_l> = N (N - 1) p_k p_l for k != l.
  WidthSecondMoment out;
  out.off_diagonal = (atoms - 1.0) / atoms * (pa * pa - p2a2);
  out.diagonal = diag / (atoms * atoms);
  return out;
}

double width_point_sensitivity(const WidthMoments& moments, double dmean_w) {
  if (dmean_w == 0.0) return kInf;
  return moments.variance / (dmean_w * dmean_w);
}

double width_fit_sensitivity(std::span<const WidthSample> samples, int nu) {
  if (nu < 1) throw std::invalid_argument("width_fit_sensitivity: nu must be >= 1");
  double information = 0.0;
  bool any = false;
  for (const auto& s : samples) {
    if (s.derivative == 0.0) continue;
    any = true;
    information += s.derivative * s.derivative / s.variance;
  }
  if (!any) throw std::domain_error("width_fit_sensitivity: every derivative vanishes");
  return 1.0 / (nu * information);
}

double PointSensitivity::get(Protocol p) const {
  switch (p) {
    case Protocol::qfi: return qfi;
    case Protocol::ml: return ml;
    case Protocol::width: return width;
  }
  return kInf;
}

namespace {

struct TimeSample {
  std::vector<double> p;
  std::vector<double> dp;  // g dp/dg
  double qfi = 0.0;
};

TimeSample sample_at(const ModeAmplitudes& state0, const Propagator& prop, double t) {
  const auto ev = prop.evolve_with_derivative(state0.amps, t);
  TimeSample s;
  const auto n = static_cast<std::size_t>(ev.amps.size());
  s.p.resize(n);
  s.dp.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    s.p[k] = std::norm(ev.amps(i));
    s.dp[k] = 2.0 * std::real(std::conj(ev.amps(i)) * ev.derivative(i));
  }
  const double variance = ev.derivative.squaredNorm() - std::norm(ev.amps.dot(ev.derivative));
  s.qfi = 4.0 * static_cast<double>(prop.params().atom_number) * std::max(0.0, variance);
  return s;
}

}  // namespace

PointSensitivity evaluate_point(const ModeAmplitudes& state0, const Propagator& prop, double t,
                                const ProtocolOptions& options) {
  if (!(state0.window == prop.window())) throw std::invalid_argument("evaluate_point: window mismatch");
  if (options.nu < 1) throw std::invalid_argument("evaluate_point: nu must be >= 1");
  const auto atoms = prop.params().atom_number;
  const double nu = options.nu;

  PointSensitivity out;
  TimeSample s = sample_at(state0, prop, t);
  out.qfi = s.qfi > 0.0 ? crlb(nu * s.qfi, 1.0) : kInf;

  // Relative units throughout: derivatives are g d/dg, so Delta g / g = 1 / sqrt(F).
  PopulationStats stats(s.p, atoms);
  if (!stats.fisher_defined()) {
    s = sample_at(state0, prop, t + kRevivalOffset);
    stats = PopulationStats(s.p, atoms);
  }

  out.ml = kInf;
  if (stats.fisher_defined()) {
    std::vector<double> dmean(s.dp.size());
    for (std::size_t k = 0; k < dmean.size(); ++k) dmean[k] = static_cast<double>(atoms) * s.dp[k];
    const double a = f1(stats, dmean);
    if (a > 0.0) out.ml = std::sqrt(ml_sensitivity(a, f2(stats, dmean), options.nu));
  }

  const auto& window = prop.window();
  const WidthMoments w = width_moments(s.p, window, atoms, options.width_mode);
  double dw = 0.0;
  for (std::size_t k = 0; k < s.dp.size(); ++k) {
    dw += s.dp[k] * std::pow(window.site_at(static_cast<int>(k)), 2);
  }
  out.width = stats.fisher_defined() ? std::sqrt(width_point_sensitivity(w, dw) / nu) : kInf;
  return out;
}

const std::vector<double>& SensitivityCurve::column(Protocol p) const {
  for (std::size_t i = 0; i < protocols.size(); ++i) {
    if (protocols[i] == p) return dg_over_g[i];
  }
  throw std::out_of_range("SensitivityCurve: protocol not present");
}

SensitivityCurve sensitivity_curve(const ModeAmplitudes& state0, const Propagator& prop,
                                   std::span<const double> times,
                                   std::span<const Protocol> protocols,
                                   const ProtocolOptions& options, int threads) {
  SensitivityCurve curve;
  curve.times.assign(times.begin(), times.end());
  curve.protocols.assign(protocols.begin(), protocols.end());
  curve.scenario = prop.params();
  curve.nu = options.nu;
  std::vector<PointSensitivity> points(times.size());
  parallel_for(times.size(), threads,
               [&](std::size_t i) { points[i] = evaluate_point(state0, prop, times[i], options); });
  curve.dg_over_g.resize(protocols.size());
  for (std::size_t c = 0; c < protocols.size(); ++c) {
    curve.dg_over_g[c].reserve(points.size());
    for (const auto& pt : points) curve.dg_over_g[c].push_back(pt.get(protocols[c]));
  }
  return curve;
}

std::pair<double, double> locate_minimum(const std::function<double(double)>& f, double lo,
                                         double hi, int grid_points) {
  if (!(hi > lo) || grid_points < 3) throw std::invalid_argument("locate_minimum: bad interval");
  std::vector<double> xs(static_cast<std::size_t>(grid_points));
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / (grid_points - 1);
    ys[i] = f(xs[i]);
  }
  const auto best = static_cast<std::size_t>(std::min_element(ys.begin(), ys.end()) - ys.begin());
  double a = xs[best == 0 ? 0 : best - 1];
  double b = xs[std::min(best + 1, xs.size() - 1)];
  double x_best = xs[best];
  double y_best = ys[best];

  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 80 && (b - a) > 1e-12 * std::max(1.0, std::abs(x_best)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
    if (fc < y_best) { y_best = fc; x_best = c; }
    if (fd < y_best) { y_best = fd; x_best = d; }
  }
  return {x_best, y_best};
}

}  // namespace sboi
