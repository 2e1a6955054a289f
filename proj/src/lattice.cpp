#include "sboi/errors.hpp"
#include "sboi/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace sboi {

using cplx = std::complex<double>;

LatticeParams LatticeParams::from_physical(double mass, double acceleration, double spacing,
                                           double tunneling, std::int64_t atom_number) {
  LatticeParams p;
  p.mass = mass;
  p.acceleration = acceleration;
  p.spacing = spacing;
  p.tunneling = tunneling;
  p.tilt = mass * acceleration * spacing;
  p.atom_number = atom_number;
  p.validate();
  return p;
}

LatticeParams LatticeParams::from_ratio(double hopping_ratio, std::int64_t atom_number) {
  constexpr double mass = 39.0 * constants::atomic_mass_unit;
  constexpr double spacing = 1e-6;
  const double tilt = mass * constants::standard_gravity * spacing;
  return from_physical(mass, constants::standard_gravity, spacing, hopping_ratio * tilt,
                       atom_number);
}

void LatticeParams::validate() const {
  if (!(tunneling >= 0.0) || !std::isfinite(tunneling)) {
    throw std::invalid_argument("LatticeParams: tunneling must be finite and >= 0");
  }
  if (atom_number < 1) throw std::invalid_argument("LatticeParams: atom_number must be >= 1");
  if (!(spacing > 0.0)) throw std::invalid_argument("LatticeParams: spacing must be > 0");
  if (!(mass > 0.0)) throw std::invalid_argument("LatticeParams: mass must be > 0");
  if (!(tilt > 0.0) || !std::isfinite(tilt)) {
    throw std::invalid_argument("LatticeParams: tilt must be finite and > 0");
  }
}

LatticeParams LatticeParams::with_acceleration(double g) const {
  return from_physical(mass, g, spacing, tunneling, atom_number);
}

LatticeParams LatticeParams::with_tunneling(double j) const {
  LatticeParams p = *this;
  p.tunneling = j;
  p.validate();
  return p;
}

LatticeParams LatticeParams::with_atom_number(std::int64_t n) const {
  LatticeParams p = *this;
  p.atom_number = n;
  p.validate();
  return p;
}

void SiteWindow::validate() const {
  if (k_min > 0 || k_max < 0) throw std::invalid_argument("SiteWindow: must contain site 0");
  if (size() < 3) throw std::invalid_argument("SiteWindow: needs at least 3 sites");
}

numerics::SymTridiagonal build_hamiltonian(double tunneling, double tilt,
                                           const SiteWindow& window) {
  window.validate();
  numerics::SymTridiagonal h;
  h.diag.resize(static_cast<std::size_t>(window.size()));
  for (int i = 0; i < window.size(); ++i) h.diag[static_cast<std::size_t>(i)] = tilt * window.site_at(i);
  h.offdiag.assign(static_cast<std::size_t>(window.size()) - 1, -tunneling);
  return h;
}

numerics::SymTridiagonal build_hamiltonian(const LatticeParams& params, const SiteWindow& window) {
  params.validate();
  return build_hamiltonian(params.hopping_ratio(), 1.0, window);
}

ModeAmplitudes single_site_state(const SiteWindow& window) {
  window.validate();
  ModeAmplitudes s{window, Eigen::VectorXcd::Zero(window.size())};
  s.amps(window.index_of(0)) = 1.0;
  return s;
}

ModeAmplitudes gaussian_state(double sigma, const SiteWindow& window) {
  window.validate();
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("gaussian_state: sigma must be positive");
  }
  if (window.k_max < 6.0 * sigma || -window.k_min < 6.0 * sigma) {
    throw std::invalid_argument("gaussian_state: window of " + std::to_string(window.size()) +
                                " sites does not reach 6 sigma");
  }
  ModeAmplitudes s{window, Eigen::VectorXcd::Zero(window.size())};
  for (int i = 0; i < window.size(); ++i) {
    const double k = window.site_at(i);
    s.amps(i) = std::exp(-k * k / (2.0 * sigma * sigma));
  }
  s.amps /= s.amps.norm();
  return s;
}

namespace {

double reduced_time(double t_bloch) { return 2.0 * constants::pi * t_bloch; }

Eigen::VectorXcd evolve_in_eigenbasis(const numerics::Spectrum& spec, const Eigen::VectorXcd& amps0,
                                      double t_bloch) {
  const double tau = reduced_time(t_bloch);
  Eigen::VectorXcd c = spec.eigenvectors.transpose() * amps0;
  for (Eigen::Index a = 0; a < c.size(); ++a) c(a) *= std::polar(1.0, -spec.eigenvalues(a) * tau);
  return spec.eigenvectors * c;
}

double edge_population(const Eigen::VectorXcd& amps) {
  return std::norm(amps(0)) + std::norm(amps(amps.size() - 1));
}

}  // namespace

SiteWindow choose_window(const LatticeParams& params, double t_max, double initial_sigma,
                         double tol) {
  params.validate();
  if (!(tol > 0.0 && tol <= 1e-3)) throw std::invalid_argument("choose_window: tol must be in (0, 1e-3]");
  if (!(t_max >= 0.0)) throw std::invalid_argument("choose_window: t_max must be >= 0");
  if (!(initial_sigma >= 0.0)) throw std::invalid_argument("choose_window: sigma must be >= 0");

  // Dynamics repeat every Bloch period, so one period (or up to t_max) suffices.
  const double horizon = std::min(t_max, 1.0);
  constexpr int kSamples = 64;
  std::vector<double> times;
  for (int i = 0; i <= kSamples; ++i) times.push_back(horizon * i / kSamples);
  times.push_back(t_max);

  int half_width = static_cast<int>(std::ceil(4.0 * params.hopping_ratio())) +
                   static_cast<int>(std::ceil(6.0 * initial_sigma)) + 10;
  while (2 * half_width + 1 <= kMaxWindowSize) {
    const SiteWindow window = SiteWindow::symmetric(half_width);
    const ModeAmplitudes start =
        initial_sigma > 0.0 ? gaussian_state(initial_sigma, window) : single_site_state(window);
    const auto spec = numerics::eig_sym_tridiagonal(build_hamiltonian(params, window));
    const bool fits = std::all_of(times.begin(), times.end(), [&](double t) {
      return edge_population(evolve_in_eigenbasis(spec, start.amps, t)) < tol;
    });
    if (fits) return window;
    half_width *= 2;
  }
  throw NumericalError("choose_window: no window up to " + std::to_string(kMaxWindowSize) +
                       " sites keeps the edge population below tolerance");
}

Propagator::Propagator(const LatticeParams& params, const SiteWindow& window)
    : params_(params), window_(window) {
  params_.validate();
  window_.validate();
  spectrum_ = numerics::eig_sym_tridiagonal(build_hamiltonian(params_, window_));
  const Eigen::VectorXd sites =
      Eigen::VectorXd::LinSpaced(window_.size(), window_.k_min, window_.k_max);
  const Eigen::MatrixXd& q = spectrum_.eigenvectors;
  tilt_eigenbasis_ = q.transpose() * sites.asDiagonal() * q;
}

Eigen::MatrixXcd Propagator::evolution_matrix(double t) const {
  const double tau = reduced_time(t);
  const Eigen::Index n = spectrum_.eigenvalues.size();
  Eigen::VectorXcd phases(n);
  for (Eigen::Index a = 0; a < n; ++a) phases(a) = std::polar(1.0, -spectrum_.eigenvalues(a) * tau);
  const Eigen::MatrixXcd q = spectrum_.eigenvectors.cast<cplx>();
  return q * phases.asDiagonal() * q.transpose();
}

// Divided differences of exp(-i lambda tau) contracted with dH/dln(delta) = diag(k):
// entry (a, b) is K_ab (e^{-i l_a tau} - e^{-i l_b tau}) / (l_a - l_b), written
// with a sinc so that near-degenerate pairs stay accurate.
Eigen::MatrixXcd Propagator::derivative_kernel(double t) const {
  const double tau = reduced_time(t);
  const Eigen::VectorXd& lam = spectrum_.eigenvalues;
  const Eigen::Index n = lam.size();
  Eigen::MatrixXcd kernel(n, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index a = 0; a < n; ++a) {
      const double half_gap = 0.5 * (lam(a) - lam(b)) * tau;
      const double sinc = half_gap == 0.0 ? 1.0 : std::sin(half_gap) / half_gap;
      const cplx phase = std::polar(1.0, -0.5 * (lam(a) + lam(b)) * tau);
      kernel(a, b) = cplx(0.0, -tau) * phase * sinc * tilt_eigenbasis_(a, b);
    }
  }
  return kernel;
}

Eigen::MatrixXcd Propagator::evolution_log_derivative(double t) const {
  const Eigen::MatrixXcd q = spectrum_.eigenvectors.cast<cplx>();
  return q * derivative_kernel(t) * q.transpose();
}

Eigen::VectorXcd Propagator::evolve(const Eigen::VectorXcd& amps0, double t) const {
  if (amps0.size() != window_.size()) throw std::invalid_argument("Propagator::evolve: size mismatch");
  return evolve_in_eigenbasis(spectrum_, amps0, t);
}

Propagator::Evolved Propagator::evolve_with_derivative(const Eigen::VectorXcd& amps0,
                                                       double t) const {
  if (amps0.size() != window_.size()) {
    throw std::invalid_argument("Propagator::evolve_with_derivative: size mismatch");
  }
  const Eigen::VectorXcd c = spectrum_.eigenvectors.transpose() * amps0;
  const double tau = reduced_time(t);
  Eigen::VectorXcd phased = c;
  for (Eigen::Index a = 0; a < c.size(); ++a) {
    phased(a) *= std::polar(1.0, -spectrum_.eigenvalues(a) * tau);
  }
  Evolved out;
  out.amps = spectrum_.eigenvectors * phased;
  out.derivative = spectrum_.eigenvectors * (derivative_kernel(t) * c);
  return out;
}

ModeAmplitudes propagate(const ModeAmplitudes& state0, const Propagator& prop, double t) {
  if (!(state0.window == prop.window())) {
    throw std::invalid_argument("propagate: state and propagator windows differ");
  }
  return {state0.window, prop.evolve(state0.amps, t)};
}

std::vector<double> populations(const ModeAmplitudes& state) {
  std::vector<double> p(static_cast<std::size_t>(state.amps.size()));
  for (Eigen::Index i = 0; i < state.amps.size(); ++i) p[static_cast<std::size_t>(i)] = std::norm(state.amps(i));
  return p;
}

std::vector<double> population_derivative(const ModeAmplitudes& state0, const Propagator& prop,
                                          double t, DerivativeMethod method) {
  if (!(state0.window == prop.window())) {
    throw std::invalid_argument("population_derivative: state and propagator windows differ");
  }
  const auto n = static_cast<std::size_t>(state0.amps.size());
  std::vector<double> dp(n, 0.0);

  if (method == DerivativeMethod::exact) {
    const auto ev = prop.evolve_with_derivative(state0.amps, t);
    for (std::size_t k = 0; k < n; ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      dp[k] = 2.0 * std::real(std::conj(ev.amps(i)) * ev.derivative(i));
    }
    return dp;
  }

  // Physical time is held fixed while g moves, so t in Bloch periods scales with delta.
  const LatticeParams& base = prop.params();
  auto pops_at = [&](double eta) {
    const Propagator shifted(base.with_acceleration(base.acceleration * (1.0 + eta)), prop.window());
    return populations({state0.window, shifted.evolve(state0.amps, t * (1.0 + eta))});
  };
  auto central = [&](double eta) {
    const auto plus = pops_at(eta);
    const auto minus = pops_at(-eta);
    std::vector<double> d(n);
    for (std::size_t k = 0; k < n; ++k) d[k] = (plus[k] - minus[k]) / (2.0 * eta);
    return d;
  };
  constexpr double kStep = 1e-6;
  const auto coarse = central(kStep);
  const auto fine = central(0.5 * kStep);
  for (std::size_t k = 0; k < n; ++k) dp[k] = (4.0 * fine[k] - coarse[k]) / 3.0;
  return dp;
}

}  // namespace sboi
