#pragma once

#include "sboi/lattice.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sboi {

/// Fisher information needed but every site was excluded from the sums.
class DegenerateFisherError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Protocol { qfi, ml, width };

std::string_view protocol_name(Protocol p);

/// Moments of the site occupations of N atoms sharing one single-particle
/// state: mean N p_k, variance N p_k (1 - p_k), covariance -N p_k p_l.
class PopulationStats {
 public:
  PopulationStats(std::vector<double> probabilities, std::int64_t atom_number);

  std::size_t size() const { return p_.size(); }
  std::int64_t atom_number() const { return atoms_; }
  const std::vector<double>& probabilities() const { return p_; }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& variance() const { return variance_; }

  /// sigma^2_{k,l}; equals variance()[k] on the diagonal.
  double cross(std::size_t k, std::size_t l) const;

  /// Copy with `extra[k]` added to each site variance; means and
  /// cross-site covariances are untouched.
  PopulationStats with_added_variance(std::span<const double> extra) const;

  /// Sites whose variance reaches 1e-12 N take part in Fisher sums.
  bool included(std::size_t k) const;
  bool fisher_defined() const;

 private:
  std::vector<double> p_;
  std::vector<double> mean_;
  std::vector<double> variance_;
  std::int64_t atoms_;
};

/// Threshold below which a site's variance (relative to N) excludes it.
inline constexpr double kVarianceFloor = 1e-12;

/// F1 = sum_k (d<n_k>)^2 / Var n_k over included sites. `dmean` holds
/// d<n_k>/dg in any unit; F1 carries its square over atoms.
double f1(const PopulationStats& stats, std::span<const double> dmean);

/// F2 = sum_{k != l} (d<n_k>/Var n_k)(d<n_l>/Var n_l) sigma^2_{k,l}, in the
/// factorised form -N (sum_k b_k)^2 + N sum_k b_k^2 with
/// b_k = p_k d<n_k> / Var n_k.
double f2(const PopulationStats& stats, std::span<const double> dmean);

/// Maximum-likelihood variance (F1 + F2) / (nu F1^2).
double ml_sensitivity(double f1_value, double f2_value, int nu = 1);

/// Generator h = i (g dU/dg) U^dagger at time t (Bloch periods), Hermitian.
/// Dividing by g gives the generator for g itself.
Eigen::MatrixXcd generator_matrix(const Propagator& prop, double t);

/// Quantum Fisher information for ln g of the N-atom product state:
/// 4 N Var(h) in the evolved single-particle state. Divide by g^2 for g.
double qfi(const ModeAmplitudes& state0, const Propagator& prop, double t);

/// Cramer-Rao bound Delta g / g = 1 / (g sqrt(F)).
double crlb(double fisher, double g);

enum class WidthVarianceMode {
  approximate,  // (1/N) sum p_k k^4
  exact_multinomial,  // (1/N) [sum p_k k^4 - (sum p_k k^2)^2]
};

std::string_view width_mode_name(WidthVarianceMode mode);

/// Mean and variance of the squared-width operator w = sum_k n_k k^2 / N.
struct WidthMoments {
  double mean = 0.0;
  double variance = 0.0;
  WidthVarianceMode mode = WidthVarianceMode::approximate;
};

WidthMoments width_moments(std::span<const double> p, const SiteWindow& window,
                           std::int64_t atom_number, WidthVarianceMode mode);

/// <w^2> split as sum_{k != l} <n_k n_l> k^2 l^2 / N^2 (off-diagonal) and
/// sum_k <n_k^2> k^4 / N^2 (diagonal), using the multinomial moments in
/// `stats` (including any added detector variance).
struct WidthSecondMoment {
  double off_diagonal = 0.0;
  double diagonal = 0.0;
  double total() const { return off_diagonal + diagonal; }
};

WidthSecondMoment width_second_moment(const PopulationStats& stats, const SiteWindow& window);

/// Error propagation Var(w) / (d<w>/dg)^2; +infinity when the derivative
/// vanishes.
double width_point_sensitivity(const WidthMoments& moments, double dmean_w);

struct WidthSample {
  double variance = 0.0;    // Var(w) at t_l
  double derivative = 0.0;  // d<w>/dg at t_l
};

/// Least-squares fit over several times: (1/nu) [sum_l d_l^2 / Var_l]^{-1}.
/// Throws std::domain_error when every derivative vanishes.
double width_fit_sensitivity(std::span<const WidthSample> samples, int nu = 1);

/// Offset (Bloch periods) used to take the one-sided limit at instants where
/// the populations collapse onto one site and the Fisher sums become 0/0.
inline constexpr double kRevivalOffset = 1e-4;

struct ProtocolOptions {
  WidthVarianceMode width_mode = WidthVarianceMode::approximate;
  int nu = 1;
};

/// Delta g / g of each protocol at one time; +infinity marks no information.
struct PointSensitivity {
  double qfi = 0.0;
  double ml = 0.0;
  double width = 0.0;

  double get(Protocol p) const;
};

/// Evaluates all three protocols at time t. Where the populations form a
/// point mass (every site variance under the floor) the ML and width values
/// are taken as the limit t -> t + kRevivalOffset.
PointSensitivity evaluate_point(const ModeAmplitudes& state0, const Propagator& prop, double t,
                                const ProtocolOptions& options = {});

/// Time series of Delta g / g per protocol; entries may be +infinity.
struct SensitivityCurve {
  std::vector<double> times;  // Bloch periods
  std::vector<Protocol> protocols;
  std::vector<std::vector<double>> dg_over_g;  // one column per protocol
  LatticeParams scenario;
  int nu = 1;

  const std::vector<double>& column(Protocol p) const;
};

SensitivityCurve sensitivity_curve(const ModeAmplitudes& state0, const Propagator& prop,
                                   std::span<const double> times,
                                   std::span<const Protocol> protocols,
                                   const ProtocolOptions& options = {}, int threads = 1);

/// Grid search followed by golden-section refinement of a one-dimensional
/// function on [lo, hi]. Returns {argmin, min}.
std::pair<double, double> locate_minimum(const std::function<double(double)>& f, double lo,
                                         double hi, int grid_points = 201);

}  // namespace sboi
