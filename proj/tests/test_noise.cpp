#include "sboi/analytic.hpp"
#include "sboi/noise.hpp"

#include <doctest.h>

#include <cmath>

using namespace sboi;

namespace {

constexpr double kPi = std::numbers::pi;

struct Moments {
  double s2 = 0.0;
  double s4 = 0.0;
};

// sum p_k k^2 and sum p_k k^4 from the Bessel populations.
Moments bessel_moments(double t, double j, const SiteWindow& w) {
  const auto p = analytic::populations(w, t, j);
  Moments m;
  for (int i = 0; i < w.size(); ++i) {
    const double k2 = std::pow(w.site_at(i), 2);
    m.s2 += p[static_cast<std::size_t>(i)] * k2;
    m.s4 += p[static_cast<std::size_t>(i)] * k2 * k2;
  }
  return m;
}

// Trapezoid over the Gaussian P(J) on +-8 sigma.
template <class F>
double average_over_j(double j0, double rel_sigma, F f) {
  const int n = 4000;
  const double lo = -8.0, hi = 8.0, h = (hi - lo) / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double z = lo + h * i;
    const double wgt = (i == 0 || i == n ? 0.5 : 1.0) * std::exp(-0.5 * z * z);
    sum += wgt * f(j0 * (1.0 + rel_sigma * z));
  }
  return sum * h / std::sqrt(2.0 * kPi);
}

}  // namespace

TEST_CASE("noise model validation") {
  CHECK_NOTHROW(TunnelingNoise{0.05, 21}.validate());
  CHECK_THROWS(TunnelingNoise{0.34, 21}.validate());
  CHECK_THROWS(TunnelingNoise{-0.01, 21}.validate());
  CHECK_THROWS(TunnelingNoise{0.01, 4}.validate());
  CHECK_THROWS(ResolutionModel{-1.0}.validate());
}

TEST_CASE("noiseless mixture reduces to one node") {
  const auto params = LatticeParams::from_ratio(1.0, 40000);
  const auto w = choose_window(params, 7.5, 0.0);
  const TunnelingMixture mix(params, w, {});
  CHECK(mix.size() == 1);
  CHECK(mix.weight(0) == 1.0);
  const TunnelingMixture noisy(params, w, {0.01, 21});
  CHECK(noisy.size() == 21);
  double total = 0.0;
  for (std::size_t i = 0; i < noisy.size(); ++i) total += noisy.weight(i);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("mixture moments against a dense trapezoid over J") {
  const auto params = LatticeParams::from_ratio(1.0, 40000);
  const double rel = 0.05;
  const TunnelingNoise noise{rel, 40};
  const auto w = mixture_window(params, noise, 7.5, 0.0);
  const auto s0 = single_site_state(w);
  const TunnelingMixture mix(params, w, noise);
  for (double t : {6.3, 7.1, 7.4}) {
    const auto got = mixture_width(s0, mix, t);
    const double mean = average_over_j(1.0, rel, [&](double j) { return bessel_moments(t, j, w).s2; });
    const double spread = average_over_j(1.0, rel, [&](double j) {
      return std::pow(bessel_moments(t, j, w).s2 - mean, 2);
    });
    const double s4 = average_over_j(1.0, rel, [&](double j) { return bessel_moments(t, j, w).s4; });
    CHECK(got.moments.mean == doctest::Approx(mean).epsilon(1e-8));
    CHECK(got.moments.variance == doctest::Approx(spread + s4 / 40000).epsilon(1e-6));

    // g d<w>/dg: S2 = y^2 / 2 with delta and the reduced time both scaling with g.
    auto mean_at = [&](double eta) {
      return average_over_j(1.0, rel, [&](double j) {
        const double y = 4.0 * j / (1.0 + eta) * std::sin(kPi * t * (1.0 + eta));
        return 0.5 * y * y;
      });
    };
    const double eta = 1e-6;
    CHECK(got.derivative == doctest::Approx((mean_at(eta) - mean_at(-eta)) / (2 * eta)).epsilon(1e-6));
  }
}

TEST_CASE("zero noise reproduces the pure width protocol") {
  const auto params = LatticeParams::from_ratio(1.0, 40000);
  const auto w = choose_window(params, 7.5, 0.0);
  const Propagator prop(params, w);
  const auto s0 = single_site_state(w);
  const TunnelingMixture mix(params, w, {});
  std::vector<double> times;
  for (int i = 0; i <= 20; ++i) times.push_back(6.5 + 0.05 * i);
  const auto noisy = noisy_width_sensitivity_curve(s0, mix, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(noisy.dg_over_g[0][i] == doctest::Approx(evaluate_point(s0, prop, times[i]).width).epsilon(1e-12));
  }
}

TEST_CASE("detector resolution costs a factor sqrt(1 + lambda) at the revival") {
  const auto params = LatticeParams::from_ratio(1.0, 40000);
  const auto w = choose_window(params, 7.5, 0.0);
  const auto s0 = single_site_state(w);
  const TunnelingMixture mix(params, w, {});
  const std::vector<double> t{7.0};
  const double pure = noisy_width_sensitivity_curve(s0, mix, t).dg_over_g[0][0];
  const double res = combined_sensitivity_curve(s0, mix, {1.0}, t).dg_over_g[0][0];
  CHECK(res >= 5.66e-5);
  CHECK(res <= 5.71e-5);
  CHECK(res / pure == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
  const double res3 = combined_sensitivity_curve(s0, mix, {3.0}, t).dg_over_g[0][0];
  CHECK(res3 / pure == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("resolution-adjusted statistics") {
  const PopulationStats s({0.25, 0.75}, 100);
  const auto r = resolution_adjusted_stats(s, {2.0});
  CHECK(r.variance()[0] == doctest::Approx(18.75 + 50.0));
  CHECK(r.mean()[0] == s.mean()[0]);
  CHECK(r.cross(0, 1) == s.cross(0, 1));
}

TEST_CASE("tunnelling noise hurts away from revivals, not at them") {
  const auto params = LatticeParams::from_ratio(1.0, 40000);
  const TunnelingNoise heavy{0.05, 21};
  const auto w = mixture_window(params, heavy, 7.5, 0.0);
  const auto s0 = single_site_state(w);
  const std::vector<double> times{6.3, 6.8, 7.0, 7.1};
  std::vector<std::vector<double>> curves;
  for (double rel : {0.0, 0.01, 0.05}) {
    const TunnelingMixture mix(params, w, {rel, 21});
    curves.push_back(noisy_width_sensitivity_curve(s0, mix, times).dg_over_g[0]);
  }
  for (std::size_t i : {0u, 1u, 3u}) {
    CHECK(curves[0][i] <= curves[1][i]);
    CHECK(curves[1][i] <= curves[2][i]);
  }
  CHECK(curves[1][2] == doctest::Approx(curves[0][2]).epsilon(0.05));
  for (std::size_t n : {1u, 2u}) {
    const double rel = n == 1 ? 0.01 : 0.05;
    const double ratio = curves[n][3] / analytic::tunneling_noise_bound(rel, 7.1, 7);
    CHECK(ratio >= 0.5);
    CHECK(ratio <= 2.0);
  }
}

TEST_CASE("width curves are independent of the thread count") {
  const auto params = LatticeParams::from_ratio(1.0, 40000);
  const TunnelingNoise noise{0.01, 21};
  const auto w = mixture_window(params, noise, 7.5, 0.0);
  const TunnelingMixture mix(params, w, noise);
  std::vector<double> times;
  for (int i = 0; i <= 30; ++i) times.push_back(5.5 + 2.0 * i / 30);
  const auto s0 = single_site_state(w);
  CHECK(combined_sensitivity_curve(s0, mix, {1.0}, times, {}, 1).dg_over_g ==
        combined_sensitivity_curve(s0, mix, {1.0}, times, {}, 3).dg_over_g);
}
