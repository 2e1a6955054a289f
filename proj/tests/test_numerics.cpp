#include "sboi/errors.hpp"
#include "sboi/numerics.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace sboi;
using namespace sboi::numerics;

namespace {

using big = boost::multiprecision::cpp_bin_float_50;

// Power series sum_m (-1)^m (y/2)^{2m+n} / (m! (m+n)!) in 50-digit arithmetic.
double bessel_series(int n, double y) {
  const big half = big(y) / 2;
  big term = 1;
  for (int i = 1; i <= n; ++i) term *= half / i;
  big sum = term;
  const big q = -half * half;
  for (int m = 1; m < 400; ++m) {
    term *= q / (big(m) * big(m + n));
    sum += term;
    if (abs(term) < big("1e-45") * (abs(sum) + big("1e-300"))) break;
  }
  return static_cast<double>(sum);
}

SymTridiagonal random_tridiagonal(int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SymTridiagonal h;
  for (int i = 0; i < m; ++i) h.diag.push_back(u(rng) * 3.0);
  for (int i = 0; i + 1 < m; ++i) h.offdiag.push_back(u(rng));
  return h;
}

}  // namespace

TEST_CASE("bessel_j agrees with the high-precision power series") {
  double worst = 0.0;
  for (int n = 0; n <= 60; ++n) {
    for (double y = -20.0; y <= 20.0; y += 0.37) {
      worst = std::max(worst, std::abs(bessel_j_signed(n, y) - bessel_series(n, y)));
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("bessel_j agrees with the standard library for large arguments") {
  for (double y : {25.0, 57.3, 120.0, 800.0}) {
    for (int n : {0, 1, 7, 30, 90}) {
      const double ref = std::cyl_bessel_j(static_cast<double>(n), y);
      CHECK(std::abs(bessel_j(n, y) - ref) <= 1e-11);
    }
  }
}

TEST_CASE("bessel sequence, signed orders and edge cases") {
  const auto seq = bessel_j_sequence(40, 6.5);
  REQUIRE(seq.size() == 41);
  for (int n = 0; n <= 40; ++n) CHECK(seq[static_cast<std::size_t>(n)] == doctest::Approx(bessel_j(n, 6.5)).epsilon(1e-13));
  CHECK(bessel_j_signed(-3, 2.0) == doctest::Approx(-bessel_j(3, 2.0)));
  CHECK(bessel_j_signed(-4, 2.0) == doctest::Approx(bessel_j(4, 2.0)));
  CHECK(bessel_j(0, 0.0) == 1.0);
  CHECK(bessel_j(5, 0.0) == 0.0);
  // sum_n J_n^2 = 1
  double s = seq[0] * seq[0];
  for (int n = 1; n <= 40; ++n) s += 2.0 * seq[static_cast<std::size_t>(n)] * seq[static_cast<std::size_t>(n)];
  CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(bessel_j(2, 2e6), std::invalid_argument);
  CHECK_THROWS_AS(bessel_j(-1, 1.0), std::invalid_argument);
}

TEST_CASE("eigensolver reconstructs random tridiagonal matrices") {
  std::mt19937_64 rng(20240611);
  for (int m : {1, 2, 3, 10, 100, 400, 1000}) {
    const auto h = random_tridiagonal(m, rng);
    const auto sp = eig_sym_tridiagonal(h);
    const Eigen::MatrixXd dense = h.dense();
    const Eigen::MatrixXd residual =
        dense * sp.eigenvectors - sp.eigenvectors * sp.eigenvalues.asDiagonal();
    CHECK(residual.norm() / dense.norm() <= 1e-10);
    const Eigen::MatrixXd gram = sp.eigenvectors.transpose() * sp.eigenvectors;
    CHECK((gram - Eigen::MatrixXd::Identity(m, m)).norm() <= 1e-10 * std::sqrt(m));
    for (int a = 1; a < m; ++a) CHECK(sp.eigenvalues(a - 1) <= sp.eigenvalues(a));
    if (m <= 400) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(dense);
      CHECK((ref.eigenvalues() - sp.eigenvalues).cwiseAbs().maxCoeff() <= 1e-11 * std::max(1.0, dense.norm()));
    }
  }
}

TEST_CASE("eigenvector signs are fixed") {
  std::mt19937_64 rng(7);
  const auto sp = eig_sym_tridiagonal(random_tridiagonal(50, rng));
  for (int a = 0; a < 50; ++a) {
    Eigen::Index i = 0;
    sp.eigenvectors.col(a).cwiseAbs().maxCoeff(&i);
    CHECK(sp.eigenvectors(i, a) > 0.0);
  }
}

TEST_CASE("eigensolver handles a tilted lattice and rejects malformed input") {
  SymTridiagonal h;
  for (int k = -20; k <= 20; ++k) h.diag.push_back(k);
  h.offdiag.assign(40, -1.0);
  const auto sp = eig_sym_tridiagonal(h);
  // Interior Wannier-Stark levels are spaced by one.
  CHECK(sp.eigenvalues(21) - sp.eigenvalues(20) == doctest::Approx(1.0).epsilon(1e-10));

  SymTridiagonal bad{{1.0, 2.0}, {0.5, 0.5}};
  CHECK_THROWS_AS(eig_sym_tridiagonal(bad), std::invalid_argument);
  SymTridiagonal nan{{1.0, std::nan("")}, {0.5}};
  CHECK_THROWS_AS(eig_sym_tridiagonal(nan), std::invalid_argument);
}

TEST_CASE("Gauss-Hermite rule integrates normal moments exactly") {
  for (int order : {1, 2, 5, 21, 60}) {
    const auto rule = gauss_hermite(order);
    REQUIRE(rule.size() == static_cast<std::size_t>(order));
    double double_factorial = 1.0;  // (2k-1)!!
    for (int k = 0; 2 * k <= 2 * order - 1; ++k) {
      if (k > 0) double_factorial *= 2 * k - 1;
      double even = 0.0, odd = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i) {
        even += rule.weights[i] * std::pow(rule.nodes[i], 2 * k);
        odd += rule.weights[i] * std::pow(rule.nodes[i], 2 * k + 1);
      }
      if (k <= 12) CHECK(even == doctest::Approx(double_factorial).epsilon(1e-10));
      CHECK(std::abs(odd) <= 1e-10 * double_factorial);
    }
  }
  const auto two = gauss_hermite(2);
  CHECK(two.nodes[0] == doctest::Approx(-1.0));
  CHECK(two.nodes[1] == doctest::Approx(1.0));
  CHECK(two.weights[0] == doctest::Approx(0.5));
  CHECK_THROWS_AS(gauss_hermite(0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_hermite(129), std::invalid_argument);
}

TEST_CASE("Gauss-Hermite expectation matches a trapezoid integral") {
  auto f = [](double z) { return std::cos(1.3 * z) * std::exp(0.2 * z); };
  double trap = 0.0;
  const double h = 1e-3;
  for (double z = -12.0; z <= 12.0; z += h) trap += f(z) * std::exp(-0.5 * z * z);
  trap *= h / std::sqrt(2.0 * std::numbers::pi);
  const auto rule = gauss_hermite(40);
  double gh = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) gh += rule.weights[i] * f(rule.nodes[i]);
  CHECK(gh == doctest::Approx(trap).epsilon(1e-9));
}
