#pragma once

#include <Eigen/Dense>

#include <vector>

namespace sboi::numerics {

/// Real symmetric tridiagonal matrix stored by its two bands.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> offdiag;  // offdiag[i] couples rows i and i+1

  std::size_t size() const { return diag.size(); }

  /// Throws std::invalid_argument on mismatched band lengths or
  /// non-finite entries.
  void validate() const;

  Eigen::MatrixXd dense() const;
};

/// Eigendecomposition H = Q diag(eigenvalues) Q^T.
///
/// Eigenvalues are sorted ascending and column a of `eigenvectors` belongs to
/// eigenvalue a. Each column is normalised and its largest-magnitude entry is
/// positive, so the decomposition is reproducible bit for bit.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix.
/// Throws NumericalError when an eigenvalue fails to converge within
/// `kMaxQlIterations` sweeps.
Spectrum eig_sym_tridiagonal(const SymTridiagonal& h);

inline constexpr int kMaxQlIterations = 50;

/// Bessel function of the first kind J_n(y) for integer n >= 0.
///
/// Miller backward recurrence normalised by J_0 + 2 sum_k J_2k = 1.
/// Requires |y| <= 1e6. Negative orders follow from J_{-n} = (-1)^n J_n.
double bessel_j(int order, double y);

/// J_0(y) ... J_{max_order}(y) from a single backward recurrence.
std::vector<double> bessel_j_sequence(int max_order, double y);

/// Signed-order variant: J_n(y) for any integer n.
double bessel_j_signed(int order, double y);

/// Gauss quadrature for expectations over a standard normal variable.
///
/// Convention: E[f(Z)] for Z ~ N(0, 1) is approximated by
/// sum_i weights[i] * f(nodes[i]). Weights sum to one; the rule for a normal
/// variable with mean mu and width s uses the nodes mu + s * nodes[i].
/// Order 2 therefore gives nodes -1, +1 with weights 1/2.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Probabilists' Gauss-Hermite rule via Golub-Welsch. Exact for
/// polynomials of degree <= 2*order - 1. Requires 1 <= order <= 128.
QuadratureRule gauss_hermite(int order);

}  // namespace sboi::numerics
