#include "sboi/numerics.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sboi::numerics {

QuadratureRule gauss_hermite(int order) {
  if (order < 1 || order > 128) {
    throw std::invalid_argument("gauss_hermite: order must lie in [1, 128]");
  }
  // Jacobi matrix of the monic probabilists' Hermite polynomials:
  // x He_k = He_{k+1} + k He_{k-1}.
  SymTridiagonal jacobi;
  jacobi.diag.assign(static_cast<std::size_t>(order), 0.0);
  jacobi.offdiag.resize(static_cast<std::size_t>(order) - 1);
  for (int k = 1; k < order; ++k) jacobi.offdiag[static_cast<std::size_t>(k) - 1] = std::sqrt(double(k));

  const Spectrum spec = eig_sym_tridiagonal(jacobi);
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  for (int a = 0; a < order; ++a) {
    const double v0 = spec.eigenvectors(0, a);
    rule.nodes[static_cast<std::size_t>(a)] = spec.eigenvalues(a);
    rule.weights[static_cast<std::size_t>(a)] = v0 * v0;
  }
  // Symmetrise: the exact rule is symmetric about zero.
  for (int a = 0, b = order - 1; a < b; ++a, --b) {
    const double x = 0.5 * (rule.nodes[a] - rule.nodes[b]);
    const double w = 0.5 * (rule.weights[a] + rule.weights[b]);
    rule.nodes[a] = x;
    rule.nodes[b] = -x;
    rule.weights[a] = w;
    rule.weights[b] = w;
  }
  if (order % 2 == 1) rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
  const double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
  for (double& w : rule.weights) w /= total;
  return rule;
}

}  // namespace sboi::numerics
