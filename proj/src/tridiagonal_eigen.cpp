#include "sboi/errors.hpp"
#include "sboi/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sboi::numerics {

void SymTridiagonal::validate() const {
  if (diag.empty()) {
    throw std::invalid_argument("SymTridiagonal: dimension must be at least 1");
  }
  if (offdiag.size() + 1 != diag.size()) {
    throw std::invalid_argument("SymTridiagonal: offdiag must be one shorter than diag");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(diag.begin(), diag.end(), finite) ||
      !std::all_of(offdiag.begin(), offdiag.end(), finite)) {
    throw std::invalid_argument("SymTridiagonal: non-finite entry");
  }
}

Eigen::MatrixXd SymTridiagonal::dense() const {
  const auto n = static_cast<Eigen::Index>(diag.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = diag[i];
    if (i + 1 < n) {
      m(i, i + 1) = offdiag[i];
      m(i + 1, i) = offdiag[i];
    }
  }
  return m;
}

Spectrum eig_sym_tridiagonal(const SymTridiagonal& h) {
  h.validate();
  const auto n = static_cast<Eigen::Index>(h.size());

  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(h.diag.data(), n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) e(i) = h.offdiag[i];
  Eigen::MatrixXd z = Eigen::MatrixXd::Identity(n, n);

  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (Eigen::Index l = 0; l < n; ++l) {
    int iterations = 0;
    Eigen::Index m = l;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d(m)) + std::abs(d(m + 1));
        if (std::abs(e(m)) <= eps * dd) break;
      }
      if (m == l) break;
      if (++iterations > kMaxQlIterations) {
        throw NumericalError("eig_sym_tridiagonal: no convergence for eigenvalue " +
                             std::to_string(l) + " after " +
                             std::to_string(kMaxQlIterations) + " iterations");
      }
      // Wilkinson-type shift from the leading 2x2 block.
      double g = (d(l + 1) - d(l)) / (2.0 * e(l));
      double r = std::hypot(g, 1.0);
      g = d(m) - d(l) + e(l) / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool underflow = false;
      for (Eigen::Index i = m - 1; i >= l; --i) {
        const double f = s * e(i);
        const double b = c * e(i);
        r = std::hypot(f, g);
        e(i + 1) = r;
        if (r == 0.0) {
          d(i + 1) -= p;
          e(m) = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d(i + 1) - p;
        r = (d(i) - g) * s + 2.0 * c * b;
        p = s * r;
        d(i + 1) = g + p;
        g = c * r - b;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double t = z(k, i + 1);
          z(k, i + 1) = s * z(k, i) + c * t;
          z(k, i) = c * z(k, i) - s * t;
        }
      }
      if (underflow) continue;
      d(l) -= p;
      e(l) = g;
      e(m) = 0.0;
    } while (m != l);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return d(a) < d(b); });

  Spectrum out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const Eigen::Index src = order[static_cast<std::size_t>(a)];
    out.eigenvalues(a) = d(src);
    Eigen::VectorXd col = z.col(src);
    col.normalize();
    Eigen::Index pivot = 0;
    col.cwiseAbs().maxCoeff(&pivot);
    if (col(pivot) < 0.0) col = -col;
    out.eigenvectors.col(a) = col;
  }
  return out;
}

}  // namespace sboi::numerics
