#include "sboi/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sboi::numerics {
namespace {

constexpr double kMaxArgument = 1e6;
constexpr double kRescaleAbove = 1e250;

int starting_order(int max_order, double ay) {
  const double margin = std::max(20.0, ay + 15.0 * std::cbrt(ay));
  int start = max_order + static_cast<int>(std::ceil(margin));
  if (start % 2 != 0) ++start;
  return start;
}

}  // namespace

std::vector<double> bessel_j_sequence(int max_order, double y) {
  if (max_order < 0) throw std::invalid_argument("bessel_j_sequence: negative order");
  if (!(std::abs(y) <= kMaxArgument)) {
    throw std::invalid_argument("bessel_j_sequence: |argument| must not exceed 1e6");
  }
  std::vector<double> out(static_cast<std::size_t>(max_order) + 1, 0.0);
  if (y == 0.0) {
    out[0] = 1.0;
    return out;
  }

  const double ay = std::abs(y);
  const int start = starting_order(max_order, ay);
  const double two_over_y = 2.0 / ay;

  // Backward recurrence J_{k-1} = (2k/y) J_k - J_{k+1} from an arbitrary seed;
  // the even-order sum rule J_0 + 2 sum J_2k = 1 fixes the normalisation.
  double above = 0.0;
  double current = 1e-30;
  double norm_sum = 0.0;
  for (int k = start; k >= 1; --k) {
    if (k <= max_order) out[static_cast<std::size_t>(k)] = current;
    if (k % 2 == 0) norm_sum += 2.0 * current;
    const double below = k * two_over_y * current - above;
    above = current;
    current = below;
    if (std::abs(current) > kRescaleAbove) {
      current /= kRescaleAbove;
      above /= kRescaleAbove;
      norm_sum /= kRescaleAbove;
      for (int j = k; j <= max_order; ++j) out[static_cast<std::size_t>(j)] /= kRescaleAbove;
    }
  }
  out[0] = current;
  norm_sum += current;

  const double scale = 1.0 / norm_sum;
  for (double& v : out) v *= scale;
  if (y < 0.0) {
    for (std::size_t k = 1; k < out.size(); k += 2) out[k] = -out[k];
  }
  return out;
}

double bessel_j(int order, double y) {
  if (order < 0) throw std::invalid_argument("bessel_j: order must be non-negative");
  return bessel_j_sequence(order, y)[static_cast<std::size_t>(order)];
}

double bessel_j_signed(int order, double y) {
  if (order >= 0) return bessel_j(order, y);
  const double v = bessel_j(-order, y);
  return (order % 2 == 0) ? v : -v;
}

}  // namespace sboi::numerics
