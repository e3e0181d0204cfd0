#include "nltv/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nltv {

GaussRule gauss_legendre(int n) {
  if (n < 1 || n > 128) throw std::invalid_argument("gauss_legendre: order must be in [1, 128]");
  if (n == 1) return {{0.0}, {2.0}};
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

double pairwise_sum(const double* begin, std::size_t count) {
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += begin[i];
    return s;
  }
  const std::size_t mid = count / 2;
  return pairwise_sum(begin, mid) + pairwise_sum(begin + mid, count - mid);
}

}  // namespace nltv
