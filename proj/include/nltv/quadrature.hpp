#pragma once

#include <vector>

namespace nltv {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const noexcept { return static_cast<int>(nodes.size()); }

  /// Integral of f over [a, b].
  template <typename F>
  double integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(mid + half * nodes[i]);
    return sum * half;
  }
};

/// Newton iteration on P_n; accurate to machine precision for n <= 128.
GaussRule gauss_legendre(int n);

/// Pairwise (tree) summation. The result depends only on the order of the
/// input, and the rounding error grows as O(log n).
double pairwise_sum(const double* begin, std::size_t count);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace nltv
