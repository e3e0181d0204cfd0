#include "nltv/schemes_2d.hpp"

#include "nltv/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nltv {

Image2D::Image2D(int n, std::vector<double> values) : n_(n), values_(std::move(values)) {
  if (n < 1) throw std::invalid_argument("Image2D: side must be >= 1");
  if (values_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    throw std::invalid_argument("Image2D: expected " + std::to_string(n * n) + " values, got " +
                                std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("Image2D: non-finite value");
  }
}

Image2D Image2D::constant(int n, double value) {
  return Image2D(n, std::vector<double>(static_cast<std::size_t>(n) * n, value));
}

double Image2D::at(double x, double y) const noexcept {
  const int i = std::clamp(static_cast<int>(std::floor(x * n_)), 0, n_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor(y * n_)), 0, n_ - 1);
  return (*this)(i, j);
}

Image2D Image2D::transposed() const {
  Image2D out = *this;
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i) out(i, j) = (*this)(j, i);
  return out;
}

Image2D Image2D::rotated90() const {
  Image2D out = *this;
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i) out(n_ - 1 - j, i) = (*this)(i, j);
  return out;
}

StencilWeights stencil_weights(KernelKind kind, int n) {
  if (n < 2) throw std::invalid_argument("stencil_weights: n must be >= 2");
  const double nd = n;
  switch (kind) {
    case KernelKind::Disc2D:
      return {4.0 / (3.0 * std::numbers::pi * nd), 1.0 / (3.0 * std::numbers::pi * nd), kind, n};
    case KernelKind::Square2D: {
      const double r2 = std::numbers::sqrt2;
      const double lateral =
          (3.0 * std::log(r2 + 1.0) - 3.0 * std::log(r2 - 1.0) - 2.0 * (r2 - 1.0)) / (12.0 * nd);
      return {lateral, (r2 - 1.0) / (3.0 * nd), kind, n};
    }
    default: break;
  }
  throw std::invalid_argument("stencil_weights: kernel must be disc or square");
}

NeighbourSums neighbour_sums(const Image2D& f) {
  const int n = f.n();
  std::vector<double> lateral;
  std::vector<double> diagonal;
  lateral.reserve(2 * static_cast<std::size_t>(n) * n);
  diagonal.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (j > 0) lateral.push_back(std::abs(f(i, j) - f(i, j - 1)));
      if (i > 0) lateral.push_back(std::abs(f(i, j) - f(i - 1, j)));
      if (i > 0 && j > 0) diagonal.push_back(std::abs(f(i, j) - f(i - 1, j - 1)));
      if (i + 1 < n && j > 0) diagonal.push_back(std::abs(f(i, j) - f(i + 1, j - 1)));
    }
  }
  std::sort(lateral.begin(), lateral.end());
  std::sort(diagonal.begin(), diagonal.end());
  return {pairwise_sum(lateral), pairwise_sum(diagonal)};
}

double eval_image(const Image2D& f, KernelKind kind) {
  if (f.n() < 2) throw std::invalid_argument("eval_image: n must be >= 2");
  const StencilWeights w = stencil_weights(kind, f.n());
  const NeighbourSums s = neighbour_sums(f);
  return w.lateral * s.lateral + w.diagonal * s.diagonal;
}

double lateral_overlap_integral(int n) {
  if (n < 1) throw std::invalid_argument("lateral_overlap_integral: n must be >= 1");
  const double nd = n;
  return 2.0 / (3.0 * nd * nd * nd);
}

double diagonal_overlap_integral(int n) {
  if (n < 1) throw std::invalid_argument("diagonal_overlap_integral: n must be >= 1");
  const double nd = n;
  return 1.0 / (6.0 * nd * nd * nd);
}

}  // namespace nltv
