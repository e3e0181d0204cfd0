#pragma once

#include "nltv/kernel.hpp"

#include <vector>

namespace nltv {

/// Piecewise constant image on (0,1)^2 with n x n square cells.
///
/// Index convention: a(i, j) is the value on the cell ((i-1)/n, i/n) x
/// ((j-1)/n, j/n) written with 0-based i (column, along x) and j (row,
/// along y). Storage is row-major: values()[j * n + i].
class Image2D {
public:
  /// Throws std::invalid_argument unless values.size() == n * n, n >= 1 and
  /// all entries are finite.
  Image2D(int n, std::vector<double> values);

  static Image2D constant(int n, double value);

  int n() const noexcept { return n_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  double operator()(int i, int j) const { return values_[static_cast<std::size_t>(j) * n_ + i]; }
  double& operator()(int i, int j) { return values_[static_cast<std::size_t>(j) * n_ + i]; }

  /// Point evaluation on (0,1)^2.
  double at(double x, double y) const noexcept;

  Image2D transposed() const;
  /// Rotation by 90 degrees counter-clockwise.
  Image2D rotated90() const;

private:
  int n_;
  std::vector<double> values_;
};

/// Weights per unordered neighbour pair: `lateral` for edge-adjacent cells,
/// `diagonal` for corner-adjacent cells.
struct StencilWeights {
  double lateral;
  double diagonal;
  KernelKind kernel_kind;
  int n;
};

/// Closed-form weights for the disc and square kernels matched to an n x n
/// grid. Throws std::invalid_argument for n < 2 or a 1D kernel kind.
StencilWeights stencil_weights(KernelKind kind, int n);

/// Sums of |a - b| over all lateral and all diagonal neighbour pairs. Each
/// sum is formed from the sorted terms, so it is invariant under any
/// symmetry of the grid that maps pairs to pairs of the same type.
struct NeighbourSums {
  double lateral;
  double diagonal;
};
NeighbourSums neighbour_sums(const Image2D& f);

/// Closed-form R_n^1 of a piecewise constant image. Requires n >= 2.
double eval_image(const Image2D& f, KernelKind kind);

/// The quadruple integral of 1/|x - w| over two laterally adjacent cells of
/// side 1/n restricted to |x - w| < 1/n.
double lateral_overlap_integral(int n);
/// Same for diagonally adjacent cells.
double diagonal_overlap_integral(int n);

}  // namespace nltv
