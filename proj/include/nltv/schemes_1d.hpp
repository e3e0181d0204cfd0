#pragma once

#include <vector>

namespace nltv {

/// Piecewise constant function on (0,1): coeffs[i] is the value on cell
/// [i/n, (i+1)/n] for i = 0..n-1.
class PiecewiseConstant1D {
public:
  /// Throws std::invalid_argument on an empty vector or non-finite entries.
  explicit PiecewiseConstant1D(std::vector<double> coeffs);

  int n() const noexcept { return static_cast<int>(coeffs_.size()); }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  double operator[](int i) const { return coeffs_[i]; }
  double operator()(double x) const noexcept;

private:
  std::vector<double> coeffs_;
};

/// Continuous piecewise linear spline through (k/n, nodes[k]), k = 0..n.
class Spline1D {
public:
  /// Throws std::invalid_argument unless there are at least two finite nodes.
  explicit Spline1D(std::vector<double> nodes);

  int n() const noexcept { return static_cast<int>(nodes_.size()) - 1; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  double operator[](int k) const { return nodes_[k]; }
  double operator()(double x) const noexcept;

private:
  std::vector<double> nodes_;
};

/// Haar function h_j^(k): k = 0 allows j in {0, 1}; k >= 1 needs 1 <= j <= 2^k.
struct HaarIndex {
  int k = 0;
  int j = 0;

  bool valid() const noexcept;
};

/// h_j^(k) sampled on the dyadic grid of 2^(k+1) cells.
PiecewiseConstant1D haar_function(HaarIndex h);

// Closed-form R_n^1 evaluators. The kernel scale equals the grid size n.

/// Box kernel: the discrete total variation sum |a_i - a_{i-1}|.
double eval_pc_box(const PiecewiseConstant1D& f);

/// Wide box kernel (n/4 on [-2/n, 2/n]). Requires n >= 2.
double eval_pc_box_wide(const PiecewiseConstant1D& f);

/// The coupling term t(a_{i-1}, a_i, a_{i+1}) of the spline scheme.
double spline_coupling(double left, double mid, double right) noexcept;

/// Box kernel on a linear spline. Requires n >= 2.
double eval_spline(const Spline1D& f);

/// R_n^1(h_j^(k)) under the box kernel of (real) scale n >= 1. Indices in the
/// upper half are mapped to their mirror image. Throws std::invalid_argument
/// for invalid indices and std::domain_error when n falls between branches.
double eval_haar(HaarIndex h, double n);

/// Values of every Haar branch formula whose scale range contains n (two at
/// a breakpoint, none in a gap). eval_haar returns the last, so the stated
/// constants hold exactly from n = 2^(k+1) on.
std::vector<double> haar_branch_values(HaarIndex h, double n);

}  // namespace nltv
