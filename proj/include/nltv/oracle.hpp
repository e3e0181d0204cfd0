#pragma once

#include "nltv/kernel.hpp"
#include "nltv/schemes_1d.hpp"
#include "nltv/schemes_2d.hpp"

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

namespace nltv {

enum class OracleMethod { TensorGauss, MonteCarlo };

struct OracleConfig {
  OracleMethod method = OracleMethod::TensorGauss;
  /// Gauss order per integration piece, in [2, 64].
  int points_per_cell_axis = 16;
  /// Monte Carlo budget per evaluation, at least 1e4.
  std::int64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  double p = 1.0;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct EvalReport {
  double value = 0.0;
  /// Standard error of a Monte Carlo estimate, 0 for Gauss.
  double stderr_estimate = 0.0;
  /// Gauss: difference between the estimate and a coarser one (half order
  /// for piecewise constants, doubled exclusion band otherwise). 0 for MC.
  double richardson_delta = 0.0;
  OracleConfig config;
};

/// Arbitrary function on (0,1). `cells` sets the subdivision used by the
/// Gauss rule; accuracy is only expected for Lipschitz functions.
struct Callback1D {
  std::function<double(double)> f;
  int cells = 32;
};

struct Callback2D {
  std::function<double(double, double)> f;
  int cells = 8;
};

using OracleInput = std::variant<PiecewiseConstant1D, Spline1D, Image2D, Callback1D, Callback2D>;

/// Numerical estimate of the double integral
///   int int |f(x) - f(y)|^p / |x - y|^p phi_n(x - y) dx dy   over Omega^2.
/// Throws std::invalid_argument on a dimension mismatch or p < 1. For
/// piecewise constant input in 1D the value is +inf when p >= 2 and f jumps;
/// 2D piecewise constant input with p >= 2 throws std::domain_error.
EvalReport oracle_eval(const OracleInput& f, const Kernel& kernel, const OracleConfig& cfg);

/// Band excluded around x = y for inputs that are not piecewise constant.
inline constexpr double kDiagonalBand = 1e-6;

/// Cell-pair reduction for piecewise constant functions on a uniform grid:
///   G(d) = int phi(v) |v|^-p overlap_d(v) dv
/// where overlap_d(v) is the measure of the points x of a cell for which x+v
/// lies in the cell displaced by d grid steps. R_n^p of a piecewise constant
/// function is then sum over ordered cell pairs of |a - b|^p G(offset).
/// All factors are computed up front; lookups are read-only.
class GeometricFactors {
public:
  GeometricFactors(const Kernel& kernel, int grid_n, const OracleConfig& cfg);

  int dim() const noexcept { return dim_; }
  int grid_n() const noexcept { return grid_n_; }
  /// Largest |offset| component with a non-zero factor.
  int max_offset() const noexcept { return max_offset_; }

  double operator()(int dx) const;
  double operator()(int dx, int dy) const;
  /// Variance of the MC estimate of the factor (0 for Gauss).
  double variance(int dx, int dy = 0) const;
  /// Gauss: the same factor computed with half the order.
  double coarse(int dx, int dy = 0) const;

private:
  std::size_t slot(int dx, int dy) const;

  int dim_;
  int grid_n_;
  int max_offset_;
  std::vector<double> value_;
  std::vector<double> variance_;
  std::vector<double> coarse_;
};

/// Recovers the 2D stencil weights from oracle evaluations on indicator
/// images by least squares. Requires n in [2, 8] and a 2D kernel kind.
StencilWeights fit_stencil(KernelKind kind, int n, const OracleConfig& cfg);

struct McEstimate {
  double value;
  double stderr_estimate;
};

/// Plain 4D Monte Carlo of the overlap integral of 1/|x - w| between a cell
/// of side 1/n and its lateral (or diagonal) neighbour, with |x - w| < 1/n.
McEstimate overlap_integral_mc(bool diagonal, int n, std::int64_t samples, std::uint64_t seed);

}  // namespace nltv
