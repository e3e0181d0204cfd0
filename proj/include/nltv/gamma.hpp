#pragma once

#include "nltv/kernel.hpp"
#include "nltv/minimizer.hpp"

#include <string>
#include <vector>

namespace nltv {

struct GammaRow {
  double scale = 0.0;
  /// L1 distance to the reference minimizer.
  double distance = 0.0;
  /// Energy of the minimizer at this scale.
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;
};

enum class GammaReference { TautString, Sobolev, FinestScale };

struct GammaTable {
  std::vector<GammaRow> rows;
  GammaReference reference = GammaReference::TautString;
  /// The reference minimizer (nodal values for p = 2 in 1D).
  std::vector<double> limit;
};

struct GammaOptions {
  /// Box1D or Box1DWide for 1D data, Disc2D or Square2D for images.
  KernelKind kernel = KernelKind::Box1D;
  SolverConfig solver{};
  OracleConfig oracle{};
};

/// Minimizes the energy on the fixed grid of `data` for each kernel scale and
/// reports the L1 distance of each minimizer to the limit problem's
/// minimizer.
///   1D, p = 1   piecewise constants; limit by the taut string
///   1D, p = 2   data are spline nodes; limit by the discrete Sobolev solve
///   2D, 1 <= p < 2   distances to the minimizer at the largest scale
/// Scales must be strictly increasing and at most the grid size.
GammaTable gamma_experiment(const DataTerm& data, double p, double alpha, const std::vector<double>& scales,
                            const GammaOptions& options = {});

std::string to_string(GammaReference r);

/// Matrix of the quadratic form R(u) = u^T Q u of the p = 2 regularizer on
/// the linear spline with nodes u (row-major, size (m x m) for m nodes).
std::vector<double> spline_sobolev_form(int nodes, const Kernel& kernel, int gauss_points = 8);

}  // namespace nltv
