#pragma once

#include "nltv/kernel.hpp"
#include "nltv/oracle.hpp"
#include "nltv/pair_graph.hpp"
#include "nltv/schemes_2d.hpp"

#include <optional>
#include <vector>

namespace nltv {

/// How the regularizer is discretized.
///   ClosedForm1D  stencil of the box / wide box kernel, kernel scale == grid
///   ClosedForm2D  lateral + diagonal stencil of the disc / square kernel
///   Oracle        all cell pairs weighted by numerically integrated factors;
///                 the kernel scale is independent of the grid
enum class Scheme { ClosedForm1D, ClosedForm2D, Oracle };

struct EnergyParams {
  double p = 1.0;
  double alpha = 0.1;
  Kernel kernel{KernelKind::Box1D, 1.0};
  int grid_n = 1;
  Scheme scheme = Scheme::ClosedForm1D;
  /// Quadrature settings for the Oracle scheme (its `p` is overridden).
  OracleConfig oracle{};

  /// Throws std::invalid_argument on alpha <= 0, p < 1 or a scheme that does
  /// not fit the kernel and grid.
  void validate() const;
};

/// Noisy data on a uniform grid of (0,1)^dim; 2D data is row-major n x n.
struct DataTerm {
  std::vector<double> data;
  int dim = 1;
  int grid_n = 0;

  static DataTerm from_signal(std::vector<double> values);
  static DataTerm from_image(const Image2D& image);

  /// Lebesgue measure of one cell, grid_n^-dim.
  double cell_measure() const;
  void validate() const;
};

enum class SolverMethod { PrimalDual, Smoothed };

struct SolverConfig {
  SolverMethod method = SolverMethod::PrimalDual;
  /// Relative energy decrement for the smooth solvers.
  double tol = 1e-8;
  /// Primal-dual: stop once the duality gap falls below gap_tol * max(1, P).
  double gap_tol = 1e-10;
  /// Smooth solvers: stop once the gradient norm falls below grad_tol.
  double grad_tol = 1e-11;
  int max_iter = 100'000;
  /// Smoothing of |t| for the Smoothed method at p = 1.
  double eps = 1e-8;
  /// Consecutive small decrements required before stopping.
  int patience = 5;
  std::optional<std::vector<double>> init;

  void validate() const;
};

struct DenoiseResult {
  std::vector<double> minimizer;
  /// Energy of the best iterate so far, one entry per iteration.
  std::vector<double> energy_trace;
  int iterations = 0;
  bool converged = false;
  double fidelity_value = 0.0;
  double regularizer_value = 0.0;
};

/// Pair graph of the configured scheme (weights before alpha / K_{p,N}).
PairGraph build_graph(const EnergyParams& params);

/// cell_measure * 1/2 sum (f - d)^2 + alpha / K_{p,N} * R(f).
double energy(const std::vector<double>& f, const DataTerm& data, const EnergyParams& params);

/// Minimizes the energy over coefficient vectors. Non-convergence is
/// reported through DenoiseResult::converged.
DenoiseResult denoise(const DataTerm& data, const EnergyParams& params, const SolverConfig& solver = {});

/// Same, on a prebuilt graph R(u) = sum w_e |u_a - u_b|^p scaled by `beta`
/// (alpha / K_{p,N} in the energy).
DenoiseResult denoise_graph(const std::vector<double>& data, double cell_measure, const PairGraph& graph,
                            double p, double beta, const SolverConfig& solver);

/// Exact minimizer of 1/2 sum (u_i - d_i)^2 + lambda sum |u_{i+1} - u_i|.
std::vector<double> taut_string_1d(const std::vector<double>& data, double lambda);

/// Exact minimizer of 1/2 sum (u_i - d_i)^2 + lambda sum (u_{i+1} - u_i)^2
/// by a tridiagonal solve.
std::vector<double> sobolev_1d(const std::vector<double>& data, double lambda);

}  // namespace nltv
