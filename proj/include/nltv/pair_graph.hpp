#pragma once

#include "nltv/kernel.hpp"
#include "nltv/oracle.hpp"

#include <vector>

namespace nltv {

/// Weighted pairs of grid cells. The regularizer of a coefficient vector u is
///   sum_e weight[e] * |u[a[e]] - u[b[e]]|^p.
/// Cells of an n x n image are numbered row-major (j * n + i).
struct PairGraph {
  int nodes = 0;
  std::vector<int> a;
  std::vector<int> b;
  std::vector<double> weight;

  std::size_t edges() const noexcept { return weight.size(); }
  void add(int u, int v, double w);
  double regularizer(const std::vector<double>& u, double p) const;
};

/// Neighbour graph of the closed-form 1D schemes on n cells: weight 1 between
/// neighbours for the box kernel; ln 2 and (1 - ln 2)/2 at offsets 1 and 2 for
/// the wide box. Requires n >= 2 for the wide box.
PairGraph closed_form_graph_1d(KernelKind kind, int n);

/// Lateral and diagonal neighbours of an n x n image with the closed-form
/// stencil weights. Requires n >= 2.
PairGraph closed_form_graph_2d(KernelKind kind, int n);

/// Every cell pair within kernel reach, weighted by twice its geometric
/// factor, so regularizer(u, p) equals the oracle value of u for the
/// exponent the factors were computed with.
PairGraph factor_graph(const GeometricFactors& g);

}  // namespace nltv
