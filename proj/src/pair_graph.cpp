#include "nltv/pair_graph.hpp"

#include "nltv/quadrature.hpp"
#include "nltv/schemes_2d.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nltv {

void PairGraph::add(int u, int v, double w) {
  if (w == 0.0) return;
  a.push_back(u);
  b.push_back(v);
  weight.push_back(w);
}

double PairGraph::regularizer(const std::vector<double>& u, double p) const {
  if (u.size() != static_cast<std::size_t>(nodes)) {
    throw std::invalid_argument("PairGraph: coefficient count does not match the grid");
  }
  std::vector<double> terms(weight.size());
  for (std::size_t e = 0; e < weight.size(); ++e) {
    const double d = std::abs(u[a[e]] - u[b[e]]);
    // A zero jump contributes nothing, even across an infinite weight.
    terms[e] = d == 0.0 ? 0.0 : weight[e] * (p == 1.0 ? d : std::pow(d, p));
  }
  return pairwise_sum(terms);
}

PairGraph closed_form_graph_1d(KernelKind kind, int n) {
  if (n < 1) throw std::invalid_argument("closed_form_graph_1d: n must be >= 1");
  PairGraph g;
  g.nodes = n;
  if (kind == KernelKind::Box1D) {
    for (int i = 0; i + 1 < n; ++i) g.add(i, i + 1, 1.0);
    return g;
  }
  if (kind == KernelKind::Box1DWide) {
    if (n < 2) throw std::invalid_argument("closed_form_graph_1d: wide box needs n >= 2");
    const double ln2 = std::numbers::ln2;
    for (int i = 0; i + 1 < n; ++i) g.add(i, i + 1, ln2);
    for (int i = 0; i + 2 < n; ++i) g.add(i, i + 2, (1.0 - ln2) / 2.0);
    return g;
  }
  throw std::invalid_argument("closed_form_graph_1d: kernel must be box or box2");
}

PairGraph closed_form_graph_2d(KernelKind kind, int n) {
  const StencilWeights w = stencil_weights(kind, n);
  PairGraph g;
  g.nodes = n * n;
  auto id = [n](int i, int j) { return j * n + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i + 1 < n) g.add(id(i, j), id(i + 1, j), w.lateral);
      if (j + 1 < n) g.add(id(i, j), id(i, j + 1), w.lateral);
      if (i + 1 < n && j + 1 < n) g.add(id(i, j), id(i + 1, j + 1), w.diagonal);
      if (i > 0 && j + 1 < n) g.add(id(i, j), id(i - 1, j + 1), w.diagonal);
    }
  }
  return g;
}

PairGraph factor_graph(const GeometricFactors& f) {
  const int n = f.grid_n();
  const int m = std::min(f.max_offset(), n - 1);
  PairGraph g;
  if (f.dim() == 1) {
    g.nodes = n;
    for (int d = 1; d <= m; ++d) {
      const double w = 2.0 * f(d);
      for (int i = 0; i + d < n; ++i) g.add(i, i + d, w);
    }
    return g;
  }
  g.nodes = n * n;
  for (int dy = 0; dy <= m; ++dy) {
    for (int dx = -m; dx <= m; ++dx) {
      if (dy == 0 && dx <= 0) continue;
      const double w = 2.0 * f(dx, dy);
      if (w == 0.0) continue;
      for (int j = 0; j + dy < n; ++j) {
        for (int i = std::max(0, -dx); i < std::min(n, n - dx); ++i) g.add(j * n + i, (j + dy) * n + i + dx, w);
      }
    }
  }
  return g;
}

}  // namespace nltv
