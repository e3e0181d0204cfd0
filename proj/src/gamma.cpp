#include "nltv/gamma.hpp"

#include "nltv/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nltv {

std::string to_string(GammaReference r) {
  switch (r) {
    case GammaReference::TautString: return "taut-string";
    case GammaReference::Sobolev: return "sobolev";
    case GammaReference::FinestScale: return "finest-scale";
  }
  return "unknown";
}

namespace {

struct Hat {
  int k[2];
  double w[2];
};

// Weights of the two nodes spanning cell `cell` for evaluating at x.
Hat hat_at(int cell, double x, double h) {
  const double s = x / h - cell;
  return {{cell, cell + 1}, {1.0 - s, s}};
}

double l1_distance(const std::vector<double>& u, const std::vector<double>& v, double cell) {
  std::vector<double> t(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) t[i] = std::abs(u[i] - v[i]);
  return cell * pairwise_sum(t);
}

}  // namespace

std::vector<double> spline_sobolev_form(int nodes, const Kernel& kernel, int gauss_points) {
  if (nodes < 2) throw std::invalid_argument("spline_sobolev_form: need at least two nodes");
  if (kernel.dim() != 1) throw std::invalid_argument("spline_sobolev_form: kernel must be 1D");
  const int cells = nodes - 1;
  const double h = 1.0 / cells;
  const double top = std::min(kernel.reach(), 1.0);
  const double height = kernel.height();
  const GaussRule rule = gauss_legendre(gauss_points);
  std::vector<double> q(static_cast<std::size_t>(nodes) * nodes, 0.0);

  auto accumulate = [&](double t, double weight) {
    // x ranges over (0, 1 - t); the integrand is piecewise linear in x
    // between the breakpoints k h and k h - t.
    std::vector<double> cuts{0.0, 1.0 - t};
    for (int k = 1; k < cells; ++k) {
      const double x = k * h;
      if (x < 1.0 - t) cuts.push_back(x);
      if (x - t > 0.0 && x - t < 1.0 - t) cuts.push_back(x - t);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      const double x0 = cuts[s];
      const double x1 = cuts[s + 1];
      const double len = x1 - x0;
      if (len <= 0.0) continue;
      const double mid = 0.5 * (x0 + x1);
      const int c_here = std::clamp(static_cast<int>(std::floor(mid / h)), 0, cells - 1);
      const int c_there = std::clamp(static_cast<int>(std::floor((mid + t) / h)), 0, cells - 1);
      // g(x) = b(x + t) - b(x) at both ends, as four weighted node indices.
      int idx[4];
      double g0[4];
      double g1[4];
      const Hat a0 = hat_at(c_there, x0 + t, h), a1 = hat_at(c_there, x1 + t, h);
      const Hat b0 = hat_at(c_here, x0, h), b1 = hat_at(c_here, x1, h);
      for (int r = 0; r < 2; ++r) {
        idx[r] = a0.k[r];
        g0[r] = a0.w[r];
        g1[r] = a1.w[r];
        idx[2 + r] = b0.k[r];
        g0[2 + r] = -b0.w[r];
        g1[2 + r] = -b1.w[r];
      }
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
          const double m = len / 3.0 * (g0[r] * g0[c] + g1[r] * g1[c]) + len / 6.0 * (g0[r] * g1[c] + g1[r] * g0[c]);
          q[static_cast<std::size_t>(idx[r]) * nodes + idx[c]] += weight * m;
        }
      }
    }
  };

  constexpr int kSubdivisions = 2;
  for (int j = 0; j * h < top; ++j) {
    const double a = j * h;
    const double b = std::min(top, (j + 1) * h);
    const double step = (b - a) / kSubdivisions;
    for (int s = 0; s < kSubdivisions; ++s) {
      const double lo = a + s * step;
      const double half = 0.5 * step;
      for (int g = 0; g < rule.size(); ++g) {
        const double t = lo + half * (1.0 + rule.nodes[g]);
        accumulate(t, 2.0 * height * half * rule.weights[g] / (t * t));
      }
    }
  }
  return q;
}

GammaTable gamma_experiment(const DataTerm& data, double p, double alpha, const std::vector<double>& scales,
                            const GammaOptions& options) {
  data.validate();
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (scales.empty()) throw std::invalid_argument("gamma: need at least one scale");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0)) throw std::invalid_argument("gamma: scales must be positive");
    if (i > 0 && !(scales[i] > scales[i - 1])) throw std::invalid_argument("gamma: scales must be increasing");
  }
  const int n = data.grid_n;
  const int dim = data.dim;
  const double cell = data.cell_measure();
  const bool spline = dim == 1 && p == 2.0;
  const int resolution = spline ? n - 1 : n;
  if (scales.back() > resolution) throw std::invalid_argument("gamma: scales must not exceed the grid resolution");
  if (dim == 1 && p != 1.0 && p != 2.0) throw std::invalid_argument("gamma: 1D runs support p = 1 or p = 2");
  if (dim == 2 && !(p >= 1.0 && p < 2.0)) throw std::invalid_argument("gamma: 2D runs need 1 <= p < 2");
  const Kernel probe(options.kernel, 1.0);
  if (probe.dim() != dim) throw std::invalid_argument("gamma: kernel dimension does not match the data");

  GammaTable table;
  const double kp = kpn(p, dim).value;
  std::vector<std::vector<double>> minimizers;

  if (spline) {
    if (n < 2) throw std::invalid_argument("gamma: need at least two nodes");
    // Nodal fidelity h * 1/2 sum (u - d)^2; the limit penalty is
    // alpha * int |u'|^2 = alpha / h * sum (u_{i+1} - u_i)^2.
    const double h = 1.0 / resolution;
    table.reference = GammaReference::Sobolev;
    table.limit = sobolev_1d(data.data, alpha / (kp * h * h));
    const Eigen::Map<const Eigen::VectorXd> d(data.data.data(), n);
    for (double scale : scales) {
      const Kernel kernel(options.kernel, scale);
      const std::vector<double> qv = spline_sobolev_form(n, kernel);
      const Eigen::Map<const Eigen::MatrixXd> q(qv.data(), n, n);
      Eigen::MatrixXd system = (2.0 * alpha / kp) * q;
      system.diagonal().array() += h;
      const Eigen::VectorXd u = system.ldlt().solve(h * d);
      std::vector<double> uv(u.data(), u.data() + n);
      GammaRow row;
      row.scale = scale;
      row.energy = h * 0.5 * (u - d).squaredNorm() + alpha / kp * u.dot(q * u);
      row.iterations = 1;
      row.converged = u.allFinite();
      row.distance = l1_distance(uv, table.limit, h);
      table.rows.push_back(row);
    }
    return table;
  }

  for (double scale : scales) {
    EnergyParams params;
    params.p = p;
    params.alpha = alpha;
    params.kernel = Kernel(options.kernel, scale);
    params.grid_n = n;
    params.scheme = Scheme::Oracle;
    params.oracle = options.oracle;
    DenoiseResult r = denoise(data, params, options.solver);
    GammaRow row;
    row.scale = scale;
    row.energy = r.energy_trace.empty() ? 0.0 : r.energy_trace.back();
    row.iterations = r.iterations;
    row.converged = r.converged;
    table.rows.push_back(row);
    minimizers.push_back(std::move(r.minimizer));
  }
  if (dim == 1) {
    table.reference = GammaReference::TautString;
    table.limit = taut_string_1d(data.data, alpha / (kp * cell));
  } else {
    table.reference = GammaReference::FinestScale;
    table.limit = minimizers.back();
  }
  for (std::size_t i = 0; i < minimizers.size(); ++i) {
    table.rows[i].distance = l1_distance(minimizers[i], table.limit, cell);
  }
  return table;
}

}  // namespace nltv
