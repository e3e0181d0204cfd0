#include "nltv/minimizer.hpp"

#include "nltv/quadrature.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nltv {

void EnergyParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be positive");
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must be >= 1");
  if (grid_n < 1) throw std::invalid_argument("grid_n must be >= 1");
  const bool matched = kernel.scale() == static_cast<double>(grid_n);
  switch (scheme) {
    case Scheme::ClosedForm1D:
      if (kernel.dim() != 1) throw std::invalid_argument("ClosedForm1D needs a 1D kernel");
      if (!matched) throw std::invalid_argument("closed-form schemes need kernel scale == grid_n");
      if (kernel.kind() == KernelKind::Box1DWide && grid_n < 2) {
        throw std::invalid_argument("wide box scheme needs grid_n >= 2");
      }
      break;
    case Scheme::ClosedForm2D:
      if (kernel.dim() != 2) throw std::invalid_argument("ClosedForm2D needs a 2D kernel");
      if (!matched) throw std::invalid_argument("closed-form schemes need kernel scale == grid_n");
      if (grid_n < 2) throw std::invalid_argument("ClosedForm2D needs grid_n >= 2");
      break;
    case Scheme::Oracle: break;
  }
}

DataTerm DataTerm::from_signal(std::vector<double> values) {
  DataTerm d;
  d.grid_n = static_cast<int>(values.size());
  d.dim = 1;
  d.data = std::move(values);
  d.validate();
  return d;
}

DataTerm DataTerm::from_image(const Image2D& image) {
  DataTerm d;
  d.grid_n = image.n();
  d.dim = 2;
  d.data = image.values();
  d.validate();
  return d;
}

double DataTerm::cell_measure() const { return std::pow(static_cast<double>(grid_n), -dim); }

void DataTerm::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("DataTerm: dim must be 1 or 2");
  if (grid_n < 1) throw std::invalid_argument("DataTerm: empty grid");
  const std::size_t expected = dim == 1 ? grid_n : static_cast<std::size_t>(grid_n) * grid_n;
  if (data.size() != expected) {
    throw std::invalid_argument("DataTerm: expected " + std::to_string(expected) + " values, got " +
                                std::to_string(data.size()));
  }
  for (double v : data) {
    if (!std::isfinite(v)) throw std::invalid_argument("DataTerm: non-finite value");
  }
}

void SolverConfig::validate() const {
  if (!(tol > 0.0) || !(gap_tol > 0.0) || !(grad_tol > 0.0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
}

PairGraph build_graph(const EnergyParams& params) {
  params.validate();
  PairGraph g;
  switch (params.scheme) {
    case Scheme::ClosedForm1D: g = closed_form_graph_1d(params.kernel.kind(), params.grid_n); break;
    case Scheme::ClosedForm2D: g = closed_form_graph_2d(params.kernel.kind(), params.grid_n); break;
    case Scheme::Oracle: {
      OracleConfig cfg = params.oracle;
      cfg.p = params.p;
      g = factor_graph(GeometricFactors(params.kernel, params.grid_n, cfg));
      break;
    }
  }
  for (double w : g.weight) {
    if (!std::isfinite(w)) {
      throw std::domain_error("the regularizer is infinite for jumps of piecewise constants at this p");
    }
  }
  return g;
}

namespace {

void check_shapes(const std::vector<double>& f, const DataTerm& data, const EnergyParams& params) {
  data.validate();
  params.validate();
  if (data.dim != params.kernel.dim()) throw std::invalid_argument("data and kernel dimensions differ");
  if (data.grid_n != params.grid_n) throw std::invalid_argument("data grid does not match grid_n");
  if (f.size() != data.data.size()) throw std::invalid_argument("coefficients and data differ in shape");
}

double half_sq_dist(const std::vector<double>& u, const std::vector<double>& d) {
  std::vector<double> t(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) t[i] = 0.5 * (u[i] - d[i]) * (u[i] - d[i]);
  return pairwise_sum(t);
}

// Weighted difference operator (Ku)_e = lambda_e (u_a - u_b).
struct DiffOp {
  const PairGraph& g;
  std::vector<double> lambda;

  void apply(const std::vector<double>& u, std::vector<double>& out) const {
    out.resize(lambda.size());
    for (std::size_t e = 0; e < lambda.size(); ++e) out[e] = lambda[e] * (u[g.a[e]] - u[g.b[e]]);
  }
  void adjoint(const std::vector<double>& q, std::vector<double>& out) const {
    out.assign(g.nodes, 0.0);
    for (std::size_t e = 0; e < lambda.size(); ++e) {
      out[g.a[e]] += lambda[e] * q[e];
      out[g.b[e]] -= lambda[e] * q[e];
    }
  }
  double tv(const std::vector<double>& u) const {
    std::vector<double> t(lambda.size());
    for (std::size_t e = 0; e < lambda.size(); ++e) t[e] = lambda[e] * std::abs(u[g.a[e]] - u[g.b[e]]);
    return pairwise_sum(t);
  }
  // Upper bound on ||K||: power iteration padded by 5%, capped by the
  // row-sum bound ||K||^2 <= 2 max_i sum_{e at i} lambda_e^2.
  double norm_bound() const {
    std::vector<double> deg(g.nodes, 0.0);
    for (std::size_t e = 0; e < lambda.size(); ++e) {
      deg[g.a[e]] += lambda[e] * lambda[e];
      deg[g.b[e]] += lambda[e] * lambda[e];
    }
    const double gersh = std::sqrt(2.0 * *std::max_element(deg.begin(), deg.end()));
    std::vector<double> v(g.nodes);
    for (int i = 0; i < g.nodes; ++i) v[i] = std::sin(1.0 + 7.0 * i) + 0.1;
    std::vector<double> kv;
    double est = 0.0;
    for (int it = 0; it < 100; ++it) {
      apply(v, kv);
      adjoint(kv, v);
      double nv = 0.0;
      for (double x : v) nv += x * x;
      nv = std::sqrt(nv);
      if (nv == 0.0) break;
      est = std::sqrt(nv);
      for (double& x : v) x /= nv;
    }
    return std::max(std::min(1.05 * est, gersh), 1e-300);
  }
};

void finish(DenoiseResult& r, const std::vector<double>& data, double cell, const PairGraph& g, double p) {
  r.fidelity_value = cell * half_sq_dist(r.minimizer, data);
  r.regularizer_value = g.regularizer(r.minimizer, p);
}

// Accelerated primal-dual method on the problem scaled by 1 / cell:
//   min_u 1/2 |u - d|^2 + sum_e lambda_e |u_a - u_b|.
// The primal point recovered from the dual, u = d - K^T q, has the mean of d.
DenoiseResult solve_primal_dual(const std::vector<double>& d, double cell, const PairGraph& g, double beta,
                                const SolverConfig& s) {
  DiffOp op{g, {}};
  op.lambda.resize(g.edges());
  for (std::size_t e = 0; e < g.edges(); ++e) op.lambda[e] = beta * g.weight[e] / cell;

  DenoiseResult r;
  const std::size_t n = d.size();
  if (g.edges() == 0) {
    r.minimizer = d;
    r.energy_trace = {0.0};
    r.converged = true;
    finish(r, d, cell, g, 1.0);
    return r;
  }
  const double norm = op.norm_bound();
  double tau = 1.0 / norm;
  double sigma = 1.0 / norm;
  const double tau_floor = 1e-2 / norm;

  std::vector<double> x = s.init.value_or(d);
  std::vector<double> xbar = x;
  std::vector<double> q(g.edges(), 0.0);
  std::vector<double> kx, ktq, u(n), x_new(n);
  double best = std::numeric_limits<double>::infinity();

  for (int it = 1; it <= s.max_iter; ++it) {
    op.apply(xbar, kx);
    for (std::size_t e = 0; e < q.size(); ++e) q[e] = std::clamp(q[e] + sigma * kx[e], -1.0, 1.0);
    op.adjoint(q, ktq);
    for (std::size_t i = 0; i < n; ++i) x_new[i] = (x[i] - tau * ktq[i] + tau * d[i]) / (1.0 + tau);
    // Acceleration stops at a floor on tau; beyond it the step ratio only
    // amplifies rounding error.
    const double theta = tau > tau_floor ? 1.0 / std::sqrt(1.0 + 2.0 * tau) : 1.0;
    tau *= theta;
    sigma /= theta;
    for (std::size_t i = 0; i < n; ++i) {
      xbar[i] = x_new[i] + theta * (x_new[i] - x[i]);
      x[i] = x_new[i];
      u[i] = d[i] - ktq[i];
    }
    // P(u) - D(q) = sum_e |Ku_e| - q_e Ku_e, a sum of non-negative terms.
    op.apply(u, kx);
    std::vector<double> slack(q.size());
    for (std::size_t e = 0; e < q.size(); ++e) slack[e] = std::abs(kx[e]) - q[e] * kx[e];
    const double gap = pairwise_sum(slack);
    const double primal = half_sq_dist(u, d) + op.tv(u);
    if (primal < best) {
      best = primal;
      r.minimizer = u;
    }
    r.energy_trace.push_back(cell * best);
    r.iterations = it;
    if (gap <= s.gap_tol * std::max(1.0, primal)) {
      r.converged = true;
      break;
    }
  }
  finish(r, d, cell, g, 1.0);
  return r;
}

// Damped Newton on the smooth energy
//   1/2 |u - d|^2 + sum_e lambda_e psi(u_a - u_b)
// with psi(t) = |t|^p for p > 1 or sqrt(t^2 + eps^2) - eps for p = 1.
DenoiseResult solve_smooth(const std::vector<double>& d, double cell, const PairGraph& g, double p, double beta,
                           const SolverConfig& s) {
  const std::size_t n = d.size();
  const std::size_t m = g.edges();
  std::vector<double> lambda(m);
  for (std::size_t e = 0; e < m; ++e) lambda[e] = beta * g.weight[e] / cell;
  const bool smoothed = p == 1.0;
  const double eps = s.eps;
  auto psi = [&](double t) {
    if (smoothed) return std::sqrt(t * t + eps * eps) - eps;
    return p == 2.0 ? t * t : std::pow(std::abs(t), p);
  };
  auto dpsi = [&](double t) {
    if (smoothed) return t / std::sqrt(t * t + eps * eps);
    if (p == 2.0) return 2.0 * t;
    return t == 0.0 ? 0.0 : p * std::pow(std::abs(t), p - 1.0) * (t > 0.0 ? 1.0 : -1.0);
  };
  // Curvature capped so the Hessian stays finite where psi'' blows up.
  constexpr double kCurvatureCap = 1e12;
  auto d2psi = [&](double t) {
    if (smoothed) return std::min(kCurvatureCap, eps * eps / std::pow(t * t + eps * eps, 1.5));
    if (p == 2.0) return 2.0;
    return t == 0.0 ? kCurvatureCap : std::min(kCurvatureCap, p * (p - 1.0) * std::pow(std::abs(t), p - 2.0));
  };
  auto value = [&](const std::vector<double>& u) {
    std::vector<double> t(m);
    for (std::size_t e = 0; e < m; ++e) t[e] = lambda[e] * psi(u[g.a[e]] - u[g.b[e]]);
    return half_sq_dist(u, d) + pairwise_sum(t);
  };

  DenoiseResult r;
  std::vector<double> u = s.init.value_or(d);
  double f = value(u);

  Eigen::SparseMatrix<double> h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(n + 4 * m);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool analyzed = false;
  Eigen::VectorXd grad(static_cast<Eigen::Index>(n));
  std::vector<double> trial(n);
  int quiet = 0;

  for (int it = 1; it <= s.max_iter; ++it) {
    trip.clear();
    for (std::size_t i = 0; i < n; ++i) {
      grad[static_cast<Eigen::Index>(i)] = u[i] - d[i];
      trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
    }
    for (std::size_t e = 0; e < m; ++e) {
      const int a = g.a[e];
      const int b = g.b[e];
      const double t = u[a] - u[b];
      const double gv = lambda[e] * dpsi(t);
      grad[a] += gv;
      grad[b] -= gv;
      const double hv = lambda[e] * d2psi(t);
      trip.emplace_back(a, a, hv);
      trip.emplace_back(b, b, hv);
      trip.emplace_back(a, b, -hv);
      trip.emplace_back(b, a, -hv);
    }
    const double gnorm = grad.norm();
    if (gnorm <= s.grad_tol) {
      r.converged = true;
      if (r.energy_trace.empty()) r.energy_trace.push_back(cell * f);
      break;
    }
    h.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed) {
      ldlt.analyzePattern(h);
      analyzed = true;
    }
    ldlt.factorize(h);
    Eigen::VectorXd dir = -grad;
    if (ldlt.info() == Eigen::Success) {
      Eigen::VectorXd sol = ldlt.solve(grad);
      if (ldlt.info() == Eigen::Success && sol.allFinite()) dir = -sol;
    }
    const double slope = grad.dot(dir);
    double step = 1.0;
    double f_new = f;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + step * dir[static_cast<Eigen::Index>(i)];
      f_new = value(trial);
      if (f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    r.iterations = it;
    if (!accepted || f_new >= f) {
      // No further decrease is representable.
      r.energy_trace.push_back(cell * f);
      r.converged = gnorm <= std::sqrt(s.grad_tol);
      break;
    }
    const double decrement = (f - f_new) / std::max(std::abs(f_new), std::numeric_limits<double>::min());
    u.swap(trial);
    f = f_new;
    r.energy_trace.push_back(cell * f);
    quiet = decrement < s.tol ? quiet + 1 : 0;
    if (quiet >= s.patience) {
      r.converged = true;
      break;
    }
  }
  r.minimizer = u;
  finish(r, d, cell, g, p);
  return r;
}

}  // namespace

double energy(const std::vector<double>& f, const DataTerm& data, const EnergyParams& params) {
  check_shapes(f, data, params);
  const PairGraph g = build_graph(params);
  const double beta = params.alpha / kpn(params.p, params.kernel.dim()).value;
  return data.cell_measure() * half_sq_dist(f, data.data) + beta * g.regularizer(f, params.p);
}

DenoiseResult denoise_graph(const std::vector<double>& data, double cell_measure, const PairGraph& graph,
                            double p, double beta, const SolverConfig& solver) {
  solver.validate();
  if (data.size() != static_cast<std::size_t>(graph.nodes)) {
    throw std::invalid_argument("denoise: data and graph sizes differ");
  }
  if (solver.init && solver.init->size() != data.size()) {
    throw std::invalid_argument("denoise: initial point has the wrong shape");
  }
  if (!(cell_measure > 0.0) || !(beta > 0.0)) throw std::invalid_argument("denoise: scalings must be positive");
  if (p == 1.0 && solver.method == SolverMethod::PrimalDual) {
    return solve_primal_dual(data, cell_measure, graph, beta, solver);
  }
  return solve_smooth(data, cell_measure, graph, p, beta, solver);
}

DenoiseResult denoise(const DataTerm& data, const EnergyParams& params, const SolverConfig& solver) {
  check_shapes(data.data, data, params);
  const PairGraph g = build_graph(params);
  const double beta = params.alpha / kpn(params.p, params.kernel.dim()).value;
  return denoise_graph(data.data, data.cell_measure(), g, params.p, beta, solver);
}

std::vector<double> taut_string_1d(const std::vector<double>& data, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("taut_string_1d: lambda must be >= 0");
  for (double v : data) {
    if (!std::isfinite(v)) throw std::invalid_argument("taut_string_1d: non-finite data");
  }
  const int n = static_cast<int>(data.size());
  if (n <= 1 || lambda == 0.0) return data;
  // Cumulative sums; the string stays within lambda of them at interior
  // nodes and is pinned at both ends.
  std::vector<double> cum(n + 1, 0.0);
  for (int i = 0; i < n; ++i) cum[i + 1] = cum[i] + data[i];
  auto lower = [&](int k) { return (k == 0 || k == n) ? cum[k] : cum[k] - lambda; };
  auto upper = [&](int k) { return (k == 0 || k == n) ? cum[k] : cum[k] + lambda; };

  std::vector<double> u(n);
  int k0 = 0;
  double y0 = 0.0;
  while (k0 < n) {
    double max_lo = -std::numeric_limits<double>::infinity();
    double min_hi = std::numeric_limits<double>::infinity();
    int j_lo = k0 + 1;
    int j_hi = k0 + 1;
    int bend = -1;
    double slope = 0.0;
    double bend_y = 0.0;
    for (int k = k0 + 1; k <= n; ++k) {
      const double lo = (lower(k) - y0) / (k - k0);
      const double hi = (upper(k) - y0) / (k - k0);
      if (lo > min_hi) {
        bend = j_hi;
        slope = min_hi;
        bend_y = upper(j_hi);
        break;
      }
      if (hi < max_lo) {
        bend = j_lo;
        slope = max_lo;
        bend_y = lower(j_lo);
        break;
      }
      if (lo >= max_lo) {
        max_lo = lo;
        j_lo = k;
      }
      if (hi <= min_hi) {
        min_hi = hi;
        j_hi = k;
      }
    }
    if (bend < 0) {
      bend = n;
      slope = (cum[n] - y0) / (n - k0);
      bend_y = cum[n];
    }
    for (int i = k0; i < bend; ++i) u[i] = slope;
    k0 = bend;
    y0 = bend_y;
  }
  return u;
}

std::vector<double> sobolev_1d(const std::vector<double>& data, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("sobolev_1d: lambda must be >= 0");
  const std::size_t n = data.size();
  if (n <= 1) return data;
  // (I + 2 lambda L) u = d with L the path Laplacian, by the Thomas algorithm.
  std::vector<double> diag(n), off(n - 1, -2.0 * lambda), rhs = data;
  for (std::size_t i = 0; i < n; ++i) {
    const double degree = (i == 0 || i + 1 == n) ? 1.0 : 2.0;
    diag[i] = 1.0 + 2.0 * lambda * degree;
  }
  for (std::size_t i = 1; i < n; ++i) {
    const double w = off[i - 1] / diag[i - 1];
    diag[i] -= w * off[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> u(n);
  u[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) u[i] = (rhs[i] - off[i] * u[i + 1]) / diag[i];
  return u;
}

}  // namespace nltv
