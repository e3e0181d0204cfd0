#include "nltv/minimizer.hpp"
#include "nltv/oracle.hpp"
#include "nltv/pair_graph.hpp"
#include "nltv/random.hpp"
#include "nltv/schemes_1d.hpp"
#include "nltv/schemes_2d.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace {

using nltv::DataTerm;
using nltv::EnergyParams;
using nltv::Kernel;
using nltv::KernelKind;
using nltv::Scheme;
using nltv::SolverConfig;
using nltv::SolverMethod;

std::vector<double> noisy_signal(std::uint64_t seed, int n) {
  nltv::CounterRng rng(seed, 0);
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = (i >= n / 3 && i < 2 * n / 3 ? 1.0 : 0.0) + 0.3 * (rng.uniform() - 0.5);
  return v;
}

EnergyParams box_params(int n, double alpha, double p = 1.0) {
  EnergyParams e;
  e.p = p;
  e.alpha = alpha;
  e.kernel = Kernel(KernelKind::Box1D, n);
  e.grid_n = n;
  e.scheme = Scheme::ClosedForm1D;
  return e;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

void expect_non_increasing(const std::vector<double>& trace) {
  ASSERT_FALSE(trace.empty());
  for (std::size_t i = 1; i < trace.size(); ++i) {
    EXPECT_LE(trace[i], trace[i - 1] + 1e-12 * std::abs(trace[i - 1])) << "step " << i;
  }
}

TEST(Energy, Examples) {
  const DataTerm data = DataTerm::from_signal({0.0, 1.0});
  EXPECT_NEAR(nltv::energy({0.25, 0.75}, data, box_params(2, 0.1)), 0.08125, 1e-15);
  EXPECT_NEAR(nltv::energy(data.data, data, box_params(2, 0.1)), 0.1, 1e-15);
  const DataTerm flat = DataTerm::from_signal({0.4, 0.4, 0.4});
  EXPECT_EQ(nltv::energy(flat.data, flat, box_params(3, 0.7)), 0.0);
}

TEST(Energy, FidelityVanishesAtTheData) {
  const std::vector<double> d = noisy_signal(1, 16);
  const DataTerm data = DataTerm::from_signal(d);
  EnergyParams e = box_params(16, 0.3);
  e.scheme = Scheme::Oracle;
  e.kernel = Kernel(KernelKind::Box1D, 5);
  nltv::OracleConfig cfg;
  const double r = nltv::oracle_eval(nltv::PiecewiseConstant1D(d), e.kernel, cfg).value;
  EXPECT_NEAR(nltv::energy(d, data, e), 0.3 * r, 1e-12);
}

TEST(Energy, TwoDimensionalUsesKpn) {
  const nltv::Image2D img(2, {0, 1, 0, 1});
  const DataTerm data = DataTerm::from_image(img);
  EnergyParams e;
  e.alpha = 0.2;
  e.kernel = Kernel(KernelKind::Disc2D, 2);
  e.grid_n = 2;
  e.scheme = Scheme::ClosedForm2D;
  const double expected = 0.2 / nltv::kpn(1.0, 2).value * nltv::eval_image(img, KernelKind::Disc2D);
  EXPECT_NEAR(nltv::energy(data.data, data, e), expected, 1e-14);
}

TEST(EnergyParams, Validation) {
  EnergyParams e = box_params(4, -1.0);
  try {
    e.validate();
    FAIL() << "expected an exception";
  } catch (const std::invalid_argument& ex) {
    EXPECT_NE(std::string(ex.what()).find("alpha must be positive"), std::string::npos);
  }
  e = box_params(4, 0.1);
  e.kernel = Kernel(KernelKind::Box1D, 3);
  EXPECT_THROW(e.validate(), std::invalid_argument);
  e = box_params(4, 0.1, 0.5);
  EXPECT_THROW(e.validate(), std::invalid_argument);
  e = box_params(4, 0.1);
  e.scheme = Scheme::ClosedForm2D;
  EXPECT_THROW(e.validate(), std::invalid_argument);
}

TEST(DataTerm, CellMeasureAndShapes) {
  EXPECT_DOUBLE_EQ(DataTerm::from_signal(std::vector<double>(8, 0.0)).cell_measure(), 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(DataTerm::from_image(nltv::Image2D::constant(4, 0.0)).cell_measure(), 1.0 / 16.0);
  DataTerm bad = DataTerm::from_signal({1.0, 2.0});
  bad.grid_n = 3;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_THROW(nltv::denoise(DataTerm::from_signal({1.0, 2.0}), box_params(3, 0.1)), std::invalid_argument);
}

TEST(PairGraph, ClosedFormGraphsReproduceTheSchemes) {
  nltv::CounterRng rng(40, 0);
  for (int n = 2; n <= 10; ++n) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform();
    const nltv::PiecewiseConstant1D f(v);
    EXPECT_NEAR(nltv::closed_form_graph_1d(KernelKind::Box1D, n).regularizer(v, 1.0), nltv::eval_pc_box(f), 1e-14);
    EXPECT_NEAR(nltv::closed_form_graph_1d(KernelKind::Box1DWide, n).regularizer(v, 1.0), nltv::eval_pc_box_wide(f),
                1e-14);
    std::vector<double> w(static_cast<std::size_t>(n) * n);
    for (double& x : w) x = rng.uniform();
    const nltv::Image2D img(n, w);
    for (KernelKind kind : {KernelKind::Disc2D, KernelKind::Square2D}) {
      const double expected = nltv::eval_image(img, kind);
      EXPECT_NEAR(nltv::closed_form_graph_2d(kind, n).regularizer(w, 1.0), expected, 1e-13 * expected);
    }
  }
}

TEST(PairGraph, FactorGraphReproducesTheOracle) {
  nltv::CounterRng rng(41, 0);
  std::vector<double> v(12);
  for (double& x : v) x = rng.uniform();
  for (double p : {1.0, 1.5}) {
    nltv::OracleConfig cfg;
    cfg.p = p;
    const Kernel k(KernelKind::Box1D, 4.5);
    const nltv::GeometricFactors g(k, 12, cfg);
    const double expected = nltv::oracle_eval(nltv::PiecewiseConstant1D(v), k, cfg).value;
    EXPECT_NEAR(nltv::factor_graph(g).regularizer(v, p), expected, 1e-12 * expected);
  }
}

TEST(TautString, Examples) {
  const std::vector<double> d{0.0, 0.0, 1.0, 1.0};
  const std::vector<double> u = nltv::taut_string_1d(d, 0.1);
  const std::vector<double> expected{0.05, 0.05, 0.95, 0.95};
  EXPECT_LT(max_abs_diff(u, expected), 1e-14);
  EXPECT_EQ(nltv::taut_string_1d(d, 0.0), d);
  const std::vector<double> flat(7, 2.5);
  EXPECT_EQ(nltv::taut_string_1d(flat, 3.0), flat);
  EXPECT_THROW(nltv::taut_string_1d(d, -1.0), std::invalid_argument);
}

TEST(TautString, BeatsEveryTwoLevelCandidateOnAStep) {
  const std::vector<double> d{0.0, 0.0, 1.0, 1.0};
  const double lambda = 0.1;
  auto objective = [&](const std::vector<double>& u) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += 0.5 * (u[i] - d[i]) * (u[i] - d[i]);
    for (std::size_t i = 1; i < u.size(); ++i) s += lambda * std::abs(u[i] - u[i - 1]);
    return s;
  };
  const double best = objective(nltv::taut_string_1d(d, lambda));
  for (int a = 0; a <= 200; ++a) {
    for (int b = 0; b <= 200; ++b) {
      const double x = a / 200.0;
      const double y = b / 200.0;
      EXPECT_GE(objective({x, x, y, y}) + 1e-15, best);
    }
  }
}

TEST(TautString, SatisfiesTheOptimalityCertificate) {
  // r_k = sum_{i<=k} (d_i - u_i) must lie in [-lambda, lambda], vanish at
  // the end and sit at -+lambda wherever u jumps up or down.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::vector<double> d = noisy_signal(seed, 50);
    for (double lambda : {0.01, 0.1, 1.0}) {
      const std::vector<double> u = nltv::taut_string_1d(d, lambda);
      double r = 0.0;
      for (std::size_t k = 0; k + 1 < d.size(); ++k) {
        r += d[k] - u[k];
        EXPECT_LE(std::abs(r), lambda + 1e-12);
        if (u[k + 1] > u[k] + 1e-12) EXPECT_NEAR(r, -lambda, 1e-10);
        if (u[k + 1] < u[k] - 1e-12) EXPECT_NEAR(r, lambda, 1e-10);
      }
      r += d.back() - u.back();
      EXPECT_NEAR(r, 0.0, 1e-10);
    }
  }
}

TEST(Sobolev1D, SolvesTheNormalEquations) {
  const std::vector<double> d = noisy_signal(3, 30);
  const double lambda = 0.7;
  const std::vector<double> u = nltv::sobolev_1d(d, lambda);
  for (std::size_t i = 0; i < d.size(); ++i) {
    double lap = 0.0;
    if (i > 0) lap += u[i] - u[i - 1];
    if (i + 1 < d.size()) lap += u[i] - u[i + 1];
    EXPECT_NEAR(u[i] - d[i] + 2.0 * lambda * lap, 0.0, 1e-13);
  }
  EXPECT_NEAR(mean(u), mean(d), 1e-14);
}

TEST(Denoise, VanishingAlphaReturnsTheData) {
  const std::vector<double> d = noisy_signal(4, 32);
  const nltv::DenoiseResult r = nltv::denoise(DataTerm::from_signal(d), box_params(32, 1e-12));
  EXPECT_TRUE(r.converged);
  EXPECT_LT(max_abs_diff(r.minimizer, d), 1e-6);
}

TEST(Denoise, PrimalDualMatchesTautString) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const std::vector<double> d = noisy_signal(seed, 64);
    for (double alpha : {0.001, 0.01, 0.1}) {
      const nltv::DenoiseResult r = nltv::denoise(DataTerm::from_signal(d), box_params(64, alpha));
      EXPECT_TRUE(r.converged);
      EXPECT_LT(max_abs_diff(r.minimizer, nltv::taut_string_1d(d, alpha * 64)), 1e-5);
      expect_non_increasing(r.energy_trace);
      EXPECT_EQ(static_cast<int>(r.energy_trace.size()), r.iterations);
      EXPECT_NEAR(mean(r.minimizer), mean(d), 1e-8);
    }
  }
}

TEST(Denoise, QuadraticCaseMatchesTheTridiagonalSolve) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const std::vector<double> d = noisy_signal(seed, 64);
    for (double alpha : {0.001, 0.01, 0.1}) {
      const nltv::DenoiseResult r = nltv::denoise(DataTerm::from_signal(d), box_params(64, alpha, 2.0));
      EXPECT_TRUE(r.converged);
      EXPECT_LT(max_abs_diff(r.minimizer, nltv::sobolev_1d(d, alpha * 64)), 1e-8);
      expect_non_increasing(r.energy_trace);
    }
  }
}

TEST(Denoise, SmoothedSolverAgreesWithPrimalDual) {
  const std::vector<double> d = noisy_signal(9, 40);
  const EnergyParams e = box_params(40, 0.02);
  SolverConfig smooth;
  smooth.method = SolverMethod::Smoothed;
  const nltv::DenoiseResult a = nltv::denoise(DataTerm::from_signal(d), e);
  const nltv::DenoiseResult b = nltv::denoise(DataTerm::from_signal(d), e, smooth);
  EXPECT_TRUE(b.converged);
  EXPECT_LT(max_abs_diff(a.minimizer, b.minimizer), 1e-5);
  expect_non_increasing(b.energy_trace);
}

TEST(Denoise, ReportsNonConvergence) {
  SolverConfig s;
  s.max_iter = 3;
  const nltv::DenoiseResult r = nltv::denoise(DataTerm::from_signal(noisy_signal(5, 64)), box_params(64, 0.05), s);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 3);
  EXPECT_EQ(r.energy_trace.size(), 3u);
}

TEST(Denoise, ResultCarriesItsEnergySplit) {
  const std::vector<double> d = noisy_signal(6, 32);
  const EnergyParams e = box_params(32, 0.05);
  const DataTerm data = DataTerm::from_signal(d);
  const nltv::DenoiseResult r = nltv::denoise(data, e);
  EXPECT_NEAR(r.fidelity_value + e.alpha * r.regularizer_value, nltv::energy(r.minimizer, data, e), 1e-14);
  EXPECT_NEAR(r.regularizer_value, nltv::eval_pc_box(nltv::PiecewiseConstant1D(r.minimizer)), 1e-14);
  EXPECT_NEAR(r.energy_trace.back(), nltv::energy(r.minimizer, data, e), 1e-13);
}

TEST(Denoise, StartingPointDoesNotMatter) {
  const std::vector<double> d = noisy_signal(7, 48);
  for (const EnergyParams& e : {box_params(48, 0.02), box_params(48, 0.02, 1.5)}) {
    SolverConfig zero;
    zero.init = std::vector<double>(d.size(), 0.0);
    const auto a = nltv::denoise(DataTerm::from_signal(d), e);
    const auto b = nltv::denoise(DataTerm::from_signal(d), e, zero);
    EXPECT_TRUE(a.converged);
    EXPECT_TRUE(b.converged);
    EXPECT_LT(max_abs_diff(a.minimizer, b.minimizer), 1e-5);
  }
}

TEST(Denoise, GreyLevelEquivariance) {
  const std::vector<double> d = noisy_signal(8, 48);
  std::vector<double> shifted = d;
  for (double& x : shifted) x += 3.25;
  const auto a = nltv::denoise(DataTerm::from_signal(d), box_params(48, 0.03));
  const auto b = nltv::denoise(DataTerm::from_signal(shifted), box_params(48, 0.03));
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(b.minimizer[i], a.minimizer[i] + 3.25, 1e-6);
}

TEST(Denoise, OracleSchemeWithACoarseKernel) {
  const std::vector<double> d = noisy_signal(10, 32);
  EnergyParams e = box_params(32, 0.02);
  e.scheme = Scheme::Oracle;
  e.kernel = Kernel(KernelKind::Box1DWide, 6);
  const DataTerm data = DataTerm::from_signal(d);
  const auto r = nltv::denoise(data, e);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(mean(r.minimizer), mean(d), 1e-8);
  const double best = nltv::energy(r.minimizer, data, e);
  nltv::CounterRng rng(10, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> u = r.minimizer;
    for (double& x : u) x += 1e-3 * (rng.uniform() - 0.5);
    EXPECT_GE(nltv::energy(u, data, e), best - 1e-12);
  }
}

TEST(Denoise, OracleSchemeRejectsDivergentExponents) {
  EnergyParams e = box_params(8, 0.1, 2.0);
  e.scheme = Scheme::Oracle;
  e.kernel = Kernel(KernelKind::Box1D, 3);
  EXPECT_THROW(nltv::denoise(DataTerm::from_signal(noisy_signal(1, 8)), e), std::domain_error);
}

TEST(Denoise, Images) {
  nltv::CounterRng rng(11, 0);
  const int n = 12;
  std::vector<double> v(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) v[j * n + i] = (i > 4 && j > 3 ? 1.0 : 0.0) + 0.2 * (rng.uniform() - 0.5);
  const DataTerm data = DataTerm::from_image(nltv::Image2D(n, v));
  for (KernelKind kind : {KernelKind::Disc2D, KernelKind::Square2D}) {
    EnergyParams e;
    e.alpha = 0.01;
    e.kernel = Kernel(kind, n);
    e.grid_n = n;
    e.scheme = Scheme::ClosedForm2D;
    const auto pd = nltv::denoise(data, e);
    SolverConfig smooth;
    smooth.method = SolverMethod::Smoothed;
    const auto sm = nltv::denoise(data, e, smooth);
    EXPECT_TRUE(pd.converged);
    EXPECT_TRUE(sm.converged);
    EXPECT_LT(max_abs_diff(pd.minimizer, sm.minimizer), 1e-5);
    EXPECT_NEAR(mean(pd.minimizer), mean(v), 1e-8);
    expect_non_increasing(pd.energy_trace);
  }
}

TEST(SolverConfig, Validation) {
  SolverConfig s;
  s.max_iter = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.eps = 0.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.init = std::vector<double>{1.0};
  EXPECT_THROW(nltv::denoise(DataTerm::from_signal({1.0, 2.0}), box_params(2, 0.1), s), std::invalid_argument);
}

}  // namespace
