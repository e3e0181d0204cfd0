#include "nltv/oracle.hpp"

#include "nltv/quadrature.hpp"
#include "nltv/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nltv {

void OracleConfig::validate() const {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("oracle: p must be >= 1");
  if (points_per_cell_axis < 2 || points_per_cell_axis > 64) {
    throw std::invalid_argument("oracle: points_per_cell_axis must be in [2, 64]");
  }
  if (method == OracleMethod::MonteCarlo && samples < 10'000) {
    throw std::invalid_argument("oracle: Monte Carlo needs at least 1e4 samples");
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Sub-intervals per integration piece on top of the Gauss order.
constexpr int kSubdivisions = 4;
// Monte Carlo strata per piece; extra samples go into each stratum, so the
// standard error falls as 1/sqrt(samples).
constexpr int kStrata1D = 64;
constexpr int kStrataSide2D = 16;

struct Welford {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  // Variance of the sample mean.
  double mean_variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) / static_cast<double>(count) : 0.0; }
};

struct StrataSum {
  double sum = 0.0;
  double var = 0.0;
  void add(double volume, const Welford& w) {
    sum += volume * w.mean;
    var += volume * volume * w.mean_variance();
  }
};

// Linear function c0 + c1 * v.
struct Linear {
  double c0 = 0.0;
  double c1 = 0.0;
  double operator()(double v) const noexcept { return c0 + c1 * v; }
  Linear reflected() const noexcept { return {c0, -c1}; }
};

struct Interval {
  double lo;
  double hi;
  Linear overlap;  // length of the overlap of a shifted cell with its target
};

// The overlap length max(0, h - |v - d h|) split at its kink.
std::array<Interval, 2> tent_pieces(int d, double h) {
  return {{{(d - 1) * h, d * h, {-(d - 1) * h, 1.0}}, {d * h, (d + 1) * h, {(d + 1) * h, -1.0}}}};
}

// Substitution r = b * s^q with q = 1 / (2 - p) flattens r^(1-p) near 0.
double singular_exponent(double p) { return 1.0 / (2.0 - p); }

// int_0^1 |g(s)|^p ds for g linear from g0 to g1, scaled by len.
double abs_pow_linear(double g0, double g1, double len, double p) {
  if (len <= 0.0) return 0.0;
  if ((g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0)) {
    const double r = g0 / (g0 - g1);
    return abs_pow_linear(g0, 0.0, len * r, p) + abs_pow_linear(0.0, g1, len * (1.0 - r), p);
  }
  const double a = std::abs(g0);
  const double b = std::abs(g1);
  if (p == 1.0) return len * 0.5 * (a + b);
  if (std::abs(b - a) <= 1e-6 * (a + b)) return len * std::pow(0.5 * (a + b), p);
  return len * (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / ((p + 1.0) * (b - a));
}

// ---------------------------------------------------------------------------
// 1D geometric factors

struct FactorResult {
  double value = 0.0;
  double variance = 0.0;
  double coarse = 0.0;
};

// int_a^b height * t^-p * L(t) dt with 0 <= a < b.
double piece_1d_gauss(double a, double b, Linear L, double height, double p, const GaussRule& rule) {
  if (a == 0.0) {
    if (p >= 2.0) return kInf;
    const double q = singular_exponent(p);
    auto g = [&](double s) {
      const double t = b * std::pow(s, q);
      return height * std::pow(t, -p) * L(t) * b * q * std::pow(s, q - 1.0);
    };
    double sum = 0.0;
    for (int k = 0; k < kSubdivisions; ++k) {
      sum += rule.integrate(g, double(k) / kSubdivisions, double(k + 1) / kSubdivisions);
    }
    return sum;
  }
  auto g = [&](double t) { return height * std::pow(t, -p) * L(t); };
  double sum = 0.0;
  const double step = (b - a) / kSubdivisions;
  for (int k = 0; k < kSubdivisions; ++k) sum += rule.integrate(g, a + k * step, a + (k + 1) * step);
  return sum;
}

// Stratified MC for the same piece; returns (estimate, variance).
std::pair<double, double> piece_1d_mc(double a, double b, Linear L, double height, double p,
                                      std::int64_t budget, CounterRng& rng) {
  const bool singular = a == 0.0;
  if (singular && p >= 2.0) return {kInf, 0.0};
  const double q = singular ? singular_exponent(p) : 1.0;
  auto g = [&](double s) {
    if (singular) {
      const double t = b * std::pow(s, q);
      return height * std::pow(t, -p) * L(t) * b * q * std::pow(s, q - 1.0);
    }
    const double t = a + (b - a) * s;
    return height * std::pow(t, -p) * L(t) * (b - a);
  };
  const std::int64_t per = std::max<std::int64_t>(2, budget / kStrata1D);
  const double width = 1.0 / kStrata1D;
  StrataSum acc;
  for (int k = 0; k < kStrata1D; ++k) {
    Welford w;
    for (std::int64_t m = 0; m < per; ++m) w.add(g((k + rng.uniform()) * width));
    acc.add(width, w);
  }
  return {acc.sum, acc.var};
}

FactorResult factor_1d(const Kernel& kernel, int d, double cell, const OracleConfig& cfg,
                       const GaussRule& fine, const GaussRule& coarse, std::int64_t budget,
                       std::uint64_t stream) {
  FactorResult out;
  const double reach = kernel.reach();
  const double height = kernel.height();
  CounterRng rng(cfg.seed, stream);
  for (const Interval& piece : tent_pieces(d, cell)) {
    const double lo = std::max(piece.lo, 0.0);
    const double hi = std::min(piece.hi, reach);
    if (hi <= lo) continue;
    if (cfg.method == OracleMethod::TensorGauss) {
      out.value += piece_1d_gauss(lo, hi, piece.overlap, height, cfg.p, fine);
      out.coarse += piece_1d_gauss(lo, hi, piece.overlap, height, cfg.p, coarse);
    } else {
      auto [v, var] = piece_1d_mc(lo, hi, piece.overlap, height, cfg.p, budget / 2, rng);
      out.value += v;
      out.variance += var;
    }
  }
  if (cfg.method == OracleMethod::MonteCarlo) out.coarse = out.value;
  return out;
}

// ---------------------------------------------------------------------------
// 2D integration over a rectangle in the closed first quadrant

struct Rect {
  double x0, x1, y0, y1;
};

// int over rect (intersected with the disc of radius `disc` when disc > 0
// and with r >= band) of r^-ps * H(vx, vy) dv, in polar coordinates. The
// origin must not lie in the interior of the rectangle.
template <typename H>
double polar_rect(const Rect& q, double disc, double band, double ps, H&& h, const GaussRule& rule) {
  if (q.x1 <= q.x0 || q.y1 <= q.y0) return 0.0;
  std::vector<double> angles;
  auto add_point = [&](double x, double y) {
    if (x == 0.0 && y == 0.0) return;
    angles.push_back(std::atan2(y, x));
  };
  add_point(q.x0, q.y0);
  add_point(q.x1, q.y0);
  add_point(q.x0, q.y1);
  add_point(q.x1, q.y1);
  const double th_min = *std::min_element(angles.begin(), angles.end());
  const double th_max = *std::max_element(angles.begin(), angles.end());
  if (q.x0 == 0.0 && q.y0 == 0.0) {
    angles.push_back(0.0);
    angles.push_back(std::numbers::pi / 2);
  }
  auto add_circle = [&](double radius) {
    if (radius <= 0.0) return;
    const double r2 = radius * radius;
    for (double x : {q.x0, q.x1}) {
      if (x * x < r2) {
        const double y = std::sqrt(r2 - x * x);
        if (y > q.y0 && y < q.y1) add_point(x, y);
      }
    }
    for (double y : {q.y0, q.y1}) {
      if (y * y < r2) {
        const double x = std::sqrt(r2 - y * y);
        if (x > q.x0 && x < q.x1) add_point(x, y);
      }
    }
  };
  add_circle(disc);
  add_circle(band);
  const double lo_angle = (q.x0 == 0.0 && q.y0 == 0.0) ? 0.0 : th_min;
  const double hi_angle = (q.x0 == 0.0 && q.y0 == 0.0) ? std::numbers::pi / 2 : th_max;
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end()), angles.end());

  const bool substitute = ps > 1.0;
  const double qexp = substitute ? singular_exponent(ps) : 1.0;

  auto radial = [&](double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    double r_in = std::max(band, 0.0);
    double r_out = std::numeric_limits<double>::infinity();
    if (c > 0.0) {
      r_in = std::max(r_in, q.x0 / c);
      r_out = std::min(r_out, q.x1 / c);
    } else if (q.x0 > 0.0 || q.x1 < 0.0) {
      return 0.0;
    }
    if (s > 0.0) {
      r_in = std::max(r_in, q.y0 / s);
      r_out = std::min(r_out, q.y1 / s);
    } else if (q.y0 > 0.0 || q.y1 < 0.0) {
      return 0.0;
    }
    if (disc > 0.0) r_out = std::min(r_out, disc);
    if (!(r_out > r_in)) return 0.0;
    if (r_in == 0.0 && substitute) {
      if (ps >= 2.0) return kInf;
      auto g = [&](double u) {
        const double r = r_out * std::pow(u, qexp);
        return std::pow(r, 1.0 - ps) * h(r * c, r * s) * r_out * qexp * std::pow(u, qexp - 1.0);
      };
      return rule.integrate(g, 0.0, 1.0);
    }
    auto g = [&](double r) { return std::pow(r, 1.0 - ps) * h(r * c, r * s); };
    return rule.integrate(g, r_in, r_out);
  };

  double total = 0.0;
  for (std::size_t k = 0; k + 1 < angles.size(); ++k) {
    const double a = std::max(angles[k], lo_angle);
    const double b = std::min(angles[k + 1], hi_angle);
    if (b <= a) continue;
    const double step = (b - a) / kSubdivisions;
    for (int m = 0; m < kSubdivisions; ++m) total += rule.integrate(radial, a + m * step, a + (m + 1) * step);
  }
  return total;
}

// Stratified MC of int over rect of G(v) dv; returns (estimate, variance).
template <typename G>
std::pair<double, double> rect_mc(const Rect& q, G&& g, std::int64_t budget, CounterRng& rng) {
  if (q.x1 <= q.x0 || q.y1 <= q.y0) return {0.0, 0.0};
  constexpr int side = kStrataSide2D;
  const std::int64_t per = std::max<std::int64_t>(2, budget / (side * side));
  const double wx = (q.x1 - q.x0) / side;
  const double wy = (q.y1 - q.y0) / side;
  StrataSum acc;
  for (int a = 0; a < side; ++a) {
    for (int b = 0; b < side; ++b) {
      Welford w;
      for (std::int64_t m = 0; m < per; ++m) {
        const double x = q.x0 + (a + rng.uniform()) * wx;
        w.add(g(x, q.y0 + (b + rng.uniform()) * wy));
      }
      acc.add(wx * wy, w);
    }
  }
  return {acc.sum, acc.var};
}

// Maps an interval with non-positive coordinates onto the positive side.
Interval to_positive(Interval iv) {
  if (iv.hi <= 0.0) return {-iv.hi, -iv.lo, iv.overlap.reflected()};
  return iv;
}

FactorResult factor_2d(const Kernel& kernel, int dx, int dy, double cell, const OracleConfig& cfg,
                       const GaussRule& fine, const GaussRule& coarse, std::int64_t budget,
                       std::uint64_t stream) {
  FactorResult out;
  const double reach = kernel.reach();
  const double height = kernel.height();
  const bool disc = kernel.kind() == KernelKind::Disc2D;
  CounterRng rng(cfg.seed, stream);
  for (Interval xi : tent_pieces(dx, cell)) {
    for (Interval yi : tent_pieces(dy, cell)) {
      xi = to_positive(xi);
      yi = to_positive(yi);
      const Rect q{std::max(xi.lo, 0.0), std::min(xi.hi, reach), std::max(yi.lo, 0.0), std::min(yi.hi, reach)};
      if (q.x1 <= q.x0 || q.y1 <= q.y0) continue;
      const Linear lx = xi.overlap;
      const Linear ly = yi.overlap;
      if (cfg.method == OracleMethod::TensorGauss) {
        auto area = [&](double vx, double vy) { return height * lx(vx) * ly(vy); };
        out.value += polar_rect(q, disc ? reach : 0.0, 0.0, cfg.p, area, fine);
        out.coarse += polar_rect(q, disc ? reach : 0.0, 0.0, cfg.p, area, coarse);
      } else {
        auto g = [&](double vx, double vy) {
          return kernel(vx, vy) * std::pow(std::hypot(vx, vy), -cfg.p) * lx(vx) * ly(vy);
        };
        auto [v, var] = rect_mc(q, g, budget / 4, rng);
        out.value += v;
        out.variance += var;
      }
    }
  }
  if (cfg.method == OracleMethod::MonteCarlo) out.coarse = out.value;
  return out;
}

int offset_limit(const Kernel& kernel, int grid_n) {
  // Offsets d with (d - 1) / grid_n < reach carry a non-empty overlap.
  return static_cast<int>(std::floor(kernel.reach() * grid_n + 1.0 - 1e-9));
}

}  // namespace

GeometricFactors::GeometricFactors(const Kernel& kernel, int grid_n, const OracleConfig& cfg)
    : dim_(kernel.dim()), grid_n_(grid_n), max_offset_(offset_limit(kernel, grid_n)) {
  cfg.validate();
  if (grid_n < 1) throw std::invalid_argument("GeometricFactors: grid must have at least one cell");
  if (dim_ == 2 && cfg.p >= 2.0) {
    throw std::domain_error("oracle: p >= 2 is not supported for 2D piecewise constant input");
  }
  const double cell = 1.0 / grid_n;
  const int side = max_offset_ + 1;
  const std::size_t count = dim_ == 1 ? side : static_cast<std::size_t>(side) * side;
  value_.assign(count, 0.0);
  variance_.assign(count, 0.0);
  coarse_.assign(count, 0.0);
  const GaussRule fine = gauss_legendre(cfg.points_per_cell_axis);
  const GaussRule rough = gauss_legendre(std::max(1, cfg.points_per_cell_axis / 2));
  const auto factors = static_cast<std::int64_t>(count - 1);
  const std::int64_t budget = std::max<std::int64_t>(16, cfg.samples / std::max<std::int64_t>(1, factors));
  for (std::size_t s = 1; s < count; ++s) {
    FactorResult r;
    if (dim_ == 1) {
      r = factor_1d(kernel, static_cast<int>(s), cell, cfg, fine, rough, budget, s);
    } else {
      const int dx = static_cast<int>(s % side);
      const int dy = static_cast<int>(s / side);
      r = factor_2d(kernel, dx, dy, cell, cfg, fine, rough, budget, s);
    }
    value_[s] = r.value;
    variance_[s] = r.variance;
    coarse_[s] = r.coarse;
  }
}

std::size_t GeometricFactors::slot(int dx, int dy) const {
  dx = std::abs(dx);
  dy = std::abs(dy);
  if (dx > max_offset_ || dy > max_offset_ || (dim_ == 1 && dy != 0)) return value_.size();
  return dim_ == 1 ? static_cast<std::size_t>(dx)
                   : static_cast<std::size_t>(dy) * (max_offset_ + 1) + static_cast<std::size_t>(dx);
}

double GeometricFactors::operator()(int dx) const { return (*this)(dx, 0); }

double GeometricFactors::operator()(int dx, int dy) const {
  const std::size_t s = slot(dx, dy);
  return s < value_.size() ? value_[s] : 0.0;
}

double GeometricFactors::variance(int dx, int dy) const {
  const std::size_t s = slot(dx, dy);
  return s < variance_.size() ? variance_[s] : 0.0;
}

double GeometricFactors::coarse(int dx, int dy) const {
  const std::size_t s = slot(dx, dy);
  return s < coarse_.size() ? coarse_[s] : 0.0;
}

namespace {

// Piecewise constant input: R = 2 * sum over unordered pairs |a - b|^p G(offset).
EvalReport eval_pc_1d(const PiecewiseConstant1D& f, const Kernel& kernel, const OracleConfig& cfg) {
  const GeometricFactors g(kernel, f.n(), cfg);
  const auto& a = f.coeffs();
  const int n = f.n();
  double value = 0.0;
  double coarse = 0.0;
  double var = 0.0;
  for (int d = 1; d <= std::min(g.max_offset(), n - 1); ++d) {
    double s = 0.0;
    for (int i = 0; i + d < n; ++i) s += std::pow(std::abs(a[i + d] - a[i]), cfg.p);
    if (s == 0.0) continue;
    value += 2.0 * s * g(d);
    coarse += 2.0 * s * g.coarse(d);
    var += 4.0 * s * s * g.variance(d);
  }
  EvalReport rep;
  rep.value = value;
  rep.config = cfg;
  if (cfg.method == OracleMethod::MonteCarlo) {
    rep.stderr_estimate = std::sqrt(var);
  } else {
    rep.richardson_delta = std::isfinite(value) ? value - coarse : 0.0;
  }
  return rep;
}

EvalReport eval_pc_2d(const Image2D& f, const Kernel& kernel, const OracleConfig& cfg) {
  const GeometricFactors g(kernel, f.n(), cfg);
  const int n = f.n();
  const int m = std::min(g.max_offset(), n - 1);
  // Coefficient of each stored factor, accumulated over both signs of dy.
  std::vector<double> coef(static_cast<std::size_t>(m + 1) * (m + 1), 0.0);
  for (int dx = 0; dx <= m; ++dx) {
    for (int dy = -m; dy <= m; ++dy) {
      if (dx == 0 && dy <= 0) continue;
      double s = 0.0;
      for (int j = std::max(0, -dy); j < std::min(n, n - dy); ++j) {
        for (int i = 0; i + dx < n; ++i) s += std::pow(std::abs(f(i + dx, j + dy) - f(i, j)), cfg.p);
      }
      coef[static_cast<std::size_t>(std::abs(dy)) * (m + 1) + dx] += 2.0 * s;
    }
  }
  double value = 0.0;
  double coarse = 0.0;
  double var = 0.0;
  for (int dy = 0; dy <= m; ++dy) {
    for (int dx = 0; dx <= m; ++dx) {
      const double c = coef[static_cast<std::size_t>(dy) * (m + 1) + dx];
      if (c == 0.0) continue;
      value += c * g(dx, dy);
      coarse += c * g.coarse(dx, dy);
      var += c * c * g.variance(dx, dy);
    }
  }
  EvalReport rep;
  rep.value = value;
  rep.config = cfg;
  if (cfg.method == OracleMethod::MonteCarlo) {
    rep.stderr_estimate = std::sqrt(var);
  } else {
    rep.richardson_delta = value - coarse;
  }
  return rep;
}

// F(t) = int_0^{1-t} |f(x+t) - f(x)|^p dx for a linear spline, exact.
double spline_shift_integral(const Spline1D& f, double t, double p) {
  const double end = 1.0 - t;
  if (end <= 0.0) return 0.0;
  const int n = f.n();
  std::vector<double> cuts{0.0, end};
  for (int k = 1; k < n; ++k) {
    const double x = double(k) / n;
    if (x < end) cuts.push_back(x);
    if (x - t > 0.0 && x - t < end) cuts.push_back(x - t);
  }
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k];
    const double b = cuts[k + 1];
    if (b <= a) continue;
    sum += abs_pow_linear(f(a + t) - f(a), f(b + t) - f(b), b - a, p);
  }
  return sum;
}

double callback_shift_integral(const Callback1D& f, double t, double p, const GaussRule& rule) {
  const double end = 1.0 - t;
  if (end <= 0.0) return 0.0;
  std::vector<double> cuts{0.0, end};
  for (int k = 1; k < f.cells; ++k) {
    const double x = double(k) / f.cells;
    if (x < end) cuts.push_back(x);
    if (x - t > 0.0 && x - t < end) cuts.push_back(x - t);
  }
  std::sort(cuts.begin(), cuts.end());
  auto g = [&](double x) { return std::pow(std::abs(f.f(x + t) - f.f(x)), p); };
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] > cuts[k]) sum += rule.integrate(g, cuts[k], cuts[k + 1]);
  }
  return sum;
}

// 2 * int_band^reach phi(t) t^-p F(t) dt, split at multiples of 1/cells.
template <typename Shift>
double shift_form_1d(const Kernel& kernel, int cells, double band, double p, Shift&& shift, const GaussRule& rule) {
  const double top = std::min(kernel.reach(), 1.0);
  const double height = kernel.height();
  auto g = [&](double t) { return height * std::pow(t, -p) * shift(t); };
  double sum = 0.0;
  for (int m = 0; double(m) / cells < top; ++m) {
    const double a = std::max(band, double(m) / cells);
    const double b = std::min(top, double(m + 1) / cells);
    if (b <= a) continue;
    const double step = (b - a) / kSubdivisions;
    for (int k = 0; k < kSubdivisions; ++k) sum += rule.integrate(g, a + k * step, a + (k + 1) * step);
  }
  return 2.0 * sum;
}

template <typename Fn>
EvalReport eval_smooth_1d(Fn&& fn, int cells, const Kernel& kernel, const OracleConfig& cfg,
                          bool spline_exact, const Spline1D* spline) {
  EvalReport rep;
  rep.config = cfg;
  const double p = cfg.p;
  if (cfg.method == OracleMethod::TensorGauss) {
    const GaussRule rule = gauss_legendre(cfg.points_per_cell_axis);
    auto shift = [&](double t) {
      if (spline_exact) return spline_shift_integral(*spline, t, p);
      return callback_shift_integral(Callback1D{fn, cells}, t, p, rule);
    };
    const double i1 = shift_form_1d(kernel, cells, kDiagonalBand, p, shift, rule);
    const double i2 = shift_form_1d(kernel, cells, 2.0 * kDiagonalBand, p, shift, rule);
    rep.value = std::max(0.0, 2.0 * i1 - i2);
    rep.richardson_delta = i1 - i2;
    return rep;
  }
  // Stratified MC over (t, x) with x uniform on (0, 1 - t).
  const double top = std::min(kernel.reach(), 1.0);
  const double height = kernel.height();
  CounterRng rng(cfg.seed, 0);
  auto g = [&](double u, double w) {
    const double t = top * u;
    if (t <= 0.0) return 0.0;
    const double x = w * (1.0 - t);
    return 2.0 * top * (1.0 - t) * height * std::pow(t, -p) * std::pow(std::abs(fn(x + t) - fn(x)), p);
  };
  auto [v, var] = rect_mc(Rect{0.0, 1.0, 0.0, 1.0}, g, cfg.samples, rng);
  rep.value = v;
  rep.stderr_estimate = std::sqrt(var);
  return rep;
}

// F(v) = int over Omega and Omega - v of |f(x + v) - f(x)|^p dx.
double callback_shift_integral_2d(const Callback2D& f, double vx, double vy, double p, const GaussRule& rule) {
  const double x0 = std::max(0.0, -vx), x1 = std::min(1.0, 1.0 - vx);
  const double y0 = std::max(0.0, -vy), y1 = std::min(1.0, 1.0 - vy);
  if (x1 <= x0 || y1 <= y0) return 0.0;
  const int cells = std::max(1, f.cells);
  const double hx = (x1 - x0) / cells;
  const double hy = (y1 - y0) / cells;
  double sum = 0.0;
  for (int a = 0; a < cells; ++a) {
    for (int b = 0; b < cells; ++b) {
      const double ax = x0 + a * hx;
      const double by = y0 + b * hy;
      auto inner = [&](double y) {
        auto row = [&](double x) { return std::pow(std::abs(f.f(x + vx, y + vy) - f.f(x, y)), p); };
        return rule.integrate(row, ax, ax + hx);
      };
      sum += rule.integrate(inner, by, by + hy);
    }
  }
  return sum;
}

EvalReport eval_callback_2d(const Callback2D& f, const Kernel& kernel, const OracleConfig& cfg) {
  EvalReport rep;
  rep.config = cfg;
  const double reach = kernel.reach();
  const bool disc = kernel.kind() == KernelKind::Disc2D;
  const double height = kernel.height();
  const double p = cfg.p;
  if (cfg.method == OracleMethod::TensorGauss) {
    const GaussRule rule = gauss_legendre(cfg.points_per_cell_axis);
    const Rect quadrant{0.0, reach, 0.0, reach};
    // F is even in v, so the upper half plane counts twice.
    auto total = [&](double band) {
      auto right = [&](double vx, double vy) { return height * callback_shift_integral_2d(f, vx, vy, p, rule); };
      auto left = [&](double vx, double vy) { return height * callback_shift_integral_2d(f, -vx, vy, p, rule); };
      return 2.0 * (polar_rect(quadrant, disc ? reach : 0.0, band, p, right, rule) +
                    polar_rect(quadrant, disc ? reach : 0.0, band, p, left, rule));
    };
    const double i1 = total(kDiagonalBand);
    const double i2 = total(2.0 * kDiagonalBand);
    rep.value = std::max(0.0, 2.0 * i1 - i2);
    rep.richardson_delta = i1 - i2;
    return rep;
  }
  CounterRng rng(cfg.seed, 0);
  auto g = [&](double vx, double vy) {
    const double phi = kernel(vx, vy);
    if (phi == 0.0) return 0.0;
    const double x0 = std::max(0.0, -vx), x1 = std::min(1.0, 1.0 - vx);
    const double y0 = std::max(0.0, -vy), y1 = std::min(1.0, 1.0 - vy);
    if (x1 <= x0 || y1 <= y0) return 0.0;
    const double x = x0 + (x1 - x0) * rng.uniform();
    const double y = y0 + (y1 - y0) * rng.uniform();
    const double r = std::hypot(vx, vy);
    return phi * std::pow(r, -p) * (x1 - x0) * (y1 - y0) * std::pow(std::abs(f.f(x + vx, y + vy) - f.f(x, y)), p);
  };
  auto [v, var] = rect_mc(Rect{-reach, reach, -reach, reach}, g, cfg.samples, rng);
  rep.value = v;
  rep.stderr_estimate = std::sqrt(var);
  return rep;
}

}  // namespace

EvalReport oracle_eval(const OracleInput& input, const Kernel& kernel, const OracleConfig& cfg) {
  cfg.validate();
  const int input_dim = (std::holds_alternative<Image2D>(input) || std::holds_alternative<Callback2D>(input)) ? 2 : 1;
  if (input_dim != kernel.dim()) {
    throw std::invalid_argument("oracle: input is " + std::to_string(input_dim) + "D but kernel is " +
                                std::to_string(kernel.dim()) + "D");
  }
  if (const auto* pc = std::get_if<PiecewiseConstant1D>(&input)) return eval_pc_1d(*pc, kernel, cfg);
  if (const auto* img = std::get_if<Image2D>(&input)) return eval_pc_2d(*img, kernel, cfg);
  if (const auto* sp = std::get_if<Spline1D>(&input)) {
    auto fn = [sp](double x) { return (*sp)(x); };
    return eval_smooth_1d(fn, sp->n(), kernel, cfg, true, sp);
  }
  if (const auto* cb = std::get_if<Callback1D>(&input)) {
    if (!cb->f) throw std::invalid_argument("oracle: empty callback");
    return eval_smooth_1d(cb->f, std::max(1, cb->cells), kernel, cfg, false, nullptr);
  }
  const auto& cb2 = std::get<Callback2D>(input);
  if (!cb2.f) throw std::invalid_argument("oracle: empty callback");
  return eval_callback_2d(cb2, kernel, cfg);
}

namespace {

struct PairCounts {
  double lateral = 0.0;
  double diagonal = 0.0;
};

// Unit jumps across lateral and diagonal pairs of a 0/1 image.
PairCounts count_jumps(const Image2D& f) {
  PairCounts c;
  const int n = f.n();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (j > 0) c.lateral += std::abs(f(i, j) - f(i, j - 1));
      if (i > 0) c.lateral += std::abs(f(i, j) - f(i - 1, j));
      if (i > 0 && j > 0) c.diagonal += std::abs(f(i, j) - f(i - 1, j - 1));
      if (i + 1 < n && j > 0) c.diagonal += std::abs(f(i, j) - f(i + 1, j - 1));
    }
  }
  return c;
}

}  // namespace

StencilWeights fit_stencil(KernelKind kind, int n, const OracleConfig& cfg) {
  if (kind != KernelKind::Disc2D && kind != KernelKind::Square2D) {
    throw std::invalid_argument("fit_stencil: kernel must be disc or square");
  }
  if (n < 2 || n > 8) throw std::invalid_argument("fit_stencil: n must be in [2, 8]");
  const Kernel kernel(kind, n);

  std::vector<Image2D> basis;
  Image2D checker = Image2D::constant(n, 0.0);
  Image2D corner = Image2D::constant(n, 0.0);
  Image2D edge = Image2D::constant(n, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      checker(i, j) = (i + j) % 2;
      edge(i, j) = i < n / 2 ? 1.0 : 0.0;
    }
  }
  corner(0, 0) = 1.0;
  basis = {checker, corner, edge};

  // Normal equations for value = lateral * L + diagonal * D.
  double sll = 0.0, sld = 0.0, sdd = 0.0, slv = 0.0, sdv = 0.0;
  for (const Image2D& img : basis) {
    const PairCounts c = count_jumps(img);
    const double v = oracle_eval(img, kernel, cfg).value;
    sll += c.lateral * c.lateral;
    sld += c.lateral * c.diagonal;
    sdd += c.diagonal * c.diagonal;
    slv += c.lateral * v;
    sdv += c.diagonal * v;
  }
  const double det = sll * sdd - sld * sld;
  return {(slv * sdd - sdv * sld) / det, (sll * sdv - sld * slv) / det, kind, n};
}

McEstimate overlap_integral_mc(bool diagonal, int n, std::int64_t samples, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("overlap_integral_mc: n must be >= 1");
  if (samples < 2) throw std::invalid_argument("overlap_integral_mc: need at least two samples");
  const double h = 1.0 / n;
  CounterRng rng(seed, diagonal ? 2 : 1);
  double sum = 0.0;
  double sum2 = 0.0;
  for (std::int64_t s = 0; s < samples; ++s) {
    const double x = h * rng.uniform();
    const double y = h * rng.uniform();
    const double w = diagonal ? -h * rng.uniform() : h * rng.uniform();
    const double z = -h * rng.uniform();
    const double r = std::hypot(x - w, y - z);
    const double g = r < h ? 1.0 / r : 0.0;
    sum += g;
    sum2 += g * g;
  }
  const double vol = h * h * h * h;
  const double mean = sum / samples;
  const double var = std::max(0.0, sum2 / samples - mean * mean) / (samples - 1);
  return {vol * mean, vol * std::sqrt(var)};
}

}  // namespace nltv
