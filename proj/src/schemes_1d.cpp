#include "nltv/schemes_1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nltv {

namespace {

void require_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite coefficient");
  }
}

// x ln x with the continuous extension 0 ln 0 = 0.
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

int sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

PiecewiseConstant1D::PiecewiseConstant1D(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw std::invalid_argument("PiecewiseConstant1D: need at least one cell");
  require_finite(coeffs_, "PiecewiseConstant1D");
}

double PiecewiseConstant1D::operator()(double x) const noexcept {
  const int i = std::clamp(static_cast<int>(std::floor(x * n())), 0, n() - 1);
  return coeffs_[i];
}

Spline1D::Spline1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw std::invalid_argument("Spline1D: need at least two nodes");
  require_finite(nodes_, "Spline1D");
}

double Spline1D::operator()(double x) const noexcept {
  const double s = std::clamp(x, 0.0, 1.0) * n();
  const int k = std::clamp(static_cast<int>(std::floor(s)), 0, n() - 1);
  const double w = s - k;
  return nodes_[k] + w * (nodes_[k + 1] - nodes_[k]);
}

bool HaarIndex::valid() const noexcept {
  if (k == 0) return j == 0 || j == 1;
  return k >= 1 && k < 30 && j >= 1 && j <= (1 << k);
}

PiecewiseConstant1D haar_function(HaarIndex h) {
  if (!h.valid()) throw std::invalid_argument("haar_function: invalid index");
  if (h.k == 0 && h.j == 0) return PiecewiseConstant1D(std::vector<double>(2, 1.0));
  const int cells = 2 << h.k;
  const double amp = std::sqrt(static_cast<double>(1 << h.k));
  std::vector<double> v(cells, 0.0);
  v[2 * h.j - 2] = amp;
  v[2 * h.j - 1] = -amp;
  return PiecewiseConstant1D(std::move(v));
}

double eval_pc_box(const PiecewiseConstant1D& f) {
  const auto& a = f.coeffs();
  double sum = 0.0;
  for (std::size_t i = 1; i < a.size(); ++i) sum += std::abs(a[i] - a[i - 1]);
  return sum;
}

double eval_pc_box_wide(const PiecewiseConstant1D& f) {
  if (f.n() < 2) throw std::invalid_argument("eval_pc_box_wide: n must be >= 2");
  const auto& a = f.coeffs();
  const double ln2 = std::numbers::ln2;
  double second = 0.0;
  for (std::size_t i = 1; i + 1 < a.size(); ++i) second += std::abs(a[i + 1] - a[i - 1]);
  double first = 0.0;
  for (std::size_t i = 1; i < a.size(); ++i) first += std::abs(a[i] - a[i - 1]);
  return (1.0 - ln2) / 2.0 * second + ln2 * first;
}

double spline_coupling(double left, double mid, double right) noexcept {
  const int s1 = sign(left - mid);
  const int s2 = sign(mid - right);
  // A zero difference counts as matching either sign; both branches coincide there.
  if (s1 == s2 || s1 == 0 || s2 == 0) return std::abs(right - left) / 4.0;
  const double dl = mid - left;
  const double dr = mid - right;
  return (dl * dl + dr * dr) / (4.0 * (std::abs(dl) + std::abs(dr)));
}

double eval_spline(const Spline1D& f) {
  if (f.n() < 2) throw std::invalid_argument("eval_spline: n must be >= 2");
  const auto& a = f.nodes();
  double sum = 0.0;
  for (std::size_t i = 1; i < a.size(); ++i) sum += std::abs(a[i] - a[i - 1]) / 2.0;
  for (std::size_t i = 1; i + 1 < a.size(); ++i) sum += spline_coupling(a[i - 1], a[i], a[i + 1]);
  return sum;
}

namespace {

// Values of every branch whose scale range contains n, in branch order.
std::vector<double> haar_marginal(int k, double n) {
  const double K = std::ldexp(1.0, k);
  const double root = std::sqrt(K);
  const double ln2 = std::numbers::ln2;
  std::vector<double> out;
  if (n == 1.0) out.push_back(root * ((k + 2.0 / K) * ln2 - (1.0 - 1.0 / K) * std::log(K - 1.0)));
  if (n >= 2.0 && n <= K) out.push_back(n / root * ((k + 2.0) * ln2 - std::log(n) + 1.0));
  if (n >= K && n <= 2.0 * K) {
    out.push_back(root * n *
                  ((k + 1.0) / (K / 2.0) * ln2 - std::log(n) / (K / 2.0) + 1.0 / (K / 2.0) - 1.0 / n));
  }
  if (n >= 2.0 * K) out.push_back(3.0 * root);
  return out;
}

// Inner functions, 2 <= j <= 2^(k-1).
std::vector<double> haar_inner(int k, int j, double n) {
  const double K = std::ldexp(1.0, k);
  const double root = std::sqrt(K);
  const double ln2 = std::numbers::ln2;
  const double jd = j;
  std::vector<double> out;
  if (n == 1.0) {
    out.push_back(root * (xlogx(jd) / K - xlogx(jd - 1.0) / K - (1.0 - jd / K) * std::log(K - jd) +
                          (1.0 - (jd - 1.0) / K) * std::log(K - jd + 1.0) + ln2 / (K / 2.0)));
  }
  if (n >= K / (K - jd) && n <= K / jd) {
    out.push_back(n / root * (xlogx(jd) - xlogx(jd - 1.0) + (k + 2.0) * ln2 - std::log(n) + 1.0));
  }
  if (n >= K / jd && n <= K / (jd - 1.0)) {
    out.push_back(n * root *
                  (-xlogx(jd - 1.0) / K - (jd + 1.0) * std::log(n) / K + (k * jd + k + 2.0) * ln2 / K +
                   (jd + 1.0) / K - 1.0 / n));
  }
  if (n >= K / (jd - 1.0) && n <= 2.0 * K) out.push_back(2.0 * n / root * ((k + 1.0) * ln2 - std::log(n) + 1.0));
  if (n >= 2.0 * K) out.push_back(4.0 * root);
  return out;
}

}  // namespace

std::vector<double> haar_branch_values(HaarIndex h, double n) {
  if (!h.valid()) {
    throw std::invalid_argument("eval_haar: invalid index (k=" + std::to_string(h.k) +
                                ", j=" + std::to_string(h.j) + ")");
  }
  if (!std::isfinite(n) || n < 1.0) throw std::invalid_argument("eval_haar: scale must be >= 1");
  if (h.k == 0) {
    if (h.j == 0) return {0.0};
    if (n == 1.0) return {2.0 * std::numbers::ln2};
    if (n >= 2.0) return {2.0};
    return {};
  }
  const int half = 1 << (h.k - 1);
  const int j = h.j > half ? (1 << h.k) - h.j + 1 : h.j;
  return j == 1 ? haar_marginal(h.k, n) : haar_inner(h.k, j, n);
}

double eval_haar(HaarIndex h, double n) {
  const std::vector<double> values = haar_branch_values(h, n);
  if (values.empty()) {
    throw std::domain_error("eval_haar: scale " + std::to_string(n) + " is not covered for k=" +
                            std::to_string(h.k) + ", j=" + std::to_string(h.j));
  }
  return values.back();
}

}  // namespace nltv
