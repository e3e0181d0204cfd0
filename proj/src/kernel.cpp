#include "nltv/kernel.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace nltv {

namespace {
constexpr double kPi = boost::math::constants::pi<double>();
}

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Box1D: return "box";
    case KernelKind::Box1DWide: return "box2";
    case KernelKind::Disc2D: return "disc";
    case KernelKind::Square2D: return "square";
  }
  return "?";
}

Kernel::Kernel(KernelKind kind, double scale) : kind_(kind), scale_(scale) {
  if (!std::isfinite(scale) || scale <= 0.0) {
    throw std::invalid_argument("kernel scale must be finite and positive");
  }
}

int Kernel::dim() const noexcept {
  return (kind_ == KernelKind::Box1D || kind_ == KernelKind::Box1DWide) ? 1 : 2;
}

double Kernel::height() const noexcept {
  const double n = scale_;
  switch (kind_) {
    case KernelKind::Box1D: return n / 2.0;
    case KernelKind::Box1DWide: return n / 4.0;
    case KernelKind::Disc2D: return n * n / kPi;
    case KernelKind::Square2D: return n * n / 4.0;
  }
  return 0.0;
}

double Kernel::reach() const noexcept {
  return kind_ == KernelKind::Box1DWide ? 2.0 / scale_ : 1.0 / scale_;
}

double Kernel::operator()(double x) const noexcept {
  if (dim() != 1 || !std::isfinite(x)) return 0.0;
  // Closed interval, as written for the 1D kernels.
  return std::abs(x) <= reach() ? height() : 0.0;
}

double Kernel::operator()(double x, double y) const noexcept {
  if (dim() != 2 || !std::isfinite(x) || !std::isfinite(y)) return 0.0;
  const double h = reach();
  if (kind_ == KernelKind::Disc2D) {
    return x * x + y * y < h * h ? height() : 0.0;
  }
  return (std::abs(x) < h && std::abs(y) < h) ? height() : 0.0;
}

double Kernel::eval(std::span<const double> x) const noexcept {
  if (static_cast<int>(x.size()) != dim()) return 0.0;
  return dim() == 1 ? (*this)(x[0]) : (*this)(x[0], x[1]);
}

double Kernel::profile(double r) const noexcept {
  if (!is_radial() || r < 0.0) return 0.0;
  return dim() == 1 ? (*this)(r) : (*this)(r, 0.0);
}

double Kernel::mass() const noexcept {
  const double h = reach();
  switch (kind_) {
    case KernelKind::Box1D:
    case KernelKind::Box1DWide: return height() * 2.0 * h;
    case KernelKind::Disc2D: return height() * kPi * h * h;
    case KernelKind::Square2D: return height() * 4.0 * h * h;
  }
  return 0.0;
}

KpnConstant kpn(double p, int dim) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw std::invalid_argument("kpn: p must be >= 1");
  }
  if (dim < 1 || dim > 2) {
    throw std::invalid_argument("kpn: only dim 1 and 2 are supported, got " + std::to_string(dim));
  }
  if (dim == 1) return {p, dim, 1.0};
  if (p == 1.0) return {p, dim, 2.0 / kPi};
  if (p == 2.0) return {p, dim, 0.5};

  // (1/2pi) * int_0^{2pi} |cos t|^p dt = (2/pi) * int_0^{pi/2} cos^p t dt
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  const double integral = gauss_kronrod<double, 31>::integrate(
      [p](double t) { return std::pow(std::cos(t), p); }, 0.0, kPi / 2.0, 15, 1e-14, &err);
  return {p, dim, 2.0 / kPi * integral};
}

}  // namespace nltv
