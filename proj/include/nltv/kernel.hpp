#pragma once

#include <span>
#include <string_view>

namespace nltv {

/// Mollifier families. All four are constant on their support.
///
///   Box1D      (n/2)  on [-1/n, 1/n]
///   Box1DWide  (n/4)  on [-2/n, 2/n]
///   Disc2D     (n^2/pi) on the open disc of radius 1/n
///   Square2D   (n^2/4)  on the open square (-1/n, 1/n)^2 (not radial)
enum class KernelKind { Box1D, Box1DWide, Disc2D, Square2D };

std::string_view to_string(KernelKind kind);

/// A kernel phi_n. The scale index n is independent of any grid resolution,
/// so a coarse kernel can be paired with a fine grid.
class Kernel {
public:
  /// Throws std::invalid_argument unless `scale` is finite and positive.
  Kernel(KernelKind kind, double scale);

  KernelKind kind() const noexcept { return kind_; }
  double scale() const noexcept { return scale_; }
  int dim() const noexcept;
  bool is_radial() const noexcept { return kind_ != KernelKind::Square2D; }

  /// Value on the support.
  double height() const noexcept;

  /// Half-width of the support along each axis (the radius for the disc).
  double reach() const noexcept;

  double operator()(double x) const noexcept;
  double operator()(double x, double y) const noexcept;
  /// Dispatches on x.size(); returns 0 when it does not match dim().
  double eval(std::span<const double> x) const noexcept;

  /// Radial profile phi~(r) for the radial kinds.
  double profile(double r) const noexcept;

  /// Exact integral over R^dim.
  double mass() const noexcept;

  friend bool operator==(const Kernel&, const Kernel&) = default;

private:
  KernelKind kind_;
  double scale_;
};

inline double kernel_eval(const Kernel& k, std::span<const double> x) { return k.eval(x); }
inline double kernel_mass(const Kernel& k) { return k.mass(); }

struct KpnConstant {
  double p;
  int dim;
  double value;
};

/// Spherical average of |<e, sigma>|^p. Equals 1 in one dimension; in two
/// dimensions the cases p = 1 and p = 2 are closed-form and every other p is
/// integrated adaptively over the angle. Rejects p < 1 and dim outside {1, 2}.
KpnConstant kpn(double p, int dim);

}  // namespace nltv
