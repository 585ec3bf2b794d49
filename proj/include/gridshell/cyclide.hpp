#pragma once

// Generalized Dupin cyclide patch in isothermic curvature-line parameters and
// its numerical curvature-line frame.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "gridshell/errors.hpp"
#include "gridshell/laguerre.hpp"

namespace gridshell {

/// Default central-difference step in parameter space.
inline constexpr double kDefaultFdStep = 1e-3;
/// Relative |k1 A1 - k2 A2| above which a frame is rejected.
inline constexpr double kFrameIsothermicTol = 1e-3;

template <typename Scalar>
struct CyclideParams {
  Scalar a0 = Scalar(2.144);
  Scalar c0 = std::sqrt(Scalar(2.144) * Scalar(2.144) - Scalar(1));
  Scalar xi_min = Scalar(-0.1 * M_PI);
  Scalar xi_max = Scalar(0.1 * M_PI);
  Scalar eta_min = Scalar(0);
  Scalar eta_max = Scalar(0.490430);
  Scalar scale = Scalar(1);  ///< mm per model unit

  /// c0 is derived so that a0^2 - c0^2 = 1 holds exactly.
  static CyclideParams from_a0(Scalar a0, Scalar xi_min, Scalar xi_max, Scalar eta_min, Scalar eta_max, Scalar scale) {
    if (!(a0 > Scalar(1))) throw InvalidArgument("cyclide: a0 must exceed 1");
    using std::sqrt;
    CyclideParams p{a0, sqrt(a0 * a0 - Scalar(1)), xi_min, xi_max, eta_min, eta_max, scale};
    p.validate();
    return p;
  }

  void validate() const {
    using std::abs;
    if (!(a0 > Scalar(1))) throw InvalidArgument("cyclide: a0 must exceed 1");
    if (abs(a0 * a0 - c0 * c0 - Scalar(1)) > Scalar(1e-12)) throw InvalidArgument("cyclide: a0^2 - c0^2 must equal 1");
    if (!(xi_max > xi_min) || !(eta_max > eta_min)) throw InvalidArgument("cyclide: parameter ranges must be increasing");
    if (!(scale > Scalar(0))) throw InvalidArgument("cyclide: scale must be positive");
  }
};

/// Isothermic parameter of the circle through angle phi: sin(phi) = tanh(eta).
template <typename Scalar>
Scalar circle_angle_to_eta(Scalar phi) {
  using std::abs;
  using std::atanh;
  using std::sin;
  if (!(abs(phi) < Scalar(M_PI / 2))) throw InvalidArgument("circle angle must lie in (-pi/2, pi/2)");
  return atanh(sin(phi));
}

namespace detail {

template <typename Scalar>
Scalar cyclide_denominator(const CyclideParams<Scalar>& cp, Scalar xi, Scalar eta) {
  using std::cos;
  using std::cosh;
  const Scalar d = cp.a0 * cosh(eta) - cp.c0 * cos(xi);
  if (!(d > Scalar(1e-12))) throw SingularError("cyclide: parametrization denominator vanishes");
  return d;
}

}  // namespace detail

template <typename Scalar>
Vec3<Scalar> eval_point(const CyclideParams<Scalar>& cp, Scalar xi, Scalar eta) {
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  const Scalar d = detail::cyclide_denominator(cp, xi, eta);
  const Scalar k = cos(xi) / (Scalar(2) * d);
  const Vec3<Scalar> circle(cos(xi) * cosh(eta), cp.a0 * sin(xi) * cosh(eta), cp.c0 * cos(xi) * sinh(eta));
  const Vec3<Scalar> shift(-cp.a0, Scalar(2) * xi, Scalar(0));
  return cp.scale * (k * circle + shift / Scalar(4));
}

/// Closed-form partial derivative of eval_point with respect to xi.
template <typename Scalar>
Vec3<Scalar> eval_xi_tangent(const CyclideParams<Scalar>& cp, Scalar xi, Scalar eta) {
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  const Scalar d = detail::cyclide_denominator(cp, xi, eta);
  const Scalar k = cos(xi) / (Scalar(2) * d);
  const Scalar k_xi = -cp.a0 * cosh(eta) * sin(xi) / (Scalar(2) * d * d);
  const Vec3<Scalar> circle(cos(xi) * cosh(eta), cp.a0 * sin(xi) * cosh(eta), cp.c0 * cos(xi) * sinh(eta));
  const Vec3<Scalar> circle_xi(-sin(xi) * cosh(eta), cp.a0 * cos(xi) * cosh(eta), -cp.c0 * sin(xi) * sinh(eta));
  return cp.scale * (k_xi * circle + k * circle_xi + Vec3<Scalar>(0, Scalar(0.5), 0));
}

template <typename Scalar>
struct SurfaceSample {
  Scalar xi = 0;
  Scalar eta = 0;
  Vec3<Scalar> p = Vec3<Scalar>::Zero();
  Vec3<Scalar> n = Vec3<Scalar>::UnitZ();
  Scalar kappa1 = 0;
  Scalar kappa2 = 0;
  Scalar A1 = 0;
  Scalar A2 = 0;
  /// ln|kappa1 A1|; the sign of kappa1 A1 is that of kappa1.
  Scalar theta = 0;

  Scalar isothermic_mismatch() const {
    using std::abs;
    const Scalar a = kappa1 * A1;
    return abs(a - kappa2 * A2) / abs(a);
  }
};

template <typename Scalar>
using PointFunction = std::function<Vec3<Scalar>(Scalar, Scalar)>;

/// Frame of a surface given in curvature-line parameters: central differences
/// for everything except an optional analytic xi tangent.
template <typename Scalar>
SurfaceSample<Scalar> curvature_line_frame(const PointFunction<Scalar>& point, Scalar xi, Scalar eta, Scalar h,
                                           const std::optional<Vec3<Scalar>>& xi_tangent = std::nullopt) {
  using std::abs;
  using std::log;
  if (!(h > Scalar(0))) throw InvalidArgument("finite-difference step must be positive");
  const Vec3<Scalar> p = point(xi, eta);
  const Vec3<Scalar> xp = point(xi + h, eta);
  const Vec3<Scalar> xm = point(xi - h, eta);
  const Vec3<Scalar> ep = point(xi, eta + h);
  const Vec3<Scalar> em = point(xi, eta - h);

  const Vec3<Scalar> r_xi = xi_tangent ? *xi_tangent : Vec3<Scalar>((xp - xm) / (Scalar(2) * h));
  const Vec3<Scalar> r_eta = (ep - em) / (Scalar(2) * h);
  const Vec3<Scalar> r_xixi = (xp - Scalar(2) * p + xm) / (h * h);
  const Vec3<Scalar> r_etaeta = (ep - Scalar(2) * p + em) / (h * h);

  const Vec3<Scalar> cross = r_xi.cross(r_eta);
  const Scalar cross_norm = cross.norm();
  if (!(cross_norm > Scalar(0))) throw SingularError("surface frame: tangents are parallel");

  SurfaceSample<Scalar> s;
  s.xi = xi;
  s.eta = eta;
  s.p = p;
  s.n = cross / cross_norm;
  s.A1 = r_xi.norm();
  s.A2 = r_eta.norm();
  s.kappa1 = r_xixi.dot(s.n) / (s.A1 * s.A1);
  s.kappa2 = r_etaeta.dot(s.n) / (s.A2 * s.A2);
  if (s.kappa1 == Scalar(0)) throw SingularError("surface frame: flat point");
  s.theta = log(abs(s.kappa1 * s.A1));
  return s;
}

template <typename Scalar>
SurfaceSample<Scalar> eval_frame(const CyclideParams<Scalar>& cp, Scalar xi, Scalar eta,
                                 Scalar h = Scalar(kDefaultFdStep)) {
  const PointFunction<Scalar> point = [&cp](Scalar x, Scalar e) { return eval_point(cp, x, e); };
  SurfaceSample<Scalar> s = curvature_line_frame<Scalar>(point, xi, eta, h, eval_xi_tangent(cp, xi, eta));
  if (s.isothermic_mismatch() > Scalar(kFrameIsothermicTol))
    throw FrameInconsistency("cyclide frame: k1 A1 and k2 A2 disagree beyond tolerance");
  return s;
}

/// Samples on a uniform (n_xi+1) x (n_eta+1) parameter grid, xi-major.
template <typename Scalar>
struct SampleGrid {
  int n_xi = 0;
  int n_eta = 0;
  std::vector<Scalar> xi;
  std::vector<Scalar> eta;
  std::vector<SurfaceSample<Scalar>> samples;

  int index(int i, int j) const { return i * (n_eta + 1) + j; }
  const SurfaceSample<Scalar>& at(int i, int j) const { return samples[static_cast<std::size_t>(index(i, j))]; }
  SurfaceSample<Scalar>& at(int i, int j) { return samples[static_cast<std::size_t>(index(i, j))]; }
};

template <typename Scalar>
std::vector<Scalar> uniform_nodes(Scalar lo, Scalar hi, int n) {
  std::vector<Scalar> v(static_cast<std::size_t>(n + 1));
  for (int k = 0; k <= n; ++k) v[static_cast<std::size_t>(k)] = lo + (hi - lo) * Scalar(k) / Scalar(n);
  return v;
}

/// Grid of samples produced by an arbitrary frame function over a parameter box.
template <typename Scalar, typename FrameFn>
SampleGrid<Scalar> sample_grid_with(FrameFn&& frame, Scalar xi_min, Scalar xi_max, Scalar eta_min, Scalar eta_max,
                                    int n_xi, int n_eta) {
  if (n_xi < 1 || n_eta < 1) throw InvalidArgument("sample grid: counts must be at least 1");
  SampleGrid<Scalar> g;
  g.n_xi = n_xi;
  g.n_eta = n_eta;
  g.xi = uniform_nodes(xi_min, xi_max, n_xi);
  g.eta = uniform_nodes(eta_min, eta_max, n_eta);
  g.samples.reserve(static_cast<std::size_t>((n_xi + 1) * (n_eta + 1)));
  for (int i = 0; i <= n_xi; ++i)
    for (int j = 0; j <= n_eta; ++j) g.samples.push_back(frame(g.xi[std::size_t(i)], g.eta[std::size_t(j)]));
  return g;
}

template <typename Scalar>
SampleGrid<Scalar> sample_grid(const CyclideParams<Scalar>& cp, int n_xi, int n_eta,
                               Scalar h = Scalar(kDefaultFdStep)) {
  cp.validate();
  return sample_grid_with<Scalar>([&](Scalar x, Scalar e) { return eval_frame(cp, x, e, h); }, cp.xi_min,
                                  cp.xi_max, cp.eta_min, cp.eta_max, n_xi, n_eta);
}

}  // namespace gridshell
