#pragma once

// Laguerre geometry in the cyclographic model: oriented spheres, planes and
// points are 4-vectors (x1, x2, x3, x4) = (center or normal, signed radius)
// under the pseudo-Euclidean metric diag(1, 1, 1, -1), with a homogeneous
// weight w in {0, 1} distinguishing planes from spheres.

#include <Eigen/Dense>

#include <cmath>
#include <initializer_list>
#include <span>
#include <vector>

#include "gridshell/errors.hpp"

namespace gridshell {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vec4 = Eigen::Matrix<Scalar, 4, 1>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Mat4 = Eigen::Matrix<Scalar, 4, 4>;

/// Tolerance on max|D^T E_pe D - E_pe| accepted after generator composition.
inline constexpr double kPseudoOrthogonalityTol = 1e-12;

template <typename Scalar>
Mat4<Scalar> pe_metric() {
  return Vec4<Scalar>(Scalar(1), Scalar(1), Scalar(1), Scalar(-1)).asDiagonal();
}

/// x1 y1 + x2 y2 + x3 y3 - x4 y4
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar pe_dot(const Eigen::MatrixBase<DerivedX>& x,
                                 const Eigen::MatrixBase<DerivedY>& y) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(DerivedX, 4);
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(DerivedY, 4);
  return x(0) * y(0) + x(1) * y(1) + x(2) * y(2) - x(3) * y(3);
}

/// Squared pe-norm. Zero for oriented contact, negative for timelike vectors;
/// no square root is exposed.
template <typename Derived>
typename Derived::Scalar pe_norm_sq(const Eigen::MatrixBase<Derived>& x) {
  return pe_dot(x, x);
}

/// Homogeneous cyclographic vector (w, c, r).
/// w = 1: sphere with center c and signed radius r (a point when r = 0).
/// w = 0: oriented plane with normal c and offset-norm r.
template <typename Scalar>
struct CyclographicVector {
  Scalar w = Scalar(1);
  Vec3<Scalar> c = Vec3<Scalar>::Zero();
  Scalar r = Scalar(0);

  static CyclographicVector sphere(const Vec3<Scalar>& center, Scalar radius) {
    return {Scalar(1), center, radius};
  }
  static CyclographicVector point(const Vec3<Scalar>& p) { return {Scalar(1), p, Scalar(0)}; }
  static CyclographicVector plane(const Vec3<Scalar>& normal, Scalar offset_norm) {
    return {Scalar(0), normal, offset_norm};
  }

  Vec4<Scalar> coords() const {
    Vec4<Scalar> x;
    x << c, r;
    return x;
  }
  bool is_plane() const { return w == Scalar(0); }
};

/// Generator planes for pe-rotations. X2X3 mixes (x1, x4), X3X1 mixes (x2, x4),
/// X1X2 mixes (x3, x4).
enum class PePlane { X2X3, X3X1, X1X2 };

template <typename Scalar>
class LaguerreMap;

template <typename Scalar>
LaguerreMap<Scalar> make_pe_rotation(PePlane plane, Scalar tau);
template <typename Scalar>
LaguerreMap<Scalar> make_euclidean(const Mat3<Scalar>& rotation, const Vec3<Scalar>& shift);
template <typename Scalar>
LaguerreMap<Scalar> make_offset(Scalar distance);
template <typename Scalar>
LaguerreMap<Scalar> make_scaling(Scalar factor);
template <typename Scalar>
LaguerreMap<Scalar> compose(std::span<const LaguerreMap<Scalar>> maps);

/// Laguerre transformation (w, x) -> (w, w t + lambda D x) with D pseudo-orthogonal.
///
/// Only the generator factories and composition can build one, so D is
/// pseudo-orthogonal by construction; compose() re-validates the product.
template <typename Scalar>
class LaguerreMap {
 public:
  LaguerreMap() = default;

  const Mat4<Scalar>& D() const { return D_; }
  const Vec4<Scalar>& t() const { return t_; }
  Scalar lambda() const { return lambda_; }

  bool is_identity() const {
    return lambda_ == Scalar(1) && t_.isZero(Scalar(0)) && D_ == Mat4<Scalar>::Identity();
  }

  /// max |D^T E_pe D - E_pe|
  Scalar pseudo_orthogonality_error() const {
    const Mat4<Scalar> E = pe_metric<Scalar>();
    return (D_.transpose() * E * D_ - E).cwiseAbs().maxCoeff();
  }

  CyclographicVector<Scalar> operator()(const CyclographicVector<Scalar>& x) const {
    const Vec4<Scalar> y = x.w * t_ + lambda_ * (D_ * x.coords());
    return {x.w, y.template head<3>(), y(3)};
  }

  /// Applies `this` first, then `next`.
  LaguerreMap then(const LaguerreMap& next) const {
    return LaguerreMap(next.D_ * D_, next.t_ + next.lambda_ * (next.D_ * t_), next.lambda_ * lambda_);
  }

  LaguerreMap inverse() const {
    const Mat4<Scalar> E = pe_metric<Scalar>();
    const Mat4<Scalar> D_inv = E * D_.transpose() * E;
    return LaguerreMap(D_inv, -(D_inv * t_) / lambda_, Scalar(1) / lambda_);
  }

 private:
  LaguerreMap(const Mat4<Scalar>& D, const Vec4<Scalar>& t, Scalar lambda) : D_(D), t_(t), lambda_(lambda) {}

  Mat4<Scalar> D_ = Mat4<Scalar>::Identity();
  Vec4<Scalar> t_ = Vec4<Scalar>::Zero();
  Scalar lambda_ = Scalar(1);

  friend LaguerreMap make_pe_rotation<Scalar>(PePlane, Scalar);
  friend LaguerreMap make_euclidean<Scalar>(const Mat3<Scalar>&, const Vec3<Scalar>&);
  friend LaguerreMap make_offset<Scalar>(Scalar);
  friend LaguerreMap make_scaling<Scalar>(Scalar);
};

template <typename Scalar>
LaguerreMap<Scalar> make_pe_rotation(PePlane plane, Scalar tau) {
  using std::cosh;
  using std::isfinite;
  using std::sinh;
  if (!isfinite(tau)) throw InvalidArgument("pe-rotation: hyperbolic angle must be finite");
  const int i = static_cast<int>(plane);
  Mat4<Scalar> D = Mat4<Scalar>::Identity();
  D(i, i) = D(3, 3) = cosh(tau);
  D(i, 3) = D(3, i) = sinh(tau);
  return LaguerreMap<Scalar>(D, Vec4<Scalar>::Zero(), Scalar(1));
}

template <typename Scalar>
LaguerreMap<Scalar> make_euclidean(const Mat3<Scalar>& rotation, const Vec3<Scalar>& shift) {
  using std::abs;
  const Scalar orth_err = (rotation.transpose() * rotation - Mat3<Scalar>::Identity()).cwiseAbs().maxCoeff();
  if (orth_err > Scalar(1e-10) || abs(rotation.determinant() - Scalar(1)) > Scalar(1e-10))
    throw InvalidArgument("euclidean map: rotation must be orthogonal with determinant +1");
  Mat4<Scalar> D = Mat4<Scalar>::Identity();
  D.template topLeftCorner<3, 3>() = rotation;
  Vec4<Scalar> t;
  t << shift, Scalar(0);
  return LaguerreMap<Scalar>(D, t, Scalar(1));
}

template <typename Scalar>
LaguerreMap<Scalar> make_offset(Scalar distance) {
  return LaguerreMap<Scalar>(Mat4<Scalar>::Identity(), Vec4<Scalar>(0, 0, 0, distance), Scalar(1));
}

template <typename Scalar>
LaguerreMap<Scalar> make_scaling(Scalar factor) {
  if (factor == Scalar(0)) throw InvalidArgument("scaling map: factor must be nonzero");
  return LaguerreMap<Scalar>(Mat4<Scalar>::Identity(), Vec4<Scalar>::Zero(), factor);
}

/// Product of the maps in application order (maps[0] acts first).
template <typename Scalar>
LaguerreMap<Scalar> compose(std::span<const LaguerreMap<Scalar>> maps) {
  if (maps.empty()) throw InvalidArgument("compose: at least one map is required");
  LaguerreMap<Scalar> out = maps.front();
  for (std::size_t k = 1; k < maps.size(); ++k) out = out.then(maps[k]);
  if (out.pseudo_orthogonality_error() > Scalar(kPseudoOrthogonalityTol))
    throw NumericalContamination("compose: D^T E D deviates from E beyond tolerance");
  return out;
}

template <typename Scalar>
LaguerreMap<Scalar> compose(std::initializer_list<LaguerreMap<Scalar>> maps) {
  return compose(std::span<const LaguerreMap<Scalar>>(maps.begin(), maps.size()));
}

/// Surface point with its unit normal; `scale` carries |n~| through transformations.
template <typename Scalar>
struct ContactElement {
  Vec3<Scalar> p = Vec3<Scalar>::Zero();
  Vec3<Scalar> n = Vec3<Scalar>::UnitZ();
  Scalar scale = Scalar(1);
};

namespace detail {

/// D (n, -1), flipped as a ray so that its 4th component is negative.
template <typename Scalar>
Vec4<Scalar> transported_null_normal(const LaguerreMap<Scalar>& map, const Vec3<Scalar>& n) {
  Vec4<Scalar> v;
  v << n, Scalar(-1);
  v = map.D() * v;
  if (v(3) > Scalar(0)) v = -v;
  return v;
}

}  // namespace detail

/// Maps a contact element through the pencil of oriented spheres touching the
/// surface at p: the image point is the zero-radius member of the image pencil.
template <typename Scalar>
ContactElement<Scalar> transform_contact_element(const LaguerreMap<Scalar>& map, const ContactElement<Scalar>& ce) {
  using std::abs;
  const Vec4<Scalar> null_normal = detail::transported_null_normal(map, ce.n);
  const Vec3<Scalar> n_tilde = null_normal.template head<3>();
  const Scalar norm = n_tilde.norm();
  if (!(norm > Scalar(1e-300))) throw SingularError("transform_contact_element: degenerate null direction");

  const auto q = map(CyclographicVector<Scalar>::point(ce.p));
  ContactElement<Scalar> out;
  out.p = q.c + (q.r / norm) * n_tilde;
  out.n = n_tilde / norm;
  out.scale = ce.scale * norm;
  return out;
}

template <typename Scalar>
struct TransformedCurvatures {
  Scalar kappa1;
  Scalar kappa2;
  Scalar scale;  ///< |n~| of this map alone
};

/// Transforms the principal curvature spheres (p + n/kappa, -1/kappa) and reads
/// the image curvatures off their signed radii.
template <typename Scalar>
TransformedCurvatures<Scalar> transform_curvatures(const LaguerreMap<Scalar>& map, const ContactElement<Scalar>& ce,
                                                   Scalar kappa1, Scalar kappa2) {
  using std::abs;
  if (kappa1 == Scalar(0) || kappa2 == Scalar(0))
    throw InvalidArgument("transform_curvatures: principal curvatures must be nonzero");
  if (map.is_identity()) return {kappa1, kappa2, Scalar(1)};

  const Vec4<Scalar> null_normal = detail::transported_null_normal(map, ce.n);
  const Scalar scale = null_normal.template head<3>().norm();
  const ContactElement<Scalar> image = transform_contact_element(map, ce);

  auto one = [&](Scalar kappa) {
    const auto sphere = map(CyclographicVector<Scalar>::sphere(ce.p + ce.n / kappa, Scalar(-1) / kappa));
    const Scalar radius = sphere.r;
    if (abs(radius) < Scalar(1e-12) * (Scalar(1) + image.p.norm()))
      throw SingularError("transform_curvatures: transformed curvature sphere collapsed to a point");
    const Scalar kappa_tilde = Scalar(-1) / radius;
    // The image sphere must sit on the transformed normal line, on the pencil.
    const Vec3<Scalar> expected = image.p + image.n / kappa_tilde;
    if ((sphere.c - expected).norm() > Scalar(1e-9) * abs(radius))
      throw FrameInconsistency("transform_curvatures: image sphere center left the transformed normal line");
    return kappa_tilde;
  };
  return {one(kappa1), one(kappa2), scale};
}

}  // namespace gridshell
