#pragma once

// Exterior algebra on flat Minkowski spacetime, signature (-,+,+,+),
// coordinates (t, x, y, z) = (x0, x1, x2, x3), volume form
//
//     star(1) = e0 ^ e1 ^ e2 ^ e3.
//
// All sign conventions of the project are fixed here and nowhere else.
//
// Basis order for 2-forms (six coefficient slots):
//
//     { e0^e1, e0^e2, e0^e3, e2^e3, e3^e1, e1^e2 }
//
// i.e. the three electric slots first, then the three magnetic slots in
// cyclic order. The Faraday form of a field point (E, B) is
//
//     F = dt ^ E + star(dt ^ B)
//       = Ex e0^e1 + Ey e0^e2 + Ez e0^e3 - Bx e2^e3 - By e3^e1 - Bz e1^e2,
//
// so a constant background field B = (Bx, 0, 0) contributes -Bx dy^dz.
// The Hodge map on the 2-form basis (derived from a ^ star(b) = <a,b> vol
// with an orthonormal co-frame; asserted against a Levi-Civita oracle in
// the tests):
//
//     star(e0^e1) = -e2^e3      star(e2^e3) = +e0^e1
//     star(e0^e2) = -e3^e1      star(e3^e1) = +e0^e2
//     star(e0^e3) = -e1^e2      star(e1^e2) = +e0^e3
//
// which gives star(star(w)) = -w on 2-forms, +w on 1- and 3-forms and
// -w on 0- and 4-forms, and the pattern star(F(E,B)) = F(-B, E).

#include <Eigen/Core>

#include <utility>

namespace nled {

using Vec3 = Eigen::Vector3d;

template <typename Scalar>
struct FieldPointT {
  Eigen::Matrix<Scalar, 3, 1> E;
  Eigen::Matrix<Scalar, 3, 1> B;
};
using FieldPoint = FieldPointT<double>;

template <typename Scalar>
struct OneFormT {
  // basis { e0, e1, e2, e3 }
  Eigen::Matrix<Scalar, 4, 1> c = Eigen::Matrix<Scalar, 4, 1>::Zero();
};

template <typename Scalar>
struct TwoFormT {
  // basis { e0^e1, e0^e2, e0^e3, e2^e3, e3^e1, e1^e2 }
  Eigen::Matrix<Scalar, 6, 1> c = Eigen::Matrix<Scalar, 6, 1>::Zero();

  TwoFormT operator+(const TwoFormT& o) const { return {c + o.c}; }
  TwoFormT operator-(const TwoFormT& o) const { return {c - o.c}; }
  TwoFormT operator-() const { return {-c}; }
  TwoFormT operator*(Scalar s) const { return {c * s}; }
  friend TwoFormT operator*(Scalar s, const TwoFormT& w) { return {w.c * s}; }
};

template <typename Scalar>
struct ThreeFormT {
  // basis { e0^e1^e2, e0^e1^e3, e0^e2^e3, e1^e2^e3 }
  Eigen::Matrix<Scalar, 4, 1> c = Eigen::Matrix<Scalar, 4, 1>::Zero();
};

template <typename Scalar>
struct FourFormT {
  Scalar c = Scalar(0);  // coefficient of e0^e1^e2^e3
};

using OneForm = OneFormT<double>;
using TwoForm = TwoFormT<double>;
using ThreeForm = ThreeFormT<double>;
using FourForm = FourFormT<double>;

template <typename DerivedE, typename DerivedB>
TwoFormT<typename DerivedE::Scalar> from_EB(const Eigen::MatrixBase<DerivedE>& E,
                                            const Eigen::MatrixBase<DerivedB>& B) {
  TwoFormT<typename DerivedE::Scalar> w;
  w.c << E.x(), E.y(), E.z(), -B.x(), -B.y(), -B.z();
  return w;
}

template <typename Scalar>
FieldPointT<Scalar> to_EB(const TwoFormT<Scalar>& w) {
  return {{w.c[0], w.c[1], w.c[2]}, {-w.c[3], -w.c[4], -w.c[5]}};
}

/// star(1) = vol
template <typename Scalar>
FourFormT<Scalar> hodge(Scalar s) {
  return {s};
}

/// star(vol) = -1
template <typename Scalar>
Scalar hodge(const FourFormT<Scalar>& w) {
  return -w.c;
}

template <typename Scalar>
ThreeFormT<Scalar> hodge(const OneFormT<Scalar>& w) {
  // star e0 = -e1^e2^e3, star e1 = -e0^e2^e3,
  // star e2 = +e0^e1^e3, star e3 = -e0^e1^e2
  ThreeFormT<Scalar> r;
  r.c << -w.c[3], w.c[2], -w.c[1], -w.c[0];
  return r;
}

template <typename Scalar>
OneFormT<Scalar> hodge(const ThreeFormT<Scalar>& w) {
  // inverse of the 1-form map, star(star(a)) = +a on 1-forms
  OneFormT<Scalar> r;
  r.c << -w.c[3], -w.c[2], w.c[1], -w.c[0];
  return r;
}

template <typename Scalar>
TwoFormT<Scalar> hodge(const TwoFormT<Scalar>& w) {
  TwoFormT<Scalar> r;
  r.c << w.c[3], w.c[4], w.c[5], -w.c[0], -w.c[1], -w.c[2];
  return r;
}

/// Wedge of two 2-forms. Symmetric: a^b = b^a in degree 2x2, and the
/// grouping below makes the identity hold bitwise.
template <typename Scalar>
FourFormT<Scalar> wedge22(const TwoFormT<Scalar>& a, const TwoFormT<Scalar>& b) {
  // only complementary slot pairs survive; each pairing carries sign +1
  return {(a.c[0] * b.c[3] + a.c[3] * b.c[0]) +
          (a.c[1] * b.c[4] + a.c[4] * b.c[1]) +
          (a.c[2] * b.c[5] + a.c[5] * b.c[2])};
}

/// The Lorentz invariants X = star(F ^ star F) = E^2 - B^2 and
/// Y = star(F ^ F) = 2 E.B, in closed form.
template <typename DerivedE, typename DerivedB>
std::pair<typename DerivedE::Scalar, typename DerivedE::Scalar> invariants(
    const Eigen::MatrixBase<DerivedE>& E, const Eigen::MatrixBase<DerivedB>& B) {
  using Scalar = typename DerivedE::Scalar;
  return {E.squaredNorm() - B.squaredNorm(), Scalar(2) * E.dot(B)};
}

/// Exterior derivative of a 2-form field that depends on (t, z) only,
/// assembled from its coordinate partials. The x and y partials vanish
/// identically for such fields, so d reduces to four 3-form components:
///
///   d(w)[e0^e1^e2] = dt(c5)
///   d(w)[e0^e1^e3] = dz(c0) - dt(c4)
///   d(w)[e0^e2^e3] = dz(c1) + dt(c3)
///   d(w)[e1^e2^e3] = dz(c5)
template <typename Scalar>
ThreeFormT<Scalar> d_tz(const TwoFormT<Scalar>& dt, const TwoFormT<Scalar>& dz) {
  ThreeFormT<Scalar> r;
  r.c << dt.c[5], dz.c[0] - dt.c[4], dz.c[1] + dt.c[3], dz.c[5];
  return r;
}

}  // namespace nled
