#pragma once

#include <complex>

namespace chamberflow {

// Real Moebius transform x -> (a x + b)/(c x + d), an element of PSL2(R).
// Instances produced by the factories below are always normalized to unit
// determinant and sign-canonicalized (first nonzero coefficient positive),
// so two equal group elements have identical coefficient quadruples.
struct Moebius {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  // Normalizes by sqrt(det) and canonicalizes the sign.
  // Throws std::invalid_argument unless a*d - b*c > 0.
  static Moebius from_coeffs(double a, double b, double c, double d);
  static Moebius identity();
  // Diagonal flow diag(e^{t/2}, e^{-t/2}); acts on the plane as z -> e^t z.
  static Moebius diag_flow(double t);

  double det() const { return a * d - b * c; }
  double trace_abs() const;  // |a + d|, sign-independent
};

// Group operations; results are normalized and sign-canonicalized.
Moebius compose(const Moebius& g, const Moebius& h);  // g after h
Moebius inverse(const Moebius& g);

// Coefficient distance between PSL2 elements: componentwise max-abs
// difference minimized over the +/- representative ambiguity.
double psl2_distance(const Moebius& g, const Moebius& h);

// Point of the boundary circle R u {oo}.  The point at infinity is an
// explicit tag; no large-float sentinel is ever used.
class Boundary {
 public:
  Boundary() : x_(0.0), inf_(false) {}
  static Boundary infinity() { Boundary p; p.inf_ = true; return p; }
  static Boundary of(double x) { Boundary p; p.x_ = x; return p; }

  bool is_infinity() const { return inf_; }
  double value() const;  // throws std::logic_error when infinite

 private:
  double x_;
  bool inf_;
};

// Boundary action, exact at the pole: g(oo) = a/c (or oo when c = 0) and
// g(-d/c) = oo.
Boundary boundary_apply(const Moebius& g, Boundary x);

// Upper half-plane action.  Throws std::invalid_argument when Im z <= 0.
std::complex<double> plane_apply(const Moebius& g, std::complex<double> z);

// d/dx of the boundary action at a finite point, det/(c x + d)^2.
// Throws std::domain_error at the pole.
double boundary_derivative(const Moebius& g, double x);

// Chordal metric on R u {oo}: 2|x-y| / (sqrt(1+x^2) sqrt(1+y^2)), with the
// usual continuous extension to infinity.
double chordal(Boundary x, Boundary y);

enum class IsometryClass { Elliptic, Parabolic, Hyperbolic };

struct AxisInfo {
  IsometryClass cls = IsometryClass::Elliptic;
  // Fixed points on the boundary, ordered (repelling, attracting).
  // Meaningful only for the hyperbolic class.
  Boundary repelling;
  Boundary attracting;
  double translation_length = 0.0;  // 2 arccosh(|tr|/2), hyperbolic only
};

// Classification by |trace|: hyperbolic > 2, parabolic = 2, elliptic < 2.
// Throws std::invalid_argument for the identity.
//
// Fixed points come from the real roots of c x^2 + (d - a) x - b = 0; when
// c = 0 one fixed point is oo.  Accuracy note: translation_length relies on
// the unit-determinant invariant, which floating-point products erode once
// coefficients grow very large (~1e8); long words should use the orbit-based
// routines in schottky.hpp instead.
AxisInfo classify_and_axis(const Moebius& g);

}  // namespace chamberflow
