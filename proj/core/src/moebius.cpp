#include "chamberflow/moebius.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chamberflow {

namespace {

// Flip the overall sign so the first nonzero coefficient is positive.
void canonicalize_sign(double& a, double& b, double& c, double& d) {
  for (double v : {a, b, c, d}) {
    if (v != 0.0) {
      if (v < 0.0) {
        a = -a; b = -b; c = -c; d = -d;
      }
      return;
    }
  }
}

}  // namespace

Moebius Moebius::from_coeffs(double a, double b, double c, double d) {
  const double det = a * d - b * c;
  if (!(det > 0.0)) {
    throw std::invalid_argument("Moebius: determinant must be positive");
  }
  const double s = std::sqrt(det);
  a /= s; b /= s; c /= s; d /= s;
  canonicalize_sign(a, b, c, d);
  return Moebius{a, b, c, d};
}

Moebius Moebius::identity() { return Moebius{}; }

Moebius Moebius::diag_flow(double t) {
  const double e = std::exp(t / 2.0);
  return Moebius{e, 0.0, 0.0, 1.0 / e};
}

double Moebius::trace_abs() const { return std::abs(a + d); }

Moebius compose(const Moebius& g, const Moebius& h) {
  return Moebius::from_coeffs(g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d,
                              g.c * h.a + g.d * h.c, g.c * h.b + g.d * h.d);
}

Moebius inverse(const Moebius& g) {
  return Moebius::from_coeffs(g.d, -g.b, -g.c, g.a);
}

double psl2_distance(const Moebius& g, const Moebius& h) {
  const double plus = std::max({std::abs(g.a - h.a), std::abs(g.b - h.b),
                                std::abs(g.c - h.c), std::abs(g.d - h.d)});
  const double minus = std::max({std::abs(g.a + h.a), std::abs(g.b + h.b),
                                 std::abs(g.c + h.c), std::abs(g.d + h.d)});
  return std::min(plus, minus);
}

double Boundary::value() const {
  if (inf_) {
    throw std::logic_error("Boundary: value() called on the point at infinity");
  }
  return x_;
}

Boundary boundary_apply(const Moebius& g, Boundary x) {
  if (x.is_infinity()) {
    return g.c != 0.0 ? Boundary::of(g.a / g.c) : Boundary::infinity();
  }
  const double t = x.value();
  const double denom = g.c * t + g.d;
  if (denom == 0.0) {
    return Boundary::infinity();
  }
  return Boundary::of((g.a * t + g.b) / denom);
}

std::complex<double> plane_apply(const Moebius& g, std::complex<double> z) {
  if (!(z.imag() > 0.0)) {
    throw std::invalid_argument("plane_apply: point must lie in the upper half-plane");
  }
  return (g.a * z + g.b) / (g.c * z + g.d);
}

double boundary_derivative(const Moebius& g, double x) {
  const double denom = g.c * x + g.d;
  if (denom == 0.0) {
    throw std::domain_error("boundary_derivative: evaluation at the pole");
  }
  return g.det() / (denom * denom);
}

double chordal(Boundary x, Boundary y) {
  if (x.is_infinity() && y.is_infinity()) return 0.0;
  if (x.is_infinity() || y.is_infinity()) {
    const double t = x.is_infinity() ? y.value() : x.value();
    return 2.0 / std::sqrt(1.0 + t * t);
  }
  const double u = x.value(), v = y.value();
  return 2.0 * std::abs(u - v) / (std::sqrt(1.0 + u * u) * std::sqrt(1.0 + v * v));
}

AxisInfo classify_and_axis(const Moebius& g) {
  if (psl2_distance(g, Moebius::identity()) <= 1e-14) {
    throw std::invalid_argument("classify_and_axis: identity transform");
  }
  AxisInfo info;
  const double det = g.det();
  const double tr = g.a + g.d;
  const double disc = tr * tr - 4.0 * det;  // = (d-a)^2 + 4 b c
  constexpr double kDiscTol = 1e-12;
  if (disc <= -kDiscTol) {
    info.cls = IsometryClass::Elliptic;
    return info;
  }
  if (disc < kDiscTol) {
    info.cls = IsometryClass::Parabolic;
    return info;
  }
  info.cls = IsometryClass::Hyperbolic;
  info.translation_length = 2.0 * std::acosh(std::abs(tr) / (2.0 * std::sqrt(det)));

  if (g.c == 0.0) {
    // Fixed points oo and b/(d-a); the finite one attracts iff |a/d| < 1.
    const double xf = g.b / (g.d - g.a);
    const bool finite_attracts = std::abs(g.a) < std::abs(g.d);
    info.repelling = finite_attracts ? Boundary::infinity() : Boundary::of(xf);
    info.attracting = finite_attracts ? Boundary::of(xf) : Boundary::infinity();
    return info;
  }

  // Real roots of c x^2 + (d - a) x - b = 0, evaluated in the numerically
  // stable order to avoid cancellation in the small root.
  const double A = g.c, B = g.d - g.a, C = -g.b;
  const double sq = std::sqrt(disc);
  const double q = -(B + std::copysign(sq, B)) / 2.0;
  double r1, r2;
  if (q != 0.0) {
    r1 = q / A;
    r2 = C / q;
  } else {  // B == 0 and C == 0: double root at 0 cannot happen here (disc>0)
    r1 = sq / (2.0 * A);
    r2 = -sq / (2.0 * A);
  }
  const double d1 = boundary_derivative(g, r1);
  info.repelling = Boundary::of(d1 > 1.0 ? r1 : r2);
  info.attracting = Boundary::of(d1 > 1.0 ? r2 : r1);
  return info;
}

}  // namespace chamberflow
