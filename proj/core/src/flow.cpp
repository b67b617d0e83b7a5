#include "chamberflow/flow.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "chamberflow/errors.hpp"

namespace chamberflow {

namespace {

constexpr double kTimeFloor = 1e-9;   // excludes the departure point itself
constexpr double kTimeTol = 1e-12;    // crossing-time resolution
constexpr double kOnCircleTol = 1e-8;

std::complex<double> geodesic_point(const Moebius& h, double t) {
  return plane_apply(h, std::complex<double>(0.0, std::exp(t)));
}

// phi(t) = |gamma(t) - c|^2 - r^2 and its t-derivative.
struct SignedDistance {
  const Moebius& h;
  double c, r;

  double phi(double t) const {
    const std::complex<double> d = geodesic_point(h, t) - c;
    return std::norm(d) - r * r;
  }
  double dphi(double t) const {
    const std::complex<double> w(0.0, std::exp(t));
    const std::complex<double> den = h.c * w + h.d;
    const std::complex<double> dgamma = h.det() / (den * den) * w;
    return 2.0 * ((geodesic_point(h, t) - c) * std::conj(dgamma)).real();
  }
};

}  // namespace

Moebius chamber_from_endpoints(Boundary backward, Boundary forward) {
  if (chordal(backward, forward) <= 1e-14) {
    throw std::invalid_argument("chamber_from_endpoints: endpoints coincide");
  }
  if (forward.is_infinity()) {
    return Moebius::from_coeffs(1.0, backward.value(), 0.0, 1.0);
  }
  if (backward.is_infinity()) {
    return Moebius::from_coeffs(forward.value(), -1.0, 1.0, 0.0);
  }
  const double u = backward.value();
  const double v = forward.value();
  if (v > u) return Moebius::from_coeffs(v, u, 1.0, 1.0);
  return Moebius::from_coeffs(v, -u, 1.0, -1.0);
}

std::optional<Crossing> next_crossing(const SchottkyFactor& f, const Moebius& h,
                                      double horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("next_crossing: horizon must be > 0");

  const Boundary v = boundary_apply(h, Boundary::infinity());
  if (v.is_infinity()) return std::nullopt;
  const int m = f.diameter_letter(v.value());
  if (m == 0) return std::nullopt;

  const Boundary u = boundary_apply(h, Boundary::of(0.0));
  if (!u.is_infinity() && f.in_open_diameter(m, u.value())) return std::nullopt;

  const Disk& D = f.disk(m);

  // Tangency test from the circle geometry of the geodesic itself.
  double y2;
  if (u.is_infinity()) {
    const double dx = v.value() - D.center;
    y2 = D.radius * D.radius - dx * dx;
  } else {
    const double C0 = 0.5 * (u.value() + v.value());
    const double R = 0.5 * std::abs(v.value() - u.value());
    const double den = 2.0 * (D.center - C0);
    if (den == 0.0) {
      throw NumericalError("next_crossing: degenerate geodesic/circle configuration");
    }
    const double xs =
        (R * R - D.radius * D.radius - C0 * C0 + D.center * D.center) / den;
    y2 = R * R - (xs - C0) * (xs - C0);
  }
  if (y2 <= 1e-12) throw TangentCrossingError(y2);

  const SignedDistance sd{h, D.center, D.radius};
  if (!(sd.phi(kTimeFloor) > 0.0)) {
    throw NumericalError("next_crossing: base point already inside the target disk");
  }

  // Bracket the entry time, doubling up to the horizon.
  double t_lo = kTimeFloor;
  double t_hi = 0.1;
  while (sd.phi(t_hi) > 0.0) {
    t_lo = t_hi;
    t_hi *= 2.0;
    if (t_hi > horizon) return std::nullopt;
    if (t_hi > 700.0) {
      throw NumericalError("next_crossing: crossing time out of representable range");
    }
  }

  // Coarse bisection, then a bracket-safeguarded Newton polish.
  while (t_hi - t_lo > 1e-3) {
    const double mid = 0.5 * (t_lo + t_hi);
    (sd.phi(mid) > 0.0 ? t_lo : t_hi) = mid;
  }
  double t = 0.5 * (t_lo + t_hi);
  for (int it = 0; it < 80; ++it) {
    const double ph = sd.phi(t);
    (ph > 0.0 ? t_lo : t_hi) = t;
    const double dph = sd.dphi(t);
    double t_next = dph != 0.0 ? t - ph / dph : 0.5 * (t_lo + t_hi);
    if (!(t_next > t_lo && t_next < t_hi)) t_next = 0.5 * (t_lo + t_hi);
    const double step = std::abs(t_next - t);
    t = t_next;
    if (step <= kTimeTol) break;
  }

  Crossing cr;
  cr.letter = m;
  cr.time = t;
  cr.position = geodesic_point(h, t);
  if (std::abs(std::abs(cr.position - D.center) - D.radius) > kOnCircleTol) {
    throw NumericalError("next_crossing: crossing point missed the circle");
  }
  cr.after = compose(f.generator(m), compose(h, Moebius::diag_flow(t)));

  // The unfolded base point must land on the paired circle.
  const Disk& Dm = f.disk(-m);
  const std::complex<double> base = plane_apply(cr.after, std::complex<double>(0.0, 1.0));
  if (std::abs(std::abs(base - Dm.center) - Dm.radius) > kOnCircleTol) {
    throw NumericalError("next_crossing: unfolded base point missed the paired circle");
  }
  return cr;
}

ReturnStep first_return(const ProductGroup& G, const ChamberState& state,
                        double horizon) {
  if (state.size() != static_cast<std::size_t>(G.rank())) {
    throw std::invalid_argument("first_return: state has " +
                                std::to_string(state.size()) +
                                " components for a rank-" + std::to_string(G.rank()) +
                                " group");
  }
  ReturnStep step;
  step.letters.resize(G.rank());
  step.times.resize(G.rank());
  step.positions.resize(G.rank());
  step.state.resize(G.rank());
  for (int j = 0; j < G.rank(); ++j) {
    const auto cr = next_crossing(G.factor(j), state[j], horizon);
    if (!cr) throw NoFutureIntersectionError(j + 1);
    step.letters[j] = cr->letter;
    step.times[j] = cr->time;
    step.positions[j] = cr->position;
    step.state[j] = cr->after;
  }
  return step;
}

std::vector<ReturnStep> iterate_returns(const ProductGroup& G, ChamberState state,
                                        int count, double horizon) {
  std::vector<ReturnStep> steps;
  steps.reserve(count);
  for (int i = 0; i < count; ++i) {
    steps.push_back(first_return(G, state, horizon));
    state = steps.back().state;
  }
  return steps;
}

std::vector<ReturnStep> iterate_flat_returns(const ProductGroup& G,
                                             const std::vector<Word>& words,
                                             int count, double horizon) {
  if (words.size() != static_cast<std::size_t>(G.rank())) {
    throw std::invalid_argument("iterate_flat_returns: need one word per factor");
  }
  if (horizon <= 0.0) horizon = default_horizon(G);
  // Per factor: the section state of each cyclic rotation of the word, with
  // its return crossing. Step t of the orbit reads rotation t mod n.
  std::vector<std::vector<Crossing>> table(G.rank());
  for (int j = 0; j < G.rank(); ++j) {
    const auto& base = words[j].letters;
    const int n = static_cast<int>(base.size());
    if (n == 0) {
      throw std::invalid_argument("iterate_flat_returns: factor " +
                                  std::to_string(j + 1) + " word is empty");
    }
    table[j].reserve(n);
    for (int t = 0; t < n; ++t) {
      Word rot;
      rot.cyclic = true;
      rot.letters.reserve(n);
      for (int p = 0; p < n; ++p) rot.letters.push_back(base[(t + p) % n]);
      const ClosedGeodesicInfo info = closed_geodesic(G.factor(j), rot);
      const Moebius axis = chamber_from_endpoints(info.repelling, info.attracting);
      const auto onto = next_crossing(G.factor(j), axis, horizon);
      if (!onto) throw NoFutureIntersectionError(j + 1);
      const auto cr = next_crossing(G.factor(j), onto->after, horizon);
      if (!cr) throw NoFutureIntersectionError(j + 1);
      table[j].push_back(*cr);
    }
  }
  std::vector<ReturnStep> steps;
  steps.reserve(count);
  for (int t = 0; t < count; ++t) {
    ReturnStep step;
    step.letters.resize(G.rank());
    step.times.resize(G.rank());
    step.positions.resize(G.rank());
    step.state.resize(G.rank());
    for (int j = 0; j < G.rank(); ++j) {
      const Crossing& cr = table[j][t % table[j].size()];
      step.letters[j] = cr.letter;
      step.times[j] = cr.time;
      step.positions[j] = cr.position;
      step.state[j] = cr.after;
    }
    steps.push_back(std::move(step));
  }
  return steps;
}

ChamberState flat_from_words(const ProductGroup& G, const std::vector<Word>& words) {
  if (words.size() != static_cast<std::size_t>(G.rank())) {
    throw std::invalid_argument("flat_from_words: need one word per factor");
  }
  const double horizon = default_horizon(G);
  ChamberState state(G.rank());
  for (int j = 0; j < G.rank(); ++j) {
    const ClosedGeodesicInfo info = closed_geodesic(G.factor(j), words[j]);
    const Moebius axis = chamber_from_endpoints(info.repelling, info.attracting);
    const auto cr = next_crossing(G.factor(j), axis, horizon);
    if (!cr) throw NoFutureIntersectionError(j + 1);
    state[j] = cr->after;
  }
  return state;
}

double default_horizon(const ProductGroup& G) {
  double len = 0.0;
  for (const SchottkyFactor& f : G.factors()) {
    for (int k : f.letters()) {
      len = std::max(len, closed_geodesic(f, Word{{k}, true}).length);
    }
  }
  return 10.0 * len;
}

SectionCheck check_section(const SchottkyFactor& f, const Moebius& h, double tol) {
  const std::complex<double> base = plane_apply(h, std::complex<double>(0.0, 1.0));
  SectionCheck sc;
  sc.circle_letter = 0;
  sc.circle_defect = std::numeric_limits<double>::infinity();
  for (int k : f.letters()) {
    const Disk& D = f.disk(k);
    const double defect = std::abs(std::abs(base - D.center) - D.radius);
    if (defect < sc.circle_defect) {
      sc.circle_defect = defect;
      sc.circle_letter = k;
    }
  }
  const Boundary u = boundary_apply(h, Boundary::of(0.0));
  const Boundary v = boundary_apply(h, Boundary::infinity());
  const Disk& D = f.disk(sc.circle_letter);
  sc.backward_inside = !u.is_infinity() && f.in_open_diameter(sc.circle_letter, u.value());
  sc.forward_outside = v.is_infinity() || std::abs(v.value() - D.center) > D.radius;
  sc.pass = sc.circle_defect <= tol && sc.backward_inside && sc.forward_outside;
  return sc;
}

std::vector<SectionCheck> check_section(const ProductGroup& G,
                                        const ChamberState& state, double tol) {
  if (state.size() != static_cast<std::size_t>(G.rank())) {
    throw std::invalid_argument("check_section: state size mismatch");
  }
  std::vector<SectionCheck> out;
  out.reserve(state.size());
  for (int j = 0; j < G.rank(); ++j) out.push_back(check_section(G.factor(j), state[j], tol));
  return out;
}

}  // namespace chamberflow
