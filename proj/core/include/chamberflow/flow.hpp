#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "chamberflow/coding.hpp"
#include "chamberflow/moebius.hpp"
#include "chamberflow/schottky.hpp"

namespace chamberflow {

// A based unit-speed geodesic is stored as the isometry h with
// gamma(t) = h(i e^t): backward endpoint h(0), forward endpoint h(infinity),
// base point h(i). A chamber state of a rank-r product keeps one based
// geodesic per factor; the chamber flow translates every component.
using ChamberState = std::vector<Moebius>;

// Isometry sending (0, infinity, i) to (backward, forward, some base point).
Moebius chamber_from_endpoints(Boundary backward, Boundary forward);

struct Crossing {
  int letter;                     // disk whose bounding circle is crossed
  double time;                    // flow time to the crossing, > 0
  std::complex<double> position;  // crossing point, on circle `letter`
  Moebius after;                  // unfolded state, based on circle -letter
};

// First forward crossing of the geodesic into the circle of the disk holding
// its forward endpoint. nullopt when the forward endpoint lies outside every
// open diameter, when both endpoints share a diameter, or when no crossing
// occurs before `horizon`. Throws TangentCrossingError on a tangential hit.
std::optional<Crossing> next_crossing(const SchottkyFactor& f, const Moebius& h,
                                      double horizon);

struct ReturnStep {
  MultiIndex letters;
  std::vector<double> times;
  std::vector<std::complex<double>> positions;
  ChamberState state;
};

// One cross-section return of the chamber flow: every factor advances to its
// next circle crossing and is unfolded back into the chamber. Throws
// NoFutureIntersectionError when some factor reaches no circle in time.
ReturnStep first_return(const ProductGroup& G, const ChamberState& state,
                        double horizon);
std::vector<ReturnStep> iterate_returns(const ProductGroup& G, ChamberState state,
                                        int count, double horizon);

// Periodic chamber state: per factor the axis of a cyclically reduced word,
// shifted onto the cross-section by one crossing.
ChamberState flat_from_words(const ProductGroup& G, const std::vector<Word>& words);

// Return-map iteration along the compact flat of the given words. Iterating
// first_return amplifies roundoff along the unstable direction by a factor of
// about exp(length) per return, so a periodic trajectory degrades after a
// handful of returns; here each step's chamber is instead rebuilt exactly from
// the cyclic rotation of the words (the two agree in exact arithmetic), which
// keeps every reported time, letter, and state at one-step accuracy for any
// count.
std::vector<ReturnStep> iterate_flat_returns(const ProductGroup& G,
                                             const std::vector<Word>& words,
                                             int count, double horizon = 0.0);

// 10x the largest single-generator translation length over all factors.
double default_horizon(const ProductGroup& G);

struct SectionCheck {
  int circle_letter;     // circle nearest to the base point
  double circle_defect;  // distance of the base point from that circle
  bool backward_inside;  // backward endpoint in that circle's open diameter
  bool forward_outside;  // forward endpoint outside the closed diameter
  bool pass;
};

// Cross-section membership of a based geodesic (resp. a chamber state).
SectionCheck check_section(const SchottkyFactor& f, const Moebius& h,
                           double tol = 1e-8);
std::vector<SectionCheck> check_section(const ProductGroup& G,
                                        const ChamberState& state,
                                        double tol = 1e-8);

}  // namespace chamberflow
