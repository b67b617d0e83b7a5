#pragma once

#include <utility>
#include <vector>

#include "chamberflow/schottky.hpp"

namespace chamberflow {

// Letter tuple (one letter per factor) and point tuple (one boundary point
// per factor). The coding map F acts componentwise: on the open diameter of
// disk m_j the j-th component applies the generator g_{m_j}.
using MultiIndex = std::vector<int>;
using PointVector = std::vector<double>;

// Letter of the open diameter containing x. With depth == 0 membership in an
// open diameter is enough; with depth >= 1 the point must carry a full
// depth-long digit path through the refined cover (the first digit is
// returned). Throws OutsideAllDisksError / NotInCoverError.
int locate(const SchottkyFactor& f, double x, int depth = 0);
MultiIndex locate(const ProductGroup& G, const PointVector& x, int depth = 0);

// One step of the expanding coding map: x in the diameter of disk m maps to
// g_m(x). Componentwise on products.
double F_apply(const SchottkyFactor& f, double x, int depth = 0);
PointVector F_apply(const ProductGroup& G, const PointVector& x, int depth = 0);

// Letter tuples excluded as preimage branches of a point coded by m: those n
// with n_j == -m_j in some factor. Lexicographic in the per-factor letter
// order.
std::vector<MultiIndex> exclusion_set(const ProductGroup& G, const MultiIndex& m);

// All preimage branches of x under F: pairs (n, y) with F(y) = x and
// y_j = g_{n_j}^{-1}(x_j), over the letter tuples n not excluded for the
// tuple locating x. Lexicographic in n; sizes 2q-1 per factor.
std::vector<std::pair<int, double>> preimages(const SchottkyFactor& f, double x,
                                              int depth = 0);
std::vector<std::pair<MultiIndex, PointVector>> preimages(const ProductGroup& G,
                                                          const PointVector& x,
                                                          int depth = 0);

// First `steps` letters of the F-orbit code of x. Points of the limit set
// never leave the cover; if numerical drift pushes an orbit point outside the
// depth-certified cover the code terminates with CodeTerminatedError.
std::vector<MultiIndex> orbit_code(const ProductGroup& G, const PointVector& x,
                                   int steps, int depth = 12);

}  // namespace chamberflow
