#include "chamberflow/coding.hpp"

#include <stdexcept>

#include "chamberflow/errors.hpp"

namespace chamberflow {

namespace {

int locate_impl(const SchottkyFactor& f, double x, int depth, int factor_1based) {
  if (depth < 0) throw std::invalid_argument("locate: depth must be >= 0");
  if (depth == 0) {
    const int m = f.diameter_letter(x);
    if (m == 0) throw OutsideAllDisksError(factor_1based, x);
    return m;
  }
  const std::vector<int> path = cover_letter_path(f, x, depth);
  if (path.empty()) throw OutsideAllDisksError(factor_1based, x);
  if (static_cast<int>(path.size()) < depth) throw NotInCoverError(factor_1based, depth);
  return path.front();
}

double F_apply_impl(const SchottkyFactor& f, double x, int depth, int factor_1based) {
  const int m = locate_impl(f, x, depth, factor_1based);
  const Boundary y = boundary_apply(f.generator(m), Boundary::of(x));
  if (y.is_infinity()) {
    throw NumericalError("coding map sent a point of factor " +
                         std::to_string(factor_1based) + " to infinity");
  }
  return y.value();
}

void check_point_size(const ProductGroup& G, std::size_t n, const char* who) {
  if (n != static_cast<std::size_t>(G.rank())) {
    throw std::invalid_argument(std::string(who) + ": point has " + std::to_string(n) +
                                " components for a rank-" + std::to_string(G.rank()) +
                                " group");
  }
}

}  // namespace

int locate(const SchottkyFactor& f, double x, int depth) {
  return locate_impl(f, x, depth, 1);
}

MultiIndex locate(const ProductGroup& G, const PointVector& x, int depth) {
  check_point_size(G, x.size(), "locate");
  MultiIndex m(G.rank());
  for (int j = 0; j < G.rank(); ++j) m[j] = locate_impl(G.factor(j), x[j], depth, j + 1);
  return m;
}

double F_apply(const SchottkyFactor& f, double x, int depth) {
  return F_apply_impl(f, x, depth, 1);
}

PointVector F_apply(const ProductGroup& G, const PointVector& x, int depth) {
  check_point_size(G, x.size(), "F_apply");
  PointVector y(G.rank());
  for (int j = 0; j < G.rank(); ++j) y[j] = F_apply_impl(G.factor(j), x[j], depth, j + 1);
  return y;
}

std::vector<MultiIndex> exclusion_set(const ProductGroup& G, const MultiIndex& m) {
  check_point_size(G, m.size(), "exclusion_set");
  for (int j = 0; j < G.rank(); ++j) G.factor(j).disk(m[j]);  // validates the letters

  std::vector<MultiIndex> out;
  MultiIndex n(G.rank());
  auto walk = [&](auto&& self, int j) -> void {
    if (j == G.rank()) {
      for (int i = 0; i < G.rank(); ++i) {
        if (n[i] == -m[i]) {
          out.push_back(n);
          return;
        }
      }
      return;
    }
    for (int l : G.factor(j).letters()) {
      n[j] = l;
      self(self, j + 1);
    }
  };
  walk(walk, 0);
  return out;
}

std::vector<std::pair<int, double>> preimages(const SchottkyFactor& f, double x,
                                              int depth) {
  const int m = locate_impl(f, x, depth, 1);
  std::vector<std::pair<int, double>> out;
  out.reserve(2 * f.q() - 1);
  for (int n : f.letters()) {
    if (n == -m) continue;
    // g_n^{-1} = g_{-n} maps the exterior of disk -n into the diameter of n.
    out.emplace_back(n, boundary_apply(f.generator(-n), Boundary::of(x)).value());
  }
  return out;
}

std::vector<std::pair<MultiIndex, PointVector>> preimages(const ProductGroup& G,
                                                          const PointVector& x,
                                                          int depth) {
  check_point_size(G, x.size(), "preimages");
  std::vector<std::vector<std::pair<int, double>>> per_factor(G.rank());
  for (int j = 0; j < G.rank(); ++j) {
    const SchottkyFactor& f = G.factor(j);
    const int m = locate_impl(f, x[j], depth, j + 1);
    per_factor[j].reserve(2 * f.q() - 1);
    for (int n : f.letters()) {
      if (n == -m) continue;
      per_factor[j].emplace_back(
          n, boundary_apply(f.generator(-n), Boundary::of(x[j])).value());
    }
  }

  std::vector<std::pair<MultiIndex, PointVector>> out;
  MultiIndex n(G.rank());
  PointVector y(G.rank());
  auto walk = [&](auto&& self, int j) -> void {
    if (j == G.rank()) {
      out.emplace_back(n, y);
      return;
    }
    for (const auto& [letter, pt] : per_factor[j]) {
      n[j] = letter;
      y[j] = pt;
      self(self, j + 1);
    }
  };
  walk(walk, 0);
  return out;
}

std::vector<MultiIndex> orbit_code(const ProductGroup& G, const PointVector& x,
                                   int steps, int depth) {
  check_point_size(G, x.size(), "orbit_code");
  std::vector<MultiIndex> code;
  code.reserve(steps);
  PointVector p = x;
  for (int t = 0; t < steps; ++t) {
    try {
      code.push_back(locate(G, p, depth));
      p = F_apply(G, p, depth);
    } catch (const OutsideAllDisksError& e) {
      throw CodeTerminatedError(t, e.factor);
    } catch (const NotInCoverError& e) {
      throw CodeTerminatedError(t, e.factor);
    }
  }
  return code;
}

}  // namespace chamberflow
