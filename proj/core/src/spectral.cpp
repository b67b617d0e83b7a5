#include "chamberflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "chamberflow/errors.hpp"
#include "chamberflow/threading.hpp"

namespace chamberflow {

namespace {

struct RootResult {
  double x;
  int iterations;
};

// Illinois variant of regula falsi on a sign-changing bracket.
template <typename Fn>
RootResult illinois(Fn&& fn, double a, double fa, double b, double fb, double xtol,
                    double ftol, int cap = 200) {
  if (!(fa > 0.0) == !(fb > 0.0)) {
    throw NumericalError("illinois: bracket endpoints do not straddle a root");
  }
  int side = 0;
  double c = a;
  for (int it = 1; it <= cap; ++it) {
    c = (a * fb - b * fa) / (fb - fa);
    if (!(c > std::min(a, b) && c < std::max(a, b))) c = 0.5 * (a + b);
    const double fc = fn(c);
    if (std::abs(fc) <= ftol || std::abs(b - a) <= xtol) return {c, it};
    if ((fc > 0.0) == (fa > 0.0)) {
      a = c;
      fa = fc;
      if (side == +1) fb *= 0.5;
      side = +1;
    } else {
      b = c;
      fb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    }
  }
  return {c, cap};
}

// Finds b > a with fn(b) < 0, doubling from b0; fn(a) > 0 assumed.
template <typename Fn>
std::pair<double, double> extend_bracket(Fn&& fn, double b0, double b_max) {
  double b = b0;
  double fb = fn(b);
  while (fb >= 0.0) {
    b *= 2.0;
    if (b > b_max) {
      throw NumericalError("no sign change found while extending the bracket");
    }
    fb = fn(b);
  }
  return {b, fb};
}

// Refined-cover transition system: one state per depth-n cover interval,
// successors shift one letter, row weight |F'(midpoint)|^{-s}.
struct CoverSystem {
  std::vector<double> log_deriv;  // log |F'| at each interval midpoint
  std::vector<int> successors;    // flattened, out_degree per state
  int out_degree = 0;

  double spectral_radius(double s, int* iterations) const {
    const std::size_t S = log_deriv.size();
    std::vector<double> v(S, 1.0), w(S, 0.0);
    double lam = 0.0;
    for (int it = 1; it <= 2000; ++it) {
      std::fill(w.begin(), w.end(), 0.0);
      for (std::size_t i = 0; i < S; ++i) {
        const double weight = std::exp(-s * log_deriv[i]) * v[i];
        const int* succ = &successors[i * out_degree];
        for (int k = 0; k < out_degree; ++k) w[succ[k]] += weight;
      }
      double vw = 0.0, vv = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < S; ++i) {
        vw += v[i] * w[i];
        vv += v[i] * v[i];
        scale = std::max(scale, std::abs(w[i]));
      }
      lam = vw / vv;
      double resid = 0.0;
      for (std::size_t i = 0; i < S; ++i) resid = std::max(resid, std::abs(w[i] - lam * v[i]));
      if (scale == 0.0) throw NumericalError("cover transition matrix collapsed to zero");
      for (std::size_t i = 0; i < S; ++i) v[i] = w[i] / scale;
      if (resid <= 1e-12 * std::max(1.0, std::abs(lam))) {
        if (iterations) *iterations = it;
        return lam;
      }
    }
    throw NumericalError("cover spectral radius: power iteration did not converge");
  }
};

CoverSystem build_cover_system(const SchottkyFactor& f, int depth) {
  const auto& letters = f.letters();
  const int twoq = static_cast<int>(letters.size());
  auto idx_asc = [&](int l) {
    return l < 0 ? l + f.q() : f.q() + l - 1;
  };
  // Lexicographic index of a reduced word: the first letter ranks over the
  // full alphabet, each later letter over the alphabet minus the forbidden
  // inverse of its predecessor.
  auto index_of = [&](const std::vector<int>& w) {
    long long idx = idx_asc(w[0]);
    for (std::size_t i = 1; i < w.size(); ++i) {
      const int pos = idx_asc(w[i]);
      const int forbidden = idx_asc(-w[i - 1]);
      idx = idx * (twoq - 1) + pos - (forbidden < pos ? 1 : 0);
    }
    return idx;
  };

  const std::vector<CoverInterval> cover = limit_cover(f, depth);
  CoverSystem sys;
  sys.out_degree = twoq - 1;
  sys.log_deriv.resize(cover.size());
  sys.successors.resize(cover.size() * sys.out_degree);

  std::vector<int> shifted(depth);
  for (std::size_t i = 0; i < cover.size(); ++i) {
    const std::vector<int>& w = cover[i].word.letters;
    if (index_of(w) != static_cast<long long>(i)) {
      throw NumericalError("cover indexing is inconsistent with the enumeration order");
    }
    sys.log_deriv[i] = std::log(boundary_derivative(f.generator(w[0]), cover[i].mid()));
    std::copy(w.begin() + 1, w.end(), shifted.begin());
    int k = 0;
    for (int l : letters) {
      if (l == -w[depth - 1]) continue;
      shifted[depth - 1] = l;
      sys.successors[i * sys.out_degree + k++] = static_cast<int>(index_of(shifted));
    }
  }
  return sys;
}

bool is_primitive(const std::vector<int>& l) {
  const int n = static_cast<int>(l.size());
  for (int p = 1; p <= n / 2; ++p) {
    if (n % p != 0) continue;
    bool repeats = true;
    for (int i = p; i < n && repeats; ++i) repeats = (l[i] == l[i % p]);
    if (repeats) return false;
  }
  return true;
}

}  // namespace

BowenResult bowen_dimension(const SchottkyFactor& f, const BowenOptions& opts) {
  if (f.q() < 2) {
    throw std::invalid_argument("bowen_dimension: needs at least two generator pairs");
  }
  if (opts.cover_depth < 1) {
    throw std::invalid_argument("bowen_dimension: cover depth must be >= 1");
  }

  BowenResult res;

  // Route one: Perron eigenvalue of the collocation operator.
  {
    const CollocationBasis basis(f, opts.degree, opts.shrink);
    auto log_lambda = [&](double s) {
      return std::log(
          leading_eigenvalue(assemble_factor_operator(f, basis, {s, 0.0})));
    };
    const double f0 = log_lambda(0.0);
    auto [b, fb] = extend_bracket(log_lambda, 1.0, 8.0);
    const RootResult r = illinois(log_lambda, 0.0, f0, b, fb, 1e-13, 1e-14);
    res.delta_collocation = r.x;
    res.iterations_collocation = r.iterations;
  }

  // Route two: spectral radius of the refined-cover transition matrix.
  {
    const CoverSystem sys = build_cover_system(f, opts.cover_depth);
    auto log_rho = [&](double s) { return std::log(sys.spectral_radius(s, nullptr)); };
    const double f0 = log_rho(0.0);
    auto [b, fb] = extend_bracket(log_rho, 1.0, 8.0);
    const RootResult r = illinois(log_rho, 0.0, f0, b, fb, 1e-13, 1e-14);
    res.delta_cover = r.x;
    res.iterations_cover = r.iterations;
  }

  res.agreement = std::abs(res.delta_collocation - res.delta_cover);
  if (res.agreement > 10.0 * opts.tol) {
    throw NumericalError("bowen_dimension: routes disagree: collocation " +
                         std::to_string(res.delta_collocation) + " vs cover " +
                         std::to_string(res.delta_cover));
  }
  res.delta = res.delta_collocation;
  return res;
}

ZetaResult euler_zeta(const SchottkyFactor& f, std::complex<double> s,
                      int max_word_length, int k_max) {
  if (!(s.real() > 0.0)) {
    throw std::invalid_argument("euler_zeta: Re(s) must be positive");
  }
  if (max_word_length < 1 || k_max < 0) {
    throw std::invalid_argument("euler_zeta: bad truncation parameters");
  }

  ZetaResult res;
  res.max_word_length = max_word_length;
  res.k_max = k_max;
  res.classes = 0;

  std::complex<double> logZ(0.0, 0.0);
  double k_tail = 0.0;
  double stratum = 0.0, stratum_prev = 0.0;

  for (int n = 1; n <= max_word_length; ++n) {
    stratum_prev = stratum;
    stratum = 0.0;
    for (const Word& w : enumerate_words(f, n, /*cyclic=*/true, /*dedup_rotations=*/true)) {
      if (!is_primitive(w.letters)) continue;
      const double len = closed_geodesic(f, w).length;
      for (int k = 0; k <= k_max; ++k) {
        logZ += std::log(1.0 - std::exp(-(s + double(k)) * len));
      }
      const double head = std::exp(-s.real() * len);
      stratum += head;
      // Bound on the factors dropped beyond k_max, geometric in exp(-len).
      k_tail += head * std::exp(-double(k_max + 1) * len) / (1.0 - std::exp(-len));
      ++res.classes;
    }
  }

  // Geometric extrapolation of the omitted word-length strata.
  double class_tail = std::numeric_limits<double>::infinity();
  if (stratum_prev > 0.0 && stratum > 0.0 && stratum < stratum_prev) {
    const double ratio = stratum / stratum_prev;
    class_tail = stratum * ratio / (1.0 - ratio);
  } else if (stratum == 0.0) {
    class_tail = 0.0;
  }

  res.log_value = logZ;
  res.value = std::exp(logZ);
  res.tail_estimate = class_tail + k_tail;
  return res;
}

std::vector<ZeroRecord> zero_scan_real(const SchottkyFactor& f, double s_lo,
                                       double s_hi, int grid, int degree,
                                       double shrink) {
  if (!(s_hi > s_lo) || grid < 2) {
    throw std::invalid_argument("zero_scan_real: need s_hi > s_lo and grid >= 2");
  }
  const CollocationBasis basis(f, degree, shrink);
  auto D = [&](double s) {
    return fredholm_det(assemble_factor_operator(f, basis, {s, 0.0})).value.real();
  };

  std::vector<double> xs(grid), ds(grid);
  for (int i = 0; i < grid; ++i) {
    xs[i] = s_lo + (s_hi - s_lo) * i / (grid - 1);
    ds[i] = D(xs[i]);
  }

  std::vector<ZeroRecord> zeros;
  for (int i = 0; i + 1 < grid; ++i) {
    if (ds[i] == 0.0) {
      zeros.push_back({{xs[i], 0.0}, 0.0, degree, 0});
      continue;
    }
    if (ds[i] * ds[i + 1] >= 0.0) continue;
    const RootResult r =
        illinois(D, xs[i], ds[i], xs[i + 1], ds[i + 1], 1e-14, 1e-12, 100);
    zeros.push_back({{r.x, 0.0}, std::abs(D(r.x)), degree, r.iterations});
  }
  if (grid >= 1 && ds[grid - 1] == 0.0) {
    zeros.push_back({{xs[grid - 1], 0.0}, 0.0, degree, 0});
  }
  return zeros;
}

namespace {

// Argument increment of D along the segment [za, zb], subdividing until each
// piece turns by less than pi/2. `ok` is cleared when the recursion bottoms
// out or the determinant vanishes on the path.
template <typename Fn>
double arg_walk(Fn&& D, std::complex<double> za, std::complex<double> Da,
                std::complex<double> zb, std::complex<double> Db, int depth, bool& ok) {
  if (Da == std::complex<double>(0.0, 0.0) || Db == std::complex<double>(0.0, 0.0)) {
    ok = false;
    return 0.0;
  }
  const double d = std::arg(Db * std::conj(Da));
  if (std::abs(d) < M_PI / 2.0) return d;
  if (depth <= 0) {
    ok = false;
    return d;
  }
  const std::complex<double> zm = 0.5 * (za + zb);
  const std::complex<double> Dm = D(zm);
  return arg_walk(D, za, Da, zm, Dm, depth - 1, ok) +
         arg_walk(D, zm, Dm, zb, Db, depth - 1, ok);
}

}  // namespace

ComplexScanResult zero_scan_complex(const SchottkyFactor& f,
                                    std::complex<double> corner_lo,
                                    std::complex<double> corner_hi, int nx, int ny,
                                    int degree, double shrink) {
  if (nx < 1 || ny < 1 || !(corner_hi.real() > corner_lo.real()) ||
      !(corner_hi.imag() > corner_lo.imag())) {
    throw std::invalid_argument("zero_scan_complex: empty search rectangle");
  }
  const CollocationBasis basis(f, degree, shrink);
  auto D = [&](std::complex<double> z) {
    return fredholm_det(assemble_factor_operator(f, basis, z)).value;
  };

  const double wx = (corner_hi.real() - corner_lo.real()) / nx;
  const double wy = (corner_hi.imag() - corner_lo.imag()) / ny;

  ComplexScanResult res;
  res.boxes_flagged = 0;
  res.dropped = 0;

  for (int by = 0; by < ny; ++by) {
    for (int bx = 0; bx < nx; ++bx) {
      const std::complex<double> c0(corner_lo.real() + bx * wx,
                                    corner_lo.imag() + by * wy);
      const std::complex<double> c1 = c0 + std::complex<double>(wx, 0.0);
      const std::complex<double> c2 = c0 + std::complex<double>(wx, wy);
      const std::complex<double> c3 = c0 + std::complex<double>(0.0, wy);

      bool ok = true;
      const std::complex<double> D0 = D(c0), D1 = D(c1), D2 = D(c2), D3 = D(c3);
      double total = 0.0;
      total += arg_walk(D, c0, D0, c1, D1, 14, ok);
      total += arg_walk(D, c1, D1, c2, D2, 14, ok);
      total += arg_walk(D, c2, D2, c3, D3, 14, ok);
      total += arg_walk(D, c3, D3, c0, D0, 14, ok);
      if (!ok) {
        ++res.dropped;
        continue;
      }
      const int winding = static_cast<int>(std::lround(total / (2.0 * M_PI)));
      if (winding == 0) continue;
      ++res.boxes_flagged;

      // Newton polish from the box center, derivative by central difference.
      std::complex<double> z = 0.5 * (c0 + c2);
      bool converged = false;
      int it = 0;
      for (; it < 60; ++it) {
        const std::complex<double> Dz = D(z);
        if (std::abs(Dz) <= 1e-10) {
          converged = true;
          break;
        }
        const double h = 1e-6 * std::max(1.0, std::abs(z));
        const std::complex<double> Dp = (D(z + h) - D(z - h)) / (2.0 * h);
        if (Dp == std::complex<double>(0.0, 0.0)) break;
        const std::complex<double> step = Dz / Dp;
        z -= step;
        if (z.real() < c0.real() - wx || z.real() > c1.real() + wx ||
            z.imag() < c0.imag() - wy || z.imag() > c2.imag() + wy) {
          break;  // escaped the (inflated) box
        }
        if (std::abs(step) <= 1e-13) {
          converged = std::abs(D(z)) <= 1e-8;
          break;
        }
      }
      if (!converged) {
        ++res.dropped;
        continue;
      }
      bool duplicate = false;
      for (const ZeroRecord& rec : res.zeros) {
        if (std::abs(rec.location - z) <= 1e-8) duplicate = true;
      }
      if (!duplicate) {
        res.zeros.push_back({z, std::abs(D(z)), degree, it});
      }
    }
  }
  return res;
}

ProductDetScan product_det_scan(
    const ProductGroup& G, const std::vector<std::vector<std::complex<double>>>& axes,
    int degree, double shrink, bool diagonal_only) {
  const int r = G.rank();
  if (static_cast<int>(axes.size()) != r) {
    throw std::invalid_argument("product_det_scan: need one axis per factor");
  }
  for (const auto& a : axes) {
    if (a.empty()) throw std::invalid_argument("product_det_scan: empty axis");
  }
  if (diagonal_only) {
    for (const auto& a : axes) {
      if (a.size() != axes[0].size()) {
        throw std::invalid_argument(
            "product_det_scan: diagonal mode needs axes of equal length");
      }
    }
  }

  std::size_t n_points = 1;
  if (diagonal_only) {
    n_points = axes[0].size();
  } else {
    for (const auto& a : axes) {
      n_points *= a.size();
      if (n_points > 200000) {
        throw std::invalid_argument("product_det_scan: grid exceeds 200000 tuples");
      }
    }
  }

  // Per-factor spectra, one eigendecomposition per axis value.
  std::vector<std::vector<Eigen::VectorXcd>> spectra(r);
  std::vector<CollocationBasis> bases;
  bases.reserve(r);
  for (int j = 0; j < r; ++j) bases.emplace_back(G.factor(j), degree, shrink);
  for (int j = 0; j < r; ++j) {
    spectra[j].reserve(axes[j].size());
    for (const std::complex<double>& s : axes[j]) {
      const OperatorMatrix M = assemble_factor_operator(G.factor(j), bases[j], s);
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M.mat, false);
      if (es.info() != Eigen::Success) {
        throw NumericalError("product_det_scan: factor eigensolver failed");
      }
      spectra[j].push_back(es.eigenvalues());
    }
  }

  // Axis index tuple of each grid point, first axis most significant.
  auto tuple_of = [&](std::size_t p) {
    std::vector<int> t(r);
    if (diagonal_only) {
      std::fill(t.begin(), t.end(), static_cast<int>(p));
    } else {
      for (int j = r - 1; j >= 0; --j) {
        t[j] = static_cast<int>(p % axes[j].size());
        p /= axes[j].size();
      }
    }
    return t;
  };

  ProductDetScan scan;
  scan.points.resize(n_points);
  parallel_for(n_points, [&](std::size_t p) {
    const std::vector<int> t = tuple_of(p);
    ProductDetPoint& pt = scan.points[p];
    pt.s.resize(r);
    pt.leading = 1.0;
    std::vector<const Eigen::VectorXcd*> ev(r);
    for (int j = 0; j < r; ++j) {
      pt.s[j] = axes[j][t[j]];
      ev[j] = &spectra[j][t[j]];
      pt.leading *= ev[j]->cwiseAbs().maxCoeff();
    }
    // The product-operator spectrum is the set of products of factor
    // eigenvalues, so the determinant is a product over index tuples.
    std::complex<double> det(1.0, 0.0);
    std::vector<Eigen::Index> idx(r, 0);
    for (;;) {
      std::complex<double> prod(1.0, 0.0);
      for (int j = 0; j < r; ++j) prod *= (*ev[j])(idx[j]);
      det *= (1.0 - prod);
      int j = r - 1;
      while (j >= 0 && ++idx[j] == ev[j]->size()) idx[j--] = 0;
      if (j < 0) break;
    }
    pt.det = det;
  });

  // Re-verify a few tuples against dense determinants of the full operator.
  std::vector<std::size_t> picks;
  if (n_points <= 3) {
    for (std::size_t p = 0; p < n_points; ++p) picks.push_back(p);
  } else {
    picks = {0, n_points / 2, n_points - 1};
  }
  scan.cross_checks = static_cast<int>(picks.size());
  scan.max_cross_check_error = 0.0;
  for (std::size_t p : picks) {
    const OperatorMatrix M = assemble_product_operator(G, bases, scan.points[p].s);
    const std::complex<double> dense = fredholm_det(M).value;
    const std::complex<double> fast = scan.points[p].det;
    const double err =
        std::abs(fast - dense) / std::max({1.0, std::abs(fast), std::abs(dense)});
    scan.max_cross_check_error = std::max(scan.max_cross_check_error, err);
    if (err > 1e-9) {
      throw NumericalError("product_det_scan: spectral and dense determinants disagree");
    }
  }
  return scan;
}

}  // namespace chamberflow
