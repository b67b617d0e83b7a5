#include "chamberflow/schottky.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "chamberflow/errors.hpp"

namespace chamberflow {

namespace {

constexpr std::size_t kEnumerationLimit = 5'000'000;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

bool is_reduced(const Word& w) {
  const auto& l = w.letters;
  for (std::size_t i = 0; i + 1 < l.size(); ++i) {
    if (l[i + 1] == -l[i]) return false;
  }
  if (w.cyclic && l.size() >= 2 && l.front() == -l.back()) return false;
  return true;
}

std::string word_to_string(const Word& w) {
  std::string s;
  for (std::size_t i = 0; i < w.letters.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(w.letters[i]);
  }
  return s;
}

int SchottkyFactor::slot(int letter) const {
  if (letter == 0 || letter < -q_ || letter > q_) {
    throw std::out_of_range("SchottkyFactor: letter " + std::to_string(letter) +
                            " outside the alphabet");
  }
  return letter < 0 ? letter + q_ : q_ + letter - 1;
}

const Disk& SchottkyFactor::disk(int letter) const { return disks_[slot(letter)]; }

const Moebius& SchottkyFactor::generator(int letter) const { return gens_[slot(letter)]; }

bool SchottkyFactor::in_open_diameter(int letter, double x) const {
  const Disk& D = disk(letter);
  return x > D.center - D.radius && x < D.center + D.radius;
}

int SchottkyFactor::diameter_letter(double x) const {
  for (int k : letters_) {
    if (in_open_diameter(k, x)) return k;
  }
  return 0;
}

std::string SchottkyFactor::fingerprint() const {
  std::string s = "q=" + std::to_string(q_);
  for (int k : letters_) {
    const Disk& D = disk(k);
    s += ";" + std::to_string(k) + ":" + fmt_double(D.center) + ":" + fmt_double(D.radius);
  }
  return s;
}

SchottkyFactor SchottkyFactor::from_disks(std::vector<Disk> disks) {
  if (disks.empty() || disks.size() % 2 != 0) {
    throw ValidationError("factor needs a nonempty even number of disks, got " +
                          std::to_string(disks.size()));
  }
  const int q = static_cast<int>(disks.size()) / 2;

  SchottkyFactor f;
  f.q_ = q;
  for (int k = -q; k <= q; ++k) {
    if (k != 0) f.letters_.push_back(k);
  }
  f.disks_.resize(disks.size());

  std::set<int> seen;
  for (const Disk& D : disks) {
    if (D.index == 0 || D.index < -q || D.index > q) {
      throw ValidationError("disk index " + std::to_string(D.index) +
                            " outside the alphabet -" + std::to_string(q) + "..." +
                            std::to_string(q));
    }
    if (!seen.insert(D.index).second) {
      throw ValidationError("duplicate disk index " + std::to_string(D.index));
    }
    if (!(D.radius > 0.0)) {
      throw ValidationError("disk " + std::to_string(D.index) +
                            ": radius must be positive, got " + fmt_double(D.radius));
    }
    f.disks_[f.slot(D.index)] = D;
  }

  for (std::size_t i = 0; i < f.disks_.size(); ++i) {
    for (std::size_t j = i + 1; j < f.disks_.size(); ++j) {
      const Disk& A = f.disks_[i];
      const Disk& B = f.disks_[j];
      const double gap = std::abs(A.center - B.center) - (A.radius + B.radius);
      if (!(gap > 0.0)) {
        throw ValidationError("disks " + std::to_string(A.index) + " and " +
                              std::to_string(B.index) + " are not disjoint (gap " +
                              fmt_double(gap) + ")");
      }
    }
  }

  // Canonical pairing generators g_k(z) = c_{-k} + r_k r_{-k} / (c_k - z).
  f.gens_.resize(f.disks_.size());
  for (int k : f.letters_) {
    const Disk& Dk = f.disk(k);
    const Disk& Dm = f.disk(-k);
    f.gens_[f.slot(k)] = Moebius::from_coeffs(
        -Dm.center, Dm.center * Dk.center + Dk.radius * Dm.radius, -1.0, Dk.center);
  }
  return f;
}

SchottkyFactor SchottkyFactor::from_disks_and_generators(
    std::vector<Disk> disks, const std::vector<std::pair<int, Moebius>>& gens) {
  SchottkyFactor f = from_disks(std::move(disks));
  std::set<int> seen;
  for (const auto& [k, g] : gens) {
    if (k <= 0 || k > f.q_) {
      throw ValidationError("explicit generator index " + std::to_string(k) +
                            " must be a positive letter");
    }
    if (!seen.insert(k).second) {
      throw ValidationError("duplicate explicit generator for letter " + std::to_string(k));
    }
    // The matrix must implement the disk pairing: circle k onto circle -k,
    // exterior of k into the interior of -k.
    const Disk& Dk = f.disk(k);
    const Disk& Dm = f.disk(-k);
    for (int i = 0; i < 64; ++i) {
      const double th = M_PI * (i + 0.5) / 64.0;
      const std::complex<double> z(Dk.center + Dk.radius * std::cos(th),
                                   Dk.radius * std::sin(th));
      const double defect = std::abs(std::abs(plane_apply(g, z) - Dm.center) - Dm.radius);
      if (defect > 1e-8) {
        throw ValidationError("explicit generator for letter " + std::to_string(k) +
                              " does not map circle " + std::to_string(k) +
                              " onto circle " + std::to_string(-k));
      }
    }
    const Boundary img = boundary_apply(g, Boundary::infinity());
    if (img.is_infinity() || !f.in_open_diameter(-k, img.value())) {
      throw ValidationError("explicit generator for letter " + std::to_string(k) +
                            " does not map the disk exterior into disk " +
                            std::to_string(-k));
    }
    f.gens_[f.slot(k)] = g;
    f.gens_[f.slot(-k)] = inverse(g);
  }
  return f;
}

ProductGroup::ProductGroup(std::vector<SchottkyFactor> factors)
    : factors_(std::move(factors)) {
  if (factors_.empty()) {
    throw ValidationError("product group needs at least one factor");
  }
}

FactorValidation validate_factor(const SchottkyFactor& f, int samples) {
  FactorValidation v;
  for (int k : f.letters()) {
    const Moebius& g = f.generator(k);
    const Disk& Dk = f.disk(k);
    const Disk& Dm = f.disk(-k);
    for (int i = 0; i < samples; ++i) {
      const double th = M_PI * (i + 0.5) / samples;
      const std::complex<double> z(Dk.center + Dk.radius * std::cos(th),
                                   Dk.radius * std::sin(th));
      const double defect = std::abs(std::abs(plane_apply(g, z) - Dm.center) - Dm.radius);
      v.pairing_defect = std::max(v.pairing_defect, defect);
    }
    v.inverse_defect = std::max(
        v.inverse_defect,
        psl2_distance(compose(g, f.generator(-k)), Moebius::identity()));
  }
  v.min_gap = std::numeric_limits<double>::infinity();
  for (int k : f.letters()) {
    for (int l : f.letters()) {
      if (l <= k) continue;
      const Disk& A = f.disk(k);
      const Disk& B = f.disk(l);
      v.min_gap = std::min(v.min_gap,
                           std::abs(A.center - B.center) - (A.radius + B.radius));
    }
  }
  v.pass = v.pairing_defect <= 1e-10 && v.inverse_defect <= 1e-10 && v.min_gap > 0.0;
  return v;
}

Moebius word_isometry(const SchottkyFactor& f, const Word& w) {
  if (!is_reduced(w)) {
    throw std::invalid_argument("word_isometry: word is not reduced: " + word_to_string(w));
  }
  Moebius acc = Moebius::identity();
  for (int l : w.letters) acc = compose(acc, f.generator(l));
  return acc;
}

std::vector<Word> enumerate_words(const SchottkyFactor& f, int n, bool cyclic,
                                  bool dedup_rotations) {
  if (n < 1) throw std::invalid_argument("enumerate_words: length must be >= 1");
  const int twoq = 2 * f.q();
  double est = twoq * std::pow(double(twoq - 1), n - 1);
  if (est > double(kEnumerationLimit)) {
    throw std::invalid_argument("enumerate_words: 2q(2q-1)^{n-1} = " +
                                std::to_string(est) + " exceeds the enumeration limit");
  }

  std::vector<Word> out;
  std::vector<int> cur;
  cur.reserve(n);
  auto dfs = [&](auto&& self) -> void {
    if (static_cast<int>(cur.size()) == n) {
      if (cyclic && n >= 2 && cur.front() == -cur.back()) return;
      if (dedup_rotations) {
        // Keep only the lexicographically smallest rotation of the class.
        std::vector<int> rot(cur);
        for (int r = 1; r < n; ++r) {
          std::rotate(rot.begin(), rot.begin() + 1, rot.end());
          if (std::lexicographical_compare(rot.begin(), rot.end(), cur.begin(), cur.end()))
            return;
        }
      }
      out.push_back(Word{cur, cyclic});
      return;
    }
    for (int l : f.letters()) {
      if (!cur.empty() && l == -cur.back()) continue;
      cur.push_back(l);
      self(self);
      cur.pop_back();
    }
  };
  dfs(dfs);
  return out;
}

namespace {

// Image of [lo,hi] under g, assuming the pole lies outside the interval so
// the restriction is monotonic and the image is spanned by endpoint images.
std::pair<double, double> interval_image(const Moebius& g, double lo, double hi) {
  if (g.c != 0.0) {
    const double pole = -g.d / g.c;
    if (pole >= lo && pole <= hi) {
      throw std::logic_error("interval_image: pole inside the interval");
    }
  }
  const double p = boundary_apply(g, Boundary::of(lo)).value();
  const double q = boundary_apply(g, Boundary::of(hi)).value();
  return {std::min(p, q), std::max(p, q)};
}

}  // namespace

std::vector<CoverInterval> limit_cover(const SchottkyFactor& f, int depth) {
  if (depth < 1) throw std::invalid_argument("limit_cover: depth must be >= 1");
  const int twoq = 2 * f.q();
  double est = twoq * std::pow(double(twoq - 1), depth - 1);
  if (est > double(kEnumerationLimit)) {
    throw std::invalid_argument("limit_cover: refinement has " + std::to_string(est) +
                                " intervals, exceeding the enumeration limit");
  }

  std::vector<CoverInterval> level;
  for (int k : f.letters()) {
    const Disk& D = f.disk(k);
    level.push_back(CoverInterval{Word{{k}, false}, D.center - D.radius, D.center + D.radius});
  }
  for (int d = 2; d <= depth; ++d) {
    std::vector<CoverInterval> next;
    next.reserve(level.size() * (twoq - 1));
    for (int k : f.letters()) {
      const Moebius ginv = inverse(f.generator(k));
      for (const CoverInterval& I : level) {
        if (I.word.letters.front() == -k) continue;
        auto [lo, hi] = interval_image(ginv, I.lo, I.hi);
        Word w;
        w.letters.reserve(d);
        w.letters.push_back(k);
        w.letters.insert(w.letters.end(), I.word.letters.begin(), I.word.letters.end());
        next.push_back(CoverInterval{std::move(w), lo, hi});
      }
    }
    level = std::move(next);
  }
  return level;
}

std::vector<int> cover_letter_path(const SchottkyFactor& f, double x, int depth) {
  std::vector<int> path;
  Boundary p = Boundary::of(x);
  for (int t = 0; t < depth; ++t) {
    if (p.is_infinity()) return path;
    const int k = f.diameter_letter(p.value());
    if (k == 0) return path;
    path.push_back(k);
    p = boundary_apply(f.generator(k), p);
  }
  return path;
}

namespace {

// One application of the word isometry, letterwise (rightmost letter first);
// single-generator steps keep every intermediate well conditioned.
Boundary apply_word_once(const SchottkyFactor& f, const std::vector<int>& letters,
                         Boundary x) {
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
    x = boundary_apply(f.generator(*it), x);
  }
  return x;
}

double fixed_point_by_iteration(const SchottkyFactor& f, const std::vector<int>& letters,
                                double start) {
  Boundary x = Boundary::of(start);
  for (int iter = 0; iter < 300; ++iter) {
    const Boundary xn = apply_word_once(f, letters, x);
    if (!xn.is_infinity() && !x.is_infinity() &&
        std::abs(xn.value() - x.value()) <= 1e-15 * std::max(1.0, std::abs(x.value()))) {
      return xn.value();
    }
    x = xn;
  }
  throw NumericalError("closed_geodesic: fixed-point iteration did not converge");
}

}  // namespace

ClosedGeodesicInfo closed_geodesic(const SchottkyFactor& f, const Word& w) {
  Word cyc = w;
  cyc.cyclic = true;
  if (cyc.letters.empty() || !is_reduced(cyc)) {
    throw std::invalid_argument("closed_geodesic: word must be nonempty and cyclically reduced");
  }
  const auto& l = cyc.letters;
  const int n = static_cast<int>(l.size());

  // Attracting fixed point lies in disk -l1; iterate the word from its center.
  const double x_att = fixed_point_by_iteration(f, l, f.disk(-l.front()).center);
  // Repelling fixed point = attracting fixed point of the inverse word, in disk ln.
  std::vector<int> inv(n);
  for (int i = 0; i < n; ++i) inv[i] = -l[n - 1 - i];
  const double x_rep = fixed_point_by_iteration(f, inv, f.disk(l.back()).center);

  // Multiplier by the chain rule along the orbit of the attracting point.
  double mu = 1.0;
  Boundary z = Boundary::of(x_att);
  for (auto it = l.rbegin(); it != l.rend(); ++it) {
    mu *= boundary_derivative(f.generator(*it), z.value());
    z = boundary_apply(f.generator(*it), z);
  }
  if (z.is_infinity() || std::abs(z.value() - x_att) > 1e-9) {
    throw NumericalError("closed_geodesic: orbit did not close up");
  }
  if (!(mu > 0.0 && mu < 1.0)) {
    throw NumericalError("closed_geodesic: multiplier " + std::to_string(mu) +
                         " outside (0,1)");
  }

  ClosedGeodesicInfo info;
  info.repelling = Boundary::of(x_rep);
  info.attracting = Boundary::of(x_att);
  info.multiplier = mu;
  info.length = -std::log(mu);
  return info;
}

}  // namespace chamberflow
