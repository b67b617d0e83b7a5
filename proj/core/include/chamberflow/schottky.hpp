#pragma once

#include <string>
#include <vector>

#include "chamberflow/moebius.hpp"

namespace chamberflow {

// Closed Euclidean disk centered on the real axis.  `index` is the letter
// k in {-q..-1, 1..q} naming the disk; the disks of letters k and -k are
// paired by the generator g_k.
struct Disk {
  int index = 0;
  double center = 0.0;
  double radius = 0.0;
};

// A letter sequence; `cyclic` marks words considered up to rotation, which
// additionally must satisfy the wrap-around reduction condition.
struct Word {
  std::vector<int> letters;
  bool cyclic = false;
};

bool is_reduced(const Word& w);  // no letter followed by its negative
std::string word_to_string(const Word& w);  // dot-separated, e.g. "1.2.-1"

// One factor: a rank-one Schottky group given by 2q pairwise disjoint disks
// and a generator per letter.  The canonical generator for letter k,
//
//   g_k(z) = c_{-k} + r_k r_{-k} / (c_k - z),
//
// maps the boundary circle of disk k onto the boundary circle of disk -k and
// the exterior of disk k onto the interior of disk -k; g_{-k} built by the
// same formula is its inverse in PSL2(R).  Its attracting fixed point lies
// inside disk -k and its repelling fixed point inside disk k (asserted by
// validate_factor and the test suite).
class SchottkyFactor {
 public:
  // Canonical generators derived from the disks.
  static SchottkyFactor from_disks(std::vector<Disk> disks);
  // Explicit generators for the positive letters (negative letters are their
  // inverses).  Each matrix is checked to implement the disk pairing; throws
  // ValidationError otherwise.
  static SchottkyFactor from_disks_and_generators(
      std::vector<Disk> disks, const std::vector<std::pair<int, Moebius>>& gens);

  int q() const { return q_; }
  // Letters in the canonical ascending order -q..-1, 1..q; this order fixes
  // block order in operator matrices and enumeration order everywhere.
  const std::vector<int>& letters() const { return letters_; }
  const Disk& disk(int letter) const;
  const Moebius& generator(int letter) const;
  bool in_open_diameter(int letter, double x) const;
  // Letter of the open disk diameter containing x, or 0 if none.
  int diameter_letter(double x) const;
  std::string fingerprint() const;  // deterministic description string

 private:
  SchottkyFactor() = default;
  int slot(int letter) const;
  int q_ = 0;
  std::vector<int> letters_;
  std::vector<Disk> disks_;
  std::vector<Moebius> gens_;
};

// Direct product of factors; component j of every vector-valued quantity in
// the coding/flow/transfer modules refers to factor j (1-based in messages).
class ProductGroup {
 public:
  explicit ProductGroup(std::vector<SchottkyFactor> factors);
  int rank() const { return static_cast<int>(factors_.size()); }
  const SchottkyFactor& factor(int j) const { return factors_.at(j); }  // 0-based
  const std::vector<SchottkyFactor>& factors() const { return factors_; }

 private:
  std::vector<SchottkyFactor> factors_;
};

struct FactorValidation {
  // Max over letters k and sampled circle points z of ||g_k(z)-c_{-k}| - r_{-k}|.
  double pairing_defect = 0.0;
  // Max over letters of the coefficient distance of g_k g_{-k} from the identity.
  double inverse_defect = 0.0;
  // Min over disk pairs of |c_i - c_j| - (r_i + r_j).
  double min_gap = 0.0;
  bool pass = false;
};

// Samples `samples` points per boundary circle (strictly inside the upper
// half-plane) to measure the pairing defect.
FactorValidation validate_factor(const SchottkyFactor& f, int samples = 64);

// Product of generators g_{l1} g_{l2} ... g_{ln} (rightmost applied first).
// Throws std::invalid_argument for non-reduced words.
Moebius word_isometry(const SchottkyFactor& f, const Word& w);

// All reduced words of length n (2q (2q-1)^{n-1} of them), in lexicographic
// order with letters ascending.  With cyclic=true only cyclically reduced
// words; with dedup_rotations also only the lexicographically smallest
// rotation of each class.
std::vector<Word> enumerate_words(const SchottkyFactor& f, int n, bool cyclic,
                                  bool dedup_rotations = false);

struct CoverInterval {
  Word word;
  double lo = 0.0, hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
};

// Depth-n refinement of the limit-set cover: for each reduced word
// w = (l1..ln) the interval g_{l1}^{-1}(g_{l2}^{-1}(... diameter of disk ln)),
// a subinterval of the diameter of disk l1.  Intervals with the same first
// letter are pairwise disjoint and nest strictly into the previous depth.
std::vector<CoverInterval> limit_cover(const SchottkyFactor& f, int depth);

// Digit test underlying limit-set membership: successively locate x in an
// open diameter and apply that letter's generator, n times.  Returns the
// letter path, or an empty vector if some step lands outside all diameters.
std::vector<int> cover_letter_path(const SchottkyFactor& f, double x, int depth);

struct ClosedGeodesicInfo {
  Boundary repelling;
  Boundary attracting;
  double length = 0.0;      // translation length of the word isometry
  double multiplier = 0.0;  // derivative at the attracting fixed point, e^{-length}
};

// Axis data of word_isometry(f, w) for a cyclically reduced word, computed
// by orbit iteration plus the chain rule.  This path stays accurate for long
// words, where coefficient growth makes the matrix trace unusable.
ClosedGeodesicInfo closed_geodesic(const SchottkyFactor& f, const Word& w);

}  // namespace chamberflow
