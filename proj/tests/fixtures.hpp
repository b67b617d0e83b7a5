#pragma once

// Shared fixture: four unit disks centered at -6, -2, 2, 6 with the letter
// assignment 1 -> -6, -1 -> -2, 2 -> 2, -2 -> 6, plus helpers for random
// reduced words and random points used across the test files.

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "chamberflow/schottky.hpp"

namespace testfx {

inline std::vector<chamberflow::Disk> fixture_disks() {
  return {{1, -6.0, 1.0}, {-1, -2.0, 1.0}, {2, 2.0, 1.0}, {-2, 6.0, 1.0}};
}

inline chamberflow::SchottkyFactor fixture_factor() {
  return chamberflow::SchottkyFactor::from_disks(fixture_disks());
}

// Same four disks with the letter-2 disk moved to 2.8 (gap 1.2 to its pair).
inline chamberflow::SchottkyFactor recentered_factor() {
  return chamberflow::SchottkyFactor::from_disks(
      {{1, -6.0, 1.0}, {-1, -2.0, 1.0}, {2, 2.8, 1.0}, {-2, 6.0, 1.0}});
}

inline chamberflow::ProductGroup fixture_rank1() {
  return chamberflow::ProductGroup({fixture_factor()});
}

inline chamberflow::ProductGroup fixture_product() {
  return chamberflow::ProductGroup({fixture_factor(), fixture_factor()});
}

// Uniformly random cyclically reduced word of the given length.
inline chamberflow::Word random_cyclic_word(std::mt19937& rng,
                                            const chamberflow::SchottkyFactor& f,
                                            int len) {
  const auto& L = f.letters();
  std::uniform_int_distribution<int> pick(0, static_cast<int>(L.size()) - 1);
  chamberflow::Word w;
  w.cyclic = true;
  while (static_cast<int>(w.letters.size()) < len) {
    const int cand = L[pick(rng)];
    if (!w.letters.empty() && cand == -w.letters.back()) continue;
    if (static_cast<int>(w.letters.size()) == len - 1 && len >= 2 &&
        cand == -w.letters.front()) {
      continue;
    }
    w.letters.push_back(cand);
  }
  return w;
}

// Uniformly random point of a random open disk diameter.
inline double random_diameter_point(std::mt19937& rng,
                                    const chamberflow::SchottkyFactor& f) {
  const auto& L = f.letters();
  std::uniform_int_distribution<int> pick(0, static_cast<int>(L.size()) - 1);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (;;) {
    const chamberflow::Disk& D = f.disk(L[pick(rng)]);
    const double x = D.center + D.radius * unit(rng);
    if (f.diameter_letter(x) != 0) return x;
  }
}

// Writes `content` under the system temp directory and returns the path.
inline std::string write_temp_file(const std::string& name,
                                   const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  out.close();
  return path.string();
}

}  // namespace testfx
