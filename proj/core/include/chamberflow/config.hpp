#pragma once

#include <string>
#include <utility>
#include <vector>

#include "chamberflow/moebius.hpp"
#include "chamberflow/schottky.hpp"

namespace chamberflow {

struct Defaults {
  int degree = 24;
  int depth = 9;
  double shrink = 1.0;
  double tolerance = 1e-7;
  double horizon = 0.0;  // 0 = derive from the group
};

struct FactorConfig {
  std::vector<Disk> disks;
  std::vector<std::pair<int, Moebius>> generators;  // optional explicit matrices
};

struct GroupConfig {
  std::vector<FactorConfig> factors;
  Defaults defaults;
};

// Parses the JSON group description. Unknown keys, missing fields, and type
// mismatches raise ConfigError; syntax errors carry the parser's position.
GroupConfig parse_config(const std::string& text);
GroupConfig load_config(const std::string& path);

// Builds the validated product group (disjointness, pairing checks).
ProductGroup build_group(const GroupConfig& cfg);

// Canonical re-serialization: sorted disks and generators, normalized
// matrices, fixed key order. parse(canonical_json(c)) round-trips.
std::string canonical_json(const GroupConfig& cfg);

}  // namespace chamberflow
