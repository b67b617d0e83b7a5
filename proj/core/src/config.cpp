#include "chamberflow/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "chamberflow/errors.hpp"
#include "json.hpp"

namespace chamberflow {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void reject_unknown_keys(const json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) known = true;
    }
    if (!known) {
      throw ConfigError(where + ": unknown key \"" + item.key() + "\"");
    }
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError(where + ": missing required key \"" + key + "\"");
  }
  return *it;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  return v.get<double>();
}

int as_integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return v.get<int>();
}

Disk parse_disk(const json& v, const std::string& where) {
  if (!v.is_object()) throw ConfigError(where + ": expected an object");
  reject_unknown_keys(v, where, {"index", "center", "radius"});
  Disk d;
  d.index = as_integer(require(v, "index", where), where + " index");
  d.center = as_number(require(v, "center", where), where + " center");
  d.radius = as_number(require(v, "radius", where), where + " radius");
  if (d.index == 0) throw ConfigError(where + ": index must be nonzero");
  if (!(d.radius > 0.0)) {
    throw ConfigError(where + " (index " + std::to_string(d.index) +
                      "): radius must be positive");
  }
  return d;
}

std::pair<int, Moebius> parse_generator(const json& v, const std::string& where) {
  if (!v.is_object()) throw ConfigError(where + ": expected an object");
  reject_unknown_keys(v, where, {"index", "matrix"});
  const int index = as_integer(require(v, "index", where), where + " index");
  if (index <= 0) throw ConfigError(where + ": index must be a positive letter");
  const json& m = require(v, "matrix", where);
  if (!m.is_array() || m.size() != 4) {
    throw ConfigError(where + ": matrix must be an array [a, b, c, d]");
  }
  double c[4];
  for (int i = 0; i < 4; ++i) c[i] = as_number(m[i], where + " matrix");
  if (!(c[0] * c[3] - c[1] * c[2] > 0.0)) {
    throw ConfigError(where + ": matrix determinant must be positive");
  }
  return {index, Moebius::from_coeffs(c[0], c[1], c[2], c[3])};
}

FactorConfig parse_factor(const json& v, const std::string& where) {
  if (!v.is_object()) throw ConfigError(where + ": expected an object");
  reject_unknown_keys(v, where, {"disks", "generators"});
  FactorConfig fc;
  const json& disks = require(v, "disks", where);
  if (!disks.is_array() || disks.empty()) {
    throw ConfigError(where + ": \"disks\" must be a nonempty array");
  }
  for (std::size_t i = 0; i < disks.size(); ++i) {
    fc.disks.push_back(parse_disk(disks[i], where + " disk entry " + std::to_string(i + 1)));
  }
  const auto gens = v.find("generators");
  if (gens != v.end()) {
    if (!gens->is_array()) throw ConfigError(where + ": \"generators\" must be an array");
    for (std::size_t i = 0; i < gens->size(); ++i) {
      fc.generators.push_back(
          parse_generator((*gens)[i], where + " generator entry " + std::to_string(i + 1)));
    }
  }
  return fc;
}

Defaults parse_defaults(const json& v) {
  if (!v.is_object()) throw ConfigError("defaults: expected an object");
  reject_unknown_keys(v, "defaults", {"degree", "depth", "shrink", "tolerance", "horizon"});
  Defaults d;
  if (v.contains("degree")) {
    d.degree = as_integer(v["degree"], "defaults degree");
    if (d.degree < 0 || d.degree > 64) {
      throw ConfigError("defaults degree: must lie in 0..64");
    }
  }
  if (v.contains("depth")) {
    d.depth = as_integer(v["depth"], "defaults depth");
    if (d.depth < 1) throw ConfigError("defaults depth: must be >= 1");
  }
  if (v.contains("shrink")) {
    d.shrink = as_number(v["shrink"], "defaults shrink");
    if (!(d.shrink > 0.0 && d.shrink <= 1.0)) {
      throw ConfigError("defaults shrink: must lie in (0, 1]");
    }
  }
  if (v.contains("tolerance")) {
    d.tolerance = as_number(v["tolerance"], "defaults tolerance");
    if (!(d.tolerance > 0.0)) throw ConfigError("defaults tolerance: must be positive");
  }
  if (v.contains("horizon")) {
    d.horizon = as_number(v["horizon"], "defaults horizon");
    if (d.horizon < 0.0) throw ConfigError("defaults horizon: must be >= 0");
  }
  return d;
}

}  // namespace

GroupConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  reject_unknown_keys(root, "config", {"factors", "defaults"});

  GroupConfig cfg;
  const json& factors = require(root, "factors", "config");
  if (!factors.is_array() || factors.empty()) {
    throw ConfigError("config: \"factors\" must be a nonempty array");
  }
  for (std::size_t j = 0; j < factors.size(); ++j) {
    cfg.factors.push_back(parse_factor(factors[j], "factor " + std::to_string(j + 1)));
  }
  if (root.contains("defaults")) cfg.defaults = parse_defaults(root["defaults"]);
  return cfg;
}

GroupConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ProductGroup build_group(const GroupConfig& cfg) {
  std::vector<SchottkyFactor> factors;
  factors.reserve(cfg.factors.size());
  for (const FactorConfig& fc : cfg.factors) {
    if (fc.generators.empty()) {
      factors.push_back(SchottkyFactor::from_disks(fc.disks));
    } else {
      factors.push_back(SchottkyFactor::from_disks_and_generators(fc.disks, fc.generators));
    }
  }
  return ProductGroup(std::move(factors));
}

std::string canonical_json(const GroupConfig& cfg) {
  ordered_json root;
  root["factors"] = ordered_json::array();
  for (const FactorConfig& fc : cfg.factors) {
    ordered_json jf;
    std::vector<Disk> disks = fc.disks;
    std::sort(disks.begin(), disks.end(),
              [](const Disk& a, const Disk& b) { return a.index < b.index; });
    jf["disks"] = ordered_json::array();
    for (const Disk& d : disks) {
      jf["disks"].push_back({{"index", d.index}, {"center", d.center}, {"radius", d.radius}});
    }
    if (!fc.generators.empty()) {
      auto gens = fc.generators;
      std::sort(gens.begin(), gens.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      jf["generators"] = ordered_json::array();
      for (const auto& [index, g] : gens) {
        jf["generators"].push_back(
            {{"index", index}, {"matrix", {g.a, g.b, g.c, g.d}}});
      }
    }
    root["factors"].push_back(jf);
  }
  root["defaults"] = {{"degree", cfg.defaults.degree},
                      {"depth", cfg.defaults.depth},
                      {"shrink", cfg.defaults.shrink},
                      {"tolerance", cfg.defaults.tolerance},
                      {"horizon", cfg.defaults.horizon}};
  return root.dump(2) + "\n";
}

}  // namespace chamberflow
