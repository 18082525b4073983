#include "gbeam/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gbeam/errors.hpp"

namespace gbeam {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_string(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

double require_number(const nlohmann::json& j, const std::string& key, double fallback,
                      bool required) {
  if (!j.contains(key)) {
    if (required) throw SchemaError("config: missing numeric field '" + key + "'");
    return fallback;
  }
  if (!j[key].is_number()) throw SchemaError("config: field '" + key + "' must be a number");
  return j[key].get<double>();
}

SourceSpec parse_source(const nlohmann::json& j, int dim) {
  if (!j.is_object()) throw SchemaError("config: 'source' must be an object");
  if (!j.contains("z_domain") || !j["z_domain"].is_array())
    throw SchemaError("config: source missing array 'z_domain'");
  const auto& zd = j["z_domain"];
  Vec lo, hi;
  if (zd.size() == 2 && zd[0].is_number() && zd[1].is_number()) {
    lo = Vec(1);
    hi = Vec(1);
    lo[0] = zd[0].get<double>();
    hi[0] = zd[1].get<double>();
  } else {
    lo = Vec(static_cast<int>(zd.size()));
    hi = Vec(static_cast<int>(zd.size()));
    for (std::size_t i = 0; i < zd.size(); ++i) {
      if (!zd[i].is_array() || zd[i].size() != 2)
        throw SchemaError("config: z_domain entries must be [lo,hi] pairs");
      lo[static_cast<int>(i)] = zd[i][0].get<double>();
      hi[static_cast<int>(i)] = zd[i][1].get<double>();
    }
  }
  if (lo.size() != dim - 1)
    throw SchemaError("config: z_domain dimension must be medium dim - 1");
  if (!j.contains("h") || !j["h"].is_object())
    throw SchemaError("config: source missing object 'h'");
  const auto& h = j["h"];
  if (!h.contains("kind") || h["kind"].get<std::string>() != "bump")
    throw SchemaError("config: source h kind must be 'bump'");
  const double radius = require_number(h, "radius", 0.0, true);
  const double k = require_number(j, "k", 0.0, true);
  return make_source_spec(lo, hi, radius, k);
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("config: top level must be an object");
  if (!j.contains("medium")) throw SchemaError("config: missing 'medium'");
  ExperimentConfig c;
  c.medium = medium_from_json(j["medium"]);
  if (j.contains("source")) c.source = parse_source(j["source"], c.medium.dim);
  if (j.contains("k_list")) {
    if (!j["k_list"].is_array()) throw SchemaError("config: 'k_list' must be an array");
    for (const auto& v : j["k_list"]) {
      if (!v.is_number() || !(v.get<double>() > 0.0))
        throw SchemaError("config: k_list entries must be positive numbers");
      c.k_list.push_back(v.get<double>());
    }
  }
  c.alpha = require_number(j, "alpha", 0.0, false);
  if (c.alpha < 0.0) throw SchemaError("config: alpha >= 0 required");
  c.eta = require_number(j, "eta", -1.0, false);
  c.n_quad = static_cast<int>(require_number(j, "n_quad", 12, false));
  if (c.n_quad < 1) throw SchemaError("config: n_quad >= 1 required");
  c.ray_step = require_number(j, "ray_step", 1e-3, false);
  if (!(c.ray_step > 0.0)) throw SchemaError("config: ray_step > 0 required");
  c.ball_radius = require_number(j, "ball_radius", -1.0, false);
  c.points_per_wavelength = static_cast<int>(require_number(j, "points_per_wavelength", 10, false));
  if (c.points_per_wavelength < 2)
    throw SchemaError("config: points_per_wavelength >= 2 required");
  if (j.contains("dump_fields")) {
    if (!j["dump_fields"].is_boolean()) throw SchemaError("config: dump_fields must be boolean");
    c.dump_fields = j["dump_fields"].get<bool>();
  }
  if (j.contains("trace")) {
    const auto& t = j["trace"];
    if (!t.is_object()) throw SchemaError("config: 'trace' must be an object");
    c.trace.rays = static_cast<int>(require_number(t, "rays", 25, false));
    c.trace.samples = static_cast<int>(require_number(t, "samples", 200, false));
    c.trace.s_max = require_number(t, "s_max", 6.0, false);
    if (t.contains("seed")) c.trace.seed = t["seed"].get<std::uint64_t>();
  }
  if (j.contains("out")) {
    if (!j["out"].is_string()) throw SchemaError("config: 'out' must be a string");
    c.out_dir = j["out"].get<std::string>();
  }
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  nlohmann::json j = nlohmann::json::parse(bytes);  // parse_error carries line/column
  ExperimentConfig c = parse_config(j);
  c.hash = fnv1a64(bytes);
  return c;
}

}  // namespace gbeam
