#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "greenflow/cli.hpp"

namespace greenflow {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& why) {
  throw Error(ErrorCode::ConfigError, "'" + key + "': " + why);
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items()) {
    if (!ok.count(k)) fail(where.empty() ? k : where + "." + k, "unknown key");
  }
}

double scalar(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_scalar_text(v.get<std::string>());
    } catch (const Error&) {
      fail(key, "cannot parse number '" + v.get<std::string>() + "'");
    }
  }
  fail(key, "expected a number");
}

double positive(const json& v, const std::string& key) {
  const double x = scalar(v, key);
  if (!(x > 0.0) || !std::isfinite(x)) fail(key, "must be positive");
  return x;
}

int positive_int(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() <= 0) fail(key, "must be a positive integer");
  return v.get<int>();
}

bool boolean(const json& v, const std::string& key) {
  if (!v.is_boolean()) fail(key, "expected true or false");
  return v.get<bool>();
}

Rect rect(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 4) fail(key, "expected [x0, x1, y0, y1]");
  Rect r{scalar(v[0], key), scalar(v[1], key), scalar(v[2], key), scalar(v[3], key)};
  if (!(r.x1 > r.x0 && r.y1 > r.y0)) fail(key, "empty window");
  return r;
}

ChartPoint point(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2) fail(key, "expected [x1, x2]");
  const double x = scalar(v[0], key), y = scalar(v[1], key);
  if (!std::isfinite(x) || !std::isfinite(y)) return infinity_point();
  return ChartPoint{0, {x, y}};
}

void parse_surface(const json& s, RunConfig& cfg) {
  only_keys(s, "surface", {"family", "genus", "punctures", "lattice", "pole", "cylinder_variant",
                           "hyperbolic_ends"});
  if (!s.contains("family") || !s["family"].is_string()) fail("surface.family", "required string");
  const auto fam = family_from_string(s["family"].get<std::string>());
  if (!fam || *fam == Family::Mesh) fail("surface.family", "unknown family '" + s["family"].get<std::string>() + "'");

  SurfaceSpec spec;
  switch (*fam) {
    case Family::Plane: spec = make_plane(); break;
    case Family::Cylinder: {
      auto variant = CylinderVariant::G1;
      if (s.contains("cylinder_variant")) {
        const auto& v = s["cylinder_variant"];
        if (v == "G1") variant = CylinderVariant::G1;
        else if (v == "G2") variant = CylinderVariant::G2;
        else fail("surface.cylinder_variant", "expected \"G1\" or \"G2\"");
      }
      spec = make_cylinder(variant);
      break;
    }
    case Family::PuncturedSphere: spec = make_sphere({}); break;
    case Family::PuncturedTorus: spec = make_torus({}); break;
    case Family::HyperbolicDisk: spec = make_hyperbolic_disk(); break;
    case Family::Mesh: break;
  }
  if (*fam != Family::Cylinder && s.contains("cylinder_variant")) {
    fail("surface.cylinder_variant", "only valid for the cylinder");
  }
  if (s.contains("genus")) {
    if (!s["genus"].is_number_integer()) fail("surface.genus", "expected an integer");
    spec.genus = s["genus"].get<int>();
  }
  if (s.contains("punctures")) {
    if (*fam == Family::Plane || *fam == Family::Cylinder) {
      fail("surface.punctures", "the ends of this family are fixed");
    }
    const auto& arr = s["punctures"];
    if (!arr.is_array()) fail("surface.punctures", "expected a list of [x1, x2, c]");
    spec.punctures.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string key = "surface.punctures[" + std::to_string(i) + "]";
      const auto& p = arr[i];
      if (!p.is_array() || p.size() != 3) fail(key, "expected [x1, x2, c]");
      const auto where = point(json::array({p[0], p[1]}), key);
      spec.punctures.push_back(Puncture{where, scalar(p[2], key)});
    }
  }
  if (s.contains("lattice")) {
    const auto& l = s["lattice"];
    if (*fam != Family::PuncturedTorus) fail("surface.lattice", "only valid for the torus");
    if (!l.is_array() || l.size() != 2) fail("surface.lattice", "expected [lx, ly]");
    spec.lattice_x = positive(l[0], "surface.lattice");
    spec.lattice_y = positive(l[1], "surface.lattice");
  }
  if (s.contains("hyperbolic_ends")) {
    const auto& arr = s["hyperbolic_ends"];
    if (!arr.is_array()) fail("surface.hyperbolic_ends", "expected a list of [cx, cy, r]");
    spec.hyperbolic_ends.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string key = "surface.hyperbolic_ends[" + std::to_string(i) + "]";
      const auto& h = arr[i];
      if (!h.is_array() || h.size() != 3) fail(key, "expected [cx, cy, r]");
      spec.hyperbolic_ends.push_back({{scalar(h[0], key), scalar(h[1], key)}, positive(h[2], key)});
      const auto& e = spec.hyperbolic_ends.back();
      if (e.center != Complex{} || e.radius != 1.0) fail(key, "only the unit circle is supported");
    }
  }
  if (!s.contains("pole")) fail("surface.pole", "required");
  cfg.pole = point(s["pole"], "surface.pole");
  if (cfg.pole.chart != 0) fail("surface.pole", "the pole must be finite");
  cfg.spec = spec;
}

void parse_tolerances(const json& t, Tolerances& tol) {
  struct Entry {
    const char* name;
    double* slot;
  };
  const Entry entries[] = {
      {"newton_tol", &tol.newton_tol}, {"r_cls", &tol.r_cls}, {"zero_capture", &tol.zero_capture},
      {"eps_bdry", &tol.eps_bdry}, {"delta_bdry", &tol.delta_bdry}, {"r_pole", &tol.r_pole},
      {"r_end", &tol.r_end}, {"r_excl", &tol.r_excl}, {"eps_sep", &tol.eps_sep},
      {"delta_match", &tol.delta_match}, {"kappa", &tol.kappa}, {"step_tol", &tol.step_tol},
      {"max_step", &tol.max_step}, {"h_min", &tol.h_min}, {"winding_eps", &tol.winding_eps}};
  if (!t.is_object()) fail("tolerances", "expected an object");
  for (const auto& [k, v] : t.items()) {
    const std::string key = "tolerances." + k;
    bool known = false;
    for (const auto& e : entries) {
      if (k == e.name) {
        *e.slot = positive(v, key);
        known = true;
      }
    }
    if (k == "g_floor") {
      tol.g_floor = scalar(v, key);
      if (!(tol.g_floor < 0.0)) fail(key, "must be negative");
      known = true;
    } else if (k == "max_steps") {
      tol.max_steps = positive_int(v, key);
      known = true;
    }
    if (!known) fail(key, "unknown key");
  }
}

}  // namespace

double parse_scalar_text(const std::string& text) {
  static const std::regex frac(R"(^\s*([+-]?[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\s*/\s*([0-9]*\.?[0-9]+)\s*$)");
  static const std::regex pi(
      R"(^\s*([+-])?\s*(?:([0-9]*\.?[0-9]+)\s*\*?\s*)?pi\s*(?:/\s*([0-9]*\.?[0-9]+))?\s*$)");
  std::smatch m;
  if (text == "inf" || text == "+inf" || text == "infinity") return INFINITY;
  if (text == "-inf") return -INFINITY;
  if (std::regex_match(text, m, frac)) return std::stod(m[1]) / std::stod(m[2]);
  if (std::regex_match(text, m, pi)) {
    double v = kPi;
    if (m[2].matched) v *= std::stod(m[2]);
    if (m[3].matched) v /= std::stod(m[3]);
    if (m[1].matched && m[1] == "-") v = -v;
    return v;
  }
  std::size_t used = 0;
  try {
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::ConfigError, "cannot parse number '" + text + "'");
}

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("invalid JSON: ") + e.what());
  }
  only_keys(doc, "", {"schema_version", "surface", "tolerances", "grids", "outputs", "seed"});
  RunConfig cfg;
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer()) {
    fail("schema_version", "required integer");
  }
  cfg.schema_version = doc["schema_version"].get<int>();
  if (cfg.schema_version != kSchemaVersion) fail("schema_version", "unsupported version");
  if (!doc.contains("surface")) fail("surface", "required");
  parse_surface(doc["surface"], cfg);
  if (doc.contains("tolerances")) parse_tolerances(doc["tolerances"], cfg.tol);
  if (doc.contains("grids")) {
    const auto& g = doc["grids"];
    only_keys(g, "grids", {"zero_grid", "basin_grid", "basin_t_max", "mesh_n", "zero_window", "basin_window"});
    if (g.contains("zero_grid")) cfg.grids.zero_grid = positive_int(g["zero_grid"], "grids.zero_grid");
    if (g.contains("basin_grid")) cfg.grids.basin_grid = positive_int(g["basin_grid"], "grids.basin_grid");
    if (g.contains("basin_t_max")) cfg.grids.basin_t_max = positive(g["basin_t_max"], "grids.basin_t_max");
    if (g.contains("mesh_n")) cfg.grids.mesh_n = positive_int(g["mesh_n"], "grids.mesh_n");
    if (g.contains("zero_window")) cfg.grids.zero_window = rect(g["zero_window"], "grids.zero_window");
    if (g.contains("basin_window")) cfg.grids.basin_window = rect(g["basin_window"], "grids.basin_window");
    if (cfg.grids.mesh_n < 16) fail("grids.mesh_n", "must be at least 16");
  }
  if (doc.contains("outputs")) {
    const auto& o = doc["outputs"];
    only_keys(o, "outputs", {"dir", "svg", "raster", "variant", "mesh_exhaust", "sample_trajectories"});
    if (o.contains("dir")) {
      if (!o["dir"].is_string()) fail("outputs.dir", "expected a string");
      cfg.outputs.dir = o["dir"].get<std::string>();
    }
    if (o.contains("svg")) cfg.outputs.svg = boolean(o["svg"], "outputs.svg");
    if (o.contains("raster")) cfg.outputs.raster = boolean(o["raster"], "outputs.raster");
    if (o.contains("mesh_exhaust")) cfg.outputs.mesh_exhaust = boolean(o["mesh_exhaust"], "outputs.mesh_exhaust");
    if (o.contains("variant")) {
      const auto& v = o["variant"];
      if (v != "open" && v != "compactified" && v != "both") {
        fail("outputs.variant", "expected open, compactified or both");
      }
      cfg.outputs.variant = v.get<std::string>();
    }
    if (o.contains("sample_trajectories")) {
      const auto& v = o["sample_trajectories"];
      if (!v.is_number_integer() || v.get<long long>() < 0) fail("outputs.sample_trajectories", "expected a count");
      cfg.outputs.sample_trajectories = v.get<int>();
    }
  }
  if (doc.contains("seed")) {
    const auto& s = doc["seed"];
    if (!s.is_number_unsigned()) fail("seed", "expected a nonnegative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace greenflow
