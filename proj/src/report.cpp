#include <cmath>

#include <json.hpp>

#include "greenflow/cli.hpp"

namespace greenflow {

using ojson = nlohmann::ordered_json;

namespace {

ojson num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

ojson pair(Complex z) { return ojson::array({num(z.real()), num(z.imag())}); }

ojson zero_json(const GreenModel& model, const CriticalPoint& z) {
  ojson o;
  o["chart"] = z.where.chart;
  o["position"] = pair(z.where.pos);
  o["primary"] = pair(model.to_primary(z.where));
  o["m"] = z.m;
  o["index"] = z.index;
  o["value"] = num(z.value);
  o["at_removable_end"] = z.at_removable_end;
  o["alpha"] = num(z.alpha);
  o["C"] = num(z.C);
  o["sectors"] = z.sectors;
  o["residual"] = num(z.residual);
  return o;
}

ojson graph_json(const GreenModel& model, const SkeletonGraph& g) {
  ojson o;
  o["variant"] = std::string(to_string(g.variant));
  o["complete"] = g.complete;
  o["beta0"] = g.beta0;
  o["beta1"] = g.beta1;
  ojson vs = ojson::array();
  for (std::size_t i = 0; i < g.vertices.size(); ++i) {
    const auto& v = g.vertices[i];
    ojson jv;
    jv["id"] = i;
    jv["kind"] = std::string(to_string(v.kind));
    jv["chart"] = v.where.chart;
    jv["position"] = pair(v.where.pos);
    jv["primary"] = pair(model.to_primary(v.where));
    jv["ref"] = v.ref;
    jv["value"] = num(v.value);
    vs.push_back(jv);
  }
  o["vertices"] = vs;
  ojson es = ojson::array();
  for (const auto& e : g.edges) {
    ojson je;
    je["source"] = e.source;
    je["sink"] = e.sink;
    je["zero"] = e.zero;
    je["angle"] = num(e.angle);
    je["terminal"] = std::string(to_string(e.terminal));
    je["resolved"] = e.resolved;
    je["g_hi"] = num(e.g_hi);
    je["g_lo"] = num(e.g_lo);
    je["near_miss"] = num(e.near_miss);
    // at most ~200 points, always keeping both ends
    ojson poly = ojson::array();
    const std::size_t n = e.polyline.size();
    const std::size_t stride = n > 200 ? (n + 199) / 200 : 1;
    for (std::size_t i = 0; i < n; i += stride) {
      const auto& s = e.polyline[i];
      const Complex z = model.to_primary(s.at);
      poly.push_back(ojson::array({num(z.real()), num(z.imag()), num(s.value)}));
      if (i + stride >= n && i + 1 != n) i = n - 1 - stride;
    }
    je["polyline"] = poly;
    es.push_back(je);
  }
  o["edges"] = es;
  o["notes"] = g.notes;
  return o;
}

}  // namespace

std::string report_json(const Analysis& a) {
  const GreenModel& model = *a.model;
  const auto& cfg = a.config;
  const auto& spec = cfg.spec;
  ojson r;
  r["schema_version"] = kSchemaVersion;

  ojson s;
  s["family"] = std::string(to_string(spec.family));
  s["genus"] = spec.genus;
  ojson ps = ojson::array();
  for (const auto& p : spec.punctures) {
    const Complex z = model.to_primary(p.where);
    ps.push_back(ojson::array({num(z.real()), num(z.imag()), num(p.weight)}));
  }
  s["punctures"] = ps;
  if (spec.family == Family::PuncturedTorus) s["lattice"] = ojson::array({spec.lattice_x, spec.lattice_y});
  if (spec.family == Family::Cylinder) {
    s["cylinder_variant"] = spec.cylinder_variant == CylinderVariant::G1 ? "G1" : "G2";
  }
  ojson hs = ojson::array();
  for (const auto& h : spec.hyperbolic_ends) {
    hs.push_back(ojson::array({num(h.center.real()), num(h.center.imag()), num(h.radius)}));
  }
  s["hyperbolic_ends"] = hs;
  s["pole"] = pair(cfg.pole.pos);
  r["surface"] = s;
  r["seed"] = cfg.seed;

  const auto& t = model.topology();
  ojson tj;
  tj["nu"] = t.nu;
  tj["lambda1"] = t.lambda1;
  tj["lambda1_prime"] = t.lambda1_prime;
  tj["lambda2"] = t.lambda2;
  tj["lambda_prime"] = t.lambda_prime;
  tj["lambda"] = t.lambda;
  tj["euler_char"] = t.euler_char;
  tj["bound_topological"] = t.bound_topological;
  tj["bound_conformal"] = t.bound_conformal;
  r["topology"] = tj;

  ojson zs = ojson::array();
  for (const auto& z : a.zeros) zs.push_back(zero_json(model, z));
  r["zeros"] = zs;

  ojson sk;
  if (a.compact) sk["compactified"] = graph_json(model, *a.compact);
  if (a.open) sk["open"] = graph_json(model, *a.open);
  r["skeleton"] = sk;

  ojson b;
  b["grid"] = a.basin.n;
  b["window"] = ojson::array({a.basin.window.x0, a.basin.window.x1, a.basin.window.y0, a.basin.window.y1});
  b["counted"] = a.basin.counted;
  b["to_pole"] = a.basin.to_pole;
  b["fraction"] = num(a.basin.fraction);
  r["basin"] = b;

  ojson ch;
  ch["all_pass"] = a.checks.all_pass();
  ojson cl = ojson::array();
  for (const auto& c : a.checks.claims) {
    ojson jc;
    jc["id"] = c.id;
    jc["statement"] = c.statement;
    jc["pass"] = c.pass;
    jc["required"] = c.required;
    jc["tolerance"] = num(c.tolerance);
    ojson nums;
    for (const auto& [k, v] : c.numbers) nums[k] = num(v);
    jc["numbers"] = nums;
    cl.push_back(jc);
  }
  ch["claims"] = cl;
  r["checks"] = ch;

  if (a.exhaustion.ran || !a.exhaustion.note.empty()) {
    const auto& ex = a.exhaustion;
    ojson e;
    e["ran"] = ex.ran;
    e["kind"] = ex.kind;
    auto list = [](const std::vector<double>& v) {
      ojson out = ojson::array();
      for (double x : v) out.push_back(num(x));
      return out;
    };
    if (ex.kind == "torus") {
      e["radii"] = list(ex.radii);
      e["shifts"] = list(ex.shifts);
      e["metrics"] = list(ex.metrics);
      e["monotone"] = ex.monotone;
      e["relative_error"] = num(ex.relative_error);
    } else if (ex.kind == "disk") {
      e["n"] = ex.ns;
      e["errors"] = list(ex.errors);
      e["orders"] = list(ex.orders);
    }
    e["note"] = ex.note;
    r["exhaustion"] = e;
  }
  return r.dump(2) + "\n";
}

std::string reemit_report(const std::string& json_text) {
  return ojson::parse(json_text).dump(2) + "\n";
}

}  // namespace greenflow
