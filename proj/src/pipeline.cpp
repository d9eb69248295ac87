#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "greenflow/cli.hpp"

namespace greenflow {

namespace {

double nearest_singular(const GreenModel& model, ChartPoint p) {
  double d = INFINITY;
  for (const auto& s : model.singular_points()) {
    if (s.kind == SingularKind::HyperbolicBoundary) {
      d = std::min(d, s.radius - std::abs(p.pos - s.where.pos));
    } else {
      d = std::min(d, model.distance(p, s.where));
    }
  }
  return d;
}

void add_laplacian_claim(const GreenModel& model, ChecksReport& rep, Exec exec) {
  const Rect w = default_basin_window(model);
  Complex best{};
  double best_d = -1.0;
  for (int j = 0; j < 9; ++j) {
    for (int i = 0; i < 9; ++i) {
      const Complex c{w.x0 + w.width() * (i + 0.5) / 9, w.y0 + w.height() * (j + 0.5) / 9};
      const ChartPoint p{0, c};
      if (!model.in_domain(p)) continue;
      const double d = nearest_singular(model, p);
      if (d > best_d) {
        best_d = d;
        best = c;
      }
    }
  }
  const double h = 1e-3;
  const double half = std::min(0.1, best_d / 4.0);
  Claim c{"laplacian_residual", "five-point Laplacian of G vanishes away from singular points", {}, false, true, 1e-5};
  try {
    const auto r = laplacian_residual(model, Rect{best.real() - half, best.real() + half, best.imag() - half,
                                                  best.imag() + half},
                                      h, 11, exec);
    c.add("max_abs", r.max_abs);
    c.add("h", h);
    c.pass = r.max_abs <= c.tolerance;
  } catch (const Error&) {
    c.pass = false;
  }
  rep.claims.push_back(c);
}

void add_gradient_claim(const GreenModel& model, std::uint64_t seed, ChecksReport& rep) {
  const Rect w = default_basin_window(model);
  const double fd = 1e-5;
  double worst = 0.0;
  int used = 0;
  for (int k = 0; used < 16 && k < 1000; ++k) {
    const std::uint64_t hsh = mix_seed(seed ^ mix_seed(0x5eed0000ULL + k));
    const ChartPoint p{0, {w.x0 + unit_from_hash(hsh) * w.width(), w.y0 + unit_from_hash(mix_seed(hsh)) * w.height()}};
    if (!model.in_domain(p) || nearest_singular(model, p) < 0.05) continue;
    const auto s = model.sample(p);
    const double gx = (model.sample({0, p.pos + fd}).value - model.sample({0, p.pos - fd}).value) / (2 * fd);
    const double gy = (model.sample({0, p.pos + Complex{0, fd}}).value - model.sample({0, p.pos - Complex{0, fd}}).value) /
                      (2 * fd);
    worst = std::max(worst, std::hypot(gx - s.grad[0], gy - s.grad[1]) / (1.0 + std::abs(s.fz)));
    ++used;
  }
  Claim c{"gradient_consistency", "grad equals (Re fz, -Im fz) and matches finite differences of G", {}, false, true, 1e-6};
  c.add("max_relative_difference", worst);
  c.add("points", used);
  c.pass = used > 0 && worst <= c.tolerance;
  rep.claims.push_back(c);
}

std::vector<double> monotonicity_radii(const GreenModel& model) {
  switch (model.spec().family) {
    case Family::Plane: return {0.5, 1.0, 2.0};
    case Family::Cylinder: return {1.0, 2.0, 3.0};
    case Family::HyperbolicDisk: {
      const double room = 1.0 - std::abs(model.pole().pos);
      return {0.15 * room, 0.4 * room, 0.75 * room};
    }
    default: return {0.25, 0.5};
  }
}

void run_exhaustion(Analysis& a, Exec exec) {
  const auto& spec = a.config.spec;
  auto& ex = a.exhaustion;
  const int n = a.config.grids.mesh_n;
  if (spec.family == Family::PuncturedTorus) {
    if (spec.punctures.size() != 1 || spec.lattice_x != kTwoPi || spec.lattice_y != kTwoPi) {
      ex.note = "mesh exhaustion needs the square 2pi torus with one puncture";
      return;
    }
    const Complex p = spec.punctures[0].where.pos - a.config.pole.pos;
    auto res = torus_exhaustion(n, p, {1.6, 0.8, 0.4, 0.2, 0.1}, exec);
    ex.ran = true;
    ex.kind = "torus";
    ex.radii = res.radii;
    ex.shifts = res.sequence.shifts;
    ex.metrics = res.sequence.metrics;
    ex.monotone = res.sequence.monotone;
    ex.relative_error = res.relative_error;
    a.mesh = build_mesh(MeshFamily::Torus, n, exec);
    a.mesh_values = res.sequence.limit();
  } else if (spec.family == Family::HyperbolicDisk) {
    std::vector<int> ns = {std::max(8, n / 4), std::max(16, n / 2), n};
    auto res = disk_refinement(ns, 0.25, 0.75, exec);
    ex.ran = true;
    ex.kind = "disk";
    ex.ns = res.n;
    ex.errors = res.error;
    ex.orders = res.order;
    a.mesh = build_mesh(MeshFamily::Disk, n, exec);
    std::vector<char> mask(a.mesh->vertices.size());
    for (std::size_t v = 0; v < mask.size(); ++v) mask[v] = !a.mesh->boundary[v];
    a.mesh_values = dirichlet_green(*a.mesh, mask, 0);
  } else {
    ex.note = "mesh exhaustion is available for the torus and the disk";
  }
}

}  // namespace

Analysis analyze(const RunConfig& cfg, Exec exec) {
  Analysis a;
  a.config = cfg;
  a.model.emplace(make_model(cfg.spec, cfg.pole));
  const GreenModel& model = *a.model;

  a.zeros = locate_all_zeros(model, cfg.grids.zero_grid, cfg.tol, cfg.grids.zero_window, exec);

  FlowOptions fo;
  fo.tol = cfg.tol;
  a.compact = build_skeleton(model, a.zeros, Variant::Compactified, fo, exec);
  if (cfg.outputs.variant != "compactified") {
    a.open = build_skeleton(model, a.zeros, Variant::Open, fo, exec);
  }

  FlowOptions bo = fo;
  bo.tol.step_tol = std::max(fo.tol.step_tol, 1e-7);
  a.basin = basin_sample(model, cfg.grids.basin_grid, cfg.grids.basin_t_max, a.zeros, cfg.seed,
                         cfg.grids.basin_window, bo, exec);

  const Rect bw = a.basin.window;
  for (int k = 0; k < cfg.outputs.sample_trajectories; ++k) {
    const std::uint64_t h = mix_seed(cfg.seed ^ mix_seed(0x7a11ULL + k));
    const ChartPoint p{0, {bw.x0 + unit_from_hash(h) * bw.width(), bw.y0 + unit_from_hash(mix_seed(h)) * bw.height()}};
    if (!model.in_domain(p) || nearest_singular(model, p) < cfg.tol.r_excl) continue;
    a.samples.push_back(integrate_flow(model, model.wrap(p), FlowDirection::Forward, a.zeros, fo));
  }

  a.checks = verify_report(model, a.zeros, *a.compact, a.open ? &*a.open : nullptr);
  add_laplacian_claim(model, a.checks, exec);
  add_gradient_claim(model, cfg.seed, a.checks);

  {
    double r = 0.1;
    for (const auto& s : model.singular_points()) {
      if (s.kind == SingularKind::Pole) continue;
      const double d = s.kind == SingularKind::HyperbolicBoundary
                           ? s.radius - std::abs(model.pole().pos - s.where.pos)
                           : model.distance(model.pole(), s.where);
      r = std::min(r, 0.25 * d);
    }
    for (const auto& z : a.zeros) r = std::min(r, 0.25 * model.distance(model.pole(), z.where));
    const auto rep = pole_node_check(model, r, 64, a.zeros, cfg.seed, fo, exec);
    Claim c{"pole_node", "flow near the pole is a stable node", {}, rep.holds, true, 0.05};
    c.add("radius", r);
    c.add("samples", rep.samples);
    c.add("reached_pole", rep.reached_pole);
    c.add("max_tangent_deviation", rep.max_tangent_deviation);
    c.add("arrival_order_preserved", rep.arrival_order_preserved);
    a.checks.claims.push_back(c);
  }
  {
    const auto fam = cfg.spec.family;
    const bool required = fam == Family::Plane || fam == Family::Cylinder || fam == Family::HyperbolicDisk;
    const auto rep = monotonicity_check(model, monotonicity_radii(model), 720, 10000, default_domain(model),
                                        cfg.seed, 1e-6, exec);
    Claim c{"sup_outside_balls", "sup of G outside a ball around the pole is attained on the circle",
            {}, rep.holds, required, 1e-6};
    c.add("worst_margin", rep.worst_margin);
    for (const auto& r : rep.radii) c.add("margin_r" + std::to_string(r.radius), r.margin);
    a.checks.claims.push_back(c);
  }
  {
    bool mono = true;
    for (const auto& t : a.samples) mono = mono && strictly_monotone(t);
    Claim c{"trajectories_monotone", "G strictly increases along every sample trajectory", {}, mono, true, 0.0};
    c.add("trajectories", static_cast<double>(a.samples.size()));
    a.checks.claims.push_back(c);
  }
  {
    Claim c{"basin_full_measure", "almost every grid point flows to the pole", {}, a.basin.fraction >= 0.99, true, 0.01};
    c.add("fraction", a.basin.fraction);
    c.add("counted", a.basin.counted);
    a.checks.claims.push_back(c);
  }

  if (cfg.outputs.mesh_exhaust) {
    run_exhaustion(a, exec);
    if (a.exhaustion.ran) {
      Claim c{"exhaustion", "discrete exhaustion converges to the closed form", {}, false, true, 0.0};
      if (a.exhaustion.kind == "torus") {
        c.tolerance = 0.05;
        c.add("relative_error", a.exhaustion.relative_error);
        c.add("monotone", a.exhaustion.monotone);
        c.pass = a.exhaustion.monotone && a.exhaustion.relative_error <= c.tolerance;
      } else {
        c.tolerance = 1.8;
        double worst = INFINITY;
        for (double o : a.exhaustion.orders) worst = std::min(worst, o);
        c.add("min_order", worst);
        c.pass = worst >= c.tolerance;
      }
      a.checks.claims.push_back(c);
    }
  }
  return a;
}

int run_analyze(const AnalyzeOptions& opts, std::ostream& log) {
  try {
    RunConfig cfg = load_config(opts.config_path);
    if (opts.out_dir) cfg.outputs.dir = *opts.out_dir;
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.variant) {
      if (*opts.variant != "open" && *opts.variant != "compactified" && *opts.variant != "both") {
        throw Error(ErrorCode::ConfigError, "'--variant': expected open, compactified or both");
      }
      cfg.outputs.variant = *opts.variant;
    }
    cfg.outputs.svg = cfg.outputs.svg || opts.emit_svg;
    cfg.outputs.raster = cfg.outputs.raster || opts.emit_raster;
    cfg.outputs.mesh_exhaust = cfg.outputs.mesh_exhaust || opts.mesh_exhaust;

    const Analysis a = analyze(cfg);
    emit_outputs(a);
    for (const auto& c : a.checks.claims) {
      log << (c.pass ? "ok    " : (c.required ? "FAIL  " : "note  ")) << c.id << '\n';
    }
    log << "zeros: " << a.zeros.size() << ", beta0 = " << a.compact->beta0 << ", beta1 = " << a.compact->beta1
        << ", basin fraction = " << a.basin.fraction << '\n';
    return a.checks.all_pass() ? 0 : 2;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace greenflow
