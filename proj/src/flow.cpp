#include <algorithm>
#include <cmath>

#include "greenflow/dynamics.hpp"

namespace greenflow {

std::string_view to_string(Terminal t) {
  switch (t) {
    case Terminal::Pole: return "pole";
    case Terminal::Zero: return "zero";
    case Terminal::ParabolicEnd: return "parabolic_end";
    case Terminal::HyperbolicBoundary: return "hyperbolic_boundary";
    case Terminal::Escape: return "escape";
    case Terminal::MaxSteps: return "max_steps";
    case Terminal::StepCollapse: return "step_collapse";
  }
  return "unknown";
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

struct Field {
  const GreenModel& model;
  int chart;
  double sign;
  double kappa;

  // returns false at a singular point
  bool operator()(Complex z, Complex& out) const {
    const auto s = model.sample(ChartPoint{chart, z});
    if (s.singular) return false;
    out = sign * std::conj(s.fz) / (std::abs(s.fz) + kappa);
    return true;
  }
};

double segment_distance(const GreenModel& model, ChartPoint a, Complex b, ChartPoint target) {
  const Complex v = model.displacement(a, target);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return INFINITY;
  const Complex s = b - a.pos;
  const double ss = std::norm(s);
  double t = ss > 0 ? (std::conj(s) * v).real() / ss : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(v - t * s);
}

}  // namespace

Trajectory integrate_flow(const GreenModel& model, ChartPoint x0, FlowDirection direction,
                          const std::vector<CriticalPoint>& zeros, const FlowOptions& opts) {
  const Tolerances& tol = opts.tol;
  const double sign = direction == FlowDirection::Forward ? 1.0 : -1.0;
  const auto& spec = model.spec();
  const ChartPoint pole = model.pole();

  std::vector<const SingularPoint*> ends;
  std::vector<const SingularPoint*> rims;
  for (const auto& s : model.singular_points()) {
    if (s.kind == SingularKind::NonremovableEnd) ends.push_back(&s);
    if (s.kind == SingularKind::HyperbolicBoundary) rims.push_back(&s);
  }
  std::vector<int> removable;
  for (std::size_t i = 0; i < spec.punctures.size(); ++i) {
    if (spec.punctures[i].removable()) removable.push_back(static_cast<int>(i));
  }

  Trajectory tr;
  tr.direction = direction;
  ChartPoint p = model.rechart(x0);
  auto s0 = model.sample(p);
  if (s0.singular) throw Error(ErrorCode::SingularPoint, "trajectory seeded at a singular point");
  double g = s0.value;
  double t = 0.0;
  if (opts.record) tr.samples.push_back({t, p, g});

  // zero the trajectory starts from, if any; its capture ball is ignored on the way out
  int source = -1;
  for (std::size_t j = 0; j < zeros.size(); ++j) {
    if (model.distance(p, zeros[j].where) < 10.0 * tol.eps_sep) source = static_cast<int>(j);
  }
  std::vector<char> inside(removable.size(), 0);

  double h = std::min(tol.max_step, 1e-2);
  bool have_k1 = false;
  Complex k1;

  auto finish = [&](Terminal term, int ref) {
    tr.terminal = term;
    tr.ref = ref;
    tr.last = p;
    tr.last_value = g;
    return tr;
  };

  while (true) {
    // terminal tests at the current point
    if (model.distance(p, pole) < tol.r_pole) return finish(Terminal::Pole, -1);
    double cap = model.distance(p, pole);
    const auto sp = model.sample(p);
    const double fabs = std::abs(sp.fz);
    int near_zero = -1;
    double near_d = INFINITY;
    bool near_behind = false;
    for (std::size_t j = 0; j < zeros.size(); ++j) {
      const double d = model.distance(p, zeros[j].where);
      // a zero whose value lies behind the flow cannot be reached
      const bool behind = sign * (zeros[j].value - g) < -1e-12;
      if (d < near_d) {
        near_behind = behind;
        near_d = d;
        near_zero = static_cast<int>(j);
      }
      if (static_cast<int>(j) == source && d < 10.0 * tol.eps_sep) continue;
      if (d < tr.nearest_zero_distance) {
        tr.nearest_zero_distance = d;
        tr.nearest_zero = static_cast<int>(j);
      }
      if (behind) continue;
      if (d < tol.delta_match) return finish(Terminal::Zero, static_cast<int>(j));
      cap = std::min(cap, d);
    }
    const bool leaving_source = source >= 0 && near_zero == source && near_d < 10.0 * tol.eps_sep;
    if (fabs < tol.zero_capture && !leaving_source && !(near_behind && near_d < 10.0 * tol.r_cls)) {
      if (near_zero >= 0 && near_d < 10.0 * tol.r_cls) return finish(Terminal::Zero, near_zero);
      if (near_zero < 0 || near_d >= 10.0 * tol.r_cls) return finish(Terminal::Zero, -1);
    }
    for (const auto* e : ends) {
      const double d = model.distance(p, e->where);
      if (d < tol.r_end || (g < tol.g_floor && d < 0.5)) return finish(Terminal::ParabolicEnd, e->end_index);
      cap = std::min(cap, d);
    }
    for (const auto* r : rims) {
      const double gap = r->radius - std::abs(p.pos - r->where.pos);
      if (!model.in_domain(p) || (gap < tol.delta_bdry && g < tol.eps_bdry)) {
        return finish(Terminal::HyperbolicBoundary, r->end_index);
      }
      cap = std::min(cap, gap);
    }
    if (opts.window) {
      const Complex z = model.to_primary(p);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !opts.window->contains(z)) {
        return finish(Terminal::Escape, -1);
      }
    }
    if (!std::isfinite(p.pos.real()) || !std::isfinite(p.pos.imag()) || std::abs(p.pos) > 1e8) {
      return finish(Terminal::Escape, -1);
    }
    if (tr.steps >= tol.max_steps || t >= opts.t_max) return finish(Terminal::MaxSteps, -1);

    // one accepted step
    Field f{model, p.chart, sign, tol.kappa};
    if (!have_k1 && !f(p.pos, k1)) return finish(Terminal::StepCollapse, -1);
    have_k1 = true;
    const double hmax = std::min(tol.max_step, 0.5 * cap);
    h = std::min(h, hmax);
    bool accepted = false;
    Complex z_new, k7;
    double g_new = g;
    while (!accepted) {
      if (h < tol.h_min) return finish(Terminal::StepCollapse, -1);
      const Complex z = p.pos;
      Complex k2, k3, k4, k5, k6;
      bool ok = f(z + h * a21 * k1, k2) && f(z + h * (a31 * k1 + a32 * k2), k3) &&
                f(z + h * (a41 * k1 + a42 * k2 + a43 * k3), k4) &&
                f(z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5) &&
                f(z + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6);
      if (ok) {
        z_new = z + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        ok = f(z_new, k7);
      }
      if (!ok) {
        h *= 0.25;
        continue;
      }
      const double err = std::abs(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
      const double factor = err > 0 ? 0.9 * std::pow(tol.step_tol / err, 0.2) : 5.0;
      if (err > tol.step_tol) {
        h *= std::max(0.1, factor);
        continue;
      }
      const auto s = model.sample(ChartPoint{p.chart, z_new});
      g_new = s.value;
      const bool monotone = sign > 0 ? g_new > g : g_new < g;
      if (!monotone || s.singular) {
        h *= 0.5;
        continue;
      }
      accepted = true;
      for (std::size_t i = 0; i < removable.size(); ++i) {
        const double d = segment_distance(model, p, z_new, spec.punctures[removable[i]].where);
        if (d < opts.removable_watch && !inside[i]) {
          inside[i] = 1;
          tr.passes.push_back({removable[i], static_cast<int>(tr.samples.size()), d});
        } else if (d > 10.0 * opts.removable_watch) {
          inside[i] = 0;
        }
      }
      t += h;
      tr.length += std::abs(z_new - p.pos);
      h = std::min(h * std::min(5.0, std::max(0.2, factor)), tol.max_step);
    }
    ++tr.steps;
    const ChartPoint moved = model.rechart(ChartPoint{p.chart, z_new});
    if (moved.chart == p.chart) {
      k1 = k7;
    } else {
      have_k1 = false;
    }
    p = moved;
    g = g_new;
    if (opts.record) tr.samples.push_back({t, p, g});
  }
}

bool strictly_monotone(const Trajectory& tr) {
  for (std::size_t i = 1; i < tr.samples.size(); ++i) {
    const double d = tr.samples[i].value - tr.samples[i - 1].value;
    if (tr.direction == FlowDirection::Forward ? !(d > 0) : !(d < 0)) return false;
  }
  return true;
}

PoleNodeReport pole_node_check(const GreenModel& model, double radius, int n_samples,
                               const std::vector<CriticalPoint>& zeros, std::uint64_t seed,
                               const FlowOptions& opts, Exec exec) {
  PoleNodeReport rep;
  rep.samples = n_samples;
  const ChartPoint pole = model.pole();
  const double jitter = 0.5 * unit_from_hash(mix_seed(seed));
  std::vector<Trajectory> runs(n_samples);
  FlowOptions o = opts;
  o.record = true;
  auto body = [&](int k) {
    const double phi = kTwoPi * (k + jitter) / n_samples;
    const ChartPoint x{0, pole.pos + std::polar(radius, phi)};
    runs[k] = integrate_flow(model, model.wrap(x), FlowDirection::Forward, zeros, o);
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int k = 0; k < n_samples; ++k) body(k);
  } else {
    for (int k = 0; k < n_samples; ++k) body(k);
  }

  std::vector<double> arrival(n_samples, 0.0);
  for (int k = 0; k < n_samples; ++k) {
    const auto& tr = runs[k];
    if (tr.terminal != Terminal::Pole || tr.samples.size() < 2) continue;
    ++rep.reached_pole;
    const auto& a = tr.samples[tr.samples.size() - 2].at;
    const auto& b = tr.samples.back().at;
    const Complex step = model.displacement(a, b);
    const Complex radial = model.displacement(a, pole);
    rep.max_tangent_deviation = std::max(rep.max_tangent_deviation, std::abs(std::arg(step / radial)));
    arrival[k] = std::arg(model.displacement(pole, b));
  }
  for (int k = 0; k < n_samples; ++k) {
    const double d = std::arg(std::polar(1.0, arrival[(k + 1) % n_samples] - arrival[k]));
    if (!(d > 0)) rep.arrival_order_preserved = false;
  }
  rep.holds = rep.reached_pole == n_samples && rep.max_tangent_deviation < 0.05 &&
              rep.arrival_order_preserved;
  return rep;
}

}  // namespace greenflow
