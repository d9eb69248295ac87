#include <cmath>

#include "greenflow/skeleton.hpp"

namespace greenflow {

Rect default_basin_window(const GreenModel& model) {
  const auto& spec = model.spec();
  const Complex y = model.pole().pos;
  switch (spec.family) {
    case Family::PuncturedTorus: return {0.0, spec.lattice_x, 0.0, spec.lattice_y};
    case Family::Cylinder: return {y.real() - 5.0, y.real() + 5.0, 0.0, kTwoPi};
    case Family::HyperbolicDisk: return {-1.0, 1.0, -1.0, 1.0};
    default: return {-4.0, 4.0, -4.0, 4.0};
  }
}

namespace {

BasinLabel label_of(Terminal t) {
  switch (t) {
    case Terminal::Pole: return BasinLabel::Pole;
    case Terminal::Zero: return BasinLabel::Zero;
    case Terminal::ParabolicEnd: return BasinLabel::End;
    case Terminal::HyperbolicBoundary: return BasinLabel::Boundary;
    case Terminal::Escape: return BasinLabel::Escape;
    default: return BasinLabel::Undecided;
  }
}

}  // namespace

BasinResult basin_sample(const GreenModel& model, int grid_n, double t_max,
                         const std::vector<CriticalPoint>& zeros, std::uint64_t seed,
                         std::optional<Rect> window, const FlowOptions& opts, Exec exec) {
  BasinResult res;
  res.n = grid_n;
  res.window = window.value_or(default_basin_window(model));
  res.labels.assign(static_cast<std::size_t>(grid_n) * grid_n, 0);
  FlowOptions o = opts;
  o.record = false;
  o.t_max = t_max;

  std::vector<ChartPoint> excl;
  for (const auto& s : model.singular_points()) {
    if (s.kind != SingularKind::HyperbolicBoundary) excl.push_back(s.where);
  }
  const double cw = res.window.width() / grid_n;
  const double ch = res.window.height() / grid_n;
  const int count = grid_n * grid_n;

  auto body = [&](int k) {
    const int i = k % grid_n, j = k / grid_n;
    const std::uint64_t h = mix_seed(seed ^ mix_seed((static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j)));
    const double jx = unit_from_hash(h) - 0.5;
    const double jy = unit_from_hash(mix_seed(h)) - 0.5;
    const ChartPoint p{0, {res.window.x0 + (i + 0.5 + 0.5 * jx) * cw, res.window.y0 + (j + 0.5 + 0.5 * jy) * ch}};
    if (!model.in_domain(p)) return;
    for (const auto& s : excl) {
      if (model.distance(p, s) < o.tol.r_excl) return;
    }
    if (model.sample(p).singular) return;
    const auto tr = integrate_flow(model, model.wrap(p), FlowDirection::Forward, zeros, o);
    res.labels[k] = static_cast<std::uint8_t>(label_of(tr.terminal));
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (int k = 0; k < count; ++k) body(k);
  } else {
    for (int k = 0; k < count; ++k) body(k);
  }

  for (auto l : res.labels) {
    if (l == 0) continue;
    ++res.counted;
    res.to_pole += l == static_cast<std::uint8_t>(BasinLabel::Pole);
  }
  res.fraction = res.counted > 0 ? static_cast<double>(res.to_pole) / res.counted : 0.0;
  return res;
}

}  // namespace greenflow
