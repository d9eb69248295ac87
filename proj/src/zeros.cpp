#include <algorithm>
#include <cmath>

#include "greenflow/dynamics.hpp"

namespace greenflow {
namespace {

constexpr double kMaxArgStep = kPi / 3.0;
constexpr int kMaxDepth = 24;
constexpr int kRetries = 3;

// Unit phase of fz * prod (z - s_i), or nullopt when the boundary is too
// close to a zero of fz.
struct DeflatedPhase {
  const GreenModel& model;
  int chart;
  const std::vector<Complex>& deflate;
  double eps;

  std::optional<Complex> operator()(Complex z) const {
    const auto s = model.sample(ChartPoint{chart, z});
    const double a = std::abs(s.fz);
    if (!std::isfinite(a) || a < eps) return std::nullopt;
    Complex u = s.fz / a;
    for (const Complex p : deflate) {
      const Complex d = z - p;
      const double r = std::abs(d);
      if (r == 0.0) return std::nullopt;
      u *= d / r;
    }
    return u;
  }
};

template <class Path, class Phase>
bool accumulate(const Path& path, const Phase& phase, double t0, double t1, Complex u0, Complex u1,
                int depth, double& total) {
  const double d = std::arg(u1 / u0);
  if (std::abs(d) <= kMaxArgStep) {
    total += d;
    return true;
  }
  if (depth == 0) return false;
  const double tm = 0.5 * (t0 + t1);
  const auto um = phase(path(tm));
  if (!um) return false;
  return accumulate(path, phase, t0, tm, u0, *um, depth - 1, total) &&
         accumulate(path, phase, tm, t1, *um, u1, depth - 1, total);
}

// Winding of `phase` along a closed path parametrized on [0, 1].
template <class Path, class Phase>
std::optional<int> closed_winding(const Path& path, const Phase& phase, int pieces) {
  double total = 0.0;
  auto u0 = phase(path(0.0));
  if (!u0) return std::nullopt;
  const Complex first = *u0;
  for (int k = 0; k < pieces; ++k) {
    const double t0 = static_cast<double>(k) / pieces;
    const double t1 = static_cast<double>(k + 1) / pieces;
    std::optional<Complex> u1 = k + 1 == pieces ? std::optional<Complex>(first) : phase(path(t1));
    if (!u1) return std::nullopt;
    if (!accumulate(path, phase, t0, t1, *u0, *u1, kMaxDepth, total)) return std::nullopt;
    u0 = u1;
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

std::optional<int> rect_winding(const DeflatedPhase& phase, const Rect& c) {
  const Complex corners[4] = {{c.x0, c.y0}, {c.x1, c.y0}, {c.x1, c.y1}, {c.x0, c.y1}};
  auto path = [&](double t) {
    const double s = t * 4.0;
    const int e = std::min(3, static_cast<int>(s));
    const double f = s - e;
    return corners[e] + f * (corners[(e + 1) % 4] - corners[e]);
  };
  return closed_winding(path, phase, 16);
}

struct Candidate {
  Complex z;
  int winding;
  Rect cell;
};

void subdivide(const DeflatedPhase& phase, const Rect& cell, int winding, double min_size,
               std::vector<Candidate>& out) {
  if (cell.width() <= min_size) {
    out.push_back({Complex{0.5 * (cell.x0 + cell.x1), 0.5 * (cell.y0 + cell.y1)}, winding, cell});
    return;
  }
  for (int attempt = 0; attempt < kRetries; ++attempt) {
    const double f = 0.5 + 0.0731 * attempt;
    const double xm = cell.x0 + f * cell.width();
    const double ym = cell.y0 + f * cell.height();
    const Rect kids[4] = {{cell.x0, xm, cell.y0, ym},
                          {xm, cell.x1, cell.y0, ym},
                          {cell.x0, xm, ym, cell.y1},
                          {xm, cell.x1, ym, cell.y1}};
    int w[4];
    bool ok = true;
    int sum = 0;
    for (int k = 0; k < 4 && ok; ++k) {
      auto r = rect_winding(phase, kids[k]);
      if (!r || *r < 0) ok = false;
      else sum += (w[k] = *r);
    }
    if (!ok || sum != winding) continue;
    for (int k = 0; k < 4; ++k) {
      if (w[k] > 0) subdivide(phase, kids[k], w[k], min_size, out);
    }
    return;
  }
  // no clean split (a high-order zero flattens the field): keep the enclosure
  out.push_back({Complex{0.5 * (cell.x0 + cell.x1), 0.5 * (cell.y0 + cell.y1)}, winding, cell});
}

Complex fz_at(const GreenModel& model, int chart, Complex z) {
  return model.sample(ChartPoint{chart, z}).fz;
}

Complex newton(const GreenModel& model, int chart, Complex z, int mult, const Rect& cell,
               const Tolerances& tol) {
  const double reach = 2.0 * std::max(cell.width(), cell.height());
  const Complex start = z;
  Complex best = z;
  double best_abs = std::abs(fz_at(model, chart, z));
  // iterate past the residual tolerance until the step stalls
  int stale = 0;
  for (int it = 0; it < 100 && stale < 3; ++it) {
    const Complex f = fz_at(model, chart, z);
    const double h = 1e-6 * std::max(1.0, std::abs(z)) * std::max(1e-3, std::min(1.0, reach));
    const Complex df = (fz_at(model, chart, z + h) - fz_at(model, chart, z - h)) / (2.0 * h);
    if (df == Complex{}) break;
    const Complex next = z - static_cast<double>(mult) * f / df;
    if (!(std::abs(next - start) <= reach)) break;
    const bool tiny = std::abs(next - z) <= 1e-15 * std::max(1.0, std::abs(z));
    z = next;
    const double a = std::abs(fz_at(model, chart, z));
    if (a < best_abs) {
      best_abs = a;
      best = z;
      stale = 0;
    } else {
      ++stale;
    }
    if (tiny && best_abs <= tol.newton_tol) break;
  }
  if (!(best_abs <= tol.newton_tol)) {
    throw Error(ErrorCode::NewtonDiverged, "Newton refinement did not reach the tolerance");
  }
  return best;
}

double snap_period(double x, double p) {
  if (p <= 0) return x;
  x = std::fmod(x, p);
  if (x < 0) x += p;
  if (x > p - 1e-9 * p || x < 1e-9 * p) x = 0.0;
  return x;
}

}  // namespace

std::optional<int> cell_winding(const GreenModel& model, int chart, const Rect& cell,
                                const std::vector<Complex>& deflate, double eps) {
  DeflatedPhase phase{model, chart, deflate, eps};
  return rect_winding(phase, cell);
}

std::optional<int> circle_winding(const GreenModel& model, ChartPoint c, double r, double eps) {
  // singularities inside the circle are not removed: a zero has none
  std::vector<Complex> none;
  DeflatedPhase phase{model, c.chart, none, eps};
  auto path = [&](double t) { return c.pos + std::polar(r, kTwoPi * t); };
  return closed_winding(path, phase, 32);
}

std::vector<CriticalPoint> locate_zeros(const GreenModel& model, int chart, const Rect& window,
                                        int grid_n, const Tolerances& tol, Exec exec) {
  if (grid_n < 1) grid_n = 1;
  const double cw = window.width() / grid_n;
  const double ch = window.height() / grid_n;
  const auto deflate = model.field_singularities(chart, window, 2.0 * std::max(cw, ch));
  DeflatedPhase phase{model, chart, deflate, tol.winding_eps};

  std::vector<int> winding(static_cast<std::size_t>(grid_n) * grid_n);
  std::vector<Rect> cells(winding.size());
  bool resolved = false;
  for (int attempt = 0; attempt <= kRetries && !resolved; ++attempt) {
    const double sx = attempt * 0.1377 * cw, sy = attempt * 0.0913 * ch;
    int bad = 0;
    const int count = static_cast<int>(winding.size());
    auto body = [&](int k) {
      const int i = k % grid_n, j = k / grid_n;
      Rect c{window.x0 + i * cw + sx, window.x0 + (i + 1) * cw + sx, window.y0 + j * ch + sy,
             window.y0 + (j + 1) * ch + sy};
      cells[k] = c;
      auto w = rect_winding(phase, c);
      winding[k] = w ? *w : -1;
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 4)
      for (int k = 0; k < count; ++k) body(k);
    } else {
      for (int k = 0; k < count; ++k) body(k);
    }
    for (int w : winding) bad += w < 0;
    resolved = bad == 0;
  }
  if (!resolved) throw Error(ErrorCode::WindingAmbiguous, "grid boundary passes through a zero");

  std::vector<Candidate> cands;
  const double min_size = std::min(cw, ch) / 512.0;
  for (std::size_t k = 0; k < winding.size(); ++k) {
    if (winding[k] > 0) subdivide(phase, cells[k], winding[k], min_size, cands);
  }

  std::vector<CriticalPoint> out;
  for (const auto& c : cands) {
    const Complex z = newton(model, chart, c.z, c.winding, c.cell, tol);
    const ChartPoint p = model.wrap(ChartPoint{chart, z});
    bool dup = false;
    for (const auto& o : out) dup = dup || model.distance(o.where, p) < 1e-6;
    if (dup) continue;
    out.push_back(classify_zero(model, p, tol));
  }
  return out;
}

CriticalPoint classify_zero(const GreenModel& model, ChartPoint position, const Tolerances& tol) {
  CriticalPoint cp;
  cp.where = position;
  const auto& spec = model.spec();
  for (std::size_t i = 0; i < spec.punctures.size(); ++i) {
    if (spec.punctures[i].removable() && model.distance(position, spec.punctures[i].where) < 1e-6) {
      cp.at_removable_end = true;
      cp.end_index = static_cast<int>(i);
      if (auto t = model.transfer(spec.punctures[i].where, position.chart)) cp.where = model.wrap(*t);
    }
  }
  const auto s0 = model.sample(cp.where);
  cp.value = s0.value;
  cp.residual = std::abs(s0.fz);

  double r = 0.0;
  int w = 0;
  for (double f : {1.0, 2.0, 5.0, 10.0}) {
    auto k = circle_winding(model, cp.where, tol.r_cls * f, tol.winding_eps * 1e-3);
    if (k && *k > 0) {
      w = *k;
      r = tol.r_cls * f;
      break;
    }
  }
  if (w == 0) throw Error(ErrorCode::DegenerateCircle, "fz does not wind around the point");
  cp.m = w + 1;
  cp.index = 1 - cp.m;

  // Leading Fourier mode of G - G(z): homogeneous harmonic parts of other
  // degrees are orthogonal to e^{-i m theta}.
  constexpr int n = 512;
  std::vector<double> d(n);
  Complex am{};
  for (int k = 0; k < n; ++k) {
    const double th = kTwoPi * k / n;
    d[k] = model.sample(ChartPoint{cp.where.chart, cp.where.pos + std::polar(r, th)}).value - cp.value;
    am += d[k] * std::polar(1.0, -cp.m * th);
  }
  am *= 2.0 / n;
  cp.C = std::abs(am) / std::pow(r, cp.m);
  cp.alpha = std::arg(am);
  int changes = 0;
  for (int k = 0; k < n; ++k) changes += (d[k] > 0) != (d[(k + 1) % n] > 0);
  cp.sectors = changes;
  return cp;
}

std::vector<SeparatrixDirection> separatrix_directions(const CriticalPoint& cp) {
  std::vector<SeparatrixDirection> out;
  for (int k = 1; k <= 2 * cp.m; ++k) {
    out.push_back({(k * kPi - cp.alpha) / cp.m, k % 2 == 1});
  }
  return out;
}

std::vector<CriticalPoint> locate_all_zeros(const GreenModel& model, int grid_n, const Tolerances& tol,
                                            std::optional<Rect> primary_window, Exec exec) {
  const auto& spec = model.spec();
  const Complex y = model.pole().pos;
  std::vector<CriticalPoint> out;
  auto add = [&](std::vector<CriticalPoint> zs, auto keep) {
    for (auto& z : zs) {
      if (keep(z)) out.push_back(std::move(z));
    }
  };
  auto all = [](const CriticalPoint&) { return true; };

  switch (spec.family) {
    case Family::Plane:
    case Family::PuncturedSphere: {
      const double o = 0.0123;
      const Rect w0 = primary_window.value_or(Rect{-4 + o, 4 + o, -4 + o * 0.7, 4 + o * 0.7});
      add(locate_zeros(model, 0, w0, grid_n, tol, exec), all);
      const double r = 1.0 / 4.0, q = 0.0071;
      const Rect w1{-r + q, r + q, -r + q * 0.6, r + q * 0.6};
      add(locate_zeros(model, 1, w1, grid_n, tol, exec), [&](const CriticalPoint& z) {
        return z.where.pos == Complex{} || !w0.contains(1.0 / z.where.pos);
      });
      break;
    }
    case Family::Cylinder: {
      const double o = 0.0123;
      const double lo = y.real() - 8 + o, hi = y.real() + 8 + o;
      const Rect w0 = primary_window.value_or(Rect{lo, hi, o, kTwoPi + o});
      add(locate_zeros(model, 0, w0, grid_n, tol, exec), all);
      const double r1 = std::exp(w0.x0 + 1.0), r2 = std::exp(-w0.x1 + 1.0);
      add(locate_zeros(model, 1, Rect{-r1 * 1.003, r1, -r1 * 0.997, r1}, grid_n, tol, exec),
          [&](const CriticalPoint& z) {
            return z.where.pos == Complex{} || std::log(std::abs(z.where.pos)) < w0.x0;
          });
      add(locate_zeros(model, 2, Rect{-r2 * 1.003, r2, -r2 * 0.997, r2}, grid_n, tol, exec),
          [&](const CriticalPoint& z) {
            return z.where.pos == Complex{} || -std::log(std::abs(z.where.pos)) > w0.x1;
          });
      break;
    }
    case Family::PuncturedTorus: {
      const double o = 0.1234;
      const Rect w0 = primary_window.value_or(
          Rect{-spec.lattice_x / 2 + o, spec.lattice_x / 2 + o, -spec.lattice_y / 2 + o * 0.83,
               spec.lattice_y / 2 + o * 0.83});
      add(locate_zeros(model, 0, w0, grid_n, tol, exec), all);
      break;
    }
    case Family::HyperbolicDisk: {
      const Rect w0 = primary_window.value_or(Rect{-1.0123, 1.0077, -1.0091, 1.0109});
      add(locate_zeros(model, 0, w0, grid_n, tol, exec),
          [&](const CriticalPoint& z) { return model.in_domain(z.where); });
      break;
    }
    case Family::Mesh:
      break;
  }

  for (auto& z : out) {
    if (z.where.chart == 0) {
      if (spec.family == Family::PuncturedTorus) {
        z.where.pos = {snap_period(z.where.pos.real(), spec.lattice_x),
                       snap_period(z.where.pos.imag(), spec.lattice_y)};
      } else if (spec.family == Family::Cylinder) {
        z.where.pos = {z.where.pos.real(), snap_period(z.where.pos.imag(), kTwoPi)};
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if (a.where.chart != b.where.chart) return a.where.chart < b.where.chart;
    if (a.where.pos.real() != b.where.pos.real()) return a.where.pos.real() < b.where.pos.real();
    return a.where.pos.imag() < b.where.pos.imag();
  });
  return out;
}

}  // namespace greenflow
