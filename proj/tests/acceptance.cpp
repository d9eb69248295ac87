// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "greenflow/cli.hpp"
#include "oracles.hpp"

using namespace greenflow;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [" << what << "]";
    }
  }
};

std::vector<Puncture> cube_roots() {
  std::vector<Puncture> ps;
  for (int k = 0; k < 3; ++k) ps.push_back({{0, std::polar(1.0, k * kTwoPi / 3)}, 1.0 / 3.0});
  ps.push_back({infinity_point(), 0.0});
  return ps;
}

RunConfig config(const std::string& name) {
  RunConfig c;
  c.seed = 7;
  c.outputs.sample_trajectories = 16;
  c.grids.basin_grid = 100;
  if (name == "torus") {
    c.spec = make_torus({{{0, {0, kPi}}, 1.0}});
    c.grids.basin_grid = 200;
  } else if (name == "plane") {
    c.spec = make_plane();
    c.grids.basin_grid = 200;
  } else if (name == "cylinder_g1") {
    c.spec = make_cylinder(CylinderVariant::G1);
    c.pole = {0, {0.3, 1.0}};
  } else if (name == "cylinder_g2") {
    c.spec = make_cylinder(CylinderVariant::G2);
    c.grids.zero_window = Rect{-8, 8, 0, kTwoPi};
    c.grids.basin_grid = 200;
  } else if (name == "sphere_asymmetric") {
    c.spec = make_sphere({{{0, {1, 0}}, 2.0 / 3.0}, {{0, {-1, 0}}, 1.0 / 3.0}, {infinity_point(), 0.0}});
  } else if (name == "sphere_symmetric") {
    c.spec = make_sphere({{{0, {1, 0}}, 0.5}, {{0, {-1, 0}}, 0.5}, {infinity_point(), 0.0}});
  } else if (name == "sphere_cube_roots") {
    c.spec = make_sphere(cube_roots());
  } else if (name == "disk") {
    c.spec = make_hyperbolic_disk();
    c.pole = {0, {0.3, 0.0}};
  }
  return c;
}

const std::vector<std::string> kModels{"plane",           "cylinder_g1",      "cylinder_g2",       "sphere_asymmetric",
                                       "sphere_symmetric", "sphere_cube_roots", "torus", "disk"};

const Analysis& run(const std::string& name) {
  static std::map<std::string, Analysis> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, analyze(config(name))).first;
  return it->second;
}

const Claim* claim(const Analysis& a, const std::string& id) {
  for (const auto& c : a.checks.claims) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

bool claim_passes(const Analysis& a, const std::string& id) {
  const Claim* c = claim(a, id);
  return c && c->pass;
}

bool morse(const Analysis& a) {
  return std::all_of(a.zeros.begin(), a.zeros.end(), [](const CriticalPoint& z) { return z.m == 2; });
}

int finite_count(const Analysis& a) {
  return static_cast<int>(std::count_if(a.zeros.begin(), a.zeros.end(),
                                        [](const CriticalPoint& z) { return !z.at_removable_end; }));
}

// ---- criteria ---------------------------------------------------------------

void torus_zeros(Outcome& o) {
  const auto& a = run("torus");
  const auto& m = *a.model;
  o.detail << "zeros=" << a.zeros.size();
  o.require(a.zeros.size() == 2, "two zeros");
  for (Complex w : {Complex{kPi, 0.0}, Complex{kPi, kPi}}) {
    const auto it = std::find_if(a.zeros.begin(), a.zeros.end(),
                                 [&](const CriticalPoint& z) { return m.distance(z.where, {0, w}) < 1e-6; });
    o.require(it != a.zeros.end(), "zero near (pi, " + std::to_string(w.imag()) + ")");
    if (it != a.zeros.end()) o.require(it->m == 2 && it->index == -1, "saddle");
  }
  const auto& t = m.topology();
  const int bound = 2 * t.nu + t.lambda_prime - 1;
  o.detail << " bound=" << bound;
  o.require(bound == 2 && static_cast<int>(a.zeros.size()) == bound, "bound attained");
  o.require(morse(a), "Morse");
}

void torus_homology(Outcome& o) {
  const auto& a = run("torus");
  o.detail << "compactified=(" << a.compact->beta0 << "," << a.compact->beta1 << ") open=(" << a.open->beta0 << ","
           << a.open->beta1 << ")";
  o.require(a.compact->complete && a.compact->beta0 == 1 && a.compact->beta1 == 2, "compactified");
  o.require(a.open->complete && a.open->beta1 == 1, "open");
}

void hopf_sum(Outcome& o) {
  for (const auto& name : kModels) {
    const auto& a = run(name);
    const auto& t = a.model->topology();
    int s = 1 + t.lambda_prime;
    for (const auto& z : a.zeros) s += 1 - z.m;
    o.detail << name << "=" << s << "/" << 2 - 2 * t.nu << " ";
    o.require(s == 2 - 2 * t.nu, name);
  }
}

void zero_free(Outcome& o) {
  for (const auto& name : {"plane", "cylinder_g2", "disk"}) {
    const auto& a = run(name);
    const auto& t = a.model->topology();
    const int bound = 2 * t.nu + t.lambda_prime - 1;
    o.detail << name << ":" << a.zeros.size() << "/" << bound << " ";
    o.require(a.zeros.empty() && bound == 0, name);
  }
}

void cylinder_g1(Outcome& o) {
  const auto& a = run("cylinder_g1");
  const Complex u0 = a.config.pole.pos;
  o.require(a.zeros.size() == 1, "one zero");
  if (!a.zeros.empty()) {
    // grad of -(1/4pi) log(cosh dx - cos dt) vanishes iff sinh dx = 0 and sin dt = 0
    const double d = a.model->distance(a.zeros[0].where, {0, u0 + Complex{0, kPi}});
    o.detail << "distance=" << d;
    o.require(d < 1e-8, "position");
  }
  const auto& t = a.model->topology();
  const int bound = 2 * t.nu + t.lambda - 1;
  o.detail << " bound=" << bound;
  o.require(bound == 1 && static_cast<int>(a.zeros.size()) == bound, "bound attained");
  o.require(morse(a), "Morse");
}

void sphere_asymmetric(Outcome& o) {
  const auto& a = run("sphere_asymmetric");
  // numerator of 1/z - (2/3)/(z-1) - (1/3)/(z+1) is -z/3 - 1
  const Complex root{-3.0, 0.0};
  o.require(a.zeros.size() == 1, "one zero");
  if (!a.zeros.empty()) {
    const double d = std::abs(a.model->to_primary(a.zeros[0].where) - root);
    o.detail << "distance=" << d;
    o.require(d < 1e-8, "position");
    o.require(!a.zeros[0].at_removable_end, "infinity is not critical");
  }
  o.require(finite_count(a) == 1 && a.model->topology().bound_conformal == 1, "count equals bound");
}

void sphere_symmetric(Outcome& o) {
  const auto& a = run("sphere_symmetric");
  o.require(finite_count(a) == 0, "no finite zeros");
  o.require(a.zeros.size() == 1, "one zero");
  if (a.zeros.size() == 1) {
    const auto& z = a.zeros[0];
    o.require(z.at_removable_end && z.m == 2 && z.index == -1, "degree 2 at infinity");
    // (1/4pi) log|1 - w^2| = -(1/4pi) Re w^2 + ...
    const double want = 1.0 / (4.0 * kPi);
    o.detail << "C=" << z.C << " oracle=" << want;
    o.require(std::abs(z.C - want) < 1e-5 * want, "leading coefficient");
  }
  o.require(claim_passes(a, "removable_balance"), "balance");
}

void sphere_non_morse(Outcome& o) {
  const auto& a = run("sphere_cube_roots");
  o.require(a.zeros.size() == 1, "one zero");
  if (a.zeros.size() == 1) {
    const auto& z = a.zeros[0];
    o.detail << "m=" << z.m << " index=" << z.index;
    o.require(z.at_removable_end && z.m == 3 && z.index == -2, "degree 3 at infinity");
    const double want = 1.0 / (6.0 * kPi);
    o.require(std::abs(z.C - want) < 1e-5 * want, "leading coefficient");
  }
  const int bound = a.model->topology().bound_conformal;
  o.detail << " bound=" << bound;
  o.require(bound == 2 && static_cast<int>(a.zeros.size()) < bound, "below bound");
  const Claim* c = claim(a, "morse_at_bound");
  o.require(c && c->number("morse") == 0.0, "Morse flag false");
  o.require(claim_passes(a, "index_sum"), "index sum");
}

void monotonicity(Outcome& o) {
  for (const auto& name : {"plane", "cylinder_g1", "cylinder_g2", "disk"}) {
    const auto& a = run(name);
    const Claim* c = claim(a, "sup_outside_balls");
    o.require(c && c->pass, std::string(name) + " sup outside balls");
    if (c) o.detail << name << ":" << c->number("worst_margin") << " ";
  }
  int trajectories = 0;
  for (const auto& name : kModels) {
    const auto& a = run(name);
    for (const auto& t : a.samples) {
      ++trajectories;
      o.require(strictly_monotone(t), name + " trajectory");
    }
    for (const auto* g : {&*a.compact, a.open ? &*a.open : nullptr}) {
      if (!g) continue;
      for (const auto& e : g->edges) {
        for (std::size_t i = 1; i < e.polyline.size(); ++i) {
          if (!(e.polyline[i].value < e.polyline[i - 1].value)) {
            o.require(false, name + " edge monotone");
            break;
          }
        }
      }
    }
    o.require(claim_passes(a, "chains_end_at_minima"), name + " chains");
  }
  o.detail << "trajectories=" << trajectories;
}

void basin(Outcome& o) {
  for (const auto& name : {"plane", "cylinder_g2", "torus"}) {
    const auto& a = run(name);
    double prev = -1.0;
    FlowOptions fo;
    fo.tol.step_tol = 1e-7;
    for (int n : {50, 100, 200}) {
      const auto b = n == 200 ? a.basin
                              : basin_sample(*a.model, n, a.config.grids.basin_t_max, a.zeros, a.config.seed,
                                             a.config.grids.basin_window, fo);
      o.require(b.n == n, "grid size");
      o.require(b.fraction >= prev, std::string(name) + " non-decreasing");
      prev = b.fraction;
    }
    o.detail << name << "=" << prev << " ";
    o.require(prev >= 0.99, std::string(name) + " full measure");
  }
}

// log-derivative of theta1 from the triple product
Complex theta1_log_derivative(Complex v, double q) {
  Complex s = std::cos(v) / std::sin(v);
  for (int n = 1; n < 200; ++n) {
    const double q2n = std::pow(q, 2.0 * n);
    if (q2n < 1e-300) break;
    s += 4.0 * q2n * std::sin(2.0 * v) / (1.0 - 2.0 * q2n * std::cos(2.0 * v) + q2n * q2n);
  }
  return s;
}

// fz = 2 dG/dz from independent closed forms
Complex fz_oracle(const std::string& name, const Analysis& a, Complex z) {
  const Complex y = a.config.pole.pos;
  if (name == "plane") return -1.0 / (kTwoPi * (z - y));
  if (name == "disk") return -(1.0 / (z - y) + std::conj(y) / (1.0 - std::conj(y) * z)) / kTwoPi;
  if (name.rfind("cylinder", 0) == 0) {
    const double dx = z.real() - y.real(), dt = z.imag() - y.imag();
    const double den = 4.0 * kPi * (std::cosh(dx) - std::cos(dt));
    Complex f{-std::sinh(dx) / den, std::sin(dt) / den};
    if (name == "cylinder_g2") f -= 1.0 / (4.0 * kPi);
    return f;
  }
  if (name == "torus") {
    const double q = std::exp(-kPi);
    auto kernel = [&](Complex d) {
      const Complex r{d.real() - kTwoPi * std::round(d.real() / kTwoPi), d.imag() - kTwoPi * std::round(d.imag() / kTwoPi)};
      return -theta1_log_derivative(r / 2.0, q) / (4.0 * kPi) - Complex{0, r.imag() / (kTwoPi * kTwoPi)};
    };
    return kernel(z - y) - kernel(z - Complex{0, kPi});
  }
  Complex f = 1.0 / (z - y);
  for (const auto& p : a.config.spec.punctures) {
    if (p.where.chart == 0 && p.weight != 0.0) f -= p.weight / (z - p.where.pos);
  }
  return -f / kTwoPi;
}

void harmonicity(Outcome& o) {
  double worst_lap = 0.0, worst_cr = 0.0, worst_fz = 0.0;
  for (const auto& name : kModels) {
    const auto& a = run(name);
    const Claim* c = claim(a, "laplacian_residual");
    o.require(c && c->pass && c->number("h") == 1e-3, name + " laplacian");
    if (c) worst_lap = std::max(worst_lap, c->number("max_abs"));

    for (Complex z : {Complex{0.55, 0.45}, Complex{-0.35, 0.6}, Complex{0.2, -0.7}}) {
      const auto s = a.model->evaluate(z);
      worst_cr = std::max({worst_cr, std::abs(s.grad[0] - s.fz.real()), std::abs(s.grad[1] + s.fz.imag())});
      const Complex want = fz_oracle(name, a, z);
      worst_fz = std::max(worst_fz, std::abs(s.fz - want) / std::abs(want));
    }

    for (const auto& z : a.zeros) {
      int m0 = -1;
      for (double r : {1e-3, 1e-2}) {
        Tolerances t;
        t.r_cls = r;
        const int m = classify_zero(*a.model, z.where, t).m;
        if (m0 < 0) m0 = m;
        o.require(m == m0, name + " winding across radii");
      }
    }
  }
  o.detail << "laplacian=" << worst_lap << " grad-fz=" << worst_cr << " fz-oracle=" << worst_fz;
  o.require(worst_cr <= 1e-12, "gradient identity");
  o.require(worst_fz <= 1e-12, "fz against closed forms");
}

void exhaustion(Outcome& o) {
  const auto t = torus_exhaustion(128);
  o.detail << "torus metrics=";
  for (double m : t.sequence.metrics) o.detail << m << ",";
  o.detail << " relative_error=" << t.relative_error;
  o.require(t.sequence.monotone, "monotone");
  o.require(t.relative_error <= 0.05, "relative error");
  const auto d = disk_refinement({16, 32, 64});
  double worst = INFINITY;
  for (double r : d.order) worst = std::min(worst, r);
  o.detail << " disk order=" << worst;
  o.require(worst >= 1.8, "refinement order");
}

}  // namespace

// With an argument N only criterion N runs.
int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"torus example zeros", torus_zeros},
      {"torus skeleton homology", torus_homology},
      {"index sum equals Euler characteristic", hopf_sum},
      {"zero-free models", zero_free},
      {"cylinder G1 zero", cylinder_g1},
      {"asymmetric sphere zero", sphere_asymmetric},
      {"symmetric sphere zero at infinity", sphere_symmetric},
      {"non-Morse sphere", sphere_non_morse},
      {"monotonicity and gradient-like invariants", monotonicity},
      {"basin full measure", basin},
      {"harmonicity and consistency", harmonicity},
      {"exhaustion convergence", exhaustion},
  };
  std::size_t first = 0, last = criteria.size();
  if (argc > 1) {
    first = std::stoul(argv[1]) - 1;
    last = first + 1;
    if (first >= criteria.size()) return 2;
  }
  int failed = 0;
  for (std::size_t i = first; i < last; ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " error: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2zu %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                o.detail.str().c_str());
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(last - first) - failed, last - first);
  return failed == 0 ? 0 : 1;
}
