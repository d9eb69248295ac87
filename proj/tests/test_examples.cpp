#include <doctest.h>

#include <algorithm>

#include "greenflow/cli.hpp"
#include "greenflow/theta.hpp"
#include "oracles.hpp"

using namespace greenflow;

namespace {

GreenModel torus_example() { return make_model(make_torus({{{0, {0, kPi}}, 1.0}}), Complex{0, 0}); }

SurfaceSpec sphere_two_thirds() {
  return make_sphere({{{0, {1, 0}}, 2.0 / 3.0}, {{0, {-1, 0}}, 1.0 / 3.0}, {infinity_point(), 0.0}});
}

int count(const std::string& s, const std::string& needle) {
  int n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("topology counts") {
  auto t = validate_spec(make_plane());
  CHECK(t.nu == 0);
  CHECK(t.lambda == 1);
  CHECK(t.lambda_prime == 1);
  CHECK(t.bound_topological == 0);
  CHECK(t.bound_conformal == 0);
  t = validate_spec(make_torus({{{0, {0, kPi}}, 1.0}}));
  CHECK(t.nu == 1);
  CHECK(t.lambda_prime == 1);
  CHECK(t.bound_conformal == 2);
  t = validate_spec(sphere_two_thirds());
  CHECK(t.lambda1 == 3);
  CHECK(t.lambda1_prime == 2);
  CHECK(t.bound_conformal == 1);
}

TEST_CASE("charts") {
  const auto s = make_sphere({{{0, {1, 0}}, 1.0}, {infinity_point(), 0.0}});
  CHECK(chart(s, Complex{2, 0}).chart == 0);
  const auto inf = chart(s, Complex{INFINITY, 0});
  CHECK(inf.chart == 1);
  CHECK(inf.point.pos == Complex{0, 0});
  const Complex w = wrap_periodic(make_torus({{{0, {0, kPi}}, 1.0}}), Complex{7, -1});
  CHECK(w.real() == doctest::Approx(7 - kTwoPi));
  CHECK(w.imag() == doctest::Approx(kTwoPi - 1));
}

TEST_CASE("closed-form values") {
  const auto g1 = make_model(make_cylinder(CylinderVariant::G1), Complex{0, 0});
  CHECK(g1.evaluate(Complex{0, kPi}).value == doctest::Approx(-std::log(2.0) / (4 * kPi)).epsilon(1e-14));
  for (double a : {0.5, 2.0, 7.0}) {
    CHECK(g1.evaluate(Complex{a, 1.0}).value == doctest::Approx(g1.evaluate(Complex{-a, 1.0}).value).epsilon(1e-14));
  }
  const auto plane = make_model(make_plane(), Complex{0, 0});
  CHECK(std::abs(plane.evaluate(std::polar(1.0, 0.3)).value) < 1e-15);
  const auto s = plane.evaluate(Complex{1, 0});
  CHECK(s.grad[0] == doctest::Approx(-1.0 / kTwoPi).epsilon(1e-14));
  CHECK(std::abs(s.grad[1]) < 1e-15);
  const auto disk = make_model(make_hyperbolic_disk(), Complex{0, 0});
  CHECK(std::abs(disk.evaluate(Complex{0.999999, 0}).value) < 1e-6);
}

TEST_CASE("sphere field is the partial-fraction form") {
  const auto m = make_model(sphere_two_thirds(), Complex{0, 0});
  for (Complex z : {Complex{0.5, 0.5}, Complex{-2, 1}, Complex{3, -0.2}}) {
    const Complex want = -(1.0 / kTwoPi) * (-z / 3.0 - 1.0) / (z * (z * z - 1.0));
    CHECK(std::abs(m.evaluate(z).fz - want) < 1e-14);
  }
  CHECK(std::abs(m.evaluate(Complex{-3, 0}).fz) < 1e-16);
}

TEST_CASE("Laplacian residual examples") {
  const auto plane = make_model(make_plane(), Complex{0, 0});
  CHECK(laplacian_residual(plane, Rect{1, 2, 1, 2}, 1e-3, 11).max_abs <= 1e-5);
  const TorusKernel k(kTwoPi, kTwoPi);
  const auto raw = laplacian_residual([&](Complex z) { return k(z).value; }, Rect{1, 2, 1, 2}, 1e-3, 11);
  CHECK(std::abs(raw.max - 1.0 / (4 * kPi * kPi)) <= 1e-5);
  CHECK(std::abs(raw.min - 1.0 / (4 * kPi * kPi)) <= 1e-5);
  CHECK(laplacian_residual(torus_example(), Rect{1, 2, 1, 2}, 1e-3, 11).max_abs <= 1e-5);
}

TEST_CASE("monotonicity examples") {
  const auto plane = make_model(make_plane(), Complex{0, 0});
  const auto p = monotonicity_check(plane, {0.5, 1.0}, 720, 10000, default_domain(plane), 1);
  CHECK(p.holds);
  for (const auto& r : p.radii) CHECK(r.margin >= 0.0);
  for (auto v : {CylinderVariant::G1, CylinderVariant::G2}) {
    const auto m = make_model(make_cylinder(v), Complex{0, 0});
    CHECK(monotonicity_check(m, {1, 2, 3}, 720, 10000, default_domain(m), 1).holds);
  }
}

TEST_CASE("separatrix angle examples") {
  CriticalPoint cp;
  cp.m = 2;
  const auto d = separatrix_directions(cp);
  REQUIRE(d.size() == 4);
  const double want[] = {kPi / 2, kPi, 3 * kPi / 2, 2 * kPi};
  for (int k = 0; k < 4; ++k) {
    CHECK(d[k].angle == doctest::Approx(want[k]));
    CHECK(d[k].stable == (k % 2 == 0));
  }
  cp.m = 3;
  const auto e = separatrix_directions(cp);
  CHECK(e.size() == 6);
  CHECK(std::count_if(e.begin(), e.end(), [](const SeparatrixDirection& s) { return s.stable; }) == 3);
}

TEST_CASE("torus saddle separatrices follow the coordinate axes") {
  const auto m = torus_example();
  const auto cp = classify_zero(m, {0, {kPi, 0}});
  for (const auto& d : separatrix_directions(cp)) {
    const double c = std::abs(std::cos(d.angle)), s = std::abs(std::sin(d.angle));
    if (d.stable) CHECK(c < 1e-6);
    else CHECK(s < 1e-6);
  }
}

TEST_CASE("flow terminal examples") {
  const auto plane = make_model(make_plane(), Complex{0, 0});
  CHECK(integrate_flow(plane, {0, {-3.0, 2.5}}, FlowDirection::Forward, {}, {}).terminal == Terminal::Pole);

  const Complex u0{0.0, 1.0};
  const auto g1 = make_model(make_cylinder(CylinderVariant::G1), u0);
  const auto zs = locate_all_zeros(g1, 24);
  const auto f = integrate_flow(g1, {0, {5.0, 1.0}}, FlowDirection::Forward, zs, {});
  CHECK((f.terminal == Terminal::Pole || f.terminal == Terminal::Zero));
  const auto b = integrate_flow(g1, {0, {5.0, 1.0}}, FlowDirection::Backward, zs, {});
  CHECK(b.terminal == Terminal::ParabolicEnd);
  CHECK(b.last.chart == 2);

  const auto t = torus_example();
  const auto tz = locate_all_zeros(t, 24);
  for (double x2 : {0.7, 2.0, 4.0, 5.5}) {
    const auto tr = integrate_flow(t, {0, {kPi, x2}}, FlowDirection::Forward, tz, {});
    REQUIRE(tr.terminal == Terminal::Zero);
    REQUIRE(tr.ref >= 0);
    const Complex z = tz[tr.ref].where.pos;
    CHECK(z.real() == doctest::Approx(kPi));
  }
}

TEST_CASE("pole node examples") {
  const auto plane = make_model(make_plane(), Complex{0, 0});
  auto r = pole_node_check(plane, 0.1, 64, {}, 1);
  CHECK(r.reached_pole == 64);
  CHECK(r.max_tangent_deviation < 1e-9);
  const auto t = torus_example();
  r = pole_node_check(t, 0.1, 64, locate_all_zeros(t, 24), 1);
  CHECK(r.reached_pole == 64);
  const auto disk = make_model(make_hyperbolic_disk(), Complex{0, 0});
  r = pole_node_check(disk, 0.1, 64, {}, 1);
  CHECK(r.max_tangent_deviation < 1e-9);
}

TEST_CASE("torus skeleton geometry") {
  const auto m = torus_example();
  const auto zs = locate_all_zeros(m, 32);
  const auto g = build_skeleton(m, zs, Variant::Compactified);
  REQUIRE(g.vertices.size() == 3);
  std::vector<Complex> at;
  for (const auto& v : g.vertices) at.push_back(v.where.pos);
  for (Complex w : {Complex{kPi, 0}, Complex{kPi, kPi}, Complex{0, kPi}}) {
    CHECK(std::any_of(at.begin(), at.end(), [&](Complex z) { return m.distance({0, z}, {0, w}) < 1e-6; }));
  }
  int connections = 0, to_end = 0;
  for (const auto& e : g.edges) {
    const auto& sink = g.vertices[e.sink];
    if (sink.kind == VertexKind::CriticalPoint) {
      ++connections;
      for (const auto& s : e.polyline) CHECK(std::abs(s.at.pos.real() - kPi) < 1e-6);
    } else {
      ++to_end;
      for (const auto& s : e.polyline) CHECK(std::abs(s.at.pos.imag() - kPi) < 1e-6);
    }
  }
  CHECK(connections == 2);
  CHECK(to_end == 2);
}

TEST_CASE("betti of trivial graphs") {
  SkeletonGraph empty;
  auto b = betti(empty);
  CHECK(b.beta0 == 0);
  CHECK(b.beta1 == 0);
  empty.vertices.resize(1);
  b = betti(empty);
  CHECK(b.beta0 == 1);
  CHECK(b.beta1 == 0);
}

TEST_CASE("basin examples") {
  const auto plane = make_model(make_plane(), Complex{0, 0});
  CHECK(basin_sample(plane, 200, 60.0, {}, 1).fraction == 1.0);
  const auto g2 = make_model(make_cylinder(CylinderVariant::G2), Complex{0, 0});
  CHECK(basin_sample(g2, 100, 60.0, {}, 1, Rect{-5, 5, 0, kTwoPi}).fraction >= 0.99);
}

TEST_CASE("mesh examples") {
  const auto t = build_mesh(MeshFamily::Torus, 64);
  CHECK(t.triangles.size() == 2u * 64 * 64);
  for (int k = 0; k < t.stiffness.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(t.stiffness, k); it; ++it) {
      if (it.row() != it.col()) CHECK(it.value() <= 1e-15);
    }
  }
  const auto d = build_mesh(MeshFamily::Disk, 32);
  CHECK(std::count(d.boundary.begin(), d.boundary.end(), 1) == 6 * 32);
}

TEST_CASE("disk discrete Green's function: symmetric, nonnegative, monotone") {
  const auto m = build_mesh(MeshFamily::Disk, 24);
  std::vector<char> mask(m.vertices.size());
  for (std::size_t v = 0; v < mask.size(); ++v) mask[v] = !m.boundary[v];
  const auto g = dirichlet_green(m, mask, 0);
  // vertices related by a rotation through 60 degrees carry equal values
  for (std::size_t v = 1; v < m.vertices.size(); v += 7) {
    const int u = m.nearest_vertex(m.vertices[v] * std::polar(1.0, kPi / 3));
    REQUIRE(std::abs(m.vertices[u] - m.vertices[v] * std::polar(1.0, kPi / 3)) < 1e-12);
    CHECK(std::abs(g[u] - g[v]) < 1e-8);
  }
  CHECK(*std::min_element(g.begin(), g.end()) >= 0.0);
  CHECK(discrete_monotonicity(m, g, mask, 0, {0.25, 0.5, 0.75}, 1e-10).holds);
}

TEST_CASE("disk exhaustion reaching the rim converges to the direct solve") {
  const auto m = build_mesh(MeshFamily::Disk, 24);
  const std::size_t nv = m.vertices.size();
  std::vector<std::vector<char>> domains;
  for (double r : {0.5, 0.75, 0.9, 2.0}) {
    std::vector<char> d(nv);
    for (std::size_t v = 0; v < nv; ++v) d[v] = !m.boundary[v] && std::abs(m.vertices[v]) < r;
    domains.push_back(d);
  }
  std::vector<char> k(nv);
  for (std::size_t v = 0; v < nv; ++v) k[v] = std::abs(m.vertices[v]) < 0.3;
  const int ref = m.nearest_vertex({0.2, 0.0});
  const auto seq = li_tam_sequence(m, domains, 0, ref, k, 1e-3);
  const auto direct = dirichlet_green(m, domains.back(), 0);
  for (std::size_t v = 0; v < nv; ++v) CHECK(seq.solutions.back()[v] == doctest::Approx(direct[v]).epsilon(1e-9));
  for (std::size_t j = 1; j < seq.shifts.size(); ++j) CHECK(seq.shifts[j] >= seq.shifts[j - 1]);
  for (std::size_t j = 2; j < seq.metrics.size(); ++j) CHECK(seq.metrics[j] < seq.metrics[j - 1]);
}

TEST_CASE("torus exhaustion limit is monotone outside two rings") {
  const auto r = torus_exhaustion(64);
  const Mesh m = build_mesh(MeshFamily::Torus, 64);
  const auto lim = r.sequence.limit();
  const auto mono = discrete_monotonicity(m, lim, r.sequence.domains.back(), r.sequence.pole, {0.5, 1.0}, 1e-6);
  CHECK(mono.holds);
}

TEST_CASE("CLI artifacts: torus SVG counts, plane SVG, deterministic bytes") {
  const char* torus = R"({"schema_version": 1, "surface": {"family": "torus", "punctures": [[0, "pi", 1]],
      "pole": [0, 0]}, "grids": {"basin_grid": 20}, "seed": 9})";
  const auto a = analyze(parse_config(torus));
  const auto svg = skeleton_svg(a);
  CHECK(count(svg, "class=\"edge\"") == 4);
  CHECK(count(svg, "class=\"vertex\"") == 3);
  const auto b = analyze(parse_config(torus), Exec::Serial);
  CHECK(report_json(a) == report_json(b));
  CHECK(skeleton_svg(b) == svg);
  CHECK(basin_pgm(a.basin) == basin_pgm(b.basin));

  const auto p = analyze(parse_config(R"({"schema_version": 1, "surface": {"family": "plane", "pole": [0, 0]},
      "grids": {"basin_grid": 20}})"));
  const auto psvg = skeleton_svg(p);
  CHECK(count(psvg, "class=\"pole\"") == 1);
  CHECK(count(psvg, "class=\"edge\"") == 0);
  CHECK(count(psvg, "class=\"vertex\"") == 0);
}
