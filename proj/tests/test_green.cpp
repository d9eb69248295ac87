#include <doctest.h>

#include "greenflow/green.hpp"
#include "greenflow/surfaces.hpp"
#include "oracles.hpp"

using namespace greenflow;

namespace {

SurfaceSpec sphere_two_thirds() {
  return make_sphere({{{0, {1, 0}}, 2.0 / 3.0}, {{0, {-1, 0}}, 1.0 / 3.0}, {infinity_point(), 0.0}});
}

}  // namespace

TEST_CASE("sphere values match the logarithmic potential up to a constant") {
  const auto m = make_model(sphere_two_thirds(), Complex{0, 0});
  const std::vector<Complex> p{{1, 0}, {-1, 0}};
  const std::vector<double> c{2.0 / 3.0, 1.0 / 3.0};
  const Complex a{0.4, 0.9}, b{-2.2, -0.7}, d{3.1, 1.5};
  const double shift = m.evaluate(a).value - oracle::sphere_green(a, {}, p, c);
  CHECK(m.evaluate(b).value - shift == doctest::Approx(oracle::sphere_green(b, {}, p, c)).epsilon(1e-13));
  CHECK(m.evaluate(d).value - shift == doctest::Approx(oracle::sphere_green(d, {}, p, c)).epsilon(1e-13));
}

TEST_CASE("sphere charts agree on their overlap") {
  const auto m = make_model(sphere_two_thirds(), Complex{0.2, 0.1});
  for (Complex z : {Complex{2.5, 1.0}, Complex{-1.7, -2.9}}) {
    const auto s0 = m.sample({0, z});
    const auto s1 = m.sample({1, 1.0 / z});
    CHECK(s0.value == doctest::Approx(s1.value).epsilon(1e-12));
    // fz transforms as a (1,0)-form: fz_w = fz_z dz/dw = -fz_z / w^2
    const Complex w = 1.0 / z;
    CHECK(std::abs(s1.fz - (-s0.fz / (w * w))) < 1e-12 * std::abs(s1.fz));
  }
}

TEST_CASE("cylinder G1 and G2 equal the closed forms") {
  const Complex u0{0.3, 1.0};
  const auto g1 = make_model(make_cylinder(CylinderVariant::G1), u0);
  const auto g2 = make_model(make_cylinder(CylinderVariant::G2), u0);
  for (Complex u : {Complex{0.9, 2.0}, Complex{-4.0, 5.5}, Complex{7.5, 0.2}, Complex{-25.0, 3.0}, Complex{30.0, 1.0}}) {
    CHECK(g1.evaluate(u).value == doctest::Approx(oracle::cylinder_g1(u, u0)).epsilon(1e-12));
    CHECK(g2.evaluate(u).value == doctest::Approx(oracle::cylinder_g2(u, u0)).epsilon(1e-12));
  }
}

TEST_CASE("cylinder end charts agree with the periodic chart") {
  const Complex u0{0.3, 1.0};
  for (auto variant : {CylinderVariant::G1, CylinderVariant::G2}) {
    const auto m = make_model(make_cylinder(variant), u0);
    for (Complex u : {Complex{-6.0, 0.4}, Complex{-11.0, 2.0}, Complex{6.0, 4.0}, Complex{12.0, 5.0}}) {
      const auto s0 = m.sample({0, u});
      const Complex zm = std::exp(u), zp = std::exp(-u);
      const auto s1 = m.sample({1, zm});
      const auto s2 = m.sample({2, zp});
      CHECK(s1.value == doctest::Approx(s0.value).epsilon(1e-11));
      CHECK(s2.value == doctest::Approx(s0.value).epsilon(1e-11));
      CHECK(std::abs(s1.fz - s0.fz / zm) < 1e-9 * std::abs(s1.fz));
      CHECK(std::abs(s2.fz + s0.fz / zp) < 1e-9 * std::abs(s2.fz));
    }
  }
}

TEST_CASE("disk kernel equals the Moebius closed form and vanishes on the rim") {
  const Complex y{0.3, 0.0};
  const auto m = make_model(make_hyperbolic_disk(), y);
  for (Complex z : {Complex{0.1, 0.5}, Complex{-0.7, -0.2}, Complex{0.9, 0.0}}) {
    CHECK(m.evaluate(z).value == doctest::Approx(oracle::disk_green(z, y)).epsilon(1e-13));
  }
  CHECK(std::abs(m.evaluate(std::polar(1.0 - 1e-12, 2.0)).value) < 1e-11);
}

TEST_CASE("torus model combines translated kernels") {
  const auto m = make_model(make_torus({{{0, {0, kPi}}, 1.0}}), Complex{0, 0});
  for (Complex z : {Complex{1.0, 1.0}, Complex{3.0, 5.0}, Complex{5.5, 2.0}}) {
    const double want = oracle::torus_green(z, kTwoPi, kTwoPi) - oracle::torus_green(z - Complex{0, kPi}, kTwoPi, kTwoPi);
    CHECK(m.evaluate(z).value == doctest::Approx(want).epsilon(1e-11));
  }
}

TEST_CASE("gradient is (Re fz, -Im fz) and matches finite differences to O(h^2)") {
  std::vector<GreenModel> models{
      make_model(sphere_two_thirds(), Complex{0, 0}),
      make_model(make_cylinder(CylinderVariant::G1), Complex{0.3, 1.0}),
      make_model(make_torus({{{0, {0, kPi}}, 1.0}}), Complex{0, 0}),
      make_model(make_hyperbolic_disk(), Complex{0.3, 0}),
  };
  const Complex z{0.55, 0.45};
  for (const auto& m : models) {
    const auto s = m.evaluate(z);
    CHECK(s.grad[0] == doctest::Approx(s.fz.real()).epsilon(1e-15));
    CHECK(s.grad[1] == doctest::Approx(-s.fz.imag()).epsilon(1e-15));
    auto g = [&](Complex w) { return m.evaluate(w).value; };
    const auto [ax, ay] = oracle::fd_grad(g, z, 1e-2);
    const auto [bx, by] = oracle::fd_grad(g, z, 5e-3);
    const double ea = std::hypot(ax - s.grad[0], ay - s.grad[1]);
    const double eb = std::hypot(bx - s.grad[0], by - s.grad[1]);
    // halving h divides the error by about four
    CHECK(ea / eb == doctest::Approx(4.0).epsilon(0.05));
  }
}

TEST_CASE("Laplacian residual is small and serial equals parallel") {
  const auto m = make_model(make_torus({{{0, {0, kPi}}, 1.0}}), Complex{0, 0});
  const Rect w{2.0, 2.5, 1.0, 1.5};
  const auto a = laplacian_residual(m, w, 1e-3, 15, Exec::Serial);
  const auto b = laplacian_residual(m, w, 1e-3, 15, Exec::Parallel);
  CHECK(a.max_abs < 1e-5);
  CHECK(a.max_abs == b.max_abs);
  CHECK(a.min == b.min);
  CHECK(a.points == b.points);
  CHECK_THROWS_WITH_AS(laplacian_residual(m, Rect{-0.1, 0.1, -0.1, 0.1}, 1e-3, 5),
                       doctest::Contains("WindowTouchesSingularity"), Error);
}

TEST_CASE("singular inputs are flagged or rejected") {
  const auto m = make_model(make_plane(), Complex{0, 0});
  CHECK(m.sample({0, {0, 0}}).singular);
  CHECK_THROWS_AS(m.evaluate(Complex{0, 0}), Error);
}

TEST_CASE("model construction errors") {
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  CHECK(code([] { make_model(make_sphere({{{0, {1, 0}}, 0.5}, {{0, {-1, 0}}, 0.4}}), Complex{0, 0}); }) ==
        ErrorCode::WeightSumError);
  CHECK(code([] { make_model(make_sphere({{{0, {1, 0}}, 1.0}}), Complex{1, 0}); }) == ErrorCode::PoleCollision);
  CHECK(code([] { make_model(make_hyperbolic_disk(), Complex{1.5, 0}); }) == ErrorCode::OutOfDomain);
  SurfaceSpec mesh;
  mesh.family = Family::Mesh;
  CHECK(code([&] { make_model(mesh, Complex{0, 0}); }) == ErrorCode::FamilyMismatch);
}

TEST_CASE("Green's function is largest near the pole on the plane, cylinder and disk") {
  std::vector<GreenModel> models{
      make_model(make_plane(), Complex{0, 0}),
      make_model(make_cylinder(CylinderVariant::G2), Complex{0, 0}),
      make_model(make_hyperbolic_disk(), Complex{0.3, 0}),
  };
  for (const auto& m : models) {
    const auto r = monotonicity_check(m, {0.2, 0.5}, 360, 2000, default_domain(m), 11, 1e-6, Exec::Serial);
    CHECK(r.holds);
    const auto p = monotonicity_check(m, {0.2, 0.5}, 360, 2000, default_domain(m), 11, 1e-6, Exec::Parallel);
    CHECK(p.worst_margin == r.worst_margin);
  }
}
