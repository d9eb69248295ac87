#include <doctest.h>

#include "greenflow/dynamics.hpp"
#include "greenflow/surfaces.hpp"

using namespace greenflow;

TEST_CASE("forward flow on the plane reaches the pole with increasing G") {
  const auto m = make_model(make_plane(), Complex{0, 0});
  const auto tr = integrate_flow(m, {0, {2.0, 1.0}}, FlowDirection::Forward, {}, {});
  CHECK(tr.terminal == Terminal::Pole);
  CHECK(strictly_monotone(tr));
  CHECK(tr.samples.front().value < tr.samples.back().value);
}

TEST_CASE("backward flow on the disk reaches the boundary") {
  const auto m = make_model(make_hyperbolic_disk(), Complex{0.3, 0});
  const auto tr = integrate_flow(m, {0, {0.1, 0.2}}, FlowDirection::Backward, {}, {});
  CHECK(tr.terminal == Terminal::HyperbolicBoundary);
  CHECK(strictly_monotone(tr));
}

TEST_CASE("backward flow on the torus ends at the puncture") {
  const auto m = make_model(make_torus({{{0, {0, kPi}}, 1.0}}), Complex{0, 0});
  const auto zs = locate_all_zeros(m, 24);
  const auto tr = integrate_flow(m, {0, {0.5, 2.5}}, FlowDirection::Backward, zs, {});
  CHECK(tr.terminal == Terminal::ParabolicEnd);
  CHECK(tr.ref == 0);
}

TEST_CASE("stable separatrix of a torus saddle runs backwards into the puncture") {
  const auto m = make_model(make_torus({{{0, {0, kPi}}, 1.0}}), Complex{0, 0});
  const auto zs = locate_all_zeros(m, 24);
  for (const auto& z : zs) {
    for (const auto& d : separatrix_directions(z)) {
      if (!d.stable) continue;
      FlowOptions o;
      const ChartPoint x0{0, z.where.pos + std::polar(o.tol.eps_sep, d.angle)};
      const auto tr = integrate_flow(m, x0, FlowDirection::Backward, zs, o);
      CHECK(strictly_monotone(tr));
      const bool ends_well = tr.terminal == Terminal::ParabolicEnd || (tr.terminal == Terminal::Zero && tr.ref >= 0);
      CHECK(ends_well);
    }
  }
}

TEST_CASE("seeding on a singular point throws") {
  const auto m = make_model(make_plane(), Complex{0, 0});
  CHECK_THROWS_AS(integrate_flow(m, {0, {0, 0}}, FlowDirection::Forward, {}, {}), Error);
}

TEST_CASE("flow escapes a window") {
  const auto m = make_model(make_plane(), Complex{0, 0});
  FlowOptions o;
  o.window = Rect{-3, 3, -3, 3};
  const auto tr = integrate_flow(m, {0, {2.0, 0.0}}, FlowDirection::Backward, {}, o);
  CHECK(tr.terminal == Terminal::Escape);
}

TEST_CASE("the pole is a stable node") {
  const auto m = make_model(make_cylinder(CylinderVariant::G1), Complex{0, 0});
  const auto zs = locate_all_zeros(m, 24);
  const auto a = pole_node_check(m, 0.1, 32, zs, 3, {}, Exec::Serial);
  const auto b = pole_node_check(m, 0.1, 32, zs, 3, {}, Exec::Parallel);
  CHECK(a.holds);
  CHECK(a.reached_pole == 32);
  CHECK(a.max_tangent_deviation == b.max_tangent_deviation);
}
