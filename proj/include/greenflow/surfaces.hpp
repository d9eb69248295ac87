#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "greenflow/common.hpp"

namespace greenflow {

enum class Family { Plane, Cylinder, PuncturedSphere, PuncturedTorus, HyperbolicDisk, Mesh };

std::string_view to_string(Family f);
std::optional<Family> family_from_string(std::string_view name);

// G1 tends to -inf at both ends; G2 has a removable end at z -> -inf.
enum class CylinderVariant { G1, G2 };

// A parabolic end: a deleted point of the compact model surface.  Weight 0
// encodes a removable singularity of the Green's function.
struct Puncture {
  ChartPoint where;
  double weight = 0.0;

  bool removable() const { return weight == 0.0; }
};

// Boundary circle of a deleted disk (in the primary chart).
struct HyperbolicEnd {
  Complex center{};
  double radius = 1.0;
};

// A surface declared in uniformized form.  Chart conventions per family:
//   Plane, PuncturedSphere: chart 0 = z, chart 1 = w = 1/z.
//   Cylinder: chart 0 = u = z + i*theta (theta 2pi-periodic),
//             chart 1 = e^{u} (end z -> -inf), chart 2 = e^{-u} (end z -> +inf).
//   PuncturedTorus: chart 0 only, periods lattice_x by lattice_y.
//   HyperbolicDisk: chart 0 only, unit disk.
struct SurfaceSpec {
  Family family = Family::Plane;
  int genus = 0;
  std::vector<Puncture> punctures;
  std::vector<HyperbolicEnd> hyperbolic_ends;
  double lattice_x = kTwoPi;
  double lattice_y = kTwoPi;
  CylinderVariant cylinder_variant = CylinderVariant::G1;
};

struct TopologyInfo {
  int nu = 0;
  int lambda1 = 0;
  int lambda1_prime = 0;
  int lambda2 = 0;
  int lambda_prime = 0;
  int lambda = 0;
  int euler_char = 2;
  int bound_topological = 0;
  int bound_conformal = 0;
};

inline constexpr double kWeightSumTol = 1e-12;

// Derives the topological and conformal counts; throws WeightSumError or
// FamilyMismatch on specs that violate the family invariants.
TopologyInfo validate_spec(const SurfaceSpec& spec);

// Builders for the built-in families.
SurfaceSpec make_plane();
SurfaceSpec make_cylinder(CylinderVariant variant);
SurfaceSpec make_sphere(std::vector<Puncture> punctures);
SurfaceSpec make_torus(std::vector<Puncture> punctures, double lx = kTwoPi, double ly = kTwoPi);
SurfaceSpec make_hyperbolic_disk();

inline ChartPoint infinity_point() { return ChartPoint{1, Complex{0.0, 0.0}}; }

struct ChartDescriptor {
  int chart = 0;
  std::string name;
  std::string map;  // coordinate map, human readable
  ChartPoint point;  // the input expressed in this chart
  double conformal_factor = 1.0;  // reference metric = factor * |dz|^2
};

// Chooses the chart that describes `point` (a primary-chart position; a
// non-finite value means the point at infinity).  Wraps periodic coordinates.
ChartDescriptor chart(const SurfaceSpec& spec, Complex point);

// Same, for a point already given in some chart.
ChartDescriptor chart(const SurfaceSpec& spec, ChartPoint point);

// Reduces periodic coordinates of the primary chart into the fundamental cell.
Complex wrap_periodic(const SurfaceSpec& spec, Complex z);

}  // namespace greenflow
