#include "greenflow/surfaces.hpp"

#include <cmath>

namespace greenflow {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::WeightSumError: return "WeightSumError";
    case ErrorCode::FamilyMismatch: return "FamilyMismatch";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::PoleCollision: return "PoleCollision";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::WindowTouchesSingularity: return "WindowTouchesSingularity";
    case ErrorCode::WindingAmbiguous: return "WindingAmbiguous";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::DegenerateCircle: return "DegenerateCircle";
    case ErrorCode::StepCollapse: return "StepCollapse";
    case ErrorCode::UnresolvedTerminal: return "UnresolvedTerminal";
    case ErrorCode::IncompleteGraph: return "IncompleteGraph";
    case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::SolverStall: return "SolverStall";
    case ErrorCode::NotNested: return "NotNested";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::Plane: return "plane";
    case Family::Cylinder: return "cylinder";
    case Family::PuncturedSphere: return "sphere";
    case Family::PuncturedTorus: return "torus";
    case Family::HyperbolicDisk: return "hyperbolic_disk";
    case Family::Mesh: return "mesh";
  }
  return "unknown";
}

std::optional<Family> family_from_string(std::string_view name) {
  for (auto f : {Family::Plane, Family::Cylinder, Family::PuncturedSphere, Family::PuncturedTorus,
                 Family::HyperbolicDisk, Family::Mesh}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

namespace {

[[noreturn]] void mismatch(const SurfaceSpec& spec, const std::string& why) {
  throw Error(ErrorCode::FamilyMismatch, std::string(to_string(spec.family)) + ": " + why);
}

bool is_end_chart_point(const SurfaceSpec& spec, const ChartPoint& p) {
  switch (spec.family) {
    case Family::Plane:
    case Family::PuncturedSphere: return p.chart == 1 && p.pos == Complex{};
    case Family::Cylinder: return (p.chart == 1 || p.chart == 2) && p.pos == Complex{};
    default: return false;
  }
}

}  // namespace

TopologyInfo validate_spec(const SurfaceSpec& spec) {
  TopologyInfo t;
  t.nu = spec.genus;
  t.lambda1 = static_cast<int>(spec.punctures.size());
  t.lambda2 = static_cast<int>(spec.hyperbolic_ends.size());

  if (spec.genus < 0) mismatch(spec, "negative genus");

  double sum = 0.0;
  for (const auto& p : spec.punctures) {
    if (!(p.weight >= 0.0 && p.weight <= 1.0)) {
      throw Error(ErrorCode::WeightSumError, "puncture weight outside [0,1]");
    }
    if (!std::isfinite(p.where.pos.real()) || !std::isfinite(p.where.pos.imag())) {
      throw Error(ErrorCode::OutOfDomain, "puncture position is not finite");
    }
    sum += p.weight;
    if (p.weight > 0.0) ++t.lambda1_prime;
  }

  switch (spec.family) {
    case Family::Plane:
      if (spec.genus != 0) mismatch(spec, "genus must be 0");
      if (t.lambda1 != 1 || t.lambda2 != 0) mismatch(spec, "exactly one parabolic end required");
      if (!is_end_chart_point(spec, spec.punctures[0].where)) {
        mismatch(spec, "the end must sit at infinity");
      }
      break;
    case Family::Cylinder:
      if (spec.genus != 0) mismatch(spec, "genus must be 0");
      if (t.lambda1 != 2 || t.lambda2 != 0) mismatch(spec, "exactly two parabolic ends required");
      for (const auto& p : spec.punctures) {
        if (!is_end_chart_point(spec, p.where)) mismatch(spec, "ends must be the two cylinder ends");
      }
      if (spec.punctures[0].where.chart == spec.punctures[1].where.chart) {
        mismatch(spec, "both ends declared at the same side");
      }
      break;
    case Family::PuncturedSphere:
      if (spec.genus != 0) mismatch(spec, "genus must be 0");
      if (t.lambda1 < 1 || t.lambda2 != 0) mismatch(spec, "needs lambda1 >= 1 and no hyperbolic ends");
      for (const auto& p : spec.punctures) {
        if (p.where.chart == 1 && !is_end_chart_point(spec, p.where)) {
          mismatch(spec, "secondary-chart punctures other than infinity must be given in chart 0");
        }
        if (p.where.chart != 0 && p.where.chart != 1) mismatch(spec, "unknown chart");
      }
      break;
    case Family::PuncturedTorus:
      if (spec.genus != 1) mismatch(spec, "genus must be 1");
      if (t.lambda1 < 1 || t.lambda2 != 0) mismatch(spec, "needs lambda1 >= 1 and no hyperbolic ends");
      if (!(spec.lattice_x > 0.0 && spec.lattice_y > 0.0)) mismatch(spec, "lattice periods must be positive");
      for (const auto& p : spec.punctures) {
        if (p.where.chart != 0) mismatch(spec, "torus has a single chart");
      }
      break;
    case Family::HyperbolicDisk:
      if (spec.genus != 0) mismatch(spec, "genus must be 0");
      if (t.lambda1 != 0 || t.lambda2 != 1) mismatch(spec, "needs lambda1 = 0 and lambda2 = 1");
      break;
    case Family::Mesh:
      break;
  }

  if (t.lambda2 == 0) {
    if (std::abs(sum - 1.0) > kWeightSumTol) {
      throw Error(ErrorCode::WeightSumError,
                  "puncture weights sum to " + std::to_string(sum) + ", expected 1");
    }
  } else if (t.lambda1_prime > 0) {
    throw Error(ErrorCode::WeightSumError,
                "surfaces with hyperbolic ends only admit removable parabolic ends (weight 0)");
  }

  // Distinct puncture locations.
  for (std::size_t i = 0; i < spec.punctures.size(); ++i) {
    for (std::size_t j = i + 1; j < spec.punctures.size(); ++j) {
      const auto& a = spec.punctures[i].where;
      const auto& b = spec.punctures[j].where;
      if (a.chart == b.chart &&
          wrap_periodic(spec, a.pos - b.pos) == Complex{} && a.chart == 0) {
        mismatch(spec, "duplicate puncture");
      }
      if (a.chart == b.chart && a.chart != 0 && a.pos == b.pos) mismatch(spec, "duplicate puncture");
    }
  }

  t.lambda = t.lambda1 + t.lambda2;
  t.lambda_prime = t.lambda2 == 0 ? t.lambda1_prime : t.lambda2;
  t.euler_char = 2 - 2 * t.nu;
  t.bound_topological = 2 * t.nu + t.lambda - 1;
  t.bound_conformal = 2 * t.nu + t.lambda_prime - 1;
  return t;
}

SurfaceSpec make_plane() {
  SurfaceSpec s;
  s.family = Family::Plane;
  s.punctures = {Puncture{infinity_point(), 1.0}};
  return s;
}

SurfaceSpec make_cylinder(CylinderVariant variant) {
  SurfaceSpec s;
  s.family = Family::Cylinder;
  s.cylinder_variant = variant;
  const double minus = variant == CylinderVariant::G1 ? 0.5 : 0.0;
  s.punctures = {Puncture{ChartPoint{1, {}}, minus}, Puncture{ChartPoint{2, {}}, 1.0 - minus}};
  return s;
}

SurfaceSpec make_sphere(std::vector<Puncture> punctures) {
  SurfaceSpec s;
  s.family = Family::PuncturedSphere;
  s.punctures = std::move(punctures);
  return s;
}

SurfaceSpec make_torus(std::vector<Puncture> punctures, double lx, double ly) {
  SurfaceSpec s;
  s.family = Family::PuncturedTorus;
  s.genus = 1;
  s.lattice_x = lx;
  s.lattice_y = ly;
  s.punctures = std::move(punctures);
  return s;
}

SurfaceSpec make_hyperbolic_disk() {
  SurfaceSpec s;
  s.family = Family::HyperbolicDisk;
  s.hyperbolic_ends = {HyperbolicEnd{{0.0, 0.0}, 1.0}};
  return s;
}

namespace {

double wrap_coord(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0) r += period;
  if (r >= period) r -= period;
  return r;
}

}  // namespace

Complex wrap_periodic(const SurfaceSpec& spec, Complex z) {
  switch (spec.family) {
    case Family::PuncturedTorus:
      return {wrap_coord(z.real(), spec.lattice_x), wrap_coord(z.imag(), spec.lattice_y)};
    case Family::Cylinder:
      return {z.real(), wrap_coord(z.imag(), kTwoPi)};
    default:
      return z;
  }
}

ChartDescriptor chart(const SurfaceSpec& spec, ChartPoint point) {
  ChartDescriptor d;
  d.chart = point.chart;
  d.point = point;
  const Complex z = point.pos;
  switch (spec.family) {
    case Family::Plane:
    case Family::PuncturedSphere: {
      const bool plane = spec.family == Family::Plane;
      if (point.chart == 0) {
        d.name = "stereographic";
        d.map = "z";
        d.conformal_factor = plane ? 1.0 : 4.0 / std::pow(1.0 + std::norm(z), 2);
      } else if (point.chart == 1) {
        d.name = "stereographic-inverse";
        d.map = "w = 1/z";
        d.conformal_factor = plane ? (z == Complex{} ? INFINITY : 1.0 / std::pow(std::norm(z), 2))
                                   : 4.0 / std::pow(1.0 + std::norm(z), 2);
      } else {
        throw Error(ErrorCode::OutOfDomain, "unknown chart");
      }
      break;
    }
    case Family::Cylinder:
      if (point.chart == 0) {
        d.name = "cylinder";
        d.map = "u = z + i theta";
        d.point.pos = wrap_periodic(spec, z);
        d.conformal_factor = 1.0;
      } else if (point.chart == 1 || point.chart == 2) {
        d.name = point.chart == 1 ? "end-minus" : "end-plus";
        d.map = point.chart == 1 ? "zeta = exp(u)" : "zeta = exp(-u)";
        d.conformal_factor = z == Complex{} ? INFINITY : 1.0 / std::norm(z);
      } else {
        throw Error(ErrorCode::OutOfDomain, "unknown chart");
      }
      break;
    case Family::PuncturedTorus:
      if (point.chart != 0) throw Error(ErrorCode::OutOfDomain, "torus has a single chart");
      d.name = "flat-torus";
      d.map = "x1 + i x2 mod lattice";
      d.point.pos = wrap_periodic(spec, z);
      d.conformal_factor = 1.0;
      break;
    case Family::HyperbolicDisk:
      if (point.chart != 0) throw Error(ErrorCode::OutOfDomain, "disk has a single chart");
      if (!(std::abs(z) < 1.0)) throw Error(ErrorCode::OutOfDomain, "point outside the unit disk");
      d.name = "poincare-disk";
      d.map = "z";
      d.conformal_factor = 4.0 / std::pow(1.0 - std::norm(z), 2);
      break;
    case Family::Mesh:
      d.name = "mesh";
      d.map = "x1 + i x2";
      break;
  }
  return d;
}

ChartDescriptor chart(const SurfaceSpec& spec, Complex point) {
  const bool finite = std::isfinite(point.real()) && std::isfinite(point.imag());
  switch (spec.family) {
    case Family::Plane:
    case Family::PuncturedSphere:
      if (!finite) return chart(spec, infinity_point());
      if (std::abs(point) > 4.0) return chart(spec, ChartPoint{1, 1.0 / point});
      return chart(spec, ChartPoint{0, point});
    default:
      if (!finite) throw Error(ErrorCode::OutOfDomain, "point at infinity is not on this surface");
      return chart(spec, ChartPoint{0, point});
  }
}

}  // namespace greenflow
