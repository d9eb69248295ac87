#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "greenflow/common.hpp"
#include "greenflow/surfaces.hpp"

namespace greenflow {

// Value of the Green's function in a chart together with its gradient and the
// Wirtinger derivative fz = 2 dG/dz.  grad == (Re fz, -Im fz).
struct GreenSample {
  double value = 0.0;
  std::array<double, 2> grad{};
  Complex fz{};
  bool singular = false;
};

enum class SingularKind { Pole, NonremovableEnd, HyperbolicBoundary };

struct SingularPoint {
  ChartPoint where;
  SingularKind kind;
  double radius = 0.0;  // nonzero for a boundary circle
  int end_index = -1;   // index into spec.punctures / spec.hyperbolic_ends
};

namespace detail {
class Kernel;
}

// Closed-form Green's function of a built-in surface with a fixed pole.
// Immutable and cheap to copy; evaluation is pure and thread-safe.
class GreenModel {
 public:
  const SurfaceSpec& spec() const { return spec_; }
  const TopologyInfo& topology() const { return topo_; }
  ChartPoint pole() const { return pole_; }
  int chart_count() const;

  // Finite evaluation away from singular points; a singular input yields
  // value +-inf and singular == true.
  GreenSample sample(ChartPoint x) const;
  // Same, but throws SingularPoint instead of returning a flagged sample.
  GreenSample evaluate(ChartPoint x) const;
  GreenSample evaluate(Complex primary) const { return evaluate(ChartPoint{0, primary}); }

  // Pole, non-removable ends and hyperbolic boundary circles.
  const std::vector<SingularPoint>& singular_points() const { return singular_; }

  // Singularities of fz (pole and non-removable ends) in `chart`, including
  // periodic images that fall within `margin` of `window`.
  std::vector<Complex> field_singularities(int chart, const Rect& window, double margin) const;

  // Expresses `x` in chart `target` if possible.
  std::optional<ChartPoint> transfer(ChartPoint x, int target) const;

  // Moves a point to the chart it is best described in (with hysteresis) and
  // reduces periodic coordinates.
  ChartPoint rechart(ChartPoint x) const;
  ChartPoint wrap(ChartPoint x) const;

  // Chart-metric distance; b is transferred into a's chart and periodic
  // coordinates use the minimum image.  +inf when b is not visible in a's chart.
  double distance(ChartPoint a, ChartPoint b) const;

  // Difference b - a in a's chart coordinates (minimum image).
  Complex displacement(ChartPoint a, ChartPoint b) const;

  // Primary-chart coordinates (non-finite for points at infinity).
  Complex to_primary(ChartPoint x) const;

  bool in_domain(ChartPoint x) const;

 private:
  friend GreenModel make_model(const SurfaceSpec&, ChartPoint);
  GreenModel() = default;

  SurfaceSpec spec_;
  TopologyInfo topo_;
  ChartPoint pole_;
  std::shared_ptr<const detail::Kernel> kernel_;
  std::vector<SingularPoint> singular_;
};

// Builds the closed-form model for `spec` with pole at `pole`.  Throws the
// validate_spec errors, PoleCollision, OutOfDomain, or FamilyMismatch for the
// Mesh family (discrete surfaces live in the exhaustion module).
GreenModel make_model(const SurfaceSpec& spec, ChartPoint pole);
inline GreenModel make_model(const SurfaceSpec& spec, Complex pole) {
  return make_model(spec, ChartPoint{0, pole});
}

// ---- self-consistency checks ----------------------------------------------

struct LaplacianResidual {
  double max_abs = 0.0;
  double min = 0.0;
  double max = 0.0;
  int points = 0;
};

// Five-point Laplacian with step h on an n x n grid over `window` (primary
// chart).  Throws WindowTouchesSingularity if the window comes within 10h of
// a singular point.
LaplacianResidual laplacian_residual(const GreenModel& model, const Rect& window, double h,
                                     int n = 21, Exec exec = Exec::Parallel);

// Same stencil on an arbitrary scalar function (used on the raw torus kernel).
LaplacianResidual laplacian_residual(const std::function<double(Complex)>& f, const Rect& window,
                                     double h, int n = 21, Exec exec = Exec::Parallel);

struct MonotonicityRadius {
  double radius = 0.0;
  double circle_max = 0.0;
  double exterior_sup = 0.0;
  double margin = 0.0;  // circle_max - exterior_sup
  int exterior_samples = 0;
};

struct MonotonicityReport {
  std::vector<MonotonicityRadius> radii;
  double worst_margin = 0.0;
  double tolerance = 0.0;
  bool holds = true;
};

// Compares the maximum over the chart circle of radius r around the pole with
// the supremum over random exterior samples drawn from `domain`.
MonotonicityReport monotonicity_check(const GreenModel& model, const std::vector<double>& radii,
                                      int n_angles, int n_exterior, const Rect& domain,
                                      std::uint64_t seed, double tol = 1e-6,
                                      Exec exec = Exec::Parallel);

// Default primary-chart sampling domain around the pole for each family.
Rect default_domain(const GreenModel& model);

}  // namespace greenflow
