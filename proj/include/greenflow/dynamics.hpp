#pragma once

#include <optional>
#include <vector>

#include "greenflow/common.hpp"
#include "greenflow/green.hpp"

namespace greenflow {

struct Tolerances {
  double newton_tol = 1e-10;
  double r_cls = 1e-3;
  double zero_capture = 1e-6;
  double g_floor = -20.0 / kTwoPi;
  double eps_bdry = 1e-4;
  double delta_bdry = 1e-2;
  double r_pole = 1e-3;
  double r_end = 1e-8;
  double r_excl = 1e-2;
  double eps_sep = 1e-4;
  double delta_match = 1e-5;
  double kappa = 1e-9;
  double step_tol = 1e-9;
  double max_step = 0.25;
  double h_min = 1e-14;
  long max_steps = 1000000;
  double winding_eps = 1e-9;
};

struct CriticalPoint {
  ChartPoint where;
  int m = 2;
  int index = -1;
  double value = 0.0;
  bool at_removable_end = false;
  int end_index = -1;    // puncture index when at_removable_end
  double alpha = 0.0;    // h_m = C Re[e^{i alpha} (u1 + i u2)^m]
  double C = 0.0;
  int sectors = 0;       // sign changes of G - G(z) on the classification circle
  double residual = 0.0;  // |fz| at the position
};

// Winding number of fz along the boundary of `cell` after removing the
// simple poles at `deflate`.  Returns nullopt when |fz| drops below `eps` on
// the boundary.
std::optional<int> cell_winding(const GreenModel& model, int chart, const Rect& cell,
                                const std::vector<Complex>& deflate, double eps);

// Winding number of fz on the circle |z - c| = r in `chart`.
std::optional<int> circle_winding(const GreenModel& model, ChartPoint c, double r, double eps);

// All zeros of fz in `window` of `chart`, refined by Newton iteration.
std::vector<CriticalPoint> locate_zeros(const GreenModel& model, int chart, const Rect& window,
                                        int grid_n, const Tolerances& tol = {},
                                        Exec exec = Exec::Parallel);

// Zeros over the whole surface: every chart window the family needs, each
// zero reported once, sorted by (chart, x, y).
std::vector<CriticalPoint> locate_all_zeros(const GreenModel& model, int grid_n,
                                            const Tolerances& tol = {},
                                            std::optional<Rect> primary_window = std::nullopt,
                                            Exec exec = Exec::Parallel);

CriticalPoint classify_zero(const GreenModel& model, ChartPoint position, const Tolerances& tol = {});

struct SeparatrixDirection {
  double angle = 0.0;
  bool stable = false;
};

std::vector<SeparatrixDirection> separatrix_directions(const CriticalPoint& cp);

enum class FlowDirection { Forward, Backward };

enum class Terminal { Pole, Zero, ParabolicEnd, HyperbolicBoundary, Escape, MaxSteps, StepCollapse };

std::string_view to_string(Terminal t);

struct FlowSample {
  double t = 0.0;
  ChartPoint at;
  double value = 0.0;
};

struct RemovablePass {
  int puncture = -1;
  int sample = -1;  // index of the sample closest to the end
  double distance = 0.0;
};

struct Trajectory {
  std::vector<FlowSample> samples;
  FlowDirection direction = FlowDirection::Forward;
  Terminal terminal = Terminal::MaxSteps;
  int ref = -1;  // zero index, puncture index or boundary index
  ChartPoint last;
  double last_value = 0.0;
  double length = 0.0;
  std::vector<RemovablePass> passes;
  int nearest_zero = -1;  // closest listed zero along the way
  double nearest_zero_distance = INFINITY;
  long steps = 0;
};

struct FlowOptions {
  Tolerances tol;
  std::optional<Rect> window;  // primary chart; leaving it is Escape
  double t_max = INFINITY;
  bool record = true;
  double removable_watch = 1e-6;  // distance at which a pass through a removable end is reported
};

Trajectory integrate_flow(const GreenModel& model, ChartPoint x0, FlowDirection direction,
                          const std::vector<CriticalPoint>& zeros, const FlowOptions& opts = {});

// True when the recorded values are strictly monotone in the flow direction.
bool strictly_monotone(const Trajectory& tr);

struct PoleNodeReport {
  int samples = 0;
  int reached_pole = 0;
  double max_tangent_deviation = 0.0;  // radians, last segment vs. radial direction
  bool arrival_order_preserved = true;
  bool holds = false;
};

PoleNodeReport pole_node_check(const GreenModel& model, double radius, int n_samples,
                               const std::vector<CriticalPoint>& zeros, std::uint64_t seed,
                               const FlowOptions& opts = {}, Exec exec = Exec::Parallel);

}  // namespace greenflow
