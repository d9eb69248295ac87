#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "greenflow/dynamics.hpp"
#include "greenflow/green.hpp"

namespace greenflow {

enum class Variant { Compactified, Open };
enum class VertexKind { CriticalPoint, EndMinimum, RemovableEnd };

std::string_view to_string(Variant v);
std::string_view to_string(VertexKind k);

struct SkeletonVertex {
  VertexKind kind = VertexKind::CriticalPoint;
  ChartPoint where;
  int ref = -1;  // zero index, puncture index, or hyperbolic end index
  double value = 0.0;  // -inf at end minima
};

struct SkeletonEdge {
  int source = -1;  // -1: open end (the endpoint was removed from the surface)
  int sink = -1;
  int zero = -1;    // zero the separatrix was traced from (-1 for orbits of removable ends)
  double angle = 0.0;
  std::vector<FlowSample> polyline;  // from source towards sink; values decreasing
  double g_hi = 0.0, g_lo = 0.0;
  Terminal terminal = Terminal::MaxSteps;
  bool resolved = true;
  double near_miss = INFINITY;  // closest approach to an unmatched zero
};

struct SkeletonGraph {
  Variant variant = Variant::Compactified;
  std::vector<SkeletonVertex> vertices;
  std::vector<SkeletonEdge> edges;
  int beta0 = 0;
  int beta1 = 0;
  bool complete = true;
  std::vector<std::string> notes;
};

// Traces the stable branches of every zero backwards and assembles the graph.
SkeletonGraph build_skeleton(const GreenModel& model, const std::vector<CriticalPoint>& zeros,
                             Variant variant, const FlowOptions& opts = {},
                             Exec exec = Exec::Parallel);

struct Betti {
  int beta0 = 0;
  int beta1 = 0;
};

// Component count and cycle rank; each open edge end counts as its own leaf.
// Throws IncompleteGraph when an edge is unresolved.
Betti betti(const SkeletonGraph& graph);

enum class BasinLabel : std::uint8_t { Excluded = 0, Pole, Zero, End, Boundary, Escape, Undecided };

struct BasinResult {
  int n = 0;
  Rect window;
  std::vector<std::uint8_t> labels;  // row-major, row 0 at window.y0
  int counted = 0;
  int to_pole = 0;
  double fraction = 0.0;
};

Rect default_basin_window(const GreenModel& model);

// Flows one jittered point per grid cell forward and labels its terminal.
BasinResult basin_sample(const GreenModel& model, int grid_n, double t_max,
                         const std::vector<CriticalPoint>& zeros, std::uint64_t seed,
                         std::optional<Rect> window = std::nullopt, const FlowOptions& opts = {},
                         Exec exec = Exec::Parallel);

struct Claim {
  std::string id;
  std::string statement;
  std::vector<std::pair<std::string, double>> numbers;
  bool pass = false;
  bool required = true;
  double tolerance = 0.0;

  void add(std::string key, double value) { numbers.emplace_back(std::move(key), value); }
  double number(std::string_view key) const {
    for (const auto& [k, v] : numbers) {
      if (k == key) return v;
    }
    return NAN;
  }
};

struct ChecksReport {
  std::vector<Claim> claims;
  bool all_pass() const;
};

// Bounds, Morse property at the bound, index sum, skeleton homology,
// monotone chains ending at end minima, balance between interior and
// removable-end zeros, forced critical points, open-variant rank.
ChecksReport verify_report(const GreenModel& model, const std::vector<CriticalPoint>& zeros,
                           const SkeletonGraph& compact, const SkeletonGraph* open = nullptr);

}  // namespace greenflow
