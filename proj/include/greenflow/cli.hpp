#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "greenflow/dynamics.hpp"
#include "greenflow/exhaustion.hpp"
#include "greenflow/green.hpp"
#include "greenflow/skeleton.hpp"
#include "greenflow/surfaces.hpp"

namespace greenflow {

inline constexpr int kSchemaVersion = 1;

struct Grids {
  int zero_grid = 32;
  int basin_grid = 100;
  double basin_t_max = 60.0;
  int mesh_n = 64;
  std::optional<Rect> zero_window;
  std::optional<Rect> basin_window;
};

struct Outputs {
  std::string dir = "out";
  bool svg = false;
  bool raster = false;
  std::string variant = "both";  // open | compactified | both
  bool mesh_exhaust = false;
  int sample_trajectories = 0;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  SurfaceSpec spec;
  ChartPoint pole;
  Tolerances tol;
  Grids grids;
  Outputs outputs;
  std::uint64_t seed = 0;
};

// Strict parsing: unknown keys, wrong types and non-positive tolerances throw
// ConfigError naming the key.  Numbers may be given as strings "p/q", "pi",
// "2*pi/3" and "inf" (a puncture at infinity).
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

double parse_scalar_text(const std::string& text);

struct ExhaustionSummary {
  bool ran = false;
  std::string kind;  // torus | disk
  std::vector<double> radii;
  std::vector<double> shifts;
  std::vector<double> metrics;
  bool monotone = false;
  double relative_error = 0.0;
  std::vector<int> ns;
  std::vector<double> errors;
  std::vector<double> orders;
  std::string note;
};

struct Analysis {
  RunConfig config;
  std::optional<GreenModel> model;
  std::vector<CriticalPoint> zeros;
  std::optional<SkeletonGraph> compact;
  std::optional<SkeletonGraph> open;
  BasinResult basin;
  std::vector<Trajectory> samples;
  ChecksReport checks;
  ExhaustionSummary exhaustion;
  std::optional<Mesh> mesh;
  std::vector<double> mesh_values;
};

Analysis analyze(const RunConfig& config, Exec exec = Exec::Parallel);

// Report document as JSON text (two-space indent, trailing newline).
std::string report_json(const Analysis& a);

// Re-parses a report and emits it again; equal to the input for reports
// produced by report_json.
std::string reemit_report(const std::string& json_text);

// SVG of the compactified skeleton over the basin window.
std::string skeleton_svg(const Analysis& a);
// Binary PGM (P5) of the basin labels, first row at the top of the window.
std::string basin_pgm(const BasinResult& b);
std::string basin_csv(const BasinResult& b);
std::string trajectory_csv(const GreenModel& model, const std::vector<FlowSample>& samples);

// Writes report.json and the requested artifacts into config.outputs.dir.
void emit_outputs(const Analysis& a);

struct AnalyzeOptions {
  std::string config_path;
  std::optional<std::string> out_dir;
  bool emit_svg = false;
  bool emit_raster = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> variant;
  bool mesh_exhaust = false;
};

// 0 when every required check passes, 2 when one fails, 1 on errors.
int run_analyze(const AnalyzeOptions& opts, std::ostream& log);

}  // namespace greenflow
