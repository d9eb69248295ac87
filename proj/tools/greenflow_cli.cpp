#include <iostream>

#include <CLI11.hpp>

#include "greenflow/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"greenflow: critical points, skeletons and basins of Green's functions"};
  app.require_subcommand(1);

  greenflow::AnalyzeOptions opts;
  std::string out, variant;
  std::uint64_t seed = 0;
  auto* an = app.add_subcommand("analyze", "analyze one surface configuration");
  an->add_option("--config", opts.config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  auto* out_opt = an->add_option("--out", out, "output directory");
  an->add_flag("--emit-svg", opts.emit_svg, "write skeleton.svg and sample trajectories");
  an->add_flag("--emit-raster", opts.emit_raster, "write basin.pgm and basin.csv");
  auto* seed_opt = an->add_option("--seed", seed, "override the config seed");
  auto* var_opt = an->add_option("--variant", variant, "open, compactified or both")
                      ->check(CLI::IsMember({"open", "compactified", "both"}));
  an->add_flag("--mesh-exhaust", opts.mesh_exhaust, "run the discrete exhaustion (torus, disk)");

  CLI11_PARSE(app, argc, argv);

  if (*out_opt) opts.out_dir = out;
  if (*seed_opt) opts.seed = seed;
  if (*var_opt) opts.variant = variant;
  return greenflow::run_analyze(opts, std::cout);
}
