#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "greenflow/cli.hpp"

namespace greenflow {

namespace {

struct Frame {
  Rect w;
  double scale;
  double pad = 20.0;

  double px(Complex z) const { return pad + (z.real() - w.x0) * scale; }
  double py(Complex z) const { return pad + (w.y1 - z.imag()) * scale; }
  double width() const { return 2 * pad + w.width() * scale; }
  double height() const { return 2 * pad + w.height() * scale; }
};

std::string fmt(const char* f, double a, double b) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

// Splits at non-finite points and at jumps wider than half the window.
std::string path_data(const Frame& fr, const GreenModel& model, const std::vector<FlowSample>& pts) {
  std::string d;
  bool pen = false;
  Complex prev{};
  for (const auto& s : pts) {
    const Complex z = model.to_primary(s.at);
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      pen = false;
      continue;
    }
    const bool jump = pen && (std::abs(z.real() - prev.real()) > 0.5 * fr.w.width() ||
                              std::abs(z.imag() - prev.imag()) > 0.5 * fr.w.height());
    d += (!pen || jump) ? "M" : "L";
    d += fmt("%.2f %.2f ", fr.px(z), fr.py(z));
    pen = true;
    prev = z;
  }
  if (!d.empty()) d.pop_back();
  return d;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + p.string());
  out << text;
}

}  // namespace

std::string skeleton_svg(const Analysis& a) {
  const GreenModel& model = *a.model;
  Frame fr{a.basin.window, 600.0 / std::max(a.basin.window.width(), a.basin.window.height())};
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" " +
                  fmt("width=\"%.0f\" height=\"%.0f\"", fr.width(), fr.height()) + ">\n";
  s += "<style>.edge{fill:none;stroke:#1f4e79;stroke-width:1.5}"
       ".trajectory{fill:none;stroke:#999;stroke-width:0.8}"
       ".vertex{fill:#c0392b}.pole{fill:#27ae60}</style>\n";
  s += "<rect x=\"" + fmt("%.2f", fr.pad, 0) + "\" y=\"" + fmt("%.2f", fr.pad, 0) + "\" width=\"" +
       fmt("%.2f", fr.w.width() * fr.scale, 0) + "\" height=\"" + fmt("%.2f", fr.w.height() * fr.scale, 0) +
       "\" fill=\"none\" stroke=\"#ccc\"/>\n";
  for (const auto& t : a.samples) {
    const auto d = path_data(fr, model, t.samples);
    if (!d.empty()) s += "<path class=\"trajectory\" d=\"" + d + "\"/>\n";
  }
  if (a.compact) {
    for (const auto& e : a.compact->edges) {
      s += "<path class=\"edge\" d=\"" + path_data(fr, model, e.polyline) + "\"/>\n";
    }
    for (const auto& v : a.compact->vertices) {
      if (v.where.chart != 0) continue;
      const Complex z = v.where.pos;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !fr.w.contains(z)) continue;
      s += "<circle class=\"vertex\" cx=\"" + fmt("%.2f", fr.px(z), 0) + "\" cy=\"" + fmt("%.2f", fr.py(z), 0) +
           "\" r=\"4\"/>\n";
    }
  }
  const Complex y = model.to_primary(model.pole());
  if (fr.w.contains(y)) {
    s += "<circle class=\"pole\" cx=\"" + fmt("%.2f", fr.px(y), 0) + "\" cy=\"" + fmt("%.2f", fr.py(y), 0) +
         "\" r=\"5\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string basin_pgm(const BasinResult& b) {
  static constexpr unsigned char shade[] = {0, 255, 40, 90, 140, 190, 220};
  std::string s = "P5\n" + std::to_string(b.n) + " " + std::to_string(b.n) + "\n255\n";
  for (int row = b.n - 1; row >= 0; --row) {
    for (int col = 0; col < b.n; ++col) {
      const auto l = b.labels[static_cast<std::size_t>(row) * b.n + col];
      s.push_back(static_cast<char>(shade[l < 7 ? l : 0]));
    }
  }
  return s;
}

std::string basin_csv(const BasinResult& b) {
  std::string s = "i,j,x1,x2,label\n";
  char buf[96];
  for (int j = 0; j < b.n; ++j) {
    for (int i = 0; i < b.n; ++i) {
      const double x = b.window.x0 + (i + 0.5) * b.window.width() / b.n;
      const double y = b.window.y0 + (j + 0.5) * b.window.height() / b.n;
      std::snprintf(buf, sizeof buf, "%d,%d,%.10g,%.10g,%d\n", i, j, x, y,
                    static_cast<int>(b.labels[static_cast<std::size_t>(j) * b.n + i]));
      s += buf;
    }
  }
  return s;
}

std::string trajectory_csv(const GreenModel& model, const std::vector<FlowSample>& samples) {
  std::string s = "t,x1,x2,G\n";
  char buf[128];
  for (const auto& p : samples) {
    const Complex z = model.to_primary(p.at);
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", p.t, z.real(), z.imag(), p.value);
    s += buf;
  }
  return s;
}

void emit_outputs(const Analysis& a) {
  namespace fs = std::filesystem;
  const fs::path dir = a.config.outputs.dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string());
  write_file(dir / "report.json", report_json(a));
  if (a.config.outputs.svg) {
    write_file(dir / "skeleton.svg", skeleton_svg(a));
    if (!a.samples.empty()) {
      fs::create_directories(dir / "trajectories", ec);
      for (std::size_t k = 0; k < a.samples.size(); ++k) {
        write_file(dir / "trajectories" / ("trajectory_" + std::to_string(k) + ".csv"),
                   trajectory_csv(*a.model, a.samples[k].samples));
      }
    }
  }
  if (a.config.outputs.raster) {
    write_file(dir / "basin.pgm", basin_pgm(a.basin));
    write_file(dir / "basin.csv", basin_csv(a.basin));
  }
  if (a.mesh) write_mesh_csv((dir / "mesh_exhaustion.csv").string(), *a.mesh, a.mesh_values);
}

}  // namespace greenflow
