#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "greenflow/skeleton.hpp"

namespace greenflow {

std::string_view to_string(Variant v) {
  return v == Variant::Compactified ? "compactified" : "open";
}

std::string_view to_string(VertexKind k) {
  switch (k) {
    case VertexKind::CriticalPoint: return "critical_point";
    case VertexKind::EndMinimum: return "end_minimum";
    case VertexKind::RemovableEnd: return "removable_end";
  }
  return "unknown";
}

namespace {

struct Trace {
  int zero = -1;
  double angle = 0.0;
  Trajectory tr;
};

std::string describe(const GreenModel& model, ChartPoint p) {
  const Complex z = model.to_primary(p);
  char buf[96];
  if (std::isfinite(z.real()) && std::isfinite(z.imag())) {
    std::snprintf(buf, sizeof buf, "(%.6g, %.6g)", z.real(), z.imag());
  } else {
    std::snprintf(buf, sizeof buf, "infinity");
  }
  return buf;
}

SkeletonEdge edge_from(const CriticalPoint* zero, int zero_index, double angle, const Trajectory& tr) {
  SkeletonEdge e;
  e.zero = zero_index;
  e.angle = angle;
  if (zero) e.polyline.push_back({0.0, zero->where, zero->value});
  e.polyline.insert(e.polyline.end(), tr.samples.begin(), tr.samples.end());
  e.g_hi = e.polyline.front().value;
  e.g_lo = e.polyline.back().value;
  e.terminal = tr.terminal;
  return e;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

Betti betti(const SkeletonGraph& graph) {
  for (const auto& e : graph.edges) {
    if (!e.resolved) throw Error(ErrorCode::IncompleteGraph, "graph has an unresolved edge");
  }
  const int v = static_cast<int>(graph.vertices.size());
  int leaves = 0;
  for (const auto& e : graph.edges) leaves += (e.source < 0) + (e.sink < 0);
  UnionFind uf(v + leaves);
  int next = v;
  for (const auto& e : graph.edges) {
    const int a = e.source >= 0 ? e.source : next++;
    const int b = e.sink >= 0 ? e.sink : next++;
    uf.unite(a, b);
  }
  Betti b;
  for (int i = 0; i < v + leaves; ++i) b.beta0 += uf.find(i) == i;
  b.beta1 = static_cast<int>(graph.edges.size()) - (v + leaves) + b.beta0;
  return b;
}

SkeletonGraph build_skeleton(const GreenModel& model, const std::vector<CriticalPoint>& zeros,
                             Variant variant, const FlowOptions& opts, Exec exec) {
  const auto& spec = model.spec();
  const auto& topo = model.topology();
  FlowOptions o = opts;
  o.record = true;

  // compactified vertex set: zeros, then end minima
  SkeletonGraph full;
  full.variant = Variant::Compactified;
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    const auto& z = zeros[i];
    full.vertices.push_back({z.at_removable_end ? VertexKind::RemovableEnd : VertexKind::CriticalPoint,
                             z.where, static_cast<int>(i), z.value});
  }
  std::vector<int> puncture_vertex(spec.punctures.size(), -1);
  std::vector<int> rim_vertex(spec.hyperbolic_ends.size(), -1);
  if (topo.lambda2 == 0) {
    for (std::size_t i = 0; i < spec.punctures.size(); ++i) {
      if (spec.punctures[i].removable()) continue;
      puncture_vertex[i] = static_cast<int>(full.vertices.size());
      full.vertices.push_back({VertexKind::EndMinimum, spec.punctures[i].where, static_cast<int>(i), -INFINITY});
    }
  } else {
    for (std::size_t j = 0; j < spec.hyperbolic_ends.size(); ++j) {
      rim_vertex[j] = static_cast<int>(full.vertices.size());
      full.vertices.push_back({VertexKind::EndMinimum, ChartPoint{0, spec.hyperbolic_ends[j].center},
                               static_cast<int>(j), 0.0});
    }
  }

  std::vector<Trace> traces;
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    for (const auto& d : separatrix_directions(zeros[i])) {
      if (d.stable) traces.push_back({static_cast<int>(i), d.angle, {}});
    }
  }
  const int nt = static_cast<int>(traces.size());
  auto body = [&](int k) {
    const auto& z = zeros[traces[k].zero];
    const ChartPoint seed{z.where.chart, z.where.pos + std::polar(o.tol.eps_sep, traces[k].angle)};
    traces[k].tr = integrate_flow(model, model.wrap(seed), FlowDirection::Backward, zeros, o);
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int k = 0; k < nt; ++k) body(k);
  } else {
    for (int k = 0; k < nt; ++k) body(k);
  }

  auto sink_of = [&](const Trajectory& tr) -> int {
    switch (tr.terminal) {
      case Terminal::Zero: return tr.ref;
      case Terminal::ParabolicEnd:
        return tr.ref >= 0 && tr.ref < static_cast<int>(puncture_vertex.size()) ? puncture_vertex[tr.ref] : -1;
      case Terminal::HyperbolicBoundary:
        return tr.ref >= 0 && tr.ref < static_cast<int>(rim_vertex.size()) ? rim_vertex[tr.ref] : -1;
      default: return -1;
    }
  };

  for (const auto& t : traces) {
    SkeletonEdge e = edge_from(&zeros[t.zero], t.zero, t.angle, t.tr);
    e.source = t.zero;
    e.sink = sink_of(t.tr);
    e.resolved = e.sink >= 0;
    if (!e.resolved) {
      full.complete = false;
      full.notes.push_back("separatrix of zero " + std::to_string(t.zero) + " ended with terminal " +
                           std::string(to_string(t.tr.terminal)));
    }
    if (t.tr.terminal != Terminal::Zero && t.tr.nearest_zero >= 0 && t.tr.nearest_zero_distance < 1e-3) {
      e.near_miss = t.tr.nearest_zero_distance;
      char buf[160];
      std::snprintf(buf, sizeof buf, "separatrix of zero %d passes zero %d at distance %.3g", t.zero,
                    t.tr.nearest_zero, t.tr.nearest_zero_distance);
      full.notes.push_back(buf);
    }
    for (const auto& pass : t.tr.passes) {
      char buf[200];
      std::snprintf(buf, sizeof buf,
                    "separatrix of zero %d passes through removable end %d at %s (distance %.3g)", t.zero,
                    pass.puncture, describe(model, spec.punctures[pass.puncture].where).c_str(),
                    pass.distance);
      full.notes.push_back(buf);
    }
    full.edges.push_back(std::move(e));
  }

  auto finish = [](SkeletonGraph& g) {
    try {
      const auto b = betti(g);
      g.beta0 = b.beta0;
      g.beta1 = b.beta1;
    } catch (const Error&) {
      g.complete = false;
      g.beta0 = g.beta1 = -1;
    }
  };

  if (variant == Variant::Compactified) {
    finish(full);
    return full;
  }

  // open variant: only interior zeros survive as vertices
  SkeletonGraph open;
  open.variant = Variant::Open;
  open.complete = full.complete;
  open.notes = full.notes;
  std::vector<int> remap(full.vertices.size(), -1);
  for (std::size_t v = 0; v < full.vertices.size(); ++v) {
    if (full.vertices[v].kind == VertexKind::CriticalPoint) {
      remap[v] = static_cast<int>(open.vertices.size());
      open.vertices.push_back(full.vertices[v]);
    }
  }
  std::vector<char> on_edge(spec.punctures.size(), 0);
  for (std::size_t k = 0; k < full.edges.size(); ++k) {
    const auto& e = full.edges[k];
    const auto& passes = traces[k].tr.passes;
    int from = e.source >= 0 ? remap[e.source] : -1;
    std::size_t begin = 0;
    for (const auto& pass : passes) {
      on_edge[pass.puncture] = 1;
      // polyline index is shifted by the prepended zero sample
      const std::size_t cut = std::min(e.polyline.size() - 1, static_cast<std::size_t>(pass.sample) + 1);
      SkeletonEdge piece = e;
      piece.polyline.assign(e.polyline.begin() + begin, e.polyline.begin() + cut + 1);
      piece.g_hi = piece.polyline.front().value;
      piece.g_lo = piece.polyline.back().value;
      piece.source = from;
      piece.sink = -1;
      piece.resolved = true;
      piece.terminal = Terminal::ParabolicEnd;
      open.edges.push_back(std::move(piece));
      from = -1;
      begin = cut;
    }
    SkeletonEdge rest = e;
    rest.polyline.assign(e.polyline.begin() + begin, e.polyline.end());
    rest.g_hi = rest.polyline.front().value;
    rest.source = from;
    rest.sink = e.sink >= 0 ? remap[e.sink] : -1;
    open.edges.push_back(std::move(rest));
  }

  // backward orbits of removable ends that are not zeros
  for (std::size_t i = 0; i < spec.punctures.size(); ++i) {
    if (!spec.punctures[i].removable()) continue;
    bool is_zero = false;
    for (const auto& z : zeros) is_zero = is_zero || (z.at_removable_end && z.end_index == static_cast<int>(i));
    if (is_zero) continue;
    if (on_edge[i]) {
      open.notes.push_back("backward orbit of removable end " + std::to_string(i) +
                           " coincides with a separatrix; collapsed");
      continue;
    }
    const Trajectory tr = integrate_flow(model, spec.punctures[i].where, FlowDirection::Backward, zeros, o);
    SkeletonEdge e = edge_from(nullptr, -1, 0.0, tr);
    e.source = -1;
    const int s = sink_of(tr);
    e.sink = s >= 0 ? remap[s] : -1;
    e.resolved = tr.terminal == Terminal::Zero ? tr.ref >= 0
                                               : (tr.terminal == Terminal::ParabolicEnd ||
                                                  tr.terminal == Terminal::HyperbolicBoundary);
    if (!e.resolved) {
      open.complete = false;
      open.notes.push_back("orbit of removable end " + std::to_string(i) + " ended with terminal " +
                           std::string(to_string(tr.terminal)));
    }
    open.edges.push_back(std::move(e));
  }
  finish(open);
  return open;
}

}  // namespace greenflow
