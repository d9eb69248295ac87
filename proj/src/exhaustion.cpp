#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <Eigen/IterativeLinearSolvers>

#include "greenflow/exhaustion.hpp"

namespace greenflow {

std::vector<double> dirichlet_green(const Mesh& mesh, const std::vector<char>& mask, int pole,
                                    double rel_tol) {
  const int nv = static_cast<int>(mesh.vertices.size());
  if (pole < 0 || pole >= nv || !mask[pole]) {
    throw Error(ErrorCode::NotNested, "pole vertex is not inside the domain");
  }
  std::vector<int> slot(nv, -1);
  int m = 0;
  for (int v = 0; v < nv; ++v) {
    if (mask[v]) slot[v] = m++;
  }
  if (m == nv) throw Error(ErrorCode::SolverStall, "domain has no boundary");

  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < mesh.stiffness.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(mesh.stiffness, k); it; ++it) {
      const int i = slot[it.row()], j = slot[it.col()];
      if (i >= 0 && j >= 0) trip.emplace_back(i, j, it.value());
    }
  }
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  b[slot[pole]] = 1.0;

  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setTolerance(rel_tol);
  cg.setMaxIterations(std::max(1000, 20 * static_cast<int>(std::sqrt(static_cast<double>(m))) * 10));
  cg.compute(a);
  Eigen::VectorXd x = cg.solve(b);
  if (cg.info() != Eigen::Success) {
    throw Error(ErrorCode::SolverStall, "conjugate gradients did not reach the tolerance");
  }
  std::vector<double> out(nv, 0.0);
  for (int v = 0; v < nv; ++v) {
    if (slot[v] >= 0) out[v] = x[slot[v]];
  }
  return out;
}

std::vector<double> ExhaustionSequence::limit() const {
  std::vector<double> g = solutions.back();
  for (double& v : g) v -= shifts.back();
  return g;
}

ExhaustionSequence li_tam_sequence(const Mesh& mesh, const std::vector<std::vector<char>>& domains,
                                   int pole, int ref, const std::vector<char>& compact_set,
                                   double tol_conv, Exec exec) {
  if (domains.empty()) throw Error(ErrorCode::NotNested, "no domains");
  const std::size_t nv = mesh.vertices.size();
  for (std::size_t j = 1; j < domains.size(); ++j) {
    for (std::size_t v = 0; v < nv; ++v) {
      if (domains[j - 1][v] && !domains[j][v]) throw Error(ErrorCode::NotNested, "domains are not increasing");
    }
  }
  const auto& first = domains.front();
  if (!first[pole] || !first[ref] || ref == pole) {
    throw Error(ErrorCode::NotNested, "pole and reference vertex must lie in the first domain");
  }
  for (std::size_t v = 0; v < nv; ++v) {
    if (compact_set[v] && !first[v]) throw Error(ErrorCode::NotNested, "compact set leaves the first domain");
  }

  ExhaustionSequence seq;
  seq.domains = domains;
  seq.compact_set = compact_set;
  seq.pole = pole;
  seq.ref = ref;
  seq.tol_conv = tol_conv;
  const int nd = static_cast<int>(domains.size());
  seq.solutions.resize(nd);
  // independent solves
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int j = 0; j < nd; ++j) seq.solutions[j] = dirichlet_green(mesh, domains[j], pole);
  } else {
    for (int j = 0; j < nd; ++j) seq.solutions[j] = dirichlet_green(mesh, domains[j], pole);
  }
  for (int j = 0; j < nd; ++j) {
    seq.shifts.push_back(std::max(seq.solutions[j][ref] - seq.solutions[0][ref], 0.0));
  }
  for (int j = 0; j + 1 < nd; ++j) {
    double sup = 0.0;
    for (std::size_t v = 0; v < nv; ++v) {
      if (!compact_set[v]) continue;
      const double d = (seq.solutions[j + 1][v] - seq.shifts[j + 1]) - (seq.solutions[j][v] - seq.shifts[j]);
      sup = std::max(sup, std::abs(d));
    }
    seq.metrics.push_back(sup);
  }
  seq.monotone = true;
  for (std::size_t j = 1; j < seq.metrics.size(); ++j) seq.monotone = seq.monotone && seq.metrics[j] < seq.metrics[j - 1];
  seq.converged = !seq.metrics.empty() && seq.metrics.back() < tol_conv;
  return seq;
}

DiscreteMonotonicity discrete_monotonicity(const Mesh& mesh, const std::vector<double>& values,
                                           const std::vector<char>& mask, int pole,
                                           const std::vector<double>& radii, double tol) {
  DiscreteMonotonicity rep;
  rep.tolerance = tol;
  const Complex y = mesh.vertices[pole];
  const double h = mesh.max_edge;
  for (double r : radii) {
    DiscreteMonotonicity::Ring ring;
    ring.radius = r;
    ring.ring_max = -INFINITY;
    ring.exterior_sup = -INFINITY;
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
      if (!mask[v]) continue;
      const double d = mesh.distance(y, mesh.vertices[v]);
      if (d > r - h && d <= r) {
        ring.ring_max = std::max(ring.ring_max, values[v]);
        ++ring.ring_size;
      } else if (d > r) {
        ring.exterior_sup = std::max(ring.exterior_sup, values[v]);
      }
    }
    ring.margin = ring.ring_max - ring.exterior_sup;
    rep.holds = rep.holds && ring.ring_size > 0 && ring.margin >= -tol;
    rep.rings.push_back(ring);
  }
  return rep;
}

TorusExhaustionResult torus_exhaustion(int n, Complex puncture, std::vector<double> radii, Exec exec) {
  const Mesh mesh = build_mesh(MeshFamily::Torus, n, exec);
  const int pole = mesh.nearest_vertex({0.0, 0.0});
  const int hole = mesh.nearest_vertex(puncture);
  const Complex p = mesh.vertices[hole];
  const Complex y = mesh.vertices[pole];
  const std::size_t nv = mesh.vertices.size();

  std::sort(radii.begin(), radii.end(), std::greater<>());
  std::vector<std::vector<char>> domains;
  for (double rho : radii) {
    std::vector<char> d(nv);
    for (std::size_t v = 0; v < nv; ++v) d[v] = mesh.distance(p, mesh.vertices[v]) > rho;
    domains.push_back(std::move(d));
  }
  // K: away from the pole and outside the largest hole
  std::vector<char> k(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    k[v] = mesh.distance(p, mesh.vertices[v]) >= radii.front() + 0.4 &&
           mesh.distance(y, mesh.vertices[v]) >= 0.5;
  }
  const int ref = mesh.nearest_vertex(y + 0.5 * (p - y) + Complex{kPi, 0.0});

  TorusExhaustionResult res;
  res.radii = radii;
  res.sequence = li_tam_sequence(mesh, domains, pole, ref, k, 1e-3, exec);

  const auto model = make_model(make_torus({Puncture{ChartPoint{0, p}, 1.0}}), y);
  const auto lim = res.sequence.limit();
  const double c = lim[ref] - model.evaluate(mesh.vertices[ref]).value;
  double lo = INFINITY, hi = -INFINITY, err = 0.0;
  for (std::size_t v = 0; v < nv; ++v) {
    if (!k[v]) continue;
    const double g = model.evaluate(mesh.vertices[v]).value;
    lo = std::min(lo, g);
    hi = std::max(hi, g);
    err = std::max(err, std::abs(lim[v] - g - c));
  }
  res.abs_error = err;
  res.relative_error = err / (hi - lo);
  return res;
}

RefinementResult disk_refinement(const std::vector<int>& ns, double r_in, double r_out, Exec exec) {
  RefinementResult res;
  for (int n : ns) {
    const Mesh mesh = build_mesh(MeshFamily::Disk, n, exec);
    std::vector<char> mask(mesh.vertices.size());
    for (std::size_t v = 0; v < mask.size(); ++v) mask[v] = !mesh.boundary[v];
    const auto g = dirichlet_green(mesh, mask, 0);
    double err = 0.0;
    for (std::size_t v = 0; v < mask.size(); ++v) {
      const double r = std::abs(mesh.vertices[v]);
      if (r < r_in - 1e-12 || r > r_out + 1e-12) continue;
      err = std::max(err, std::abs(g[v] + std::log(r) / kTwoPi));
    }
    res.n.push_back(n);
    res.error.push_back(err);
  }
  for (std::size_t i = 1; i < res.n.size(); ++i) {
    res.order.push_back(std::log(res.error[i - 1] / res.error[i]) /
                        std::log(static_cast<double>(res.n[i]) / res.n[i - 1]));
  }
  return res;
}

void write_mesh_csv(const std::string& path, const Mesh& mesh, const std::vector<double>& values) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << "vertex,x1,x2,value\n";
  char buf[128];
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", v, mesh.vertices[v].real(),
                  mesh.vertices[v].imag(), values[v]);
    out << buf;
  }
}

}  // namespace greenflow
