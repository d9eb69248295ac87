#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "greenflow/common.hpp"
#include "greenflow/green.hpp"

namespace greenflow {

enum class MeshFamily { Torus, Disk };

// Triangulated 2pi-torus (n x n squares, each split along its diagonal) or
// unit disk (n hexagonal rings).  Stiffness is the cotan Laplacian, positive
// semidefinite, with L_ii = sum of the row's edge weights.
struct Mesh {
  MeshFamily family = MeshFamily::Torus;
  int n = 0;
  double period = 0.0;  // torus only
  std::vector<Complex> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<char> boundary;
  std::vector<double> area;  // lumped, one third of each incident triangle
  Eigen::SparseMatrix<double> stiffness;
  double min_angle = 0.0;  // radians
  double max_edge = 0.0;

  // Minimum-image difference vertices[b] - vertices[a] (torus) or plain difference.
  Complex displacement(Complex a, Complex b) const;
  double distance(Complex a, Complex b) const { return std::abs(displacement(a, b)); }
  int nearest_vertex(Complex z) const;
};

Mesh build_mesh(MeshFamily family, int n, Exec exec = Exec::Parallel);

// Solves L G = e_pole on the vertices in `mask`, G = 0 elsewhere, by Jacobi
// preconditioned conjugate gradients.  Throws SolverStall.
std::vector<double> dirichlet_green(const Mesh& mesh, const std::vector<char>& mask, int pole,
                                    double rel_tol = 1e-10);

struct ExhaustionSequence {
  std::vector<std::vector<char>> domains;
  std::vector<std::vector<double>> solutions;
  std::vector<double> shifts;
  std::vector<double> metrics;  // sup_K of successive differences of G_j - a_j
  std::vector<char> compact_set;
  int pole = -1;
  int ref = -1;
  double tol_conv = 0.0;
  bool converged = false;
  bool monotone = false;  // metrics strictly decreasing

  std::vector<double> limit() const;  // G_J - a_J
};

// Throws NotNested when the domains are not increasing, or when the pole,
// the reference vertex or K is not inside the first domain.
ExhaustionSequence li_tam_sequence(const Mesh& mesh, const std::vector<std::vector<char>>& domains,
                                   int pole, int ref, const std::vector<char>& compact_set,
                                   double tol_conv = 1e-3, Exec exec = Exec::Parallel);

struct DiscreteMonotonicity {
  struct Ring {
    double radius = 0.0;
    double ring_max = 0.0;
    double exterior_sup = 0.0;
    double margin = 0.0;
    int ring_size = 0;
  };
  std::vector<Ring> rings;
  double tolerance = 0.0;
  bool holds = true;
};

// For each radius r, compares the maximum over the vertex ring r - h < d <= r
// with the supremum over vertices farther than r (inside `mask`).
DiscreteMonotonicity discrete_monotonicity(const Mesh& mesh, const std::vector<double>& values,
                                           const std::vector<char>& mask, int pole,
                                           const std::vector<double>& radii, double tol = 1e-6);

// Torus with pole (0, 0) and one puncture; domains are the torus minus
// shrinking disks around the puncture.  The limit is compared with the closed
// form after matching the constant at the reference vertex.
struct TorusExhaustionResult {
  ExhaustionSequence sequence;
  std::vector<double> radii;
  double relative_error = 0.0;  // sup_K |limit - model - c| / osc_K model
  double abs_error = 0.0;
};

TorusExhaustionResult torus_exhaustion(int n, Complex puncture = {0.0, kPi},
                                       std::vector<double> radii = {1.6, 0.8, 0.4, 0.2, 0.1},
                                       Exec exec = Exec::Parallel);

// Sup error of the disk Dirichlet solution (pole at the centre) against
// -log(r) / 2pi on the annulus r_in <= r <= r_out, for each resolution, with
// observed orders between consecutive resolutions.
struct RefinementResult {
  std::vector<int> n;
  std::vector<double> error;
  std::vector<double> order;
};

RefinementResult disk_refinement(const std::vector<int>& ns, double r_in = 0.25, double r_out = 0.75,
                                 Exec exec = Exec::Parallel);

void write_mesh_csv(const std::string& path, const Mesh& mesh, const std::vector<double>& values);

}  // namespace greenflow
