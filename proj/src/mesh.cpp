#include <algorithm>
#include <cmath>

#include "greenflow/exhaustion.hpp"

namespace greenflow {

Complex Mesh::displacement(Complex a, Complex b) const {
  Complex d = b - a;
  if (family == MeshFamily::Torus) {
    d = {d.real() - period * std::round(d.real() / period), d.imag() - period * std::round(d.imag() / period)};
  }
  return d;
}

int Mesh::nearest_vertex(Complex z) const {
  if (family == MeshFamily::Torus) {
    const double h = period / n;
    int i = static_cast<int>(std::lround(z.real() / h)) % n;
    int j = static_cast<int>(std::lround(z.imag() / h)) % n;
    if (i < 0) i += n;
    if (j < 0) j += n;
    return j * n + i;
  }
  int best = 0;
  double bd = INFINITY;
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    const double d = std::abs(vertices[v] - z);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(v);
    }
  }
  return best;
}

namespace {

void torus_topology(Mesh& m) {
  const int n = m.n;
  m.period = kTwoPi;
  const double h = kTwoPi / n;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) m.vertices.push_back({i * h, j * h});
  }
  m.boundary.assign(m.vertices.size(), 0);
  auto id = [n](int i, int j) { return ((j + n) % n) * n + (i + n) % n; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      m.triangles.push_back({a, b, c});
      m.triangles.push_back({a, c, d});
    }
  }
}

void disk_topology(Mesh& m) {
  const int n = m.n;
  m.vertices.push_back({0.0, 0.0});
  std::vector<int> start(n + 1, 0);
  for (int k = 1; k <= n; ++k) {
    start[k] = static_cast<int>(m.vertices.size());
    for (int j = 0; j < 6 * k; ++j) m.vertices.push_back(std::polar(static_cast<double>(k) / n, kTwoPi * j / (6 * k)));
  }
  m.boundary.assign(m.vertices.size(), 0);
  for (int j = 0; j < 6 * n; ++j) m.boundary[start[n] + j] = 1;
  for (int k = 1; k <= n; ++k) {
    auto outer = [&](int t) { return start[k] + (t % (6 * k)); };
    auto inner = [&](int t) { return k == 1 ? 0 : start[k - 1] + (t % (6 * (k - 1))); };
    for (int s = 0; s < 6; ++s) {
      for (int t = 0; t < k; ++t) {
        m.triangles.push_back({outer(s * k + t), outer(s * k + t + 1), inner(s * (k - 1) + t)});
      }
      for (int t = 0; t + 1 < k; ++t) {
        m.triangles.push_back({inner(s * (k - 1) + t), outer(s * k + t + 1), inner(s * (k - 1) + t + 1)});
      }
    }
  }
}

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }
double dot(Complex a, Complex b) { return a.real() * b.real() + a.imag() * b.imag(); }

}  // namespace

Mesh build_mesh(MeshFamily family, int n, Exec exec) {
  if (n < 1) throw Error(ErrorCode::DegenerateTriangle, "mesh resolution must be positive");
  Mesh m;
  m.family = family;
  m.n = n;
  if (family == MeshFamily::Torus) torus_topology(m);
  else disk_topology(m);

  const int nt = static_cast<int>(m.triangles.size());
  // per triangle: weights of edges (1,2), (2,0), (0,1), area, smallest angle, longest edge
  std::vector<std::array<double, 6>> local(nt);
  auto body = [&](int t) {
    auto& tri = m.triangles[t];
    const Complex p0 = m.vertices[tri[0]];
    Complex p1 = p0 + m.displacement(p0, m.vertices[tri[1]]);
    Complex p2 = p0 + m.displacement(p0, m.vertices[tri[2]]);
    if (cross(p1 - p0, p2 - p0) < 0) {
      std::swap(tri[1], tri[2]);
      std::swap(p1, p2);
    }
    const Complex p[3] = {p0, p1, p2};
    const double twice_area = cross(p1 - p0, p2 - p0);
    double min_angle = kPi, max_edge = 0.0;
    for (int k = 0; k < 3; ++k) {
      const Complex a = p[(k + 1) % 3] - p[k], b = p[(k + 2) % 3] - p[k];
      const double ang = std::atan2(std::abs(cross(a, b)), dot(a, b));
      min_angle = std::min(min_angle, ang);
      max_edge = std::max(max_edge, std::abs(p[(k + 1) % 3] - p[(k + 2) % 3]));
      local[t][k] = 0.5 * dot(a, b) / twice_area;  // half cotangent of the angle at k
    }
    local[t][3] = 0.5 * twice_area;
    local[t][4] = min_angle;
    local[t][5] = max_edge;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int t = 0; t < nt; ++t) body(t);
  } else {
    for (int t = 0; t < nt; ++t) body(t);
  }

  const int nv = static_cast<int>(m.vertices.size());
  m.area.assign(nv, 0.0);
  m.min_angle = kPi;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(nt) * 12);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = m.triangles[t];
    if (local[t][4] <= kPi / 180.0) throw Error(ErrorCode::DegenerateTriangle, "triangle angle below one degree");
    m.min_angle = std::min(m.min_angle, local[t][4]);
    m.max_edge = std::max(m.max_edge, local[t][5]);
    for (int k = 0; k < 3; ++k) {
      const int i = tri[(k + 1) % 3], j = tri[(k + 2) % 3];
      const double w = local[t][k];
      trip.emplace_back(i, j, -w);
      trip.emplace_back(j, i, -w);
      trip.emplace_back(i, i, w);
      trip.emplace_back(j, j, w);
      m.area[tri[k]] += local[t][3] / 3.0;
    }
  }
  m.stiffness.resize(nv, nv);
  m.stiffness.setFromTriplets(trip.begin(), trip.end());
  return m;
}

}  // namespace greenflow
