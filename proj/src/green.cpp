#include "greenflow/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "greenflow/theta.hpp"

namespace greenflow {
namespace detail {

class Kernel {
 public:
  virtual ~Kernel() = default;
  virtual int charts() const = 0;
  // value and fz; may return non-finite numbers at singular points
  virtual void eval(ChartPoint x, double& value, Complex& fz) const = 0;
  virtual std::optional<ChartPoint> transfer(ChartPoint x, int target) const {
    if (x.chart == target) return x;
    return std::nullopt;
  }
  virtual ChartPoint rechart(ChartPoint x) const { return wrap(x); }
  virtual ChartPoint wrap(ChartPoint x) const { return x; }
  virtual Complex min_image(int /*chart*/, Complex d) const { return d; }
  // periods of the chart (0 when not periodic)
  virtual std::array<double, 2> periods(int /*chart*/) const { return {0.0, 0.0}; }
  virtual bool in_domain(ChartPoint /*x*/) const { return true; }
};

namespace {

constexpr double kInvTwoPi = 1.0 / kTwoPi;

double reduce_period(double x, double p) { return x - p * std::round(x / p); }

double wrap_period(double x, double p) {
  double r = std::fmod(x, p);
  if (r < 0) r += p;
  if (r >= p) r -= p;
  return r;
}

// G = -(1/2pi) [ log|z - y| - sum c_i log|z - p_i| ] + K in the chart z, and
// the same function in w = 1/z where the end at infinity carries weight c_inf.
struct RationalFormula {
  Complex pole;
  std::vector<Complex> points;
  std::vector<double> weights;
  double weight_inf = 0.0;
  double constant = 0.0;

  void eval_z(Complex z, double& value, Complex& fz) const {
    double s = std::log(std::abs(z - pole));
    Complex f = 1.0 / (z - pole);
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (weights[i] == 0.0) continue;
      s -= weights[i] * std::log(std::abs(z - points[i]));
      f -= weights[i] / (z - points[i]);
    }
    value = -kInvTwoPi * s + constant;
    fz = -kInvTwoPi * f;
  }

  void eval_w(Complex w, double& value, Complex& fz) const {
    double s = std::log(std::abs(1.0 - pole * w));
    Complex f = -pole / (1.0 - pole * w);
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (weights[i] == 0.0) continue;
      s -= weights[i] * std::log(std::abs(1.0 - points[i] * w));
      f += weights[i] * points[i] / (1.0 - points[i] * w);
    }
    if (weight_inf != 0.0) {
      s -= weight_inf * std::log(std::abs(w));
      f -= weight_inf / w;
    }
    value = -kInvTwoPi * s + constant;
    fz = -kInvTwoPi * f;
  }
};

class SphereKernel final : public Kernel {
 public:
  explicit SphereKernel(RationalFormula f) : f_(std::move(f)) {}
  int charts() const override { return 2; }
  void eval(ChartPoint x, double& value, Complex& fz) const override {
    if (x.chart == 0) f_.eval_z(x.pos, value, fz);
    else f_.eval_w(x.pos, value, fz);
  }
  std::optional<ChartPoint> transfer(ChartPoint x, int target) const override {
    if (x.chart == target) return x;
    if (x.pos == Complex{}) return std::nullopt;
    return ChartPoint{target, 1.0 / x.pos};
  }
  ChartPoint rechart(ChartPoint x) const override {
    if (x.chart == 0 && std::abs(x.pos) > kOuter) return ChartPoint{1, 1.0 / x.pos};
    if (x.chart == 1 && std::abs(x.pos) > 1.0 / kInner) return ChartPoint{0, 1.0 / x.pos};
    return x;
  }

  static constexpr double kOuter = 4.0;  // leave chart 0 beyond |z| = 4
  static constexpr double kInner = 2.0;  // leave chart 1 inside |z| = 2

 private:
  RationalFormula f_;
};

class CylinderKernel final : public Kernel {
 public:
  CylinderKernel(Complex u0, CylinderVariant variant) : u0_(u0), variant_(variant) {
    const double minus = variant == CylinderVariant::G1 ? 0.5 : 0.0;
    end_.pole = std::exp(u0);
    end_.points = {Complex{}};
    end_.weights = {minus};
    end_.weight_inf = 1.0 - minus;
    end_.constant = variant == CylinderVariant::G1 ? (std::log(2.0) + u0.real()) / (4.0 * kPi)
                                                   : std::log(2.0) / (4.0 * kPi);
  }
  int charts() const override { return 3; }

  void eval(ChartPoint x, double& value, Complex& fz) const override {
    if (x.chart == 1) {
      end_.eval_z(x.pos, value, fz);
      return;
    }
    if (x.chart == 2) {
      end_.eval_w(x.pos, value, fz);
      return;
    }
    Complex d = x.pos - u0_;
    d = {d.real(), reduce_period(d.imag(), kTwoPi)};
    const double a = d.real();
    double log_sinh;
    Complex coth;
    if (std::abs(a) < 20.0) {
      const Complex h = d / 2.0;
      const Complex sh = std::sinh(h);
      log_sinh = std::log(std::abs(sh));
      coth = std::cosh(h) / sh;
    } else {
      const double s = a > 0 ? 1.0 : -1.0;
      const Complex e = std::exp(-s * d);
      log_sinh = s * a / 2.0 - std::log(2.0) + std::log(std::abs(1.0 - e));
      coth = s * (1.0 + e) / (1.0 - e);
    }
    // G1 = -(1/4pi) log[cosh(dz) - cos(dtheta)] = -(1/4pi) log(2 |sinh(d/2)|^2)
    value = -(std::log(2.0) + 2.0 * log_sinh) / (4.0 * kPi);
    fz = -coth / (4.0 * kPi);
    if (variant_ == CylinderVariant::G2) {
      value -= (x.pos.real() + u0_.real()) / (4.0 * kPi);
      fz -= 1.0 / (4.0 * kPi);
    }
  }

  std::optional<ChartPoint> transfer(ChartPoint x, int target) const override {
    if (x.chart == target) return x;
    // through chart 0
    Complex u;
    if (x.chart == 0) {
      u = x.pos;
    } else {
      if (x.pos == Complex{}) return std::nullopt;
      u = x.chart == 1 ? std::log(x.pos) : -std::log(x.pos);
    }
    if (target == 0) return wrap(ChartPoint{0, u});
    if (target == 1) return ChartPoint{1, std::exp(u)};
    return ChartPoint{2, std::exp(-u)};
  }

  ChartPoint rechart(ChartPoint x) const override {
    if (x.chart == 0) {
      if (x.pos.real() < -kLeave) return ChartPoint{1, std::exp(x.pos)};
      if (x.pos.real() > kLeave) return ChartPoint{2, std::exp(-x.pos)};
      return wrap(x);
    }
    if (std::abs(x.pos) > std::exp(-kReturn)) return *transfer(x, 0);
    return x;
  }

  ChartPoint wrap(ChartPoint x) const override {
    if (x.chart == 0) x.pos = {x.pos.real(), wrap_period(x.pos.imag(), kTwoPi)};
    return x;
  }

  Complex min_image(int chart, Complex d) const override {
    if (chart == 0) return {d.real(), reduce_period(d.imag(), kTwoPi)};
    return d;
  }

  std::array<double, 2> periods(int chart) const override {
    return chart == 0 ? std::array<double, 2>{0.0, kTwoPi} : std::array<double, 2>{0.0, 0.0};
  }

  static constexpr double kLeave = 10.0;  // |Re u| beyond which an end chart is used
  static constexpr double kReturn = 8.0;

 private:
  Complex u0_;
  CylinderVariant variant_;
  RationalFormula end_;
};

class TorusModelKernel final : public Kernel {
 public:
  TorusModelKernel(double lx, double ly, Complex pole, std::vector<Complex> pts, std::vector<double> w)
      : kernel_(lx, ly), pole_(pole), points_(std::move(pts)), weights_(std::move(w)) {}
  int charts() const override { return 1; }
  void eval(ChartPoint x, double& value, Complex& fz) const override {
    auto e = kernel_(x.pos - pole_);
    value = e.value;
    fz = e.fz;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      auto ei = kernel_(x.pos - points_[i]);
      value -= weights_[i] * ei.value;
      fz -= weights_[i] * ei.fz;
    }
  }
  ChartPoint wrap(ChartPoint x) const override {
    x.pos = {wrap_period(x.pos.real(), kernel_.lx()), wrap_period(x.pos.imag(), kernel_.ly())};
    return x;
  }
  Complex min_image(int, Complex d) const override { return kernel_.reduce(d); }
  std::array<double, 2> periods(int) const override { return {kernel_.lx(), kernel_.ly()}; }

 private:
  TorusKernel kernel_;
  Complex pole_;
  std::vector<Complex> points_;
  std::vector<double> weights_;
};

class DiskKernel final : public Kernel {
 public:
  explicit DiskKernel(Complex y) : y_(y) {}
  int charts() const override { return 1; }
  void eval(ChartPoint x, double& value, Complex& fz) const override {
    const Complex z = x.pos;
    const Complex den = 1.0 - std::conj(y_) * z;
    value = -kInvTwoPi * std::log(std::abs((z - y_) / den));
    fz = -kInvTwoPi * (1.0 / (z - y_) + std::conj(y_) / den);
  }
  bool in_domain(ChartPoint x) const override { return std::abs(x.pos) < 1.0; }

 private:
  Complex y_;
};

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace
}  // namespace detail

int GreenModel::chart_count() const { return kernel_->charts(); }

GreenSample GreenModel::sample(ChartPoint x) const {
  GreenSample s;
  double v;
  Complex f;
  kernel_->eval(x, v, f);
  s.value = v;
  s.fz = f;
  s.grad = {f.real(), -f.imag()};
  s.singular = !std::isfinite(v) || !detail::finite(f);
  if (s.singular && std::isnan(s.value)) s.value = INFINITY;
  return s;
}

GreenSample GreenModel::evaluate(ChartPoint x) const {
  if (!in_domain(x)) throw Error(ErrorCode::OutOfDomain, "evaluation point outside the surface");
  auto s = sample(x);
  if (s.singular) throw Error(ErrorCode::SingularPoint, "evaluation at a singular point");
  return s;
}

std::optional<ChartPoint> GreenModel::transfer(ChartPoint x, int target) const {
  if (target < 0 || target >= chart_count()) return std::nullopt;
  return kernel_->transfer(x, target);
}

ChartPoint GreenModel::rechart(ChartPoint x) const { return kernel_->rechart(x); }
ChartPoint GreenModel::wrap(ChartPoint x) const { return kernel_->wrap(x); }

Complex GreenModel::displacement(ChartPoint a, ChartPoint b) const {
  auto bt = kernel_->transfer(b, a.chart);
  if (!bt) return {INFINITY, INFINITY};
  return kernel_->min_image(a.chart, bt->pos - a.pos);
}

double GreenModel::distance(ChartPoint a, ChartPoint b) const {
  const Complex d = displacement(a, b);
  return detail::finite(d) ? std::abs(d) : INFINITY;
}

Complex GreenModel::to_primary(ChartPoint x) const {
  auto p = kernel_->transfer(x, 0);
  if (!p) return {INFINITY, INFINITY};
  return p->pos;
}

bool GreenModel::in_domain(ChartPoint x) const {
  return detail::finite(x.pos) && x.chart >= 0 && x.chart < chart_count() && kernel_->in_domain(x);
}

std::vector<Complex> GreenModel::field_singularities(int chart, const Rect& window,
                                                     double margin) const {
  std::vector<Complex> out;
  const auto per = kernel_->periods(chart);
  Rect grown{window.x0 - margin, window.x1 + margin, window.y0 - margin, window.y1 + margin};
  for (const auto& s : singular_) {
    if (s.kind == SingularKind::HyperbolicBoundary) continue;
    auto p = kernel_->transfer(s.where, chart);
    if (!p) continue;
    const int kx = per[0] > 0 ? 3 : 0;
    const int ky = per[1] > 0 ? 3 : 0;
    for (int i = -kx; i <= kx; ++i) {
      for (int j = -ky; j <= ky; ++j) {
        const Complex z = p->pos + Complex{i * per[0], j * per[1]};
        if (grown.contains(z)) out.push_back(z);
      }
    }
  }
  return out;
}

GreenModel make_model(const SurfaceSpec& spec, ChartPoint pole) {
  if (spec.family == Family::Mesh) {
    throw Error(ErrorCode::FamilyMismatch, "mesh surfaces have no closed-form model");
  }
  GreenModel m;
  m.topo_ = validate_spec(spec);
  m.spec_ = spec;
  if (pole.chart != 0 || !detail::finite(pole.pos)) {
    throw Error(ErrorCode::OutOfDomain, "the pole must be a finite primary-chart point");
  }

  switch (spec.family) {
    case Family::Plane:
    case Family::PuncturedSphere: {
      detail::RationalFormula f;
      f.pole = pole.pos;
      double sum = 0.0;
      for (const auto& p : spec.punctures) {
        if (p.where.chart == 0) {
          f.points.push_back(p.where.pos);
          f.weights.push_back(p.weight);
          sum += p.weight;
        }
      }
      f.weight_inf = std::max(0.0, 1.0 - sum);
      if (f.weight_inf < 1e-14) f.weight_inf = 0.0;
      m.kernel_ = std::make_shared<detail::SphereKernel>(std::move(f));
      break;
    }
    case Family::Cylinder:
      m.kernel_ = std::make_shared<detail::CylinderKernel>(pole.pos, spec.cylinder_variant);
      break;
    case Family::PuncturedTorus: {
      std::vector<Complex> pts;
      std::vector<double> w;
      for (const auto& p : spec.punctures) {
        if (p.weight > 0.0) {
          pts.push_back(p.where.pos);
          w.push_back(p.weight);
        }
      }
      m.kernel_ = std::make_shared<detail::TorusModelKernel>(spec.lattice_x, spec.lattice_y,
                                                             pole.pos, std::move(pts), std::move(w));
      break;
    }
    case Family::HyperbolicDisk:
      if (!(std::abs(pole.pos) < 1.0)) throw Error(ErrorCode::OutOfDomain, "pole outside the disk");
      m.kernel_ = std::make_shared<detail::DiskKernel>(pole.pos);
      break;
    case Family::Mesh:
      throw Error(ErrorCode::FamilyMismatch, "mesh surfaces have no closed-form model");
  }

  m.pole_ = m.kernel_->wrap(pole);
  m.singular_.push_back(SingularPoint{m.pole_, SingularKind::Pole, 0.0, -1});
  for (std::size_t i = 0; i < spec.punctures.size(); ++i) {
    const auto& p = spec.punctures[i];
    ChartPoint where = m.kernel_->wrap(p.where);
    if (m.distance(m.pole_, where) < 1e-12) {
      throw Error(ErrorCode::PoleCollision, "pole coincides with a puncture");
    }
    if (p.weight > 0.0) {
      m.singular_.push_back(SingularPoint{where, SingularKind::NonremovableEnd, 0.0, static_cast<int>(i)});
    }
  }
  for (std::size_t j = 0; j < spec.hyperbolic_ends.size(); ++j) {
    const auto& h = spec.hyperbolic_ends[j];
    m.singular_.push_back(
        SingularPoint{ChartPoint{0, h.center}, SingularKind::HyperbolicBoundary, h.radius, static_cast<int>(j)});
  }
  return m;
}

// ---- checks ------------------------------------------------------------------

namespace {

LaplacianResidual residual_grid(const std::function<double(Complex)>& f, const Rect& w, double h,
                                int n, Exec exec) {
  const int count = n * n;
  std::vector<double> lap(count);
  auto body = [&](int k) {
    const int i = k % n, j = k / n;
    const double x = n == 1 ? w.x0 : w.x0 + w.width() * i / (n - 1);
    const double y = n == 1 ? w.y0 : w.y0 + w.height() * j / (n - 1);
    const Complex c{x, y};
    const double g0 = f(c);
    const double s = f(c + Complex{h, 0}) + f(c - Complex{h, 0}) + f(c + Complex{0, h}) +
                     f(c - Complex{0, h});
    lap[k] = (s - 4.0 * g0) / (h * h);
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int k = 0; k < count; ++k) body(k);
  } else {
    for (int k = 0; k < count; ++k) body(k);
  }
  LaplacianResidual r;
  r.points = count;
  r.min = INFINITY;
  r.max = -INFINITY;
  for (double v : lap) {
    r.min = std::min(r.min, v);
    r.max = std::max(r.max, v);
    r.max_abs = std::max(r.max_abs, std::abs(v));
  }
  return r;
}

}  // namespace

LaplacianResidual laplacian_residual(const std::function<double(Complex)>& f, const Rect& window,
                                     double h, int n, Exec exec) {
  return residual_grid(f, window, h, n, exec);
}

LaplacianResidual laplacian_residual(const GreenModel& model, const Rect& window, double h, int n,
                                     Exec exec) {
  for (const auto& s : model.singular_points()) {
    if (s.kind == SingularKind::HyperbolicBoundary) {
      // every stencil point must stay inside the disk by 10h
      const double far = std::max({std::abs(Complex{window.x0, window.y0} - s.where.pos),
                                   std::abs(Complex{window.x1, window.y0} - s.where.pos),
                                   std::abs(Complex{window.x0, window.y1} - s.where.pos),
                                   std::abs(Complex{window.x1, window.y1} - s.where.pos)});
      if (far + 10.0 * h > s.radius) {
        throw Error(ErrorCode::WindowTouchesSingularity, "window reaches the hyperbolic boundary");
      }
      continue;
    }
    for (const Complex z : model.field_singularities(0, window, 10.0 * h)) {
      (void)z;
      throw Error(ErrorCode::WindowTouchesSingularity, "window within 10h of a singular point");
    }
  }
  return residual_grid([&](Complex z) { return model.sample(ChartPoint{0, z}).value; }, window, h, n,
                       exec);
}

Rect default_domain(const GreenModel& model) {
  const Complex y = model.pole().pos;
  switch (model.spec().family) {
    case Family::Plane: return {y.real() - 6, y.real() + 6, y.imag() - 6, y.imag() + 6};
    case Family::PuncturedSphere: return {-6, 6, -6, 6};
    case Family::Cylinder: return {y.real() - 8, y.real() + 8, 0.0, kTwoPi};
    case Family::PuncturedTorus: return {0.0, model.spec().lattice_x, 0.0, model.spec().lattice_y};
    case Family::HyperbolicDisk: return {-1, 1, -1, 1};
    case Family::Mesh: break;
  }
  return {-1, 1, -1, 1};
}

MonotonicityReport monotonicity_check(const GreenModel& model, const std::vector<double>& radii,
                                      int n_angles, int n_exterior, const Rect& domain,
                                      std::uint64_t seed, double tol, Exec exec) {
  MonotonicityReport rep;
  rep.tolerance = tol;
  rep.worst_margin = INFINITY;
  const ChartPoint pole = model.pole();

  // Exterior samples are shared across radii; each sample only depends on its index.
  std::vector<ChartPoint> pts(n_exterior);
  std::vector<double> vals(n_exterior);
  std::vector<double> dist(n_exterior);
  auto body = [&](int k) {
    const std::uint64_t h = mix_seed(seed ^ mix_seed(static_cast<std::uint64_t>(k)));
    const double u = unit_from_hash(h);
    const double v = unit_from_hash(mix_seed(h));
    ChartPoint p{0, {domain.x0 + u * domain.width(), domain.y0 + v * domain.height()}};
    pts[k] = p;
    if (!model.in_domain(p)) {
      vals[k] = NAN;
      return;
    }
    const auto s = model.sample(p);
    vals[k] = s.singular ? NAN : s.value;
    dist[k] = model.distance(pole, p);
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int k = 0; k < n_exterior; ++k) body(k);
  } else {
    for (int k = 0; k < n_exterior; ++k) body(k);
  }

  for (double r : radii) {
    MonotonicityRadius mr;
    mr.radius = r;
    mr.circle_max = -INFINITY;
    for (int a = 0; a < n_angles; ++a) {
      const double phi = kTwoPi * a / n_angles;
      ChartPoint c = model.wrap(ChartPoint{0, pole.pos + std::polar(r, phi)});
      if (!model.in_domain(c)) continue;
      if (std::abs(model.distance(pole, c) - r) > 1e-9 * (1 + r)) continue;  // not on the geodesic circle
      mr.circle_max = std::max(mr.circle_max, model.sample(c).value);
    }
    mr.exterior_sup = -INFINITY;
    for (int k = 0; k < n_exterior; ++k) {
      if (std::isnan(vals[k]) || !(dist[k] > r)) continue;
      ++mr.exterior_samples;
      mr.exterior_sup = std::max(mr.exterior_sup, vals[k]);
    }
    mr.margin = mr.circle_max - mr.exterior_sup;
    rep.worst_margin = std::min(rep.worst_margin, mr.margin);
    if (mr.margin < -tol) rep.holds = false;
    rep.radii.push_back(mr);
  }
  return rep;
}

}  // namespace greenflow
