#include "greenflow/theta.hpp"

#include <algorithm>
#include <cmath>

namespace greenflow {

Theta1 jacobi_theta1(Complex v, double q) {
  const Complex i{0.0, 1.0};
  const Complex e = std::exp(i * v);
  const Complex e2 = e * e;
  const Complex ie = 1.0 / e;
  const Complex ie2 = ie * ie;
  const double lq = std::log(q);

  Complex pos = e, neg = ie;  // e^{i(2n+1)v}, e^{-i(2n+1)v}
  Complex s{}, d{};
  for (int n = 0; n < 40; ++n) {
    const double k = 2.0 * n + 1.0;
    const double c = std::exp(lq * (n + 0.5) * (n + 0.5)) * (n % 2 == 0 ? 1.0 : -1.0);
    const Complex sin_term = (pos - neg) / (2.0 * i);
    const Complex cos_term = (pos + neg) / 2.0;
    const Complex ds = c * sin_term;
    s += ds;
    d += c * k * cos_term;
    if (n > 1 && std::abs(c) * k * std::max(std::abs(pos), std::abs(neg)) <= 1e-18 * (std::abs(s) + std::abs(d))) break;
    pos *= e2;
    neg *= ie2;
  }
  return {2.0 * s, 2.0 * d};
}

TorusKernel::TorusKernel(double lx, double ly)
    : lx_(lx), ly_(ly), q_(std::exp(-kPi * ly / lx)), constant_(0.0) {
  const double d0 = std::abs(jacobi_theta1(Complex{}, q_).derivative);
  constant_ = std::log(d0 * kPi / lx_) / kTwoPi;
}

Complex TorusKernel::reduce(Complex z) const {
  return {z.real() - lx_ * std::round(z.real() / lx_), z.imag() - ly_ * std::round(z.imag() / ly_)};
}

TorusKernel::Eval TorusKernel::operator()(Complex z) const {
  const Complex r = reduce(z);
  const Complex v = kPi * r / lx_;
  const Theta1 t = jacobi_theta1(v, q_);
  const double y = r.imag();
  Eval out;
  out.value = -std::log(std::abs(t.value)) / kTwoPi + y * y / (2.0 * area()) + constant_;
  out.fz = -(t.derivative / t.value) / (2.0 * lx_) - Complex{0.0, y / area()};
  return out;
}

}  // namespace greenflow
