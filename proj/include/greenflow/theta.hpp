#pragma once

#include "greenflow/common.hpp"

namespace greenflow {

// First Jacobi theta function and its derivative for complex argument and
// nome q in (0, 1), from the Fourier series
//   theta1(v) = 2 sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) v).
// Accurate when |Im v| is O(1); callers reduce the argument first.
struct Theta1 {
  Complex value;
  Complex derivative;
};

Theta1 jacobi_theta1(Complex v, double q);

// Green's kernel of the flat rectangular torus with periods lx, ly:
//   Delta G_T = -delta_0 + 1/(lx*ly),
// normalized so that G_T(z) + log|z|/(2 pi) -> 0 as z -> 0.
class TorusKernel {
 public:
  TorusKernel(double lx, double ly);

  struct Eval {
    double value;
    Complex fz;  // 2 dG/dz
  };

  // Value and Wirtinger derivative; z is reduced into the cell centred at 0.
  Eval operator()(Complex z) const;

  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double area() const { return lx_ * ly_; }

  // Lattice translate of z closest to the origin.
  Complex reduce(Complex z) const;

 private:
  double lx_, ly_, q_, constant_;
};

}  // namespace greenflow
