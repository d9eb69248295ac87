#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace greenflow {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// A point expressed in one of a model's isothermal charts.  Chart 0 is always
// the primary chart; secondary charts cover ends (w = 1/z on the sphere,
// zeta = e^{+-u} on the cylinder).
struct ChartPoint {
  int chart = 0;
  Complex pos{};

  friend bool operator==(const ChartPoint&, const ChartPoint&) = default;
};

// Axis-aligned rectangle in chart coordinates.
struct Rect {
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool contains(Complex z) const {
    return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1;
  }
};

// Data-parallel kernels take an execution policy; Serial is the reference
// path the parallel one is tested against.
enum class Exec { Serial, Parallel };

enum class ErrorCode {
  WeightSumError,
  FamilyMismatch,
  OutOfDomain,
  PoleCollision,
  SingularPoint,
  WindowTouchesSingularity,
  WindingAmbiguous,
  NewtonDiverged,
  DegenerateCircle,
  StepCollapse,
  UnresolvedTerminal,
  IncompleteGraph,
  DegenerateTriangle,
  SolverStall,
  NotNested,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// SplitMix64; used to derive per-item random streams from a run seed so that
// sampled quantities do not depend on thread scheduling.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double unit_from_hash(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace greenflow
