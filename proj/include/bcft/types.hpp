#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace bcft {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Every failure the library reports is one of these.  The CLI prints name()
// on stderr, so keep the names stable.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(what), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

#define BCFT_DEFINE_ERROR(Cls)                                               \
  class Cls : public Error {                                                 \
   public:                                                                   \
    explicit Cls(const std::string& what) : Error(#Cls, what) {}             \
  };

BCFT_DEFINE_ERROR(PoleError)
BCFT_DEFINE_ERROR(DomainError)
BCFT_DEFINE_ERROR(QuadratureError)
BCFT_DEFINE_ERROR(ConvergenceError)
BCFT_DEFINE_ERROR(ContourCollisionError)
BCFT_DEFINE_ERROR(DegenerateError)
BCFT_DEFINE_ERROR(BranchError)
BCFT_DEFINE_ERROR(GridError)
BCFT_DEFINE_ERROR(FactorizationError)

#undef BCFT_DEFINE_ERROR

struct LiouvilleCoupling {
  double gamma = 1.0;
  double q_charge = 2.5;
  double central_charge = 1.0 + 6.0 * 2.5 * 2.5;

  static LiouvilleCoupling make(double gamma) {
    if (!(gamma > 0.0 && gamma < 2.0))
      throw DomainError("gamma must lie in (0,2), got " + std::to_string(gamma));
    LiouvilleCoupling c;
    c.gamma = gamma;
    c.q_charge = gamma / 2.0 + 2.0 / gamma;
    c.central_charge = 1.0 + 6.0 * c.q_charge * c.q_charge;
    return c;
  }

  double half() const { return gamma / 2.0; }      // gamma/2
  double dual() const { return 2.0 / gamma; }      // 2/gamma
  double Q() const { return q_charge; }
};

inline bool is_finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace bcft
