#pragma once

#include <limits>
#include <variant>

#include "bcft/types.hpp"

namespace bcft {

struct PoleReport {
  bool is_pole = false;
  cplx nearest_pole{0.0, 0.0};
  double distance = std::numeric_limits<double>::infinity();
  int n = 0;  // multiple of gamma/2
  int m = 0;  // multiple of 2/gamma
};

struct SpecialFunctionOptions {
  double pole_tolerance = 1e-8;
  double asymptotic_threshold = 30.0;
};

// Principal branch, arg in (-pi, pi].  Throws PoleError at 0, -1, -2, ...
cplx complex_log_gamma(cplx z);

// ln Gamma_{gamma/2}(x) for Re x > 0 from the defining t-integral.
cplx log_double_gamma(cplx x, const LiouvilleCoupling& c);

// Meromorphic continuation to the whole plane through the shift equations.
// The imaginary part is a continuous-enough log, not a principal one; only
// exp() of the result is meaningful.  Throws PoleError near the lattice.
cplx log_double_gamma_any(cplx x, const LiouvilleCoupling& c,
                          const SpecialFunctionOptions& opt = {});

// ln S(x) = ln Gamma(x) - ln Gamma(Q - x).  Throws PoleError on the pole
// lattice and on the zero lattice (where the log does not exist).
cplx log_double_sine(cplx x, const LiouvilleCoupling& c,
                     const SpecialFunctionOptions& opt = {});

std::variant<cplx, PoleReport> double_gamma(cplx x, const LiouvilleCoupling& c,
                                            const SpecialFunctionOptions& opt = {});
// Returns exactly 0 within pole_tolerance of a zero.
std::variant<cplx, PoleReport> double_sine(cplx x, const LiouvilleCoupling& c,
                                           const SpecialFunctionOptions& opt = {});

// Leading behaviour e^{-+ i pi (x(x-Q) + (Q^2+1)/6)/2} for Im x -> +-infinity.
cplx double_sine_asymptotic(cplx x, const LiouvilleCoupling& c,
                            const SpecialFunctionOptions& opt = {});

// Nearest point of -n gamma/2 - m 2/gamma (n, m >= 0).
PoleReport nearest_lattice_pole(cplx x, const LiouvilleCoupling& c,
                                const SpecialFunctionOptions& opt = {});

// ln E[beta_{2,2}(1, 4/gamma^2; b0, b1, b2)^p]; gamma is read off a2.
double beta22_log_moment(double p, double a1, double a2, double b0, double b1, double b2);
// ln E[beta_{1,0}(a; b)^q]
double beta10_log_moment(double q, double a, double b);

// Smallest distance to a pole seen by complex_log_gamma and the double gamma
// routines on this thread while a probe is alive.  Grid generators use it to
// reject points that sit too close to a pole of any factor.
class PoleDistanceProbe {
 public:
  PoleDistanceProbe();
  ~PoleDistanceProbe();
  PoleDistanceProbe(const PoleDistanceProbe&) = delete;
  PoleDistanceProbe& operator=(const PoleDistanceProbe&) = delete;
  double min_distance() const;

 private:
  double saved_;
  bool saved_active_;
};

namespace detail {
void note_pole_distance(double d);
}

}  // namespace bcft
