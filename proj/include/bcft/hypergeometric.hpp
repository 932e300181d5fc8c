#pragma once

#include <array>

#include "bcft/types.hpp"

namespace bcft {

struct HypergeometricParams {
  cplx A, B, C;
};

// Row-major 2x2 matrix acting on column vectors of basis coefficients.
struct ConnectionMatrix {
  cplx m11, m12, m21, m22;
  std::array<cplx, 2> apply(const std::array<cplx, 2>& v) const {
    return {m11 * v[0] + m12 * v[1], m21 * v[0] + m22 * v[1]};
  }
  cplx determinant() const { return m11 * m22 - m12 * m21; }
};

struct SeriesResult {
  cplx value;
  int terms = 0;
};

// Power series for |t| < 1.  Throws ConvergenceError when max_terms is hit.
SeriesResult gauss_2f1_series(const HypergeometricParams& p, cplx t, int max_terms = 20000);
cplx gauss_2f1(const HypergeometricParams& p, cplx t);

// F(A,B,C,t) = (1-t)^{-A} F(A, C-B, C, t/(t-1)), usable for Re t < 1/2.
cplx gauss_2f1_pfaff(const HypergeometricParams& p, cplx t);

// (C1, C2) -> (B1, B2): 0-basis {F(A,B,C,t), t^{1-C} F(1+A-C,1+B-C,2-C,t)} to the
// 1-basis {F(A,B,1+A+B-C,1-t), (1-t)^{C-A-B} F(C-A,C-B,1+C-A-B,1-t)}.
ConnectionMatrix connection_0_to_1(const HypergeometricParams& p);

// (D1, D2) -> (C1, C2): infinity-basis {(-t)^{-A} F(A,1+A-C,1+A-B,1/t),
// (-t)^{-B} F(B,1+B-C,1+B-A,1/t)} to the 0-basis written with (-t)^{1-C}.
// The powers of -t are principal; on t < 0 everything is real.
ConnectionMatrix connection_inf_to_0(const HypergeometricParams& p);

// Basis functions, evaluated by their defining series.
std::array<cplx, 2> basis_at_0(const HypergeometricParams& p, cplx t);        // t^{1-C} principal
std::array<cplx, 2> basis_at_0_minus(const HypergeometricParams& p, cplx t);  // (-t)^{1-C}, Pfaff continued
std::array<cplx, 2> basis_at_1(const HypergeometricParams& p, cplx t);
std::array<cplx, 2> basis_at_inf(const HypergeometricParams& p, cplx t);

enum class IntegralVariant { shifted_one, shifted_power };

struct UsefulIntegral {
  cplx numeric;
  cplx closed_form;  // Gamma(1-b) Gamma(-1+b-g) / Gamma(-g)
};

UsefulIntegral useful_integral(double g, double b, double theta0, IntegralVariant variant);

}  // namespace bcft
