#include "bcft/hypergeometric.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>

#include "bcft/quadrature.hpp"
#include "bcft/special_functions.hpp"

namespace bcft {

namespace {

bool near_integer(cplx z, double tol = 1e-8) {
  return std::abs(z.imag()) < tol && std::abs(z.real() - std::round(z.real())) < tol;
}

cplx log1p_c(cplx w) {
  if (std::abs(w) < 1e-4) return w * (1.0 - w * (0.5 - w * (1.0 / 3.0 - 0.25 * w)));
  return std::log(1.0 + w);
}

cplx expm1_c(cplx z) {
  if (std::abs(z) < 1e-4) return z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)));
  return std::exp(z) - 1.0;
}

cplx gamma_ratio(std::initializer_list<cplx> num, std::initializer_list<cplx> den) {
  cplx acc(0.0);
  for (cplx z : num) acc += complex_log_gamma(z);
  for (cplx z : den) acc -= complex_log_gamma(z);
  return std::exp(acc);
}

}  // namespace

SeriesResult gauss_2f1_series(const HypergeometricParams& p, cplx t, int max_terms) {
  if (near_integer(p.C) && p.C.real() <= 0.5) throw DomainError("2F1: C is a non-positive integer");
  if (!(std::abs(t) < 1.0)) throw DomainError("2F1 series needs |t| < 1");
  cplx term(1.0), sum(1.0);
  int small_in_a_row = 0;
  for (int n = 0; n < max_terms; ++n) {
    term *= (p.A + double(n)) * (p.B + double(n)) / ((p.C + double(n)) * double(n + 1)) * t;
    sum += term;
    if (term == cplx(0.0)) return {sum, n + 1};
    // require a few consecutive negligible terms so a transient dip does not stop us
    if (std::abs(term) < 1e-17 * std::abs(sum)) {
      if (++small_in_a_row >= 3) return {sum, n + 1};
    } else {
      small_in_a_row = 0;
    }
  }
  throw ConvergenceError("2F1 series did not converge within max_terms");
}

cplx gauss_2f1(const HypergeometricParams& p, cplx t) { return gauss_2f1_series(p, t).value; }

cplx gauss_2f1_pfaff(const HypergeometricParams& p, cplx t) {
  const cplx w = t / (t - 1.0);
  return std::pow(1.0 - t, -p.A) * gauss_2f1({p.A, p.C - p.B, p.C}, w);
}

ConnectionMatrix connection_0_to_1(const HypergeometricParams& p) {
  const cplx A = p.A, B = p.B, C = p.C;
  if (near_integer(C) || near_integer(C - A - B))
    throw DegenerateError("connection_0_to_1: C or C-A-B is an integer");
  ConnectionMatrix m;
  m.m11 = gamma_ratio({C, C - A - B}, {C - A, C - B});
  m.m12 = gamma_ratio({2.0 - C, C - A - B}, {1.0 - A, 1.0 - B});
  m.m21 = gamma_ratio({C, A + B - C}, {A, B});
  m.m22 = gamma_ratio({2.0 - C, A + B - C}, {A - C + 1.0, B - C + 1.0});
  return m;
}

ConnectionMatrix connection_inf_to_0(const HypergeometricParams& p) {
  const cplx A = p.A, B = p.B, C = p.C;
  if (near_integer(C) || near_integer(A - B))
    throw DegenerateError("connection_inf_to_0: C or A-B is an integer");
  ConnectionMatrix m;
  m.m11 = gamma_ratio({1.0 - C, A - B + 1.0}, {A - C + 1.0, 1.0 - B});
  m.m12 = gamma_ratio({1.0 - C, B - A + 1.0}, {B - C + 1.0, 1.0 - A});
  m.m21 = gamma_ratio({C - 1.0, A - B + 1.0}, {A, C - B});
  m.m22 = gamma_ratio({C - 1.0, B - A + 1.0}, {B, C - A});
  return m;
}

std::array<cplx, 2> basis_at_0(const HypergeometricParams& p, cplx t) {
  const cplx A = p.A, B = p.B, C = p.C;
  return {gauss_2f1({A, B, C}, t), std::pow(t, 1.0 - C) * gauss_2f1({1.0 + A - C, 1.0 + B - C, 2.0 - C}, t)};
}

std::array<cplx, 2> basis_at_0_minus(const HypergeometricParams& p, cplx t) {
  const cplx A = p.A, B = p.B, C = p.C;
  return {gauss_2f1_pfaff({A, B, C}, t),
          std::pow(-t, 1.0 - C) * gauss_2f1_pfaff({1.0 + A - C, 1.0 + B - C, 2.0 - C}, t)};
}

std::array<cplx, 2> basis_at_1(const HypergeometricParams& p, cplx t) {
  const cplx A = p.A, B = p.B, C = p.C;
  const cplx s = 1.0 - t;
  return {gauss_2f1({A, B, 1.0 + A + B - C}, s),
          std::pow(s, C - A - B) * gauss_2f1({C - A, C - B, 1.0 + C - A - B}, s)};
}

std::array<cplx, 2> basis_at_inf(const HypergeometricParams& p, cplx t) {
  const cplx A = p.A, B = p.B, C = p.C;
  const cplx s = 1.0 / t;
  return {std::pow(-t, -A) * gauss_2f1({A, 1.0 + A - C, 1.0 + A - B}, s),
          std::pow(-t, -B) * gauss_2f1({B, 1.0 + B - C, 1.0 + B - A}, s)};
}

UsefulIntegral useful_integral(double g, double b, double theta0, IntegralVariant variant) {
  if (!(g > -1.0 && g < 1.0)) throw DomainError("useful_integral: need -1 < g < 1");
  if (variant == IntegralVariant::shifted_one) {
    if (!(b > std::max(1.0, 1.0 + g) && b < 2.0)) throw DomainError("useful_integral: need 1 v (1+g) < b < 2");
  } else {
    if (!(b > g && b < std::min(1.0, 1.0 + g))) throw DomainError("useful_integral: need g < b < 1 ^ (1+g)");
  }
  if (!(std::abs(theta0) <= kPi + 1e-15)) throw DomainError("useful_integral: theta0 outside [-pi, pi]");

  const cplx I(0.0, 1.0);
  const bool on_cut = std::abs(std::abs(theta0) - kPi) < 1e-12;
  const double side = theta0 >= 0 ? 1.0 : -1.0;
  const cplx dir = std::polar(1.0, theta0);

  // (1+u)^g along the ray; past u = -1 the contour runs just above (theta0 = pi)
  // or just below (theta0 = -pi) the cut, which picks up e^{+- i pi g}.
  auto one_plus_u_pow = [&](double s) -> cplx {
    if (on_cut) {
      if (s < 1.0) return std::pow(1.0 - s, g);
      return std::pow(s - 1.0, g) * std::exp(side * I * kPi * g);
    }
    return std::pow(1.0 + s * dir, g);
  };
  // u^{-b} du = s^{-b} e^{i theta0 (1-b)} ds, and u^g = s^g e^{i g theta0}
  const cplx ray_factor = std::exp(I * theta0 * (1.0 - b));
  auto integrand_s = [&](double s) -> cplx {
    if (s <= 0.0) return 0.0;
    if (variant == IntegralVariant::shifted_one && s < 1e-8)
      return g * dir * std::pow(s, 1.0 - b) * ray_factor;  // (1+u)^g - 1 ~ g u
    cplx num;
    if (variant == IntegralVariant::shifted_one) {
      num = one_plus_u_pow(s) - 1.0;
    } else if (s > 1.0) {
      // (1+u)^g - u^g = u^g ((1 + 1/u)^g - 1), free of cancellation for large s
      const cplx ug = std::pow(s, g) * std::exp(I * g * theta0);
      num = ug * expm1_c(g * log1p_c(1.0 / (s * dir)));
    } else {
      num = one_plus_u_pow(s) - std::pow(s, g) * std::exp(I * g * theta0);
    }
    return num * std::pow(s, -b) * ray_factor;
  };

  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  auto integrate = [&](auto&& f, double lo, double hi) -> cplx {
    auto re = [&](double s) { return f(s).real(); };
    auto im = [&](double s) { return f(s).imag(); };
    if (std::isinf(hi)) return {es.integrate(re, lo, hi), es.integrate(im, lo, hi)};
    return {ts.integrate(re, lo, hi), ts.integrate(im, lo, hi)};
  };

  cplx total(0.0);
  if (!on_cut) {
    total = integrate(integrand_s, 0.0, 1.0) + integrate(integrand_s, 1.0, INFINITY);
  } else {
    // indentation of radius r around u = -1; the arc is integrated, not dropped
    const double r = 1e-3;
    total = integrate(integrand_s, 0.0, 1.0 - r) + integrate(integrand_s, 1.0 + r, INFINITY);
    const auto& gl = gauss_legendre(32);
    cplx arc(0.0);
    for (const auto& [x, w] : gl) {
      const double phi = 0.5 * side * kPi * (1.0 + x);  // 0 -> +-pi
      const cplx e = std::polar(1.0, phi);
      const cplx u = -1.0 + r * e;
      const cplx du = I * r * e * (0.5 * side * kPi * w);
      double argu = std::arg(u);
      if (side < 0 && argu > 0) argu -= 2.0 * kPi;
      const cplx log_u(std::log(std::abs(u)), argu);
      cplx num = std::pow(r, g) * std::exp(I * g * phi);
      num -= (variant == IntegralVariant::shifted_one) ? cplx(1.0) : std::exp(g * log_u);
      arc += num * std::exp(-b * log_u) * du;
    }
    total += arc;
  }
  const cplx closed = gamma_ratio({1.0 - b, -1.0 + b - g}, {-g});
  return {total, closed};
}

}  // namespace bcft
