#include <doctest.h>

#include <cmath>
#include <random>

#include "bcft/hypergeometric.hpp"
#include "oracle_values.hpp"
#include "test_util.hpp"

using namespace bcft;
using testutil::rel;

TEST_CASE("2F1 series on classical closed forms") {
  const HypergeometricParams any{{0.3, 0.2}, {-1.1, 0.0}, {0.6, 0.4}};
  CHECK(std::abs(gauss_2f1(any, 0.0) - 1.0) < 1e-15);
  const double t = 0.3;
  CHECK(rel(gauss_2f1({1.0, 1.0, 2.0}, t), -std::log(1.0 - t) / t) < 1e-12);
  CHECK(rel(gauss_2f1({0.7, 1.9, 1.9}, 0.4), std::pow(0.6, -0.7)) < 1e-12);
  for (const auto& p : oracle::hyp2f1_points) {
    CHECK(rel(gauss_2f1({p.A, p.B, p.Cc}, p.t), p.value) < 1e-12);
  }
}

TEST_CASE("2F1 term count grows with |t|") {
  const HypergeometricParams p{0.3, 0.6, 1.4};
  int last = 0;
  for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const int n = gauss_2f1_series(p, t).terms;
    CHECK(n >= last);
    last = n;
  }
  CHECK_THROWS_AS(gauss_2f1_series(p, 0.999999, 50), ConvergenceError);
}

TEST_CASE("Pfaff continuation agrees with the series") {
  const HypergeometricParams p{{0.3, 0.1}, {0.65, -0.2}, {1.37, 0.05}};
  const cplx t{-0.3, 0.2};
  CHECK(rel(gauss_2f1_pfaff(p, t), gauss_2f1(p, t)) < 1e-12);
}

TEST_CASE("connection 0 -> 1 reconstructs the t = 0 basis") {
  const HypergeometricParams p{0.3, 0.6, 1.4};
  const ConnectionMatrix N = connection_0_to_1(p);
  CHECK(std::abs(N.determinant()) > 1e-6);
  CHECK(std::isfinite(std::abs(N.determinant())));
  for (double t : {0.4, 0.5, 0.6}) {
    const auto b0 = basis_at_0(p, t);
    const auto b1 = basis_at_1(p, t);
    CHECK(rel(N.m11 * b1[0] + N.m21 * b1[1], b0[0]) < 1e-8);
    CHECK(rel(N.m12 * b1[0] + N.m22 * b1[1], b0[1]) < 1e-8);
  }
  CHECK_THROWS_AS(connection_0_to_1({0.3, 0.6, 2.0}), DegenerateError);
  CHECK_THROWS_AS(connection_0_to_1({0.3, 0.6, 1.9 + 1e-10}), DegenerateError);
}

TEST_CASE("connection 0 -> 1 on 50 random triples") {
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int done = 0;
  double worst = 0.0;
  while (done < 50) {
    const HypergeometricParams p{{u(rng), 0.5 * u(rng)}, {u(rng), 0.5 * u(rng)}, {1.0 + 0.8 * u(rng), 0.5 * u(rng)}};
    ConnectionMatrix N;
    try {
      N = connection_0_to_1(p);
    } catch (const DegenerateError&) {
      continue;
    }
    ++done;
    for (double t : {0.4, 0.5, 0.6}) {
      const auto b0 = basis_at_0(p, t);
      const auto b1 = basis_at_1(p, t);
      worst = std::max(worst, rel(N.m11 * b1[0] + N.m21 * b1[1], b0[0]));
      worst = std::max(worst, rel(N.m12 * b1[0] + N.m22 * b1[1], b0[1]));
    }
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("connection inf -> 0 and the composition with 0 -> 1") {
  const HypergeometricParams p{{0.3, 0.1}, {0.6, -0.2}, {1.4, 0.05}};
  const ConnectionMatrix M = connection_inf_to_0(p);
  const ConnectionMatrix N = connection_0_to_1(p);
  CHECK(std::abs(M.determinant()) > 1e-6);
  for (double t : {-1.5, -2.5, -4.0}) {
    const auto c0 = basis_at_0_minus(p, t);
    const auto d = basis_at_inf(p, t);
    CHECK(rel(M.m11 * c0[0] + M.m21 * c0[1], d[0]) < 1e-8);
    CHECK(rel(M.m12 * c0[0] + M.m22 * c0[1], d[1]) < 1e-8);
  }
  CHECK_THROWS_AS(connection_inf_to_0({0.3, 1.3, 1.4}), DegenerateError);

  // both matrices must be finite on a line approaching A - B = -1/2 from either side
  for (double e : {-1e-3, 0.0, 1e-3}) {
    const ConnectionMatrix K = connection_inf_to_0({0.3, 0.8 + e, 1.4});
    CHECK(std::isfinite(std::abs(K.m11) + std::abs(K.m12) + std::abs(K.m21) + std::abs(K.m22)));
  }

  // Composition: at a point where both the infinity and the 1 series converge,
  // (inf -> 0) followed by (0 -> 1) must reproduce the infinity basis.  For
  // Im t > 0 the principal (-t)^{1-C} is t^{1-C} e^{-i pi (1-C)}.
  const cplx t{1.5, 0.5};
  const auto b1 = basis_at_1(p, t);
  const cplx c1 = N.m11 * b1[0] + N.m21 * b1[1];
  const cplx c2 = (N.m12 * b1[0] + N.m22 * b1[1]) * std::exp(cplx(0.0, -kPi) * (1.0 - p.C));
  const auto d = basis_at_inf(p, t);
  CHECK(rel(M.m11 * c1 + M.m21 * c2, d[0]) < 1e-7);
  CHECK(rel(M.m12 * c1 + M.m22 * c2, d[1]) < 1e-7);
}

TEST_CASE("useful integrals against the Gamma closed form") {
  struct Pt {
    double g, b;
    IntegralVariant v;
  };
  const Pt pts[] = {{0.5, 1.6, IntegralVariant::shifted_one},   {-0.7, 1.2, IntegralVariant::shifted_one},
                    {0.9, 1.95, IntegralVariant::shifted_one},  {0.2, 0.9, IntegralVariant::shifted_power},
                    {-0.8, 0.1, IntegralVariant::shifted_power}, {-0.3, 0.5, IntegralVariant::shifted_power}};
  const double thetas[] = {0.0, kPi / 2.0, kPi, -kPi, -2.0};
  for (const auto& pt : pts) {
    cplx at0;
    for (double th : thetas) {
      const UsefulIntegral r = useful_integral(pt.g, pt.b, th, pt.v);
      INFO("g = " << pt.g << " b = " << pt.b << " theta0 = " << th);
      CHECK(rel(r.numeric, r.closed_form) < 1e-8);
      if (th == 0.0) at0 = r.numeric;
      if (th == kPi / 2.0) CHECK(rel(r.numeric, at0) < 1e-8);
    }
  }
  const cplx expected = std::tgamma(-0.6) * std::tgamma(0.1) / std::tgamma(-0.5);
  CHECK(rel(useful_integral(0.5, 1.6, 0.0, IntegralVariant::shifted_one).closed_form, expected) < 1e-13);
  CHECK_THROWS_AS(useful_integral(0.5, 1.2, 0.0, IntegralVariant::shifted_one), DomainError);
  CHECK_THROWS_AS(useful_integral(0.5, 0.9, 4.0, IntegralVariant::shifted_power), DomainError);
}
