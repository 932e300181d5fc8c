// Generated by tests/oracle/make_oracles.py -- do not edit by hand.
#pragma once
#include <complex>
namespace oracle {
using C = std::complex<double>;
inline const C loggamma_3p7_1p2i{1.2096321530032436081, 1.4270217020402786196};
struct DgPoint { double gamma; C x; C log_value; };
inline const DgPoint double_gamma_points[] = {
  {1.5, {1.0, 0.0}, {-0.021079784876852668488, 0.0}},
  {1.0, {1.75, 0.0}, {0.47146564014573939692, 0.0}},
  {0.5, {0.7, 0.4}, {-0.90882604247243298975, -0.60964415507025902749}},
  {1.2, {2.1, -1.3}, {1.0756493613472820088, -1.7481620916800732038}},
  {1.9, {0.45, 3.0}, {-4.3126138867783793198, 7.130667680979483615}},
  {1.0, {0.9, 5.0}, {-0.91555200080438964949, 20.894492967557345126}},
  {0.8, {3.9, 0.2}, {2.4429006487370561241, 0.072162223832277296987}},
  {1.3, {-0.6, 0.7}, {-1.9311157538326854905, -4.0346029095930193233}},
  {0.9, {0.35, -2.5}, {-5.6227414759713547813, -4.2967560139461400825}},
};
inline const double log_dg_gamma1_1p75_by_shift = 0.47146564014573939692;
inline const double beta22_g1_b0_2_b12_half_p0p3 = -0.020133333497856098419;
inline const double beta10_a4_b6_q1p5 = 0.59296993765601590476;
struct HypPoint { C A, B, Cc, t, value; };
inline const HypPoint hyp2f1_points[] = {
  {{0.3, 0.1}, {0.65, -0.2}, {1.37, 0.05}, {0.45, 0.3}, {1.077292354076505129, 0.073787091522383163163}},
  {{-1.2, 0.0}, {2.3, 0.0}, {0.7, 0.0}, {-0.6, 0.1}, {3.5855520320325074077, -0.46277705290374353026}},
  {{0.5, 1.5}, {0.25, 0.0}, {2.5, -1.0}, {0.8, 0.0}, {0.94753793428231423965, 0.11830737462547848913}},
};
inline const C barU_g1p3_a1p7{2.1429540380042264469, 0.0};
inline const C barG_g1p1_a1p9_b0p6{1.4484040062006777032, 0.0};
inline const C barR_g1p2_b1p6_s{9.4793033242314051068, 0.0};
inline const double interval_M_g1_p0p5_a0_b0 = 0.89213459702440423727;
inline const double interval_M_g1_p0p5_a0p2_bm0p1 = 0.86200698634800878404;
inline const double circle_insertion_g0p8_b0p5_p0p5 = 1.0030466973568689466;
inline const C barH_g1_b1p9_1p7_1p8{0.27591799876088695852, 0.000000000000000082221132784831378825};
}  // namespace oracle
