// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bcft/cli.hpp"
#include "bcft/gmc_sim.hpp"
#include "bcft/hypergeometric.hpp"
#include "bcft/special_functions.hpp"
#include "bcft/structure_constants.hpp"
#include "bcft/verification.hpp"

using namespace bcft;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, double budget_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const Error& e) {
    o.pass = false;
    o.detail = e.name() + ": " + e.what();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_seconds > 0.0) o.require(secs < budget_seconds, "runtime " + sci(secs) + " s < " + sci(budget_seconds));
  if (!o.pass) ++failures;
  std::printf("%s  %2d  %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

Outcome special_functions() {
  Outcome o;
  double norm = 0.0, shift = 0.0, refl = 0.0, asym = 0.0;
  for (double g : {0.5, 1.0, 1.5, 1.9}) {
    const auto c = LiouvilleCoupling::make(g);
    const double Q = c.Q();
    norm = std::max(norm, std::abs(std::exp(log_double_gamma(Q / 2.0, c)) - 1.0));
    for (int i = 0; i < 20; ++i) {
      const cplx x(0.2 + (Q - 0.2) * (i + 0.5) / 20.0, -4.0 + 0.41 * i);
      for (double chi : {g / 2.0, 2.0 / g}) {
        const cplx l = log_double_gamma_any(x, c) - log_double_gamma_any(x + chi, c);
        const cplx r = complex_log_gamma(chi * x) + (0.5 - chi * x) * std::log(chi) - 0.5 * std::log(2.0 * kPi);
        shift = std::max(shift, std::abs(std::exp(l - r) - 1.0));
      }
      const cplx y(0.1 + (Q - 0.2) * i / 19.0, 0.3 * std::sin(1.7 * i));
      refl = std::max(refl, std::abs(std::exp(log_double_sine(y, c) + log_double_sine(Q - y, c)) - 1.0));
    }
    for (double im : {40.0, -40.0}) {
      const cplx x(0.7, im);
      asym = std::max(asym, std::abs(std::exp(log_double_sine(x, c)) / double_sine_asymptotic(x, c) - 1.0));
    }
  }
  o.require(norm < 1e-10, "Gamma(Q/2)=1 err " + sci(norm));
  o.require(shift < 1e-9, "shift eqs " + sci(shift) + " (4 gamma x 20 x 2)");
  o.require(refl < 1e-9, "S(x)S(Q-x)=1 err " + sci(refl));
  o.require(asym < 1e-6, "asymptotic ratio err " + sci(asym));
  return o;
}

Outcome hypergeometric() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int triples = 0;
  double worst = 0.0;
  while (triples < 50) {
    const HypergeometricParams p{{u(rng), 0.5 * u(rng)}, {u(rng), 0.5 * u(rng)}, {1.0 + 0.8 * u(rng), 0.5 * u(rng)}};
    ConnectionMatrix N;
    try {
      N = connection_0_to_1(p);
    } catch (const DegenerateError&) {
      continue;
    }
    ++triples;
    for (double t : {0.4, 0.5, 0.6}) {
      const auto b0 = basis_at_0(p, t);
      const auto b1 = basis_at_1(p, t);
      worst = std::max({worst, rel(N.m11 * b1[0] + N.m21 * b1[1], b0[0]), rel(N.m12 * b1[0] + N.m22 * b1[1], b0[1])});
    }
  }
  o.require(worst < 1e-7, "connection residual " + sci(worst) + " on 50 triples");

  struct Pt {
    double g, b, theta;
    IntegralVariant v;
  };
  const Pt grid[] = {{0.5, 1.6, 0.0, IntegralVariant::shifted_one},         {0.5, 1.6, kPi / 2.0, IntegralVariant::shifted_one},
                     {-0.7, 1.2, kPi, IntegralVariant::shifted_one},        {0.9, 1.95, -kPi, IntegralVariant::shifted_one},
                     {0.1, 1.4, -1.0, IntegralVariant::shifted_one},        {0.2, 0.9, 0.0, IntegralVariant::shifted_power},
                     {0.2, 0.9, kPi / 2.0, IntegralVariant::shifted_power}, {-0.8, 0.1, kPi, IntegralVariant::shifted_power},
                     {-0.3, 0.5, -kPi, IntegralVariant::shifted_power},     {0.6, 0.8, 2.0, IntegralVariant::shifted_power}};
  double wi = 0.0;
  for (const auto& p : grid) {
    const UsefulIntegral r = useful_integral(p.g, p.b, p.theta, p.v);
    wi = std::max(wi, rel(r.numeric, r.closed_form));
  }
  o.require(wi < 1e-7, "useful integrals " + sci(wi) + " on 10 points");
  return o;
}

Outcome anchors() {
  Outcome o;
  double u = 0.0;
  for (double g : {0.5, 1.0, 1.5}) u = std::max(u, std::abs(bar_U(LiouvilleCoupling::make(g).Q(), LiouvilleCoupling::make(g)) - 1.0));
  const auto c1 = LiouvilleCoupling::make(1.0);
  const double pi_err = std::abs(bar_U(2.0, c1) - kPi);
  double gu = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double alpha = 0.8 + 0.17 * k;
    gu = std::max(gu, rel(bar_G(alpha, 0.0, c1), bar_U(alpha, c1)));
  }
  double r = 0.0;
  for (double g : {0.5, 1.0, 1.5}) {
    const auto c = LiouvilleCoupling::make(g);
    r = std::max(r, std::abs(bar_R(c.Q(), c.Q() / 2.0, c.Q() / 2.0, c) - 1.0));
  }
  const double Q = c1.Q();
  const double h = std::abs(bar_H_special_value(1.3, 1.3, {Q / 2.0, Q / 2.0, Q / 2.0}, c1) - 1.0);
  o.require(u < 1e-9, "U(Q)=1 err " + sci(u));
  o.require(pi_err < 1e-9, "U(2)=pi err " + sci(pi_err));
  o.require(gu < 1e-9, "G(a,0)=U(a) err " + sci(gu) + " on 10 alphas");
  o.require(r < 1e-9, "R(Q)=1 err " + sci(r));
  o.require(h < 1e-5, "H special value err " + sci(h));
  const VerificationReport sv = verify_identity("special_values");
  o.require(sv.pass, "special_values suite " + sci(sv.max_residual));
  return o;
}

Outcome suites() {
  Outcome o;
  for (const char* name : {"shift_G_gamma", "shift_G_dual", "shift_R_gamma", "shift_R_dual", "reflect_R", "shift_H_1",
                           "shift_H_2", "reflect_H", "scale_H"}) {
    const VerificationReport r = verify_identity(name);
    const bool is_h = std::string(name).find("_H") != std::string::npos;
    const double tol = is_h ? 1e-5 : 1e-7;
    o.require(r.max_residual < tol && r.n_points >= 20,
              std::string(name) + " " + sci(r.max_residual) + " n=" + std::to_string(r.n_points));
  }
  return o;
}

Outcome limit() {
  Outcome o;
  const VerificationReport r = verify_identity("limit_H_to_R");
  o.require(r.pass && r.max_residual < 1e-3 && r.n_points == 3,
            "max |ratio-1| " + sci(r.max_residual) + " at " + std::to_string(r.n_points) + " points");
  return o;
}

Outcome abscissa_shift() {
  Outcome o;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int found = 0, tries = 0;
  double worst = 0.0;
  while (found < 10 && tries < 500) {
    ++tries;
    const double g = tries % 2 ? 0.9 : 1.3;
    const auto c = LiouvilleCoupling::make(g);
    const double Q = c.Q();
    // a straight corridor needs beta_bar > 2Q with every beta below Q
    const double b1 = Q - 0.05 - 0.9 * u(rng), b2 = Q - 0.05 - 0.9 * u(rng), b3 = Q - 0.05 - 0.9 * u(rng);
    const SigmaTriple s{Q / 2.0 + cplx(0.1 * (u(rng) - 0.5), 0.3 * (u(rng) - 0.5)),
                        Q / 2.0 + cplx(0.1 * (u(rng) - 0.5), 0.3 * (u(rng) - 0.5)),
                        Q / 2.0 + cplx(0.1 * (u(rng) - 0.5), 0.3 * (u(rng) - 0.5))};
    const BetaTriple b = BetaTriple::make(b1, b2, b3);
    try {
      const ContourSpec geo = contour_geometry(b, s, c);
      if (!(geo.gap > 0.1)) continue;
      ContourOptions at, shifted;
      at.abscissa = geo.abscissa;
      shifted.abscissa = geo.abscissa + geo.gap / 4.0;
      const ContourResult j0 = contour_J(b, s, c, at), j1 = contour_J(b, s, c, shifted);
      if (j0.residues != 0 || j1.residues != 0) continue;
      worst = std::max(worst, rel(j1.value, j0.value));
      ++found;
    } catch (const Error&) {
      continue;
    }
  }
  o.require(found == 10, std::to_string(found) + " admissible points");
  o.require(worst < 1e-7, "max relative change " + sci(worst));
  return o;
}

Outcome monte_carlo() {
  Outcome o;
  CircleFieldConfig circle;
  circle.n_modes = 1024;
  const long n = 100000;
  std::uint64_t seed = 1;
  for (double g : {0.5, 1.0}) {
    for (double p : {-0.5, 0.5}) {
      const double exact = std::exp(std::lgamma(1.0 - p * g * g / 4.0) - p * std::lgamma(1.0 - g * g / 4.0));
      const Extrapolated e = circle_moment_extrapolated(g, p, 0.0, circle, n, seed++, 1.0);
      const double z = compare(e.extrapolated, exact);
      const double re = std::abs(e.extrapolated.mean.real() / exact - 1.0);
      char buf[96];
      std::snprintf(buf, sizeof buf, "FB g=%.1f p=%+.1f z=%.2f rel=%.1e", g, p, z, re);
      o.require(z < 3.0 && re < 0.02, buf);
    }
  }
  {
    const auto c = LiouvilleCoupling::make(0.8);
    const Extrapolated e = circle_moment_extrapolated(0.8, 0.5, 0.5, circle, n, seed++, 1.0);
    const double z = compare(e.extrapolated, circle_moment(0.5, 0.5, c));
    char buf[64];
    std::snprintf(buf, sizeof buf, "insertion z=%.2f", z);
    o.require(z < 3.0, buf);
  }
  {
    const auto c = LiouvilleCoupling::make(1.0);
    IntervalFieldConfig interval;
    interval.n_grid = 256;
    for (auto [a, b] : {std::pair{0.0, 0.0}, std::pair{0.2, -0.1}}) {
      const Extrapolated e = interval_moment_extrapolated(1.0, 0.5, a, b, interval, n, seed++, 1.0);
      const double z = compare(e.extrapolated, interval_moment_M(0.5, a, b, c));
      char buf[64];
      std::snprintf(buf, sizeof buf, "interval a=%.1f b=%.1f z=%.2f", a, b, z);
      o.require(z < 3.0, buf);
    }
  }
  return o;
}

Outcome tail() {
  Outcome o;
  std::vector<double> u;
  for (int k = 0; k <= 48; ++k) u.push_back(std::pow(10.0, -1.0 + 0.125 * k));
  const TailEstimate t = tail_probability_mc(1.0, 1.8, 1.0, 1.0, u, TailFieldConfig{}, 1000000, 1);
  const double target = -2.0 * (LiouvilleCoupling::make(1.0).Q() - 1.8);
  const double err = std::abs(t.slope / target - 1.0);
  char buf[128];
  std::snprintf(buf, sizeof buf, "slope %.4f vs %.4f (rel %.3f) over u in [%.3g, %.3g]", t.slope, target, err,
                t.fit_range.first, t.fit_range.second);
  o.require(err < 0.1, buf);
  return o;
}

Outcome interval_cross_check() {
  Outcome o;
  const auto c = LiouvilleCoupling::make(1.0);
  const double g = c.gamma, Q = c.Q();
  const double pts[10][3] = {{0.5, 0.0, 0.0},   {0.5, 0.2, -0.1}, {-0.5, 0.1, 0.1}, {1.0, 0.0, 0.3},
                             {1.5, -0.2, 0.1},  {-1.2, 0.4, 0.2}, {0.25, -0.3, -0.4}, {2.0, 0.5, 0.5},
                             {-0.8, -0.1, 0.6}, {1.2, 0.3, -0.25}};
  double worst = 0.0;
  for (const auto& q : pts) {
    const double p = q[0], a = q[1], b = q[2];
    const double b1 = -2.0 * a / g, b2 = -2.0 * b / g, b3 = 2.0 * Q - g * p - b1 - b2;
    worst = std::max(worst, rel(bar_H_interval(BetaTriple::make(b1, b2, b3), c), interval_moment_M(p, a, b, c)));
  }
  o.require(worst < 1e-8, "max relative difference " + sci(worst) + " on 10 (p,a,b)");
  return o;
}

Outcome determinism() {
  Outcome o;
  auto run = [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return std::to_string(code) + "\n" + out.str();
  };
  const std::vector<std::vector<std::string>> cases = {
      {"mc", "--check", "fyodorov_bouchaud", "--gamma", "1", "--p", "0.5", "--n-samples", "20000", "--seed", "42"},
      {"mc", "--check", "interval", "--gamma", "1", "--p", "0.5", "--a", "0.2", "--b", "-0.1", "--n-samples", "20000",
       "--seed", "42"},
      {"mc", "--check", "tail", "--gamma", "1", "--beta", "1.8", "--n-samples", "20000", "--seed", "42"}};
  for (const auto& args : cases) {
    const std::string a = run(args), b = run(args);
    o.require(a == b && a.size() > 100, args[2] + (a == b ? " identical" : " differs"));
  }
  return o;
}

}  // namespace

int main() {
  std::printf("bcft acceptance (worker threads: %d)\n", worker_count());
  criterion(1, "special functions", 10.0, special_functions);
  criterion(2, "hypergeometric", 30.0, hypergeometric);
  criterion(3, "exact-value anchors", 0.0, anchors);
  criterion(4, "functional-equation suites", 300.0, suites);
  criterion(5, "limit H -> R", 0.0, limit);
  criterion(6, "contour abscissa invariance", 0.0, abscissa_shift);
  criterion(7, "Monte Carlo cross-validation", 600.0, monte_carlo);
  criterion(8, "tail smoke test", 300.0, tail);
  criterion(9, "interval closed-form cross-check", 0.0, interval_cross_check);
  criterion(10, "determinism", 0.0, determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
