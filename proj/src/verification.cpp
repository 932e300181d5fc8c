#include "bcft/verification.hpp"

#include <gsl/gsl_qrng.h>

#include <algorithm>
#include <functional>
#include <map>
#include <memory>

#include "bcft/special_functions.hpp"

namespace bcft {

namespace {

const cplx I(0.0, 1.0);

cplx gam(cplx z) { return std::exp(complex_log_gamma(z)); }

struct Pair {
  cplx lhs, rhs;
};

// A suite maps a point of the unit cube to parameters, says whether they are
// admissible, and evaluates both sides of the identity.
struct Suite {
  std::vector<std::string> names;
  int dim = 0;
  std::function<std::vector<cplx>(const std::vector<double>&, const LiouvilleCoupling&)> map;
  std::function<bool(const std::vector<cplx>&, const LiouvilleCoupling&)> admissible;
  std::function<Pair(const std::vector<cplx>&, const LiouvilleCoupling&, const ContourOptions&)> eval;
};

double lerp(double lo, double hi, double u) { return lo + (hi - lo) * u; }

// sigma = Q/2 + x + i y with a small real offset so that the mu stay in a half plane
cplx sigma_at(double u, double v, const LiouvilleCoupling& c) {
  return c.Q() / 2.0 + lerp(-0.15, 0.15, u) + I * lerp(-0.4, 0.4, v);
}

// ---- bulk-boundary shifts ----

Suite shift_G(bool dual) {
  Suite s;
  s.names = {"alpha", "beta"};
  s.dim = 2;
  s.map = [](const std::vector<double>& u, const LiouvilleCoupling& c) -> std::vector<cplx> {
    const double alpha = lerp(c.Q() + 0.05, c.Q() + 1.5, u[0]);
    return {alpha, lerp(c.gamma - 2.0 * alpha + 0.05, c.Q() - 0.05, u[1])};
  };
  s.admissible = [](const std::vector<cplx>&, const LiouvilleCoupling&) { return true; };
  s.eval = [dual](const std::vector<cplx>& p, const LiouvilleCoupling& c, const ContourOptions&) -> Pair {
    const double g = c.gamma;
    const cplx a = p[0], b = p[1];
    if (!dual) {
      const cplx f = gam(1.0 - g * g / 4.0) / (std::pow(2.0, g * b / 2.0) * kPi) *
                     gam(g * a / 2.0 - g * b / 4.0 - g * g / 4.0) * std::pow(gam(1.0 - g * b / 4.0), 2) /
                     (gam(g * a / 2.0 + g * b / 4.0 - g * g / 4.0) * gam(1.0 - g * b / 2.0) *
                      gam(1.0 - g * b / 2.0 - g * g / 4.0));
      return {bar_G(a, b + g, c), f * bar_G(a, b, c)};
    }
    const double k = 4.0 / (g * g);
    const cplx f = g * g * std::pow(gam(1.0 - g * g / 4.0), k) /
                   (std::pow(2.0, 2.0 * b / g + 1.0) * std::pow(2.0 * kPi, k)) *
                   gam(2.0 * a / g - b / g - k) * std::pow(gam(1.0 - b / g), 2) /
                   (gam(-1.0 + 2.0 * a / g + b / g) * gam(1.0 - 2.0 * b / g) * gam(1.0 - 2.0 * b / g - k));
    return {bar_G(a, b + 4.0 / g, c), f * bar_G(a, b, c)};
  };
  return s;
}

// ---- boundary two-point function ----

std::vector<cplx> map_R(const std::vector<double>& u, const LiouvilleCoupling& c) {
  return {lerp(c.gamma / 2.0 + 0.05, c.Q() - 0.05, u[0]), sigma_at(u[1], u[2], c), sigma_at(u[3], u[4], c)};
}

Suite shift_R(bool dual) {
  Suite s;
  s.names = {"beta", "sigma1", "sigma2"};
  s.dim = 5;
  s.map = map_R;
  s.admissible = [](const std::vector<cplx>&, const LiouvilleCoupling&) { return true; };
  s.eval = [dual](const std::vector<cplx>& p, const LiouvilleCoupling& c, const ContourOptions&) -> Pair {
    const double g = c.gamma, Q = c.Q();
    const cplx b = p[0], s1 = p[1], s2 = p[2];
    if (!dual) {
      const cplx f = -gam(-1.0 + g * b / 2.0 - g * g / 4.0) * gam(2.0 - g * b / 2.0 - g * g / 4.0) /
                     std::pow(gam(1.0 - g * g / 4.0), 2) * kPi / std::sin(kPi * g * b / 2.0) * 4.0 *
                     std::exp(I * kPi * g * (s1 + s2 - Q)) * std::sin(kPi * g / 4.0 * (b + 2.0 * (s1 - s2))) *
                     std::sin(kPi * g / 4.0 * (b + 2.0 * (s2 - s1)));
      return {bar_R(b, s1, s2, c), f * bar_R(b + g, s1, s2, c)};
    }
    const double k = 8.0 / (g * g);
    const cplx f = std::pow(2.0 * kPi, k) / (g * g * (Q - b) * (g / 2.0 - b)) /
                   (std::pow(gam(1.0 - g * g / 4.0), k) * std::sin(2.0 * kPi * b / g) *
                    std::sin(kPi * (2.0 * b / g + 4.0 / (g * g)))) *
                   4.0 * std::exp(4.0 * I * kPi / g * (s1 + s2 - Q)) * std::sin(kPi / g * (b + 2.0 * (s1 - s2))) *
                   std::sin(kPi / g * (b + 2.0 * (s2 - s1)));
    return {bar_R(b, s1, s2, c), f * bar_R(b + 4.0 / g, s1, s2, c)};
  };
  return s;
}

Suite reflect_R() {
  Suite s;
  s.names = {"beta", "sigma1", "sigma2"};
  s.dim = 5;
  s.map = map_R;
  s.admissible = [](const std::vector<cplx>&, const LiouvilleCoupling&) { return true; };
  s.eval = [](const std::vector<cplx>& p, const LiouvilleCoupling& c, const ContourOptions&) -> Pair {
    const double g = c.gamma, Q = c.Q();
    const cplx b = p[0];
    const cplx lhs = bar_R(b, p[1], p[2], c) * bar_R(2.0 * Q - b, p[1], p[2], c);
    return {lhs, 1.0 / (gam(1.0 - 2.0 * (Q - b) / g) * gam(1.0 + 2.0 * (Q - b) / g))};
  };
  return s;
}

// ---- boundary three-point function ----

std::vector<cplx> map_H(const std::vector<double>& u, const LiouvilleCoupling& c) {
  const double hi = c.Q() - 0.2;
  return {lerp(0.3, hi, u[0]),        lerp(0.3, hi, u[1]),        lerp(0.3, hi, u[2]),
          sigma_at(u[3], u[4], c), sigma_at(u[5], u[6], c), sigma_at(u[7], u[8], c)};
}

// The probabilistic range: beta_i < Q, the moment exponent below the GMC
// bounds, and the mu in a common half plane.
bool admissible_H(const std::vector<cplx>& p, const LiouvilleCoupling& c) {
  const double g = c.gamma, Q = c.Q();
  double bmax = 0.0, bbar = 0.0;
  for (int i = 0; i < 3; ++i) {
    bmax = std::max(bmax, p[i].real());
    bbar += p[i].real();
  }
  const double pexp = (2.0 * Q - bbar) / g;
  if (!(bmax < Q && pexp < std::min(4.0 / (g * g), 2.0 * (Q - bmax) / g))) return false;
  const MuTriple mus = make_mu_triple(mu_from_sigma(p[3], c), mu_from_sigma(p[4], c), mu_from_sigma(p[5], c));
  return mus.half_space_ok;
}

cplx H_at(cplx b1, cplx b2, cplx b3, cplx s1, cplx s2, cplx s3, const LiouvilleCoupling& c,
          const ContourOptions& opt) {
  return bar_H(BetaTriple::make(b1, b2, b3), SigmaTriple{s1, s2, s3}, c, opt);
}

Suite suite_H(std::function<Pair(const std::vector<cplx>&, const LiouvilleCoupling&, const ContourOptions&)> f,
              bool with_chi) {
  Suite s;
  s.names = {"beta1", "beta2", "beta3", "sigma1", "sigma2", "sigma3"};
  s.dim = 9;
  s.map = map_H;
  s.admissible = admissible_H;
  s.eval = std::move(f);
  if (with_chi) {
    // half of the points use chi = gamma/2 and half chi = 2/gamma
    s.names.push_back("chi");
    s.dim = 10;
    s.map = [](const std::vector<double>& u, const LiouvilleCoupling& c) {
      auto p = map_H(u, c);
      p.push_back(u[9] < 0.5 ? c.gamma / 2.0 : 2.0 / c.gamma);
      return p;
    };
  }
  return s;
}

// common factor chi^2 (2 pi)^{2chi/gamma - 1} / Gamma(1-gamma^2/4)^{2chi/gamma}
cplx shift_K(double chi, double g) {
  return chi * chi * std::pow(2.0 * kPi, 2.0 * chi / g - 1.0) / std::pow(gam(1.0 - g * g / 4.0), 2.0 * chi / g);
}

Pair eval_shift_H_1(const std::vector<cplx>& p, const LiouvilleCoupling& c, const ContourOptions& opt) {
  const double g = c.gamma, Q = c.Q(), chi = p[6].real();
  const cplx b1 = p[0], b2 = p[1], b3 = p[2], s1 = p[3], s2 = p[4], s3 = p[5];
  const cplx q = (2.0 * Q - b1 - b2 - b3 + chi) / g;
  auto e2 = [&](cplx s) { return std::exp(2.0 * kPi * I * chi * (s - Q / 2.0)); };
  const cplx s2p = s2 + chi / 2.0;
  const cplx t1 = gam(chi * (b1 - chi)) * gam(1.0 - chi * b2 + chi * chi) /
                  (gam(chi * (b1 - chi + q * g / 2.0)) * gam(1.0 - chi * b2 + chi * chi - q * g * chi / 2.0));
  // the phase on mu2 is e^{i pi chi beta1}; with e^{2 i pi chi beta1} the identity fails
  const cplx t2 = shift_K(chi, g) * kPi * gam(-q + 2.0 * chi / g) * gam(1.0 - chi * b1) *
                  gam(1.0 - chi * b2 + chi * chi) * (e2(s1) - e2(s2) * std::exp(I * kPi * chi * b1)) /
                  (std::sin(kPi * chi * (b1 - chi)) * gam(-q) * gam(1.0 + q * g * chi / 2.0) *
                   gam(2.0 - chi * (b1 + b2 - 2.0 * chi + q * g / 2.0)));
  const cplx lhs = H_at(b1, b2 - chi, b3, s1, s2, s3, c, opt);
  const cplx rhs = t1 * H_at(b1 - chi, b2, b3, s1, s2p, s3, c, opt) - t2 * H_at(b1 + chi, b2, b3, s1, s2p, s3, c, opt);
  return {lhs, rhs};
}

Pair eval_shift_H_2(const std::vector<cplx>& p, const LiouvilleCoupling& c, const ContourOptions& opt) {
  const double g = c.gamma, Q = c.Q(), chi = p[6].real();
  const cplx b1 = p[0], b2 = p[1], b3 = p[2], s1 = p[3], s2 = p[4], s3 = p[5];
  const cplx q = (2.0 * Q - b1 - b2 - b3 + chi) / g;
  auto e2 = [&](cplx s) { return std::exp(2.0 * kPi * I * chi * (s - Q / 2.0)); };
  const cplx K = shift_K(chi, g);
  const cplx lhs = K * gam(-q + 2.0 * chi / g) * gam(1.0 - chi * b2) / gam(-q) *
                   (e2(s3) - e2(s2) * std::exp(I * kPi * chi * b2)) *
                   H_at(b1, b2 + chi, b3, s1, s2 + chi / 2.0, s3, c, opt);
  const cplx r1 = gam(chi * (b1 - chi)) /
                  (gam(-q * g * chi / 2.0) * gam(-1.0 + chi * (b1 + b2 - 2.0 * chi + q * g / 2.0))) *
                  H_at(b1 - chi, b2, b3, s1, s2, s3, c, opt);
  const cplx r2 = K * gam(2.0 - chi * b1 + chi * chi) * gam(-q + 2.0 * chi / g) * gam(1.0 - chi * b1) *
                  gam(chi * (b1 - Q)) /
                  (gam(-q) * gam(1.0 - chi * (b1 - chi + q * g / 2.0)) * gam(chi * b2 - chi * chi + q * g * chi / 2.0)) *
                  (e2(s1) - e2(s2) * std::exp(I * kPi * chi * (chi - b1))) * H_at(b1 + chi, b2, b3, s1, s2, s3, c, opt);
  return {lhs, r1 + r2};
}

Pair eval_reflect_H(const std::vector<cplx>& p, const LiouvilleCoupling& c, const ContourOptions& opt) {
  const double g = c.gamma, Q = c.Q();
  const cplx b1 = p[0], b2 = p[1], b3 = p[2];
  const cplx bbar = b1 + b2 + b3;
  const cplx f = -gam(2.0 * b1 / g - 4.0 / (g * g)) * gam((b2 + b3 - b1) / g) / gam((bbar - 2.0 * Q) / g) *
                 bar_R(b1, p[3], p[4], c);
  return {H_at(b1, b2, b3, p[3], p[4], p[5], c, opt), f * H_at(2.0 * Q - b1, b2, b3, p[3], p[4], p[5], c, opt)};
}

// shifting all three sigma by the same A only multiplies H by a phase
Pair eval_scale_H(const std::vector<cplx>& p, const LiouvilleCoupling& c, const ContourOptions& opt) {
  const double Q = c.Q();
  const cplx A = 0.1 + 0.2 * I * (p[0].real() - 1.0);
  const cplx bbar = p[0] + p[1] + p[2];
  const cplx lhs = H_at(p[0], p[1], p[2], p[3] + A, p[4] + A, p[5] + A, c, opt);
  return {lhs, std::exp(I * kPi * A * (2.0 * Q - bbar)) * H_at(p[0], p[1], p[2], p[3], p[4], p[5], c, opt)};
}

// ---- the quasi-random driver ----

struct Sobol {
  explicit Sobol(int dim) : q(gsl_qrng_alloc(gsl_qrng_sobol, static_cast<unsigned>(dim)), gsl_qrng_free), x(dim) {}
  const std::vector<double>& next() {
    gsl_qrng_get(q.get(), x.data());
    return x;
  }
  std::unique_ptr<gsl_qrng, void (*)(gsl_qrng*)> q;
  std::vector<double> x;
};

VerificationReport run_suite(const std::string& name, const Suite& s, const GridOptions& grid, double tol) {
  VerificationReport rep;
  rep.identity = name;
  rep.param_names = s.names;
  rep.tol = tol;
  for (double g : grid.gammas) {
    const LiouvilleCoupling c = LiouvilleCoupling::make(g);
    Sobol sob(s.dim);
    sob.next();  // the first Sobol point is a cube corner
    int accepted = 0;
    for (int draw = 0; draw < grid.max_draws_per_gamma && accepted < grid.points_per_gamma; ++draw) {
      const std::vector<cplx> p = s.map(sob.next(), c);
      if (!s.admissible(p, c)) {
        ++rep.n_rejected;
        continue;
      }
      Pair v;
      try {
        PoleDistanceProbe probe;
        v = s.eval(p, c, grid.contour);
        if (probe.min_distance() < grid.pole_distance) {
          ++rep.n_rejected;
          continue;
        }
      } catch (const PoleError&) {
        ++rep.n_rejected;
        continue;
      } catch (const ContourCollisionError&) {
        ++rep.n_rejected;
        continue;
      }
      PointResult pr;
      pr.gamma = g;
      pr.params = p;
      pr.lhs = v.lhs;
      pr.rhs = v.rhs;
      pr.residual = relative_residual(v.lhs, v.rhs);
      rep.points.push_back(std::move(pr));
      ++accepted;
    }
  }
  rep.n_points = static_cast<int>(rep.points.size());
  if (rep.n_points < grid.min_points)
    throw GridError(name + ": only " + std::to_string(rep.n_points) + " admissible points, need " +
                    std::to_string(grid.min_points));
  for (const auto& pr : rep.points) rep.max_residual = std::max(rep.max_residual, pr.residual);
  rep.pass = rep.max_residual < tol;
  return rep;
}

// Fixed points rather than a grid: the limit is taken along a line.
VerificationReport run_limit(const GridOptions& grid, double tol) {
  VerificationReport rep;
  rep.identity = "limit_H_to_R";
  rep.param_names = {"beta1", "beta2", "sigma1", "sigma2", "sigma3"};
  rep.tol = tol;
  struct Pt {
    double g, b1, b2, x, y;
  };
  const Pt pts[] = {{1.0, 2.2, 1.1, 0.0, 0.0}, {1.3, 1.9, 1.0, 0.05, 0.2}, {0.9, 2.3, 1.2, -0.05, -0.15}};
  for (const Pt& t : pts) {
    const LiouvilleCoupling c = LiouvilleCoupling::make(t.g);
    const double Q = c.Q();
    const SigmaTriple s{Q / 2.0, Q / 2.0 + t.x + I * t.y, Q / 2.0 - t.x};
    const LimitRatio lr = limit_H_to_R_ratio(t.b1, t.b2, s, c, 1e-2, grid.contour);
    PointResult pr;
    pr.gamma = t.g;
    pr.params = {t.b1, t.b2, s.sigma1, s.sigma2, s.sigma3};
    pr.lhs = lr.ratio;
    pr.rhs = 1.0;
    pr.residual = std::abs(lr.ratio - 1.0);
    rep.points.push_back(pr);
  }
  rep.n_points = static_cast<int>(rep.points.size());
  for (const auto& pr : rep.points) rep.max_residual = std::max(rep.max_residual, pr.residual);
  rep.pass = rep.max_residual < tol;
  return rep;
}

VerificationReport run_special(const GridOptions& grid, double tol) {
  VerificationReport rep;
  rep.identity = "special_values";
  rep.param_names = {"check", "a", "b", "c"};
  rep.tol = tol;
  auto add = [&](double g, double code, cplx a, cplx b, cplx cc, cplx value, cplx expected) {
    PointResult pr;
    pr.gamma = g;
    pr.params = {code, a, b, cc};
    pr.lhs = value;
    pr.rhs = expected;
    pr.residual = std::abs(value - expected) / std::max(1.0, std::abs(expected));
    rep.points.push_back(pr);
  };
  for (double g : grid.gammas) {
    const LiouvilleCoupling c = LiouvilleCoupling::make(g);
    const double Q = c.Q();
    // 0: Gamma_{gamma/2}(Q/2) = 1
    add(g, 0, Q / 2.0, 0.0, 0.0, std::exp(log_double_gamma(Q / 2.0, c)), 1.0);
    // 1: U(Q) = 1
    add(g, 1, Q, 0.0, 0.0, bar_U(Q, c), 1.0);
    // 2: G(alpha, 0) = U(alpha)
    for (double a : {Q + 0.3, Q + 0.9}) add(g, 2, a, 0.0, 0.0, bar_G(a, 0.0, c), bar_U(a, c));
    // 3: R(Q, mu1, mu2) = 1 for any mu
    for (double y : {0.0, 0.3}) {
      const cplx s1 = Q / 2.0 + I * y, s2 = Q / 2.0 - 0.1 - 0.5 * I * y;
      add(g, 3, s1, s2, 0.0, bar_R(Q, s1, s2, c), 1.0);
    }
    // 4: H at beta1 = 2Q - beta2 - beta3 equals 1
    const std::pair<double, double> b23[] = {{0.9, 0.6}, {Q - 0.9, Q - 1.1}};
    for (const auto& [b2, b3] : b23) {
      const SigmaTriple s{Q / 2.0 + 0.05, Q / 2.0 + 0.2 * I, Q / 2.0 - 0.1 * I};
      add(g, 4, b2, b3, s.sigma2, bar_H_special_value(b2, b3, s, c, grid.contour), 1.0);
    }
  }
  rep.n_points = static_cast<int>(rep.points.size());
  for (const auto& pr : rep.points) rep.max_residual = std::max(rep.max_residual, pr.residual);
  rep.pass = rep.max_residual < tol;
  return rep;
}

}  // namespace

const std::vector<std::string>& identity_names() {
  static const std::vector<std::string> names = {"shift_G_gamma", "shift_G_dual", "shift_R_gamma", "shift_R_dual",
                                                 "reflect_R",     "shift_H_1",    "shift_H_2",     "reflect_H",
                                                 "scale_H",       "limit_H_to_R", "special_values"};
  return names;
}

double default_tolerance(const std::string& identity) {
  static const std::map<std::string, double> tols = {
      {"shift_G_gamma", 1e-7}, {"shift_G_dual", 1e-7}, {"shift_R_gamma", 1e-7}, {"shift_R_dual", 1e-7},
      {"reflect_R", 1e-8},     {"shift_H_1", 1e-5},    {"shift_H_2", 1e-5},     {"reflect_H", 1e-5},
      {"scale_H", 1e-5},       {"limit_H_to_R", 1e-3}, {"special_values", 1e-5}};
  auto it = tols.find(identity);
  if (it == tols.end()) throw DomainError("unknown identity '" + identity + "'");
  return it->second;
}

double relative_residual(cplx a, cplx b) {
  const double den = std::abs(a) + std::abs(b);
  return den == 0.0 ? 0.0 : std::abs(a - b) / den;
}

LimitRatio limit_H_to_R_ratio(double beta1, double beta2, const SigmaTriple& s, const LiouvilleCoupling& c,
                              double eps, const ContourOptions& opt) {
  const double Q = c.Q();
  const cplx target = 2.0 * (Q - beta1) * bar_R(beta1, s.sigma1, s.sigma2, c);
  LimitRatio out;
  for (double e : {eps, eps / 2.0, eps / 4.0}) {
    const double beta3 = beta1 - beta2 + e;
    out.raw.push_back(e * bar_H(BetaTriple::make(beta1, beta2, beta3), s, c, opt) / target);
  }
  // exact for f0 + a eps + b eps^2
  out.ratio = (out.raw[0] - 6.0 * out.raw[1] + 8.0 * out.raw[2]) / 3.0;
  return out;
}

VerificationReport verify_identity(const std::string& name, const GridOptions& grid, std::optional<double> tol) {
  const double t = tol.value_or(default_tolerance(name));
  if (name == "shift_G_gamma") return run_suite(name, shift_G(false), grid, t);
  if (name == "shift_G_dual") return run_suite(name, shift_G(true), grid, t);
  if (name == "shift_R_gamma") return run_suite(name, shift_R(false), grid, t);
  if (name == "shift_R_dual") return run_suite(name, shift_R(true), grid, t);
  if (name == "reflect_R") return run_suite(name, reflect_R(), grid, t);
  if (name == "shift_H_1") return run_suite(name, suite_H(eval_shift_H_1, true), grid, t);
  if (name == "shift_H_2") return run_suite(name, suite_H(eval_shift_H_2, true), grid, t);
  if (name == "reflect_H") return run_suite(name, suite_H(eval_reflect_H, false), grid, t);
  if (name == "scale_H") return run_suite(name, suite_H(eval_scale_H, false), grid, t);
  if (name == "limit_H_to_R") return run_limit(grid, t);
  if (name == "special_values") return run_special(grid, t);
  throw DomainError("unknown identity '" + name + "'");
}

}  // namespace bcft
