#include "bcft/structure_constants.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "bcft/special_functions.hpp"
#include "contour_internal.hpp"

namespace bcft {

namespace {

const cplx I(0.0, 1.0);

cplx lgam(cplx z) { return complex_log_gamma(z); }
cplx ldg(cplx x, const LiouvilleCoupling& c) { return log_double_gamma_any(x, c); }
cplx lS(cplx x, const LiouvilleCoupling& c) { return log_double_sine(x, c); }

// ln[x Gamma_{gamma/2}(x)], finite at x = 0.
cplx log_x_double_gamma(cplx x, const LiouvilleCoupling& c) {
  const double a = c.half();
  return ldg(x + a, c) + std::log(2.0 / c.gamma) + lgam(1.0 + a * x) + (-a * x + 0.5) * std::log(a) -
         0.5 * std::log(2.0 * kPi);
}

}  // namespace

cplx mu_from_sigma(cplx sigma, const LiouvilleCoupling& c) {
  return std::exp(I * kPi * c.gamma * (sigma - c.Q() / 2.0));
}

cplx sigma_from_mu(cplx mu, const LiouvilleCoupling& c) {
  if (mu == cplx(0.0)) throw BranchError("sigma_from_mu: mu = 0 sits at sigma = i infinity");
  // mu = exp(i pi gamma (sigma - Q/2)), log principal
  const cplx lmu(std::log(std::abs(mu)), std::arg(mu));
  return c.Q() / 2.0 + lmu / (I * kPi * c.gamma);
}

SigmaTriple sigmas_from_mus(const MuTriple& m, const LiouvilleCoupling& c) {
  return {sigma_from_mu(m.mu1, c), sigma_from_mu(m.mu2, c), sigma_from_mu(m.mu3, c)};
}

bool half_space_condition(const MuTriple& m) {
  const std::array<cplx, 3> mus{m.mu1, m.mu2, m.mu3};
  const cplx sum = m.mu1 + m.mu2 + m.mu3;
  // The normal v = e^{i phi} must have Re v > 0: then the boundary is not
  // the real axis and the open half-space misses (-inf, 0).  Feasible phi
  // form an intersection of arcs whose ends are arg(mu_i) +- pi/2, so the
  // ends and the midpoints between consecutive ends are enough to test.
  std::vector<double> cand{-kPi / 2.0, 0.0, kPi / 2.0};
  for (const cplx& mu : mus) {
    if (mu == cplx(0.0)) continue;
    for (double s : {-1.0, 1.0}) {
      double phi = std::arg(mu) + s * kPi / 2.0;
      if (phi > kPi) phi -= 2.0 * kPi;
      if (phi <= -kPi) phi += 2.0 * kPi;
      cand.push_back(phi);
    }
  }
  std::sort(cand.begin(), cand.end());
  const std::size_t n = cand.size();
  for (std::size_t i = 0; i + 1 < n; ++i) cand.push_back(0.5 * (cand[i] + cand[i + 1]));

  for (double phi : cand) {
    if (!(phi > -kPi / 2.0 + 1e-12 && phi < kPi / 2.0 - 1e-12)) continue;
    const cplx vbar = std::polar(1.0, -phi);
    bool ok = true;
    for (const cplx& mu : mus)
      if ((mu * vbar).real() < -1e-13 * std::abs(mu)) ok = false;
    if (ok && (sum * vbar).real() > 1e-13 * (std::abs(m.mu1) + std::abs(m.mu2) + std::abs(m.mu3)))
      return true;
  }
  return false;
}

MuTriple make_mu_triple(cplx mu1, cplx mu2, cplx mu3) {
  MuTriple m{mu1, mu2, mu3, false};
  m.half_space_ok = half_space_condition(m);
  return m;
}

cplx conformal_weight(cplx beta, const LiouvilleCoupling& c) { return beta / 2.0 * (c.Q() - beta / 2.0); }

cplx bar_U(cplx alpha, const LiouvilleCoupling& c) {
  const double g = c.gamma, Q = c.Q();
  const cplx log_base = -(g * alpha / 2.0) * std::log(2.0) + std::log(2.0 * kPi) - std::lgamma(1.0 - g * g / 4.0);
  return std::exp((2.0 / g) * (Q - alpha) * log_base + lgam(g * alpha / 2.0 - g * g / 4.0));
}

cplx bar_G(cplx alpha, cplx beta, const LiouvilleCoupling& c) {
  const double g = c.gamma, Q = c.Q();
  const cplx log_base =
      (g / 2.0) * (beta / 2.0 - alpha) * std::log(2.0) + std::log(2.0 * kPi) - std::lgamma(1.0 - g * g / 4.0);
  cplx l = (2.0 / g) * (Q - alpha - beta / 2.0) * log_base;
  l += lgam(g * alpha / 2.0 + g * beta / 4.0 - g * g / 4.0);
  l += ldg(alpha - beta / 2.0, c) + ldg(alpha + beta / 2.0, c) + 2.0 * ldg(Q - beta / 2.0, c);
  l -= ldg(Q - beta, c) + 2.0 * ldg(alpha, c) + ldg(cplx(Q), c);
  return std::exp(l);
}

cplx bar_R(cplx beta, cplx s1, cplx s2, const LiouvilleCoupling& c) {
  const double g = c.gamma, Q = c.Q();
  const cplx x = Q - beta;
  cplx l = ((2.0 / g) * x - 0.5) * std::log(2.0 * kPi) + ((g / 2.0) * x - 0.5) * std::log(2.0 / g) -
           (2.0 / g) * x * std::lgamma(1.0 - g * g / 4.0);
  // (Q - beta) Gamma(Q - beta) together, so that beta = Q is a regular point
  l += ldg(beta - g / 2.0, c) - log_x_double_gamma(x, c);
  l += I * kPi * (s1 + s2 - Q) * x;
  l -= lS(beta / 2.0 + s2 - s1, c) + lS(beta / 2.0 + s1 - s2, c);
  return std::exp(l);
}

cplx bar_H_log_prefactor(const BetaTriple& b, const SigmaTriple& s, const LiouvilleCoupling& c) {
  const double g = c.gamma, Q = c.Q();
  const cplx b1 = b.beta1, b2 = b.beta2, b3 = b.beta3, bb = b.beta_bar;
  const cplx s1 = s.sigma1, s2 = s.sigma2, s3 = s.sigma3;
  const cplx p = (2.0 * Q - bb) / g;
  cplx l = (p + 1.0) * std::log(2.0 * kPi) + ((g / 2.0 - 2.0 / g) * (Q - bb / 2.0) - 1.0) * std::log(2.0 / g) -
           p * std::lgamma(1.0 - g * g / 4.0);
  l += ldg(2.0 * Q - bb / 2.0, c) + ldg((b1 + b3 - b2) / 2.0, c) + ldg(Q - (b1 + b2 - b3) / 2.0, c) +
       ldg(Q - (b2 + b3 - b1) / 2.0, c);
  l -= ldg(cplx(Q), c) + ldg(Q - b1, c) + ldg(Q - b2, c) + ldg(Q - b3, c);
  const cplx phase = -(2.0 * Q - b1 / 2.0 - s1 - s2) * (Q - b1 / 2.0 - s1 - s2) +
                     (Q + b2 / 2.0 - s2 - s3) * (b2 / 2.0 - s2 - s3) +
                     (Q + b3 / 2.0 - s1 - s3) * (b3 / 2.0 - s1 - s3) - 2.0 * s3 * (2.0 * s3 - Q);
  l += I * (kPi / 2.0) * phase;
  l -= lS(b1 / 2.0 + s1 - s2, c) + lS(b3 / 2.0 + s3 - s1, c);
  return l;
}

namespace {

// 1/Gamma(z) with the zeros at non-positive integers made exact.
cplx rgamma(cplx z) {
  const double k = std::round(z.real());
  if (k <= 0.0 && std::abs(z - cplx(k, 0.0)) < 1e-14) return 0.0;
  return std::exp(-lgam(z));
}

}  // namespace

HValue bar_H_detailed(const BetaTriple& b, const SigmaTriple& s, const LiouvilleCoupling& c,
                      const ContourOptions& opt) {
  const cplx rg = rgamma((b.beta_bar - 2.0 * c.Q()) / c.gamma);
  const detail::ScaledContour J = detail::contour_J_scaled(b, s, c, opt);
  if (rg == cplx(0.0)) return {0.0, 0.0};
  const cplx l = bar_H_log_prefactor(b, s, c) + std::log(rg) + J.log_scale;
  const cplx f = std::exp(l);
  return {f * J.mantissa, std::abs(f) * J.abs_error_scaled};
}

cplx bar_H(const BetaTriple& b, const SigmaTriple& s, const LiouvilleCoupling& c, const ContourOptions& opt) {
  return bar_H_detailed(b, s, c, opt).value;
}

cplx bar_H_special_value(cplx beta2, cplx beta3, const SigmaTriple& s, const LiouvilleCoupling& c,
                         const ContourOptions& opt) {
  // H is analytic in beta1 across 2Q - beta2 - beta3 (the zero of
  // 1/Gamma((beta_bar - 2Q)/gamma) cancels the pinch of the contour), so a
  // symmetric four-point stencil removes the odd terms and the h^2 term.
  // Other singularities of H can sit a few 1e-2 away in beta1, so the h^4
  // error is removed as well from two stencil widths.
  const cplx b1 = 2.0 * c.Q() - beta2 - beta3;
  auto H = [&](double d) { return bar_H(BetaTriple::make(b1 + d, beta2, beta3), s, c, opt); };
  auto stencil = [&](double h) {
    const cplx e1 = H(h) + H(-h), e2 = H(2.0 * h) + H(-2.0 * h);
    return (4.0 * e1 - e2) / 6.0;
  };
  const double h = 5e-3;
  return (16.0 * stencil(h / 2.0) - stencil(h)) / 15.0;
}

cplx bar_H_interval(const BetaTriple& b, const LiouvilleCoupling& c) {
  const double g = c.gamma, Q = c.Q();
  const cplx b1 = b.beta1, b2 = b.beta2, b3 = b.beta3, bb = b.beta_bar;
  const cplx p = (2.0 * Q - bb) / g;
  cplx l = (p + 1.0) * std::log(2.0 * kPi) + ((g / 2.0 - 2.0 / g) * (Q - bb / 2.0) - 1.0) * std::log(2.0 / g) -
           p * std::lgamma(1.0 - g * g / 4.0);
  // Gamma_{gamma/2}(-gamma p/2) / Gamma(-p), through the 2/gamma shift so that
  // integer p (a zero of 1/Gamma against a double gamma pole) stays finite
  l += ldg(bb / 2.0 - Q + 2.0 / g, c) + (p + 0.5) * std::log(2.0 / g) - 0.5 * std::log(2.0 * kPi);
  l += ldg((b1 + b3 - b2) / 2.0, c) + ldg((b2 + b3 - b1) / 2.0, c) + ldg(Q - (b1 + b2 - b3) / 2.0, c);
  l -= ldg(cplx(Q), c) + ldg(Q - b1, c) + ldg(Q - b2, c) + ldg(b3, c);
  return std::exp(l);
}

double interval_log_moment_M(double p, double a, double b, const LiouvilleCoupling& c) {
  const double g = c.gamma, t = 4.0 / (g * g), u = 2.0 / (g * g);
  if (p == 0.0) return 0.0;
  if (!(a > -1.0 && b > -1.0)) throw DomainError("interval moment: need a, b > -1");
  if (!(p < t && 1.0 - p * g * g / 4.0 > 0.0)) throw DomainError("interval moment: p beyond the existence range");
  double lm = p * std::log(2.0 * kPi) - p * (3.0 * (1.0 + g * g / 4.0) + 2.0 * (a + b)) * std::log(2.0);
  lm += 0.5 * p * p * g * g * std::log(2.0);  // lognormal factor
  lm += std::lgamma(1.0 - p * g * g / 4.0) - p * std::lgamma(1.0 - g * g / 4.0);
  // X_j = beta22^{-1}, so E[X_j^p] is the (-p)-th moment of beta22
  lm += beta22_log_moment(-p, 1.0, t, 1.0 + t * (1.0 + a), u * (b - a), u * (b - a));
  lm += beta22_log_moment(-p, 1.0, t, 1.0 + u * (2.0 + a + b), 0.5, u);
  lm += beta22_log_moment(-p, 1.0, t, 1.0 + t, 0.5 + u * (1.0 + a + b), 0.5 + u * (1.0 + a + b));
  return lm;
}

double interval_moment_M(double p, double a, double b, const LiouvilleCoupling& c) {
  return std::exp(interval_log_moment_M(p, a, b, c));
}

double circle_log_moment(double p, double beta, const LiouvilleCoupling& c) {
  const double g = c.gamma, t = 4.0 / (g * g);
  if (p == 0.0) return 0.0;
  if (!(p < t && 1.0 - p * g * g / 4.0 > 0.0)) throw DomainError("circle moment: p beyond the existence range");
  double lm = p * (g * g / 4.0) * std::log(t) - p * std::lgamma(1.0 - g * g / 4.0);
  lm += beta22_log_moment(-p, 1.0, t, t, 1.0 - beta / g, 1.0 - beta / g);
  lm += beta10_log_moment(-p, t, -2.0 * beta / g + t + 1.0);
  return lm;
}

double circle_moment(double p, double beta, const LiouvilleCoupling& c) {
  return std::exp(circle_log_moment(p, beta, c));
}

double circle_moment_via_G(double p, double beta, const LiouvilleCoupling& c) {
  const double alpha = c.Q() - beta / 2.0 - c.gamma * p / 2.0;
  const cplx v = disk_halfplane_factor(alpha, beta, c) * bar_G(alpha, beta, c) / std::pow(2.0 * kPi, p);
  return v.real();
}

cplx disk_halfplane_factor(cplx alpha, cplx beta, const LiouvilleCoupling& c) {
  return std::exp((alpha - beta / 2.0) * (c.Q() - alpha - beta / 2.0) * std::log(2.0));
}

cplx unbarred(CorrelatorKind kind, cplx v, const CorrelatorParams& p, const LiouvilleCoupling& c) {
  const double g = c.gamma, Q = c.Q();
  switch (kind) {
    case CorrelatorKind::U:
      if (!(p.mu_B > 0.0)) throw DomainError("U needs mu_B > 0");
      return (2.0 / g) * std::exp(lgam(2.0 * (p.alpha - Q) / g) + (2.0 * (Q - p.alpha) / g) * std::log(p.mu_B)) * v;
    case CorrelatorKind::G: {
      if (!(p.mu_B > 0.0)) throw DomainError("G needs mu_B > 0");
      const cplx e = (2.0 * p.alpha + p.beta - 2.0 * Q) / g;
      return (2.0 / g) * std::exp(lgam(e) - e * std::log(p.mu_B)) * v;
    }
    case CorrelatorKind::R:
      return -std::exp(lgam(1.0 - 2.0 * (Q - p.beta) / g)) * v;
    case CorrelatorKind::H:
      return (2.0 / g) * std::exp(lgam((p.betas.beta_bar - 2.0 * Q) / g)) * v;
  }
  throw DomainError("unknown correlator kind");
}

cplx structure_constant(CorrelatorKind kind, const CorrelatorParams& p, const LiouvilleCoupling& c,
                        const ContourOptions& opt) {
  switch (kind) {
    case CorrelatorKind::U:
      return unbarred(kind, bar_U(p.alpha, c), p, c);
    case CorrelatorKind::G:
      return unbarred(kind, bar_G(p.alpha, p.beta, c), p, c);
    case CorrelatorKind::R:
      return unbarred(kind, bar_R(p.beta, p.sigmas.sigma1, p.sigmas.sigma2, c), p, c);
    case CorrelatorKind::H:
      return unbarred(kind, bar_H(p.betas, p.sigmas, c, opt), p, c);
  }
  throw DomainError("unknown correlator kind");
}

namespace {

void require_bulk(cplx z) {
  if (!(z.imag() > 0.0)) throw DomainError("bulk point must lie in the upper half-plane");
}

void require_boundary(cplx s) {
  if (std::abs(s.imag()) > 1e-12) throw DomainError("boundary point must be real");
}

double distance_checked(cplx a, cplx b) {
  const double d = std::abs(a - b);
  if (!(d > 0.0)) throw DomainError("coincident insertion points");
  return d;
}

}  // namespace

cplx assemble_correlator(CorrelatorKind kind, const std::vector<cplx>& x, const CorrelatorParams& p,
                         const LiouvilleCoupling& c, const ContourOptions& opt) {
  const std::size_t need[] = {1, 2, 2, 3};
  if (x.size() != need[static_cast<int>(kind)])
    throw DomainError(to_string(kind) + " takes " + std::to_string(need[static_cast<int>(kind)]) + " positions");
  const cplx C = structure_constant(kind, p, c, opt);
  auto D = [&](cplx b) { return conformal_weight(b, c); };
  switch (kind) {
    case CorrelatorKind::U: {
      require_bulk(x[0]);
      return C * std::exp(-2.0 * D(p.alpha) * std::log(distance_checked(x[0], std::conj(x[0]))));
    }
    case CorrelatorKind::G: {
      require_bulk(x[0]);
      require_boundary(x[1]);
      const double dzz = distance_checked(x[0], std::conj(x[0])), dzs = distance_checked(x[0], x[1]);
      return C * std::exp(-(2.0 * D(p.alpha) - D(p.beta)) * std::log(dzz) - 2.0 * D(p.beta) * std::log(dzs));
    }
    case CorrelatorKind::R: {
      require_boundary(x[0]);
      require_boundary(x[1]);
      return C * std::exp(-2.0 * D(p.beta) * std::log(distance_checked(x[0], x[1])));
    }
    case CorrelatorKind::H: {
      for (const cplx& s : x) require_boundary(s);
      const cplx d1 = D(p.betas.beta1), d2 = D(p.betas.beta2), d3 = D(p.betas.beta3);
      const double l12 = std::log(distance_checked(x[0], x[1]));
      const double l13 = std::log(distance_checked(x[0], x[2]));
      const double l23 = std::log(distance_checked(x[1], x[2]));
      return C * std::exp(-(d1 + d2 - d3) * l12 - (d1 + d3 - d2) * l13 - (d2 + d3 - d1) * l23);
    }
  }
  throw DomainError("unknown correlator kind");
}

std::string to_string(CorrelatorKind k) {
  switch (k) {
    case CorrelatorKind::U: return "U";
    case CorrelatorKind::G: return "G";
    case CorrelatorKind::R: return "R";
    case CorrelatorKind::H: return "H";
  }
  return "?";
}

CorrelatorKind correlator_kind_from_string(const std::string& s) {
  if (s == "U") return CorrelatorKind::U;
  if (s == "G") return CorrelatorKind::G;
  if (s == "R") return CorrelatorKind::R;
  if (s == "H") return CorrelatorKind::H;
  throw DomainError("unknown correlator kind '" + s + "'");
}

}  // namespace bcft
