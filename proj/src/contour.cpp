#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "bcft/quadrature.hpp"
#include "bcft/special_functions.hpp"
#include "bcft/structure_constants.hpp"
#include "contour_internal.hpp"

namespace bcft {

namespace {

const cplx I(0.0, 1.0);

// Integrand of J in the form
//   prod_k S(r - L_k) / prod_k S(Q + r - R_k) * exp(i pi w r),
// so the numerator poles sit on L_k - lattice and the denominator zeros on
// R_k + lattice.
struct Integrand {
  std::array<cplx, 3> L, R;
  cplx w;
  const LiouvilleCoupling* c;

  cplx log_f(cplx r) const {
    cplx acc = I * kPi * w * r;
    for (const cplx& l : L) acc += log_double_sine(r - l, *c);
    for (const cplx& rr : R) acc -= log_double_sine(c->Q() + r - rr, *c);
    return acc;
  }
};

Integrand make_integrand(const BetaTriple& b, const SigmaTriple& s, const LiouvilleCoupling& c) {
  const double Q = c.Q();
  const cplx b1 = b.beta1, b2 = b.beta2, b3 = b.beta3;
  const cplx s1 = s.sigma1, s2 = s.sigma2, s3 = s.sigma3;
  Integrand f;
  f.L = {-(Q - b2 / 2.0 + s3 - s2), -(b3 / 2.0 + s3 - s1), -(Q - b3 / 2.0 + s3 - s1)};
  f.R = {cplx(0.0), -(b1 / 2.0 - b2 / 2.0 + s3 - s1), -(Q - b1 / 2.0 - b2 / 2.0 + s3 - s1)};
  f.w = -b2 / 2.0 + s2 - s3;
  f.c = &c;
  return f;
}

struct Pole {
  cplx z;
  bool left;
};

std::vector<Pole> enumerate_poles(const Integrand& f, const LiouvilleCoupling& c, double re_lo, double re_hi) {
  const double a = c.half(), bb = c.dual();
  std::vector<Pole> out;
  auto add = [&](cplx z, bool left) {
    for (const Pole& p : out)
      if (p.left == left && std::abs(p.z - z) < 1e-9) return;  // higher order pole, one circle
    out.push_back({z, left});
  };
  for (const cplx& l : f.L)
    for (int m = 0; l.real() - m * bb >= re_lo; ++m)
      for (int n = 0; l.real() - m * bb - n * a >= re_lo; ++n) add(l - double(n) * a - double(m) * bb, true);
  for (const cplx& r : f.R)
    for (int m = 0; r.real() + m * bb <= re_hi; ++m)
      for (int n = 0; r.real() + m * bb + n * a <= re_hi; ++n) add(r + double(n) * a + double(m) * bb, false);
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (out[i].left != out[j].left && std::abs(out[i].z - out[j].z) < 1e-7)
        throw ContourCollisionError("left and right pole lattices collide near r = " +
                                    std::to_string(out[i].z.real()) + " + " + std::to_string(out[i].z.imag()) +
                                    "i");
  return out;
}

bool wrong_side(const Pole& p, double c) { return p.left ? p.z.real() > c : p.z.real() < c; }

// Sum of exp(terms) without overflow.
struct ScaledSum {
  double M = -std::numeric_limits<double>::infinity();
  cplx m{0.0};

  void add(cplx log_term) { add_scaled(log_term.real(), std::exp(I * log_term.imag())); }
  void add_scaled(double logmag, cplx unit) {
    if (logmag == -std::numeric_limits<double>::infinity()) return;
    if (logmag > M) {
      m *= std::exp(M - logmag);
      M = logmag;
    }
    m += unit * std::exp(logmag - M);
  }
  void add(const ScaledSum& o) {
    if (o.M == -std::numeric_limits<double>::infinity()) return;
    add_scaled(o.M + std::log(std::abs(o.m) + 1e-300), o.m / (std::abs(o.m) + 1e-300));
  }
  cplx at_scale(double M2) const {
    if (M == -std::numeric_limits<double>::infinity()) return 0.0;
    return m * std::exp(M - M2);
  }
};

double choose_abscissa(const std::vector<Pole>& poles, double lo, double hi, double center) {
  struct Cand {
    double c, score;
    int wrong;
  };
  std::vector<Cand> cands;
  const double step = 0.005;
  for (double c = lo; c <= hi + 1e-12; c += step) {
    double dmin = std::numeric_limits<double>::infinity();
    int wrong = 0;
    for (const Pole& p : poles) {
      dmin = std::min(dmin, std::abs(p.z.real() - c));
      wrong += wrong_side(p, c);
    }
    cands.push_back({c, std::min(dmin, 0.3), wrong});
  }
  double best = 0.0;
  for (const Cand& k : cands) best = std::max(best, k.score);
  // Any line at least half as far from the poles as the best one is fine;
  // prefer few residues, then distance, then staying near the corridor.
  const Cand* pick = nullptr;
  for (const Cand& k : cands) {
    if (k.score < 0.5 * best) continue;
    if (!pick || k.wrong < pick->wrong ||
        (k.wrong == pick->wrong &&
         (k.score > pick->score + 1e-12 ||
          (std::abs(k.score - pick->score) <= 1e-12 && std::abs(k.c - center) < std::abs(pick->c - center)))))
      pick = &k;
  }
  return pick ? pick->c : center;
}

}  // namespace

ContourSpec contour_geometry(const BetaTriple& b, const SigmaTriple& s, const LiouvilleCoupling& c) {
  const Integrand f = make_integrand(b, s, c);
  ContourSpec spec;
  spec.left_starts = f.L;
  spec.right_starts = f.R;
  double max_left = -std::numeric_limits<double>::infinity(), min_right = std::numeric_limits<double>::infinity();
  for (const cplx& l : f.L) max_left = std::max(max_left, l.real());
  for (const cplx& r : f.R) min_right = std::min(min_right, r.real());
  spec.gap = min_right - max_left;
  spec.abscissa = 0.5 * (min_right + max_left);
  return spec;
}

namespace detail {

ScaledContour contour_J_scaled(const BetaTriple& b, const SigmaTriple& s, const LiouvilleCoupling& c,
                               const ContourOptions& opt) {
  const double Q = c.Q();
  const double kappa_up = 2.0 * kPi * (Q - b.beta2 / 2.0 - s.sigma3 + s.sigma2).real();
  if (!(kappa_up > 0.0))
    throw ConvergenceError("contour integral diverges: Re(Q - sigma3 + sigma2 - beta2/2) <= 0");
  const double kappa_down = 2.0 * kPi * Q;

  const Integrand f = make_integrand(b, s, c);
  ScaledContour out;
  out.spec = contour_geometry(b, s, c);
  const double center = out.spec.abscissa;
  const double win_lo = center - 2.0, win_hi = center + 2.0;
  double lo = win_lo, hi = win_hi;
  if (opt.abscissa) {
    lo = std::min(lo, *opt.abscissa);
    hi = std::max(hi, *opt.abscissa);
  }
  const std::vector<Pole> poles = enumerate_poles(f, c, lo - 1.0, hi + 1.0);
  const double x0 = opt.abscissa ? *opt.abscissa : choose_abscissa(poles, win_lo, win_hi, center);
  out.spec.abscissa = x0;

  long evals = 0;
  auto log_f = [&](cplx r) {
    ++evals;
    return f.log_f(r);
  };

  // Residues of the poles that the straight line leaves on the wrong side.
  // Moving a left pole back to the left of the path adds +2 pi Res (the
  // factor 1/i of the measure turns 2 pi i into 2 pi); a right pole gives -2 pi Res.
  ScaledSum residues;
  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  for (const cplx& z : f.L) ymin = std::min(ymin, z.imag()), ymax = std::max(ymax, z.imag());
  for (const cplx& z : f.R) ymin = std::min(ymin, z.imag()), ymax = std::max(ymax, z.imag());
  constexpr int kCircle = 64;
  for (const Pole& p : poles) {
    if (!wrong_side(p, x0)) continue;
    double d_other = std::numeric_limits<double>::infinity();
    for (const Pole& q : poles)
      if (&q != &p && std::abs(q.z - p.z) > 1e-9) d_other = std::min(d_other, std::abs(q.z - p.z));
    const double rho = std::min({0.4 * d_other, 0.5 * std::abs(p.z.real() - x0), 0.25});
    ScaledSum res;
    for (int k = 0; k < kCircle; ++k) {
      const double th = 2.0 * kPi * k / kCircle;
      const cplx e = std::polar(1.0, th);
      res.add(log_f(p.z + rho * e) + cplx(0.0, th));
    }
    const double sign = p.left ? 1.0 : -1.0;
    res.m *= sign * 2.0 * kPi * rho / kCircle;
    residues.add(res);
    ++out.residues;
  }

  // Reference magnitude for the truncation test.
  double ref = residues.M == -std::numeric_limits<double>::infinity()
                   ? -std::numeric_limits<double>::infinity()
                   : residues.M + std::log(std::abs(residues.m) + 1e-300);
  double y_lo = ymin - 2.0, y_hi = ymax + 2.0;
  for (double y = y_lo; y <= y_hi; y += 0.25) ref = std::max(ref, log_f(cplx(x0, y)).real());
  const double cut = ref + std::log(0.01 * opt.tol);
  auto extend = [&](double& y, double dir, double kappa) {
    double prev = log_f(cplx(x0, y)).real();
    while (true) {
      const double next = log_f(cplx(x0, y + 0.5 * dir)).real();
      if (prev - std::log(kappa) < cut && next < prev) break;
      y += dir;
      if (std::abs(y) > opt.max_height)
        throw QuadratureError("contour truncation height exceeded max_height");
      prev = log_f(cplx(x0, y)).real();
    }
  };
  extend(y_hi, 1.0, kappa_up);
  extend(y_lo, -1.0, kappa_down);

  const auto& gl = gauss_legendre(opt.order);
  auto line = [&](int level) {
    const double target = opt.panel / std::pow(2.0, level);
    const int n = std::max(1, static_cast<int>(std::ceil((y_hi - y_lo) / target)));
    const double h = (y_hi - y_lo) / n;
    ScaledSum sum;
    for (int k = 0; k < n; ++k) {
      const double mid = y_lo + (k + 0.5) * h;
      for (const auto& [x, w] : gl) sum.add(log_f(cplx(x0, mid + 0.5 * h * x)) + std::log(0.5 * h * w));
    }
    return sum;
  };

  ScaledSum prev = line(0);
  double err = std::numeric_limits<double>::infinity();
  ScaledSum total;
  int level = 1;
  for (; level <= opt.max_doublings; ++level) {
    ScaledSum cur = line(level);
    ScaledSum t = residues;
    t.add(cur);
    const double M = std::max(t.M, prev.M);
    err = std::abs(cur.at_scale(M) - prev.at_scale(M));
    total = t;
    const double floor = 1e-15 * std::exp(ref - M) * (y_hi - y_lo);
    if (err <= opt.tol * std::abs(t.at_scale(M)) || err <= floor) {
      err *= std::exp(M - t.M);
      break;
    }
    err *= std::exp(M - t.M);
    prev = cur;
  }
  if (level > opt.max_doublings && err > 1e3 * opt.tol * std::abs(total.m))
    throw QuadratureError("contour quadrature did not settle after panel doubling");

  out.log_scale = total.M;
  out.mantissa = total.m;
  out.abs_error_scaled = err + std::exp(cut - total.M);
  out.spec.step = opt.panel / std::pow(2.0, std::min(level, opt.max_doublings));
  out.spec.height = std::max(std::abs(y_lo), std::abs(y_hi));
  out.evaluations = evals;
  return out;
}

}  // namespace detail

ContourResult contour_J(const BetaTriple& b, const SigmaTriple& s, const LiouvilleCoupling& c,
                        const ContourOptions& opt) {
  const detail::ScaledContour sc = detail::contour_J_scaled(b, s, c, opt);
  ContourResult r;
  const double e = std::exp(sc.log_scale);
  r.value = sc.mantissa * e;
  r.abs_error = sc.abs_error_scaled * e;
  r.spec = sc.spec;
  r.residues = sc.residues;
  r.evaluations = sc.evaluations;
  return r;
}

}  // namespace bcft
