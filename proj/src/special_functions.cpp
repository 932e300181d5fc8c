#include "bcft/special_functions.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_gamma.h>

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "bcft/quadrature.hpp"

namespace bcft {

namespace {

thread_local double tl_min_pole_distance = std::numeric_limits<double>::infinity();
thread_local bool tl_probe_active = false;

struct GslHandlerOff {
  GslHandlerOff() { gsl_set_error_handler_off(); }
};
const GslHandlerOff gsl_handler_off;

}  // namespace

namespace detail {
void note_pole_distance(double d) {
  if (tl_probe_active && d < tl_min_pole_distance) tl_min_pole_distance = d;
}
}  // namespace detail

PoleDistanceProbe::PoleDistanceProbe()
    : saved_(tl_min_pole_distance), saved_active_(tl_probe_active) {
  tl_min_pole_distance = std::numeric_limits<double>::infinity();
  tl_probe_active = true;
}

PoleDistanceProbe::~PoleDistanceProbe() {
  double mine = tl_min_pole_distance;
  tl_probe_active = saved_active_;
  tl_min_pole_distance = saved_active_ ? std::min(saved_, mine) : saved_;
}

double PoleDistanceProbe::min_distance() const { return tl_min_pole_distance; }

cplx complex_log_gamma(cplx z) {
  if (z.real() <= 0.5) {
    double k = std::round(z.real());
    if (k <= 0.0) {
      double d = std::abs(z - cplx(k, 0.0));
      detail::note_pole_distance(d);
      if (d < 1e-14) throw PoleError("Gamma pole at z = " + std::to_string(k));
    }
  }
  gsl_sf_result lnr, arg;
  int status = gsl_sf_lngamma_complex_e(z.real(), z.imag(), &lnr, &arg);
  if (status != GSL_SUCCESS || !std::isfinite(lnr.val))
    throw PoleError("log Gamma failed at z = (" + std::to_string(z.real()) + ", " +
                    std::to_string(z.imag()) + ")");
  return {lnr.val, arg.val};
}

namespace {

// Fixed-node evaluator of the defining integral for one value of gamma.
//
// The ray t in R_+ is rotated to t = s e^{i theta}; the integrand is analytic
// in |arg t| < pi/2 and the rotation makes e^{-xt} decay even when Im x is
// large.  Only nine angles are used so every x-independent factor is
// tabulated once.  Near t = 0 the integrand is replaced by its Taylor
// series, which we build from the Bernoulli-type expansion of
// a t / (1 - e^{-a t}).
class DoubleGammaEvaluator {
 public:
  explicit DoubleGammaEvaluator(double gamma) : a_(gamma / 2.0), b_(2.0 / gamma), Q_(a_ + b_) {
    s_cut_ = std::min(0.02, 0.25 * 2.0 * kPi / std::max(a_, b_));
    build_series();
    const auto& gl = gauss_legendre(kOrder);
    for (int j = 0; j < kAngles; ++j) {
      double theta = (j - kAngles / 2) * kPi / 16.0;
      Ray& r = rays_[j];
      r.dir = std::polar(1.0, theta);
      double lo = s_cut_;
      cplx sa(0.0), sb(0.0), sc(0.0);
      while (lo < kSmax) {
        double hi = 2.0 * lo;
        Panel panel;
        panel.first = r.t.size();
        for (std::size_t k = 0; k < gl.size(); ++k) {
          double s = 0.5 * (hi + lo) + 0.5 * (hi - lo) * gl[k].first;
          cplx t = s * r.dir;
          cplx w = 0.5 * (hi - lo) * gl[k].second * r.dir;
          cplx D = (1.0 - std::exp(-a_ * t)) * (1.0 - std::exp(-b_ * t));
          r.t.push_back(t);
          r.w_over_tD.push_back(w / (t * D));
          // x-independent parts of the integrand, summed once
          sa += w * (-std::exp(-Q_ * t / 2.0) / (t * D));
          sb += w * (-std::exp(-t) / (2.0 * t));
          sc += w / (t * t);
        }
        panel.last = r.t.size();
        panel.s_lo = lo;
        r.panels.push_back(panel);
        lo = hi;
      }
      r.T = lo * r.dir;
      r.sum_a = sa;
      r.sum_b = sb;
      r.sum_c = sc;
    }
  }

  // Requires Re x > 0; the caller keeps x inside the well-conditioned strip.
  cplx log_direct(cplx x) const {
    double theta = -0.5 * std::arg(x);
    int j = static_cast<int>(std::lround(theta / (kPi / 16.0)));
    j = std::clamp(j, -kAngles / 2, kAngles / 2);
    const Ray& r = rays_[j + kAngles / 2];
    const cplx h = x - Q_ / 2.0;

    cplx acc = taylor_part(x, s_cut_ * r.dir);
    acc += r.sum_a + (h * h) * r.sum_b + h * r.sum_c;

    const double re_rate = (x * r.dir).real();
    for (const Panel& p : r.panels) {
      // |e^{-xt}/(tD)| at the panel start bounds everything beyond it
      if (re_rate * p.s_lo > 45.0) break;
      for (std::size_t k = p.first; k < p.last; ++k) acc += std::exp(-x * r.t[k]) * r.w_over_tD[k];
    }
    // analytic tail of (x - Q/2)/t^2 beyond the last node
    acc += h / r.T;
    return acc;
  }

  double a() const { return a_; }
  double b() const { return b_; }
  double Q() const { return Q_; }

 private:
  static constexpr int kAngles = 9;
  static constexpr int kOrder = 24;
  static constexpr double kSmax = 160.0;
  static constexpr int kSeries = 40;

  struct Panel {
    std::size_t first = 0, last = 0;
    double s_lo = 0.0;
  };
  struct Ray {
    cplx dir;
    std::vector<cplx> t, w_over_tD;
    std::vector<Panel> panels;
    cplx T, sum_a, sum_b, sum_c;
  };

  void build_series() {
    // (1 - e^{-s})/s = sum (-1)^k s^k/(k+1)!, invert it
    std::array<double, kSeries> f{}, g{};
    double fact = 1.0;
    for (int k = 0; k < kSeries; ++k) {
      fact *= (k + 1);
      f[k] = ((k % 2) ? -1.0 : 1.0) / fact;
    }
    g[0] = 1.0;
    for (int n = 1; n < kSeries; ++n) {
      double s = 0.0;
      for (int k = 1; k <= n; ++k) s += f[k] * g[n - k];
      g[n] = -s;
    }
    std::array<double, kSeries> ga{}, gb{};
    double pa = 1.0, pb = 1.0;
    for (int n = 0; n < kSeries; ++n) {
      ga[n] = g[n] * pa;
      gb[n] = g[n] * pb;
      pa *= a_;
      pb *= b_;
    }
    for (int n = 0; n < kSeries; ++n) {
      double s = 0.0;
      for (int k = 0; k <= n; ++k) s += ga[k] * gb[n - k];
      p_[n] = s;
    }
  }

  // Integral of the integrand over [0, tau] from the Taylor expansion
  // F(t) = sum_j c_j t^j.  Since ab = 1 we have 1/D(t) = P(t)/t^2.
  cplx taylor_part(cplx x, cplx tau) const {
    std::array<cplx, kSeries + 3> e{};
    cplx px(1.0), pq(1.0);
    double fact = 1.0;
    const cplx mx = -x, mq = -Q_ / 2.0;
    for (int k = 0; k < kSeries + 3; ++k) {
      if (k > 0) {
        fact *= k;
        px *= mx;
        pq *= mq;
      }
      e[k] = (k == 0) ? cplx(0.0) : (px - pq) / fact;
    }
    const cplx h2 = 0.5 * (Q_ / 2.0 - x) * (Q_ / 2.0 - x);
    cplx acc(0.0), taup = tau;
    double inv_fact = 1.0;
    for (int j = 0; j < kSeries; ++j) {
      // u_{j+3} = sum_{k=1}^{j+3} e_k p_{j+3-k}
      const int n = j + 3;
      cplx u(0.0);
      for (int k = 1; k <= n; ++k) {
        if (n - k >= kSeries) continue;
        u += e[k] * p_[n - k];
      }
      inv_fact /= (j + 1);
      const double sign = ((j + 1) % 2) ? -1.0 : 1.0;
      cplx c = u - h2 * sign * inv_fact;
      cplx term = c * taup / double(j + 1);
      acc += term;
      if (j > 6 && std::abs(term) < 1e-18 * (1.0 + std::abs(acc))) break;
      taup *= tau;
    }
    return acc;
  }

  double a_, b_, Q_, s_cut_;
  std::array<double, kSeries> p_{};
  std::array<Ray, kAngles> rays_;
};

const DoubleGammaEvaluator& evaluator_for(double gamma) {
  static std::mutex mu;
  static std::map<double, std::unique_ptr<DoubleGammaEvaluator>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(gamma);
  if (it != cache.end()) return *it->second;
  auto& slot = cache[gamma];
  slot = std::make_unique<DoubleGammaEvaluator>(gamma);
  return *slot;
}

constexpr double kStripLo = 0.3;

}  // namespace

PoleReport nearest_lattice_pole(cplx x, const LiouvilleCoupling& c, const SpecialFunctionOptions& opt) {
  const double a = c.half(), b = c.dual();
  PoleReport rep;
  // Only points with Re <= Re x + a few spacings can be nearest.
  const double re = x.real();
  const int mmax = re > 0 ? 1 : static_cast<int>(std::ceil(-re / b)) + 2;
  for (int m = 0; m <= mmax; ++m) {
    double rem = -re - m * b;
    int n0 = static_cast<int>(std::floor(rem / a));
    for (int n = std::max(0, n0 - 1); n <= std::max(0, n0 + 2); ++n) {
      cplx p(-n * a - m * b, 0.0);
      double d = std::abs(x - p);
      if (d < rep.distance) {
        rep.distance = d;
        rep.nearest_pole = p;
        rep.n = n;
        rep.m = m;
      }
    }
  }
  rep.is_pole = rep.distance < opt.pole_tolerance;
  return rep;
}

cplx log_double_gamma(cplx x, const LiouvilleCoupling& c) {
  if (!(x.real() > 0.0)) throw DomainError("log_double_gamma needs Re x > 0");
  return log_double_gamma_any(x, c);
}

cplx log_double_gamma_any(cplx x, const LiouvilleCoupling& c, const SpecialFunctionOptions& opt) {
  if (!is_finite(x)) throw DomainError("non-finite argument to double gamma");
  const PoleReport pr = nearest_lattice_pole(x, c, opt);
  detail::note_pole_distance(pr.distance);
  if (pr.is_pole)
    throw PoleError("double gamma pole at -" + std::to_string(pr.n) + "*gamma/2 - " +
                    std::to_string(pr.m) + "*2/gamma");

  const DoubleGammaEvaluator& ev = evaluator_for(c.gamma);
  const double b = ev.b(), Q = ev.Q();
  const double log_b = std::log(b), log_sqrt_2pi = 0.5 * std::log(2.0 * kPi);
  cplx acc(0.0);
  // Gamma(y)/Gamma(y + 2/gamma) = Gamma(b y) b^{-b y + 1/2} / sqrt(2 pi)
  auto log_ratio = [&](cplx y) {
    return complex_log_gamma(b * y) + (-b * y + 0.5) * log_b - log_sqrt_2pi;
  };
  while (x.real() < kStripLo) {
    acc += log_ratio(x);
    x += b;
  }
  while (x.real() > Q + kStripLo) {
    x -= b;
    acc -= log_ratio(x);
  }
  return acc + ev.log_direct(x);
}

cplx log_double_sine(cplx x, const LiouvilleCoupling& c, const SpecialFunctionOptions& opt) {
  const PoleReport zero = nearest_lattice_pole(c.Q() - x, c, opt);
  if (zero.is_pole) throw PoleError("double sine zero: log undefined");
  return log_double_gamma_any(x, c, opt) - log_double_gamma_any(c.Q() - x, c, opt);
}

std::variant<cplx, PoleReport> double_gamma(cplx x, const LiouvilleCoupling& c,
                                            const SpecialFunctionOptions& opt) {
  const PoleReport pr = nearest_lattice_pole(x, c, opt);
  if (pr.is_pole) return pr;
  return std::exp(log_double_gamma_any(x, c, opt));
}

std::variant<cplx, PoleReport> double_sine(cplx x, const LiouvilleCoupling& c,
                                           const SpecialFunctionOptions& opt) {
  const PoleReport pr = nearest_lattice_pole(x, c, opt);
  if (pr.is_pole) return pr;
  if (nearest_lattice_pole(c.Q() - x, c, opt).is_pole) return cplx(0.0, 0.0);
  return std::exp(log_double_sine(x, c, opt));
}

cplx double_sine_asymptotic(cplx x, const LiouvilleCoupling& c, const SpecialFunctionOptions& opt) {
  if (std::abs(x.imag()) < opt.asymptotic_threshold)
    throw DomainError("double_sine_asymptotic needs |Im x| >= " + std::to_string(opt.asymptotic_threshold));
  const cplx I(0.0, 1.0);
  const double sgn = x.imag() > 0 ? -1.0 : 1.0;
  // The constant phase (Q^2+1)/6 is needed for the ratio to tend to 1; the
  // bare e^{-+ i pi x(x-Q)/2} is only correct up to a unimodular constant.
  const double Q = c.Q();
  return std::exp(sgn * I * kPi * (x * (x - Q) + (Q * Q + 1.0) / 6.0) / 2.0);
}

double beta22_log_moment(double p, double a1, double a2, double b0, double b1, double b2) {
  if (std::abs(a1 - 1.0) > 1e-14 || !(a2 > 1.0))
    throw DomainError("beta22 moments are implemented for a1 = 1, a2 = 4/gamma^2 > 1 only");
  const double gamma = 2.0 / std::sqrt(a2);
  const LiouvilleCoupling c = LiouvilleCoupling::make(gamma);
  const double h = gamma / 2.0;
  SpecialFunctionOptions opt;
  auto L = [&](double y) {
    if (!(y > 0.0)) throw DomainError("beta22 moment: double gamma argument not positive");
    return log_double_gamma_any(cplx(h * y, 0.0), c, opt).real();
  };
  if (p == 0.0) return 0.0;
  return L(p + b0) + L(b0 + b1) + L(b0 + b2) + L(p + b0 + b1 + b2) - L(b0) - L(p + b0 + b1) -
         L(p + b0 + b2) - L(b0 + b1 + b2);
}

double beta10_log_moment(double q, double a, double b) {
  const double u = (q + b) / a, v = b / a;
  if (!(u > 0.0) || !(v > 0.0) || !(a > 0.0)) throw DomainError("beta10 moment: argument out of range");
  return (q / a) * std::log(a) + std::lgamma(u) - std::lgamma(v);
}

}  // namespace bcft
