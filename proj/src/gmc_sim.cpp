#include "bcft/gmc_sim.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <random>
#include <thread>

namespace bcft {

namespace {

constexpr long kBlock = 1000;

// Variance of a cell average of -2 ln|x-y| is -2 ln(cell) + 3; adding the 3
// to the diagonal of the max-kernel makes it positive definite.
constexpr double kCellNugget = 3.0;

struct RunningStats {
  long n = 0;
  double mean = 0.0, m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / double(n);
    m2 += d * (x - mean);
  }
  void merge(const RunningStats& o) {
    if (o.n == 0) return;
    const long tot = n + o.n;
    const double d = o.mean - mean;
    mean += d * double(o.n) / double(tot);
    m2 += o.m2 + d * d * double(n) * double(o.n) / double(tot);
    n = tot;
  }
  MCEstimate estimate(std::uint64_t seed) const {
    MCEstimate e;
    e.mean = mean;
    e.n_samples = n;
    e.seed = seed;
    e.std_error = n > 1 ? std::sqrt(m2 / double(n - 1) / double(n)) : 0.0;
    return e;
  }
};

// Runs work(block, count, worker_state) for every block of kBlock samples and
// returns the per-block results in block order.
template <class R, class MakeState, class Work>
std::vector<R> run_blocks(long n_samples, MakeState make_state, Work work) {
  const long n_blocks = (n_samples + kBlock - 1) / kBlock;
  std::vector<R> out(static_cast<size_t>(n_blocks));
  std::atomic<long> next{0};
  auto worker = [&] {
    auto state = make_state();
    for (long b = next++; b < n_blocks; b = next++) {
      const long count = std::min(kBlock, n_samples - b * kBlock);
      out[static_cast<size_t>(b)] = work(b, count, state);
    }
  };
  const int nw = static_cast<int>(std::min<long>(worker_count(), std::max<long>(n_blocks, 1)));
  if (nw <= 1) {
    worker();
  } else {
    std::vector<std::thread> ts;
    for (int i = 0; i < nw; ++i) ts.emplace_back(worker);
    for (auto& t : ts) t.join();
  }
  return out;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Per-worker FFT buffers for the circle field.
class CircleSynth {
 public:
  CircleSynth(int n_modes, int n_grid) : N_(n_modes), M_(n_grid) {
    if (n_grid < 8) throw DomainError("circle field: n_grid must be at least 8");
    if (n_modes < 1 || 2 * n_modes >= n_grid) throw DomainError("circle field: need 1 <= n_modes < n_grid / 2");
    spec_ = fftw_alloc_complex(static_cast<size_t>(M_ / 2 + 1));
    work_ = fftw_alloc_complex(static_cast<size_t>(M_ / 2 + 1));
    out_ = fftw_alloc_real(static_cast<size_t>(M_));
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_c2r_1d(M_, work_, out_, FFTW_ESTIMATE);
  }
  ~CircleSynth() {
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(spec_);
    fftw_free(work_);
    fftw_free(out_);
  }
  CircleSynth(const CircleSynth&) = delete;
  CircleSynth& operator=(const CircleSynth&) = delete;

  // a_1, b_1, a_2, b_2, ... in this order, so the first k modes of a draw do
  // not depend on N.
  void draw(StreamRng& rng) {
    std::normal_distribution<double> nd;
    spec_[0][0] = spec_[0][1] = 0.0;
    for (int n = 1; n <= M_ / 2; ++n) {
      if (n <= N_) {
        const double s = std::sqrt(2.0 / n) / 2.0;
        const double a = nd(rng), b = nd(rng);
        spec_[n][0] = s * a;
        spec_[n][1] = -s * b;
      } else {
        spec_[n][0] = spec_[n][1] = 0.0;
      }
    }
  }
  // X_j with the first k modes of the last draw.
  const double* field(int k) {
    for (int n = 0; n <= M_ / 2; ++n) {
      const bool keep = n <= k;
      work_[n][0] = keep ? spec_[n][0] : 0.0;
      work_[n][1] = keep ? spec_[n][1] : 0.0;
    }
    fftw_execute(plan_);
    return out_;
  }
  int grid() const { return M_; }

 private:
  int N_, M_;
  fftw_complex* spec_ = nullptr;
  fftw_complex* work_ = nullptr;
  double* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

// |e^{i theta} - 1|^{-s} on the grid; the point at the insertion gets the
// cell average so the singularity stays integrable.
std::vector<double> circle_weights(int M, double s) {
  std::vector<double> w(static_cast<size_t>(M), 1.0);
  if (s == 0.0) return w;
  const double d = 2.0 * kPi / M;
  for (int j = 1; j < M; ++j) w[static_cast<size_t>(j)] = std::pow(std::abs(2.0 * std::sin(0.5 * d * j)), -s);
  boost::math::quadrature::tanh_sinh<double> ts;
  const double half = ts.integrate([s](double t) { return std::pow(2.0 * std::sin(0.5 * t), -s); }, 0.0, 0.5 * d);
  w[0] = 2.0 * half / d;
  return w;
}

double circle_mass(const double* X, const std::vector<double>& w, double gamma, double var) {
  const double shift = gamma * gamma / 8.0 * var;
  double acc = 0.0;
  const size_t M = w.size();
  for (size_t j = 0; j < M; ++j) acc += w[j] * std::exp(0.5 * gamma * X[j] - shift);
  return acc / double(M);
}

void check_circle_domain(double gamma, double p, double beta) {
  if (!(gamma > 0.0 && gamma < 2.0)) throw DomainError("gamma must lie in (0,2)");
  if (!(beta < 2.0 / gamma)) throw DomainError("circle moment: need beta_insertion < 2/gamma on the grid");
  const double Q = gamma / 2.0 + 2.0 / gamma;
  const double bound = std::min(4.0 / (gamma * gamma), 2.0 / gamma * (Q - std::max(beta, 0.0)));
  if (!(p < bound)) throw DomainError("circle moment: p beyond the moment-existence bound");
}

// ---- Gaussian vectors from a factorized covariance ----

struct Cells {
  std::vector<double> center, weight, var;
  Eigen::MatrixXd L;
};

void factorize(Cells& cells, const Eigen::MatrixXd& C) {
  Eigen::LLT<Eigen::MatrixXd> llt(C);
  if (llt.info() != Eigen::Success) throw FactorizationError("covariance is not positive definite at this mollification");
  cells.L = llt.matrixL();
  cells.var.resize(static_cast<size_t>(C.rows()));
  for (Eigen::Index i = 0; i < C.rows(); ++i) cells.var[static_cast<size_t>(i)] = C(i, i);
}

// Total masses of `count` independent samples.
std::vector<double> sample_masses(const Cells& cells, double gamma, long count, StreamRng& rng) {
  const Eigen::Index n = cells.L.rows();
  std::normal_distribution<double> nd;
  Eigen::MatrixXd Z(n, count);
  for (long k = 0; k < count; ++k)
    for (Eigen::Index i = 0; i < n; ++i) Z(i, k) = nd(rng);
  const Eigen::MatrixXd X = cells.L.triangularView<Eigen::Lower>() * Z;
  std::vector<double> out(static_cast<size_t>(count));
  for (long k = 0; k < count; ++k) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const size_t ii = static_cast<size_t>(i);
      acc += cells.weight[ii] * std::exp(0.5 * gamma * X(i, k) - gamma * gamma / 8.0 * cells.var[ii]);
    }
    out[static_cast<size_t>(k)] = acc;
  }
  return out;
}

Cells interval_cells(double a, double b, const IntervalFieldConfig& cfg) {
  const int n = cfg.n_grid;
  if (n < 2) throw DomainError("interval field: n_grid must be at least 2");
  const double h = 1.0 / n;
  const double moll = cfg.mollification > 0.0 ? cfg.mollification : h;
  Cells cells;
  cells.center.resize(static_cast<size_t>(n));
  cells.weight.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) * h;
    cells.center[static_cast<size_t>(i)] = x;
    cells.weight[static_cast<size_t>(i)] = std::pow(x, a) * std::pow(1.0 - x, b) * h;
  }
  // the end cells carry the integrable singularities: use their exact mass
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [a, b](double x) { return std::pow(x, a) * std::pow(1.0 - x, b); };
  cells.weight.front() = ts.integrate(f, 0.0, h);
  cells.weight.back() = ts.integrate(f, 1.0 - h, 1.0);
  Eigen::MatrixXd C(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double d = std::abs(cells.center[static_cast<size_t>(i)] - cells.center[static_cast<size_t>(j)]);
      C(i, j) = -2.0 * std::log(std::max(d, moll));
    }
  C.diagonal().array() += kCellNugget;
  factorize(cells, C);
  return cells;
}

void check_interval_domain(double gamma, double p, double a, double b) {
  if (!(gamma > 0.0 && gamma < 2.0)) throw DomainError("gamma must lie in (0,2)");
  if (!(a > -1.0 && b > -1.0)) throw DomainError("interval moment: need a, b > -1");
  const double Q = gamma / 2.0 + 2.0 / gamma;
  // beta1 = -2a/gamma and beta2 = -2b/gamma in the three-point language
  const double bound = std::min({4.0 / (gamma * gamma), 2.0 / gamma * (Q + 2.0 * a / gamma),
                                 2.0 / gamma * (Q + 2.0 * b / gamma)});
  if (!(p < bound)) throw DomainError("interval moment: p beyond the moment-existence bound");
}

double powp(double m, double p) { return p == 0.0 ? 1.0 : std::pow(m, p); }

MCEstimate interval_level(double gamma, double p, double a, double b, const IntervalFieldConfig& cfg, long n_samples,
                          std::uint64_t seed, std::uint64_t stream_offset) {
  const Cells cells = interval_cells(a, b, cfg);
  auto blocks = run_blocks<RunningStats>(
      n_samples, [] { return 0; },
      [&](long blk, long count, int&) {
        StreamRng rng(seed, stream_offset + static_cast<std::uint64_t>(blk));
        RunningStats st;
        for (double m : sample_masses(cells, gamma, count, rng)) st.add(powp(m, p));
        return st;
      });
  RunningStats tot;
  for (const auto& s : blocks) tot.merge(s);
  return tot.estimate(seed);
}

Extrapolated combine(const MCEstimate& coarse, const MCEstimate& fine, double order) {
  Extrapolated e;
  e.coarse = coarse;
  e.fine = fine;
  e.order = order;
  const double r = std::pow(2.0, order);
  e.extrapolated = fine;
  e.extrapolated.mean = (r * fine.mean - coarse.mean) / (r - 1.0);
  e.extrapolated.std_error =
      std::sqrt(r * r * fine.std_error * fine.std_error + coarse.std_error * coarse.std_error) / (r - 1.0);
  return e;
}

}  // namespace

int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("BCFT_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return hw;
}

double circle_field_variance(int n_modes) {
  double h = 0.0;
  for (int n = n_modes; n >= 1; --n) h += 1.0 / n;
  return 2.0 * h;
}

std::vector<double> sample_circle_field(const CircleFieldConfig& config, StreamRng& rng) {
  CircleSynth synth(config.n_modes, config.grid());
  synth.draw(rng);
  const double* X = synth.field(config.n_modes);
  return {X, X + synth.grid()};
}

MCEstimate circle_moment_mc(double gamma, double p, double beta_insertion, const CircleFieldConfig& config,
                            long n_samples, std::uint64_t seed) {
  check_circle_domain(gamma, p, beta_insertion);
  if (n_samples < 1) throw DomainError("n_samples must be positive");
  const int M = config.grid();
  const std::vector<double> w = circle_weights(M, gamma * beta_insertion / 2.0);
  const double var = circle_field_variance(config.n_modes);
  auto blocks = run_blocks<RunningStats>(
      n_samples, [&] { return std::make_unique<CircleSynth>(config.n_modes, M); },
      [&](long blk, long count, std::unique_ptr<CircleSynth>& synth) {
        StreamRng rng(seed, static_cast<std::uint64_t>(blk));
        RunningStats st;
        for (long k = 0; k < count; ++k) {
          synth->draw(rng);
          st.add(powp(circle_mass(synth->field(config.n_modes), w, gamma, var), p));
        }
        return st;
      });
  RunningStats tot;
  for (const auto& s : blocks) tot.merge(s);
  return tot.estimate(seed);
}

Extrapolated circle_moment_extrapolated(double gamma, double p, double beta_insertion,
                                        const CircleFieldConfig& fine, long n_samples, std::uint64_t seed,
                                        double order) {
  check_circle_domain(gamma, p, beta_insertion);
  if (n_samples < 1) throw DomainError("n_samples must be positive");
  if (fine.n_modes < 2) throw DomainError("circle extrapolation needs n_modes >= 2");
  const int M = fine.grid();
  const int Nf = fine.n_modes, Nc = fine.n_modes / 2;
  const std::vector<double> w = circle_weights(M, gamma * beta_insertion / 2.0);
  const double var_f = circle_field_variance(Nf), var_c = circle_field_variance(Nc);
  const double r = std::pow(2.0, order);
  struct Triple {
    RunningStats c, f, e;
  };
  auto blocks = run_blocks<Triple>(
      n_samples, [&] { return std::make_unique<CircleSynth>(Nf, M); },
      [&](long blk, long count, std::unique_ptr<CircleSynth>& synth) {
        StreamRng rng(seed, static_cast<std::uint64_t>(blk));
        Triple t;
        for (long k = 0; k < count; ++k) {
          synth->draw(rng);
          const double yf = powp(circle_mass(synth->field(Nf), w, gamma, var_f), p);
          const double yc = powp(circle_mass(synth->field(Nc), w, gamma, var_c), p);
          t.f.add(yf);
          t.c.add(yc);
          t.e.add((r * yf - yc) / (r - 1.0));
        }
        return t;
      });
  Triple tot;
  for (const auto& t : blocks) {
    tot.c.merge(t.c);
    tot.f.merge(t.f);
    tot.e.merge(t.e);
  }
  Extrapolated e;
  e.coarse = tot.c.estimate(seed);
  e.fine = tot.f.estimate(seed);
  e.extrapolated = tot.e.estimate(seed);  // per-sample combination keeps the coupling in the error bar
  e.order = order;
  return e;
}

MCEstimate interval_moment_mc(double gamma, double p, double a, double b, const IntervalFieldConfig& config,
                              long n_samples, std::uint64_t seed) {
  check_interval_domain(gamma, p, a, b);
  if (n_samples < 1) throw DomainError("n_samples must be positive");
  return interval_level(gamma, p, a, b, config, n_samples, seed, 0);
}

Extrapolated interval_moment_extrapolated(double gamma, double p, double a, double b,
                                          const IntervalFieldConfig& fine, long n_samples, std::uint64_t seed,
                                          double order) {
  check_interval_domain(gamma, p, a, b);
  if (n_samples < 1) throw DomainError("n_samples must be positive");
  IntervalFieldConfig coarse = fine;
  coarse.n_grid = fine.n_grid / 2;
  if (fine.mollification > 0.0) coarse.mollification = 2.0 * fine.mollification;
  // the coarse level reads streams far above the ones the fine level uses
  const MCEstimate c = interval_level(gamma, p, a, b, coarse, n_samples, seed, std::uint64_t{1} << 40);
  const MCEstimate f = interval_level(gamma, p, a, b, fine, n_samples, seed, 0);
  return combine(c, f, order);
}

TailEstimate tail_probability_mc(double gamma, double beta, double mu1, double mu2, const std::vector<double>& u_grid,
                                 const TailFieldConfig& config, long n_samples, std::uint64_t seed) {
  const double Q = gamma / 2.0 + 2.0 / gamma;
  if (!(gamma > 0.0 && gamma < 2.0)) throw DomainError("gamma must lie in (0,2)");
  if (!(beta > gamma / 2.0 && beta < Q)) throw DomainError("tail: need gamma/2 < beta < Q");
  if (!(mu1 >= 0.0 && mu2 >= 0.0) || (mu1 == 0.0 && mu2 == 0.0)) throw DomainError("tail: at most one mu may vanish");
  if (!(gamma * beta / 2.0 < 1.0)) throw DomainError("tail: the insertion must be integrable (beta < 2/gamma)");
  if (!std::is_sorted(u_grid.begin(), u_grid.end())) throw DomainError("tail: u_grid must be increasing");
  if (n_samples < 1) throw DomainError("n_samples must be positive");

  const double s = gamma * beta / 2.0;
  const double h = 1.0 / config.n_uniform;
  const double r = std::exp(-1.0 / config.cells_per_efold);
  auto power_mass = [s](double lo, double hi) { return (std::pow(hi, 1.0 - s) - std::pow(lo, 1.0 - s)) / (1.0 - s); };

  // right half: (lo, hi) pairs from 1/2 inwards
  std::vector<std::pair<double, double>> right;
  double x = 0.5;
  while (x * (1.0 - r) > h) {
    right.push_back({x - h, x});
    x -= h;
  }
  while (x * r > config.depth) {
    right.push_back({x * r, x});
    x *= r;
  }
  const double inner = x;

  Cells cells;
  std::vector<double> len;
  auto add = [&](double c, double l, double wgt) {
    cells.center.push_back(c);
    len.push_back(l);
    cells.weight.push_back(wgt);
  };
  for (auto it = right.rbegin(); it != right.rend(); ++it) {
    const auto [lo, hi] = *it;
    add(-0.5 * (lo + hi), hi - lo, mu1 * power_mass(lo, hi));
  }
  add(0.0, 2.0 * inner, (mu1 + mu2) * power_mass(0.0, inner));
  for (const auto& [lo, hi] : right) add(0.5 * (lo + hi), hi - lo, mu2 * power_mass(lo, hi));

  const Eigen::Index n = static_cast<Eigen::Index>(cells.center.size());
  Eigen::MatrixXd C(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const size_t ii = static_cast<size_t>(i), jj = static_cast<size_t>(j);
      const double d = std::abs(cells.center[ii] - cells.center[jj]);
      C(i, j) = -2.0 * std::log(std::max(d, 0.5 * (len[ii] + len[jj])));
    }
  C.diagonal().array() += kCellNugget;
  factorize(cells, C);

  const size_t nu = u_grid.size();
  auto blocks = run_blocks<std::vector<long>>(
      n_samples, [] { return 0; },
      [&](long blk, long count, int&) {
        StreamRng rng(seed, static_cast<std::uint64_t>(blk));
        std::vector<long> cnt(nu, 0);
        for (double m : sample_masses(cells, gamma, count, rng))
          for (size_t k = 0; k < nu && m > u_grid[k]; ++k) ++cnt[k];
        return cnt;
      });
  TailEstimate te;
  te.u = u_grid;
  te.n_samples = n_samples;
  te.exceedances.assign(nu, 0);
  for (const auto& c : blocks)
    for (size_t k = 0; k < nu; ++k) te.exceedances[k] += c[k];
  te.survival.resize(nu);
  for (size_t k = 0; k < nu; ++k) te.survival[k] = double(te.exceedances[k]) / double(n_samples);

  // fit over the decade ending at the largest u that still has 50 exceedances
  long top = -1;
  for (size_t k = 0; k < nu; ++k)
    if (te.exceedances[k] >= 50) top = static_cast<long>(k);
  if (top >= 0) {
    const double u_hi = u_grid[static_cast<size_t>(top)], u_lo = u_hi / 10.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (size_t k = 0; k <= static_cast<size_t>(top); ++k) {
      if (u_grid[k] < u_lo * (1.0 - 1e-12) || te.exceedances[k] == 0) continue;
      const double lx = std::log(u_grid[k]), ly = std::log(te.survival[k]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++m;
    }
    if (m >= 2) {
      te.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
      te.fit_range = {u_lo, u_hi};
    }
  }
  return te;
}

double compare(const MCEstimate& estimate, cplx exact) {
  if (!(estimate.std_error > 0.0)) throw DomainError("compare: stderr must be positive");
  return std::abs(estimate.mean - exact) / estimate.std_error;
}

}  // namespace bcft
