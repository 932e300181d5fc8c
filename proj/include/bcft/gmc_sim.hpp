#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bcft/rng.hpp"
#include "bcft/types.hpp"

namespace bcft {

struct CircleFieldConfig {
  int n_modes = 1024;
  int n_grid = 0;  // 0: 4 * n_modes
  int grid() const { return n_grid > 0 ? n_grid : 4 * n_modes; }
};

struct IntervalFieldConfig {
  int n_grid = 256;
  double mollification = 0.0;  // 0: the grid spacing
};

// Cells on [-1/2, 1/2] for the tail estimate: uniform of width 1/n_uniform far
// from the insertion, shrinking geometrically (cells_per_efold per factor e)
// down to depth, with one last cell [0, depth] on each side.
struct TailFieldConfig {
  int n_uniform = 128;
  int cells_per_efold = 4;
  double depth = 1e-14;
};

struct MCEstimate {
  cplx mean{0.0};
  double std_error = 0.0;  // sample standard deviation / sqrt(n_samples)
  long n_samples = 0;
  std::uint64_t seed = 0;
};

// Worker threads: BCFT_THREADS if set, else the hardware count.  Results do
// not depend on it.
int worker_count();

// One draw of X on theta_j = 2 pi j / n_grid.
std::vector<double> sample_circle_field(const CircleFieldConfig& config, StreamRng& rng);

// 2 * sum_{n <= N} 1/n, the variance of the truncated field at every point.
double circle_field_variance(int n_modes);

MCEstimate circle_moment_mc(double gamma, double p, double beta_insertion, const CircleFieldConfig& config,
                            long n_samples, std::uint64_t seed);

MCEstimate interval_moment_mc(double gamma, double p, double a, double b, const IntervalFieldConfig& config,
                              long n_samples, std::uint64_t seed);

// Coarse and fine estimates plus the Richardson combination
// fine + (fine - coarse) / (2^order - 1).
struct Extrapolated {
  MCEstimate coarse, fine, extrapolated;
  double order = 1.0;
};

// coarse uses n_modes/2 modes of the same draws, so the difference is sharp.
Extrapolated circle_moment_extrapolated(double gamma, double p, double beta_insertion,
                                        const CircleFieldConfig& fine, long n_samples, std::uint64_t seed,
                                        double order);

// coarse uses n_grid/2 with independent draws.
Extrapolated interval_moment_extrapolated(double gamma, double p, double a, double b,
                                          const IntervalFieldConfig& fine, long n_samples, std::uint64_t seed,
                                          double order);

struct TailEstimate {
  std::vector<double> u;
  std::vector<double> survival;  // P(I > u)
  std::vector<long> exceedances;
  double slope = 0.0;                       // least squares in log-log
  std::pair<double, double> fit_range{0.0, 0.0};
  long n_samples = 0;
};

// Insertion of weight beta at 0, mu1 on [-1/2, 0) and mu2 on (0, 1/2].
TailEstimate tail_probability_mc(double gamma, double beta, double mu1, double mu2, const std::vector<double>& u_grid,
                                 const TailFieldConfig& config, long n_samples, std::uint64_t seed);

// |mean - exact| / stderr
double compare(const MCEstimate& estimate, cplx exact);

}  // namespace bcft
