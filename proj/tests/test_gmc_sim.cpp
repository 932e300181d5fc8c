#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <set>

#include "bcft/gmc_sim.hpp"
#include "bcft/rng.hpp"
#include "bcft/structure_constants.hpp"

using namespace bcft;

namespace {

// sets BCFT_THREADS for the lifetime of the object
struct ThreadsEnv {
  explicit ThreadsEnv(const char* v) { setenv("BCFT_THREADS", v, 1); }
  ~ThreadsEnv() { unsetenv("BCFT_THREADS"); }
};

}  // namespace

TEST_CASE("stream generator") {
  StreamRng a(7, 0), b(7, 0), c(7, 1), d(8, 0);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    CHECK(x == b());
    seen.insert(x);
    seen.insert(c());
    seen.insert(d());
  }
  CHECK(seen.size() == 3000);
}

TEST_CASE("worker count honours BCFT_THREADS") {
  ThreadsEnv env("3");
  CHECK(worker_count() == 3);
}

TEST_CASE("circle field has the truncated log-correlated variance") {
  CircleFieldConfig cfg;
  cfg.n_modes = 64;
  const double v = circle_field_variance(cfg.n_modes);
  double h = 0.0;
  for (int n = 1; n <= 64; ++n) h += 1.0 / n;
  CHECK(v == doctest::Approx(2.0 * h).epsilon(1e-15));

  StreamRng rng(3, 0);
  double s2 = 0.0, cross = 0.0;
  const int draws = 4000;
  for (int k = 0; k < draws; ++k) {
    const auto X = sample_circle_field(cfg, rng);
    REQUIRE(static_cast<int>(X.size()) == cfg.grid());
    s2 += X[0] * X[0];
    cross += X[0] * X[cfg.grid() / 2];  // theta = pi: 2 sum cos(n pi)/n
  }
  double half = 0.0;
  for (int n = 1; n <= 64; ++n) half += (n % 2 ? -2.0 : 2.0) / n;
  // standard error of a variance estimate is about v sqrt(2/draws)
  CHECK(std::abs(s2 / draws - v) < 4.0 * v * std::sqrt(2.0 / draws));
  CHECK(std::abs(cross / draws - half) < 4.0 * v * std::sqrt(2.0 / draws));
  CHECK_THROWS_AS(sample_circle_field(CircleFieldConfig{64, 100}, rng), DomainError);
}

TEST_CASE("circle moments: first moment is one and small runs agree with the exact law") {
  CircleFieldConfig cfg;
  cfg.n_modes = 128;
  const MCEstimate m1 = circle_moment_mc(1.0, 1.0, 0.0, cfg, 4000, 11);
  CHECK(m1.n_samples == 4000);
  CHECK(compare(m1, 1.0) < 4.0);

  const auto c = LiouvilleCoupling::make(0.8);
  const MCEstimate mi = circle_moment_mc(0.8, 0.5, 0.5, cfg, 4000, 12);
  CHECK(compare(mi, circle_moment(0.5, 0.5, c)) < 4.0);

  CHECK_THROWS_AS(circle_moment_mc(1.0, 5.0, 0.0, cfg, 10, 1), DomainError);
  CHECK_THROWS_AS(circle_moment_mc(2.5, 0.5, 0.0, cfg, 10, 1), DomainError);
  CHECK_THROWS_AS(circle_moment_mc(1.0, 0.5, 0.0, cfg, 0, 1), DomainError);
}

TEST_CASE("results do not depend on the number of workers") {
  CircleFieldConfig cfg;
  cfg.n_modes = 64;
  MCEstimate one, three;
  {
    ThreadsEnv env("1");
    one = circle_moment_mc(1.0, 0.5, 0.0, cfg, 3500, 99);
  }
  {
    ThreadsEnv env("3");
    three = circle_moment_mc(1.0, 0.5, 0.0, cfg, 3500, 99);
  }
  CHECK(one.mean == three.mean);
  CHECK(one.std_error == three.std_error);
  const MCEstimate other = circle_moment_mc(1.0, 0.5, 0.0, cfg, 3500, 100);
  CHECK(other.mean != one.mean);
}

TEST_CASE("coupled circle extrapolation") {
  CircleFieldConfig cfg;
  cfg.n_modes = 128;
  const Extrapolated e = circle_moment_extrapolated(1.0, 0.5, 0.0, cfg, 3000, 5, 1.0);
  CHECK(e.order == 1.0);
  CHECK(e.coarse.n_samples == 3000);
  CHECK(e.fine.n_samples == 3000);
  // the combination is applied per sample, so the means combine exactly
  const cplx expect = e.fine.mean + (e.fine.mean - e.coarse.mean);
  CHECK(std::abs(e.extrapolated.mean - expect) < 1e-12);
  CHECK(e.extrapolated.std_error > 0.0);
}

TEST_CASE("interval moments") {
  const auto c = LiouvilleCoupling::make(1.0);
  IntervalFieldConfig cfg;
  cfg.n_grid = 64;
  const MCEstimate m1 = interval_moment_mc(1.0, 1.0, 0.0, 0.0, cfg, 4000, 21);
  CHECK(compare(m1, 1.0) < 4.0);
  const Extrapolated e = interval_moment_extrapolated(1.0, 0.5, 0.2, -0.1, cfg, 4000, 22, 1.0);
  CHECK(compare(e.extrapolated, interval_moment_M(0.5, 0.2, -0.1, c)) < 4.0);
  CHECK_THROWS_AS(interval_moment_mc(1.0, 0.5, -1.5, 0.0, cfg, 10, 1), DomainError);
  CHECK_THROWS_AS(interval_moment_mc(1.0, 0.5, 0.0, 0.0, IntervalFieldConfig{1, 0.0}, 10, 1), DomainError);
}

TEST_CASE("tail slope") {
  std::vector<double> u;
  for (int k = 0; k <= 40; ++k) u.push_back(std::pow(10.0, -1.0 + 0.125 * k));
  const TailEstimate t = tail_probability_mc(1.0, 1.8, 1.0, 1.0, u, TailFieldConfig{}, 100000, 3);
  REQUIRE(t.survival.size() == u.size());
  for (size_t i = 1; i < u.size(); ++i) CHECK(t.survival[i] <= t.survival[i - 1]);
  const double target = -2.0 * (LiouvilleCoupling::make(1.0).Q() - 1.8);
  CHECK(std::abs(t.slope / target - 1.0) < 0.1);
  CHECK(t.fit_range.first < t.fit_range.second);
  CHECK_THROWS_AS(tail_probability_mc(1.0, 0.3, 1.0, 1.0, u, TailFieldConfig{}, 10, 3), DomainError);
  CHECK_THROWS_AS(tail_probability_mc(1.0, 1.8, 0.0, 0.0, u, TailFieldConfig{}, 10, 3), DomainError);
}

TEST_CASE("compare") {
  MCEstimate e;
  e.mean = 1.1;
  e.std_error = 0.05;
  CHECK(compare(e, 1.0) == doctest::Approx(2.0));
  e.std_error = 0.0;
  CHECK_THROWS_AS(compare(e, 1.0), DomainError);
}
