#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bcft/structure_constants.hpp"
#include "bcft/types.hpp"

namespace bcft {

struct GridOptions {
  std::vector<double> gammas{0.9, 1.3};
  int points_per_gamma = 20;
  int min_points = 20;            // GridError below this many admissible points in total
  int max_draws_per_gamma = 400;  // quasi-random draws before giving up on a gamma
  double pole_distance = 1e-3;    // reject points this close to a Gamma / double gamma pole
  ContourOptions contour{};
};

struct PointResult {
  double gamma = 0.0;
  std::vector<cplx> params;  // in the order of VerificationReport::param_names
  cplx lhs, rhs;
  double residual = 0.0;
};

struct VerificationReport {
  std::string identity;
  std::vector<std::string> param_names;
  std::vector<PointResult> points;
  int n_points = 0;
  int n_rejected = 0;
  double max_residual = 0.0;
  double tol = 0.0;
  bool pass = false;
};

const std::vector<std::string>& identity_names();
double default_tolerance(const std::string& identity);

// Relative residual |a-b| / (|a|+|b|); 0 when both vanish.
double relative_residual(cplx a, cplx b);

// Throws DomainError for an unknown name and GridError when too few points survive.
VerificationReport verify_identity(const std::string& name, const GridOptions& grid = {},
                                   std::optional<double> tol = std::nullopt);

// (beta2+beta3-beta1) H at beta3 = beta1-beta2+eps, extrapolated to eps = 0 from
// eps, eps/2, eps/4, divided by 2(Q-beta1) R(beta1, sigma1, sigma2).
struct LimitRatio {
  cplx ratio;
  std::vector<cplx> raw;  // the unextrapolated ratios, largest eps first
};
LimitRatio limit_H_to_R_ratio(double beta1, double beta2, const SigmaTriple& s, const LiouvilleCoupling& c,
                              double eps = 1e-2, const ContourOptions& opt = {});

}  // namespace bcft
