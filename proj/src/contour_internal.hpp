#pragma once

#include "bcft/structure_constants.hpp"

namespace bcft::detail {

// J = exp(log_scale) * mantissa, kept apart so that huge or tiny integrals
// survive until they meet their prefactor.
struct ScaledContour {
  double log_scale = 0.0;
  cplx mantissa{0.0};
  double abs_error_scaled = 0.0;
  ContourSpec spec;
  int residues = 0;
  long evaluations = 0;
};

ScaledContour contour_J_scaled(const BetaTriple& b, const SigmaTriple& s, const LiouvilleCoupling& c,
                               const ContourOptions& opt);

}  // namespace bcft::detail
