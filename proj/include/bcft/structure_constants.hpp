#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "bcft/types.hpp"

namespace bcft {

struct SigmaTriple {
  cplx sigma1, sigma2, sigma3;
};

struct MuTriple {
  cplx mu1, mu2, mu3;
  bool half_space_ok = false;
};

struct BetaTriple {
  cplx beta1, beta2, beta3;
  cplx beta_bar;

  static BetaTriple make(cplx b1, cplx b2, cplx b3) { return {b1, b2, b3, b1 + b2 + b3}; }
};

// The vertical line Re r = abscissa carrying the Barnes integral, and the six
// lattice starting points it has to separate.  gap is the width of the
// straight corridor between the left and right lattices; it is <= 0 when the
// lattices interleave and residue corrections are needed.
struct ContourSpec {
  double abscissa = 0.0;
  double step = 0.5;
  double height = 0.0;
  std::array<cplx, 3> left_starts{};
  std::array<cplx, 3> right_starts{};
  double gap = 0.0;
};

struct ContourOptions {
  double tol = 1e-10;          // relative agreement between panel refinements
  int order = 20;              // Gauss-Legendre nodes per panel
  double panel = 0.5;          // initial panel length along Im r
  int max_doublings = 6;
  double max_height = 400.0;
  std::optional<double> abscissa;  // unset: choose automatically
};

struct ContourResult {
  cplx value;
  double abs_error = 0.0;
  ContourSpec spec;
  int residues = 0;            // poles picked up on the wrong side of the line
  long evaluations = 0;
};

struct HValue {
  cplx value;
  double abs_error = 0.0;
};

cplx mu_from_sigma(cplx sigma, const LiouvilleCoupling& c);
// Principal branch: arg(mu) in (-pi, pi] maps to Re(sigma) - Q/2 in (-1/gamma, 1/gamma].
cplx sigma_from_mu(cplx mu, const LiouvilleCoupling& c);
SigmaTriple sigmas_from_mus(const MuTriple& mus, const LiouvilleCoupling& c);

bool half_space_condition(const MuTriple& mus);
MuTriple make_mu_triple(cplx mu1, cplx mu2, cplx mu3);

cplx conformal_weight(cplx beta, const LiouvilleCoupling& c);

cplx bar_U(cplx alpha, const LiouvilleCoupling& c);
cplx bar_G(cplx alpha, cplx beta, const LiouvilleCoupling& c);
cplx bar_R(cplx beta, cplx sigma1, cplx sigma2, const LiouvilleCoupling& c);

// Lattice geometry of the Barnes integrand; abscissa is the corridor midpoint
// when a corridor exists.
ContourSpec contour_geometry(const BetaTriple& b, const SigmaTriple& s, const LiouvilleCoupling& c);

// (1/i) * integral over C of the double-sine ratio in the three-point formula.
ContourResult contour_J(const BetaTriple& b, const SigmaTriple& s, const LiouvilleCoupling& c,
                        const ContourOptions& opt = {});

// log of everything in the three-point formula that multiplies the integral.
cplx bar_H_log_prefactor(const BetaTriple& b, const SigmaTriple& s, const LiouvilleCoupling& c);

HValue bar_H_detailed(const BetaTriple& b, const SigmaTriple& s, const LiouvilleCoupling& c,
                      const ContourOptions& opt = {});
cplx bar_H(const BetaTriple& b, const SigmaTriple& s, const LiouvilleCoupling& c,
           const ContourOptions& opt = {});

// H at beta1 = 2Q - beta2 - beta3, where the integral pinches and the
// prefactor vanishes; obtained by symmetric extrapolation in beta1.
cplx bar_H_special_value(cplx beta2, cplx beta3, const SigmaTriple& s, const LiouvilleCoupling& c,
                         const ContourOptions& opt = {});

// mu1 = mu3 = 0, mu2 = 1.
cplx bar_H_interval(const BetaTriple& b, const LiouvilleCoupling& c);

// E[(int_0^1 x^a (1-x)^b e^{gamma X/2} dx)^p] from the product law.
double interval_log_moment_M(double p, double a, double b, const LiouvilleCoupling& c);
double interval_moment_M(double p, double a, double b, const LiouvilleCoupling& c);

// E[((1/2pi) int |e^{i theta}-1|^{-gamma beta/2} e^{gamma X/2 - ...} d theta)^p]
double circle_log_moment(double p, double beta, const LiouvilleCoupling& c);
double circle_moment(double p, double beta, const LiouvilleCoupling& c);
// The same moment through the bulk-boundary formula and the disk factor.
double circle_moment_via_G(double p, double beta, const LiouvilleCoupling& c);

cplx disk_halfplane_factor(cplx alpha, cplx beta, const LiouvilleCoupling& c);

enum class CorrelatorKind { U, G, R, H };

struct CorrelatorParams {
  cplx alpha{0.0};
  cplx beta{0.0};
  BetaTriple betas{};
  SigmaTriple sigmas{};
  double mu_B = 1.0;
};

cplx unbarred(CorrelatorKind kind, cplx barred_value, const CorrelatorParams& p, const LiouvilleCoupling& c);

// Structure constant (unbarred) for the kind, using the closed forms.
cplx structure_constant(CorrelatorKind kind, const CorrelatorParams& p, const LiouvilleCoupling& c,
                        const ContourOptions& opt = {});

// Structure constant divided by the universal position dependence.  U takes
// one bulk point, G a bulk and a boundary point, R two boundary points, H three.
cplx assemble_correlator(CorrelatorKind kind, const std::vector<cplx>& positions, const CorrelatorParams& p,
                         const LiouvilleCoupling& c, const ContourOptions& opt = {});

std::string to_string(CorrelatorKind k);
CorrelatorKind correlator_kind_from_string(const std::string& s);

}  // namespace bcft
