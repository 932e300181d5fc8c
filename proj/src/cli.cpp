#include "bcft/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <regex>
#include <sstream>

#include "bcft/gmc_sim.hpp"
#include "bcft/special_functions.hpp"
#include "bcft/structure_constants.hpp"
#include "bcft/verification.hpp"

namespace bcft {

using nlohmann::json;

namespace {

// sweep rows this close to a pole of any Gamma or double gamma factor are
// flagged rather than printed
constexpr double kSweepPoleDistance = 1e-8;

std::string num(double x) { return fmt::format("{}", x); }

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

double to_double(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DomainError("cannot read " + what + " from '" + s + "'");
  }
}

long to_long(const std::string& s, const std::string& what) {
  const double v = to_double(s, what);
  if (v != std::floor(v)) throw DomainError(what + " must be an integer");
  return static_cast<long>(v);
}

// ---- shared parameter block for eval and sweep ----

struct Params {
  std::string alpha = "", beta = "", beta1 = "", beta2 = "", beta3 = "";
  std::string sigma1 = "", sigma2 = "", sigma3 = "", mu1 = "", mu2 = "", mu3 = "";
  std::optional<double> p, a, b;
  double mu_B = 1.0;
  bool unbarred = false;
  std::string of = "H";
  std::vector<std::string> positions;
};

void add_param_options(CLI::App* app, Params& P) {
  app->add_option("--alpha", P.alpha, "bulk weight alpha");
  app->add_option("--beta", P.beta, "boundary weight beta");
  app->add_option("--beta1", P.beta1);
  app->add_option("--beta2", P.beta2);
  app->add_option("--beta3", P.beta3);
  app->add_option("--sigma1", P.sigma1, "sigma parameters; complex values as 1.2+0.3i");
  app->add_option("--sigma2", P.sigma2);
  app->add_option("--sigma3", P.sigma3);
  app->add_option("--mu1", P.mu1, "boundary cosmological constants (instead of sigma)");
  app->add_option("--mu2", P.mu2);
  app->add_option("--mu3", P.mu3);
  app->add_option("--p", P.p);
  app->add_option("--a", P.a);
  app->add_option("--b", P.b);
  app->add_option("--mu-B", P.mu_B, "boundary cosmological constant for U and G");
  app->add_flag("--unbarred", P.unbarred, "print the structure constant instead of the barred one");
  app->add_option("--of", P.of, "correlator kind for eval correlator (U, G, R, H)");
  app->add_option("--positions", P.positions, "insertion points for eval correlator");
}

// Values with everything defaulted and sigma resolved.
struct Resolved {
  cplx alpha{0.0}, beta{0.0}, beta1{0.0}, beta2{0.0}, beta3{0.0};
  SigmaTriple sigmas{};
  double p = 0.0, a = 0.0, b = 0.0;
  double mu_B = 1.0;
};

cplx opt_c(const std::string& s, cplx fallback) { return s.empty() ? fallback : parse_complex(s); }

Resolved resolve(const Params& P, const LiouvilleCoupling& c) {
  Resolved r;
  const double Q = c.Q();
  r.alpha = opt_c(P.alpha, Q);
  r.beta = opt_c(P.beta, Q);
  r.beta1 = opt_c(P.beta1, 0.0);
  r.beta2 = opt_c(P.beta2, 0.0);
  r.beta3 = opt_c(P.beta3, 0.0);
  const bool any_mu = !P.mu1.empty() || !P.mu2.empty() || !P.mu3.empty();
  const bool any_sigma = !P.sigma1.empty() || !P.sigma2.empty() || !P.sigma3.empty();
  if (any_mu && any_sigma) throw DomainError("give either sigma or mu parameters, not both");
  if (any_mu) {
    const MuTriple m = make_mu_triple(opt_c(P.mu1, 1.0), opt_c(P.mu2, 1.0), opt_c(P.mu3, 1.0));
    r.sigmas = sigmas_from_mus(m, c);
  } else {
    r.sigmas = {opt_c(P.sigma1, Q / 2.0), opt_c(P.sigma2, Q / 2.0), opt_c(P.sigma3, Q / 2.0)};
  }
  r.p = P.p.value_or(0.5);
  r.a = P.a.value_or(0.0);
  r.b = P.b.value_or(0.0);
  r.mu_B = P.mu_B;
  return r;
}

struct Value {
  cplx value;
  double abs_error = 0.0;
};

// Closed forms are good to about 1e-12 relative (checked against the oracle
// values); the contour result carries its own estimate.
constexpr double kClosedFormRelError = 1e-12;

Value evaluate(const std::string& kind, const Resolved& r, const Params& P, const LiouvilleCoupling& c,
               const ContourOptions& copt) {
  auto closed = [](cplx v) { return Value{v, kClosedFormRelError * std::abs(v)}; };
  CorrelatorParams cp;
  cp.alpha = r.alpha;
  cp.beta = r.beta;
  cp.betas = BetaTriple::make(r.beta1, r.beta2, r.beta3);
  cp.sigmas = r.sigmas;
  cp.mu_B = r.mu_B;
  if (kind == "U") {
    const cplx v = bar_U(r.alpha, c);
    return closed(P.unbarred ? unbarred(CorrelatorKind::U, v, cp, c) : v);
  }
  if (kind == "G") {
    const cplx v = bar_G(r.alpha, r.beta, c);
    return closed(P.unbarred ? unbarred(CorrelatorKind::G, v, cp, c) : v);
  }
  if (kind == "R") {
    const cplx v = bar_R(r.beta, r.sigmas.sigma1, r.sigmas.sigma2, c);
    return closed(P.unbarred ? unbarred(CorrelatorKind::R, v, cp, c) : v);
  }
  if (kind == "H") {
    const HValue h = bar_H_detailed(cp.betas, r.sigmas, c, copt);
    if (!P.unbarred) return {h.value, h.abs_error};
    const cplx u = unbarred(CorrelatorKind::H, h.value, cp, c);
    return {u, h.abs_error * std::abs(u) / std::max(std::abs(h.value), 1e-300)};
  }
  if (kind == "H_interval") {
    // a = -gamma beta1 / 2, b = -gamma beta2 / 2, p = (2Q - beta_bar) / gamma
    const double g = c.gamma;
    const double b1 = -2.0 * r.a / g, b2 = -2.0 * r.b / g;
    const double b3 = 2.0 * c.Q() - g * r.p - b1 - b2;
    return closed(bar_H_interval(BetaTriple::make(b1, b2, b3), c));
  }
  if (kind == "correlator") {
    std::vector<cplx> pos;
    for (const auto& s : P.positions) pos.push_back(parse_complex(s));
    const cplx v = assemble_correlator(correlator_kind_from_string(P.of), pos, cp, c, copt);
    return closed(v);
  }
  throw DomainError("unknown eval kind '" + kind + "'");
}

json params_json(const std::string& kind, const Resolved& r, const Params& P) {
  json j;
  if (kind == "U" || kind == "G" || (kind == "correlator" && (P.of == "U" || P.of == "G"))) j["alpha"] = cjson(r.alpha);
  if (kind == "G" || kind == "R" || (kind == "correlator" && (P.of == "G" || P.of == "R"))) j["beta"] = cjson(r.beta);
  if (kind == "R" || kind == "H" || (kind == "correlator" && (P.of == "R" || P.of == "H"))) {
    j["sigma1"] = cjson(r.sigmas.sigma1);
    j["sigma2"] = cjson(r.sigmas.sigma2);
  }
  if (kind == "H" || (kind == "correlator" && P.of == "H")) {
    j["beta1"] = cjson(r.beta1);
    j["beta2"] = cjson(r.beta2);
    j["beta3"] = cjson(r.beta3);
    j["sigma3"] = cjson(r.sigmas.sigma3);
  }
  if (kind == "H_interval") {
    j["p"] = r.p;
    j["a"] = r.a;
    j["b"] = r.b;
  }
  if (kind == "correlator") {
    j["of"] = P.of;
    j["positions"] = P.positions;
  }
  if (P.unbarred || kind == "correlator") j["mu_B"] = r.mu_B;
  return j;
}

// ---- output sink: a file if --output was given, else out ----

struct Sink {
  std::unique_ptr<std::ofstream> file;
  std::ostream* os;
  Sink(const std::string& path, std::ostream& out) : os(&out) {
    if (!path.empty()) {
      file = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file) throw DomainError("cannot open output file '" + path + "'");
      os = file.get();
    }
  }
  std::ostream& operator*() { return *os; }
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

void csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_field(cells[i]);
  os << "\r\n";
}

// ---- settings merged from flags and the config file ----

struct Settings {
  std::string config_path;
  std::string format;
  std::string output;
  ConfigFile cfg;

  std::optional<std::string> get(const std::string& section, const std::string& key) const {
    if (const std::string* v = cfg.find(section, key)) return *v;
    return std::nullopt;
  }
  double real(const std::optional<double>& flag, const std::string& section, const std::string& key,
              double fallback) const {
    if (flag) return *flag;
    if (auto v = get(section, key)) return to_double(*v, section + "." + key);
    return fallback;
  }
  long integer(const std::optional<long>& flag, const std::string& section, const std::string& key,
               long fallback) const {
    if (flag) return *flag;
    if (auto v = get(section, key)) return to_long(*v, section + "." + key);
    return fallback;
  }
  std::string fmt_or(const std::string& fallback) const {
    if (!format.empty()) return format;
    if (auto v = get("", "format")) {
      if (*v != "json" && *v != "csv") throw DomainError("format must be json or csv");
      return *v;
    }
    return fallback;
  }
  std::string output_path() const {
    if (!output.empty()) return output;
    if (auto v = get("", "output")) return *v;
    return "";
  }
  ContourOptions contour() const {
    ContourOptions o;
    o.tol = real(std::nullopt, "contour", "tol", o.tol);
    o.order = static_cast<int>(integer(std::nullopt, "contour", "order", o.order));
    o.panel = real(std::nullopt, "contour", "panel", o.panel);
    o.max_height = real(std::nullopt, "contour", "max_height", o.max_height);
    if (!(o.tol > 0.0)) throw DomainError("contour.tol must be positive");
    return o;
  }
  double gamma(const std::optional<double>& flag) const {
    const double g = real(flag, "", "gamma", 1.0);
    if (!(g > 0.0 && g < 2.0)) throw DomainError("gamma must lie in (0,2)");
    return g;
  }
};

// ---- commands ----

int cmd_eval(const std::string& kind, const Params& P, const std::optional<double>& gflag, const Settings& S,
             std::ostream& out) {
  const LiouvilleCoupling c = LiouvilleCoupling::make(S.gamma(gflag));
  const Resolved r = resolve(P, c);
  const Value v = evaluate(kind, r, P, c, S.contour());
  Sink sink(S.output_path(), out);
  if (S.fmt_or("json") == "csv") {
    csv_row(*sink, {"kind", "gamma", "value_re", "value_im", "abs_error_estimate"});
    csv_row(*sink, {kind, num(c.gamma), num(v.value.real()), num(v.value.imag()), num(v.abs_error)});
  } else {
    json j;
    j["kind"] = kind;
    j["gamma"] = c.gamma;
    j["params"] = params_json(kind, r, P);
    j["value_re"] = v.value.real();
    j["value_im"] = v.value.imag();
    j["abs_error_estimate"] = v.abs_error;
    *sink << j.dump() << "\n";
  }
  return kExitPass;
}

int cmd_verify(const std::string& suite, const std::optional<double>& tol, const std::optional<double>& gflag,
               int points, const Settings& S, std::ostream& out, std::ostream& err) {
  std::vector<std::string> names;
  if (suite == "all") {
    names = identity_names();
  } else {
    default_tolerance(suite);  // throws on an unknown name
    names = {suite};
  }
  GridOptions grid;
  if (gflag || S.get("", "gamma")) grid.gammas = {S.gamma(gflag)};
  grid.points_per_gamma = points;
  // every requested point must be found within the generator's draw budget
  grid.min_points = points * static_cast<int>(grid.gammas.size());
  grid.contour = S.contour();
  const bool csv = S.fmt_or("json") == "csv";
  Sink sink(S.output_path(), out);
  if (csv) csv_row(*sink, {"identity", "n_points", "max_residual", "tol", "pass"});
  int status = kExitPass;
  for (const auto& name : names) {
    std::optional<double> t = tol;
    if (!t)
      if (auto v = S.get("tolerances", name)) t = to_double(*v, "tolerances." + name);
    if (t && !(*t > 0.0)) throw DomainError("tolerances must be positive");
    try {
      const VerificationReport rep = verify_identity(name, grid, t);
      if (csv) {
        csv_row(*sink, {rep.identity, std::to_string(rep.n_points), num(rep.max_residual), num(rep.tol),
                        rep.pass ? "true" : "false"});
      } else {
        json j;
        j["identity"] = rep.identity;
        j["n_points"] = rep.n_points;
        j["max_residual"] = rep.max_residual;
        j["tol"] = rep.tol;
        j["pass"] = rep.pass;
        *sink << j.dump() << "\n";
      }
      if (!rep.pass && status == kExitPass) status = kExitCheckFailed;
    } catch (const GridError& e) {
      err << "GridError: " << e.what() << "\n";
      status = kExitUsage;
    }
  }
  return status;
}

struct McArgs {
  std::string check;
  std::optional<double> p, beta, a, b, mu1, mu2, order;
  std::optional<long> n_samples, n_modes, n_grid, seed;
};

int cmd_mc(const McArgs& A, const std::optional<double>& gflag, const Settings& S, std::ostream& out) {
  const LiouvilleCoupling c = LiouvilleCoupling::make(S.gamma(gflag));
  const double g = c.gamma;
  const bool is_tail = A.check == "tail";
  const long n_samples = S.integer(A.n_samples, "mc", "n_samples", is_tail ? 1000000 : 100000);
  const long max_samples = S.integer(std::nullopt, "mc", "max_samples", 10000000);
  const long seed = S.integer(A.seed, "mc", "seed", 1);
  const double order = S.real(A.order, "mc", "order", 1.0);
  if (n_samples < 1) throw DomainError("n_samples must be positive");
  if (n_samples > max_samples) throw DomainError("n_samples exceeds mc.max_samples");
  if (!(order > 0.0)) throw DomainError("mc.order must be positive");

  const std::vector<std::string> header = {"check", "gamma",   "p",       "beta",     "a",         "b",
                                           "stage", "exact",   "mc_mean", "mc_stderr", "z_score", "n_samples",
                                           "n_modes", "seed", "pass"};
  std::vector<std::vector<std::string>> rows;
  bool pass = false;

  auto emit = [&](const std::string& stage, double exact, const MCEstimate& e, long resolution, bool counted,
                  double p, const std::string& beta, const std::string& a, const std::string& b) {
    const double z = compare(e, exact);
    if (counted) pass = z < 3.0;
    rows.push_back({A.check, num(g), num(p), beta, a, b, stage, num(exact), num(e.mean.real()),
                    num(e.std_error), num(z), std::to_string(e.n_samples), std::to_string(resolution),
                    std::to_string(seed), counted ? (z < 3.0 ? "PASS" : "FAIL") : ""});
  };

  if (A.check == "fyodorov_bouchaud" || A.check == "circle_insertion") {
    const double p = A.p.value_or(0.5);
    const double beta = A.check == "circle_insertion" ? A.beta.value_or(0.5) : 0.0;
    CircleFieldConfig cfg;
    cfg.n_modes = static_cast<int>(S.integer(A.n_modes, "mc", "n_modes", 1024));
    cfg.n_grid = static_cast<int>(S.integer(A.n_grid, "mc", "n_grid", 0));
    const double exact = A.check == "fyodorov_bouchaud"
                             ? std::exp(std::lgamma(1.0 - p * g * g / 4.0) - p * std::lgamma(1.0 - g * g / 4.0))
                             : circle_moment(p, beta, c);
    const Extrapolated e =
        circle_moment_extrapolated(g, p, beta, cfg, n_samples, static_cast<std::uint64_t>(seed), order);
    const std::string bcol = A.check == "circle_insertion" ? num(beta) : "";
    emit("coarse", exact, e.coarse, cfg.n_modes / 2, false, p, bcol, "", "");
    emit("fine", exact, e.fine, cfg.n_modes, false, p, bcol, "", "");
    emit("extrapolated", exact, e.extrapolated, cfg.n_modes, true, p, bcol, "", "");
  } else if (A.check == "interval") {
    const double p = A.p.value_or(0.5), a = A.a.value_or(0.0), b = A.b.value_or(0.0);
    IntervalFieldConfig cfg;
    cfg.n_grid = static_cast<int>(S.integer(A.n_grid, "mc", "n_grid", 256));
    const double exact = interval_moment_M(p, a, b, c);
    const Extrapolated e =
        interval_moment_extrapolated(g, p, a, b, cfg, n_samples, static_cast<std::uint64_t>(seed), order);
    emit("coarse", exact, e.coarse, cfg.n_grid / 2, false, p, "", num(a), num(b));
    emit("fine", exact, e.fine, cfg.n_grid, false, p, "", num(a), num(b));
    emit("extrapolated", exact, e.extrapolated, cfg.n_grid, true, p, "", num(a), num(b));
  } else if (is_tail) {
    const double beta = A.beta.value_or(1.8);
    const double mu1 = A.mu1.value_or(1.0), mu2 = A.mu2.value_or(1.0);
    TailFieldConfig cfg;
    cfg.n_uniform = static_cast<int>(S.integer(A.n_grid, "mc", "n_grid", cfg.n_uniform));
    std::vector<double> u;
    for (int k = 0; k <= 48; ++k) u.push_back(std::pow(10.0, -1.0 + 0.125 * k));
    const TailEstimate t =
        tail_probability_mc(g, beta, mu1, mu2, u, cfg, n_samples, static_cast<std::uint64_t>(seed));
    const double target = -2.0 * (c.Q() - beta) / g;
    const double rel = t.slope == 0.0 ? INFINITY : std::abs(t.slope / target - 1.0);
    pass = rel < 0.1;
    // for the tail the z_score column carries the relative slope error
    rows.push_back({A.check, num(g), "", num(beta), "", "", "slope", num(target), num(t.slope), "", num(rel),
                    std::to_string(n_samples), std::to_string(cfg.n_uniform), std::to_string(seed),
                    pass ? "PASS" : "FAIL"});
  } else {
    throw DomainError("unknown mc check '" + A.check + "'");
  }

  Sink sink(S.output_path(), out);
  if (S.fmt_or("csv") == "json") {
    for (const auto& r : rows) {
      json j;
      for (size_t i = 0; i < header.size(); ++i) j[header[i]] = r[i];
      *sink << j.dump() << "\n";
    }
  } else {
    csv_row(*sink, header);
    for (const auto& r : rows) csv_row(*sink, r);
  }
  return pass ? kExitPass : kExitCheckFailed;
}

struct SweepArgs {
  std::string target = "R";
  std::string axis = "beta";
  double from = 0.0, to = 1.0;
  int steps = 10;
};

int cmd_sweep(const SweepArgs& W, Params P, const std::optional<double>& gflag, const Settings& S,
              std::ostream& out) {
  const LiouvilleCoupling c = LiouvilleCoupling::make(S.gamma(gflag));
  if (W.steps < 1) throw DomainError("steps must be at least 1");
  if (W.target != "U" && W.target != "G" && W.target != "R" && W.target != "H")
    throw DomainError("sweep target must be U, G, R or H");
  std::string* slot = nullptr;
  if (W.axis == "alpha") slot = &P.alpha;
  else if (W.axis == "beta") slot = &P.beta;
  else if (W.axis == "beta1") slot = &P.beta1;
  else if (W.axis == "beta2") slot = &P.beta2;
  else if (W.axis == "beta3") slot = &P.beta3;
  else if (W.axis == "sigma1") slot = &P.sigma1;
  else if (W.axis == "sigma2") slot = &P.sigma2;
  else if (W.axis == "sigma3") slot = &P.sigma3;
  else throw DomainError("unknown sweep axis '" + W.axis + "'");
  const ContourOptions copt = S.contour();

  Sink sink(S.output_path(), out);
  const bool json_out = S.fmt_or("csv") == "json";
  if (!json_out) csv_row(*sink, {W.axis, "value_re", "value_im", "skipped"});
  for (int k = 0; k < W.steps; ++k) {
    const double x = W.steps == 1 ? W.from : W.from + (W.to - W.from) * k / (W.steps - 1);
    *slot = num(x);
    bool skipped = false;
    cplx v;
    try {
      PoleDistanceProbe probe;
      v = evaluate(W.target, resolve(P, c), P, c, copt).value;
      skipped = probe.min_distance() < kSweepPoleDistance || !is_finite(v);
    } catch (const Error&) {
      skipped = true;
    }
    if (json_out) {
      json j;
      j[W.axis] = x;
      j["value_re"] = skipped ? json(nullptr) : json(v.real());
      j["value_im"] = skipped ? json(nullptr) : json(v.imag());
      j["skipped"] = skipped;
      *sink << j.dump() << "\n";
    } else {
      csv_row(*sink, {num(x), skipped ? "" : num(v.real()), skipped ? "" : num(v.imag()), skipped ? "1" : "0"});
    }
  }
  return kExitPass;
}

}  // namespace

cplx parse_complex(const std::string& text) {
  static const std::string numre = R"([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)";
  static const std::regex pair_re(R"(\s*\(\s*()" + numre + R"()\s*,\s*()" + numre + R"()\s*\)\s*)");
  static const std::regex real_re(R"(\s*()" + numre + R"()\s*)");
  static const std::regex imag_re(R"(\s*([+-]?(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)\s*[ij]\s*)");
  static const std::regex both_re(R"(\s*()" + numre + R"()\s*([+-])\s*((?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)\s*[ij]\s*)");
  std::smatch m;
  auto coef = [](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return std::stod(s);
  };
  if (std::regex_match(text, m, pair_re)) return {std::stod(m[1]), std::stod(m[2])};
  if (std::regex_match(text, m, real_re)) return {std::stod(m[1]), 0.0};
  if (std::regex_match(text, m, both_re)) {
    const double im = coef(m[3].str());
    return {std::stod(m[1]), m[2].str() == "-" ? -im : im};
  }
  if (std::regex_match(text, m, imag_re)) return {0.0, coef(m[1].str())};
  throw DomainError("cannot read a complex number from '" + text + "'");
}

const std::string* ConfigFile::find(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  if (s == sections.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

ConfigFile read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file '" + path + "'");
  ConfigFile cf;
  CLI::ConfigTOML parser;
  for (const auto& item : parser.from_config(in)) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    std::string section;
    for (size_t i = 0; i < item.parents.size(); ++i) section += (i ? "." : "") + item.parents[i];
    std::string value;
    for (size_t i = 0; i < item.inputs.size(); ++i) value += (i ? " " : "") + item.inputs[i];
    cf.sections[section][item.name] = value;
  }
  return cf;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Boundary Liouville structure constants: evaluation, identity checks and GMC cross-validation",
               "bcft_cli"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  Settings S;
  app.add_option("--config", S.config_path, "TOML-style file with [tolerances], [mc], [contour]");
  app.add_option("--format", S.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--output", S.output, "write to this file instead of stdout");

  std::optional<double> gamma;
  auto add_gamma = [&](CLI::App* sub) { sub->add_option("--gamma", gamma, "coupling in (0,2)"); };

  std::string eval_kind;
  Params P;
  CLI::App* ev = app.add_subcommand("eval", "evaluate a structure constant");
  ev->add_option("kind", eval_kind, "U, G, R, H, H_interval or correlator")
      ->required()
      ->check(CLI::IsMember({"U", "G", "R", "H", "H_interval", "correlator"}));
  add_gamma(ev);
  add_param_options(ev, P);

  std::string suite = "all";
  std::optional<double> tol;
  int points = 20;
  CLI::App* ve = app.add_subcommand("verify", "check functional identities on quasi-random grids");
  ve->add_option("--suite", suite, "identity name or all");
  ve->add_option("--tol", tol, "override the tolerance");
  ve->add_option("--points", points, "admissible points per gamma")->check(CLI::PositiveNumber);
  add_gamma(ve);

  McArgs M;
  CLI::App* mc = app.add_subcommand("mc", "Monte Carlo comparison against an exact law");
  mc->add_option("--check", M.check, "fyodorov_bouchaud, circle_insertion, interval or tail")
      ->required()
      ->check(CLI::IsMember({"fyodorov_bouchaud", "circle_insertion", "interval", "tail"}));
  add_gamma(mc);
  mc->add_option("--p", M.p);
  mc->add_option("--beta", M.beta);
  mc->add_option("--a", M.a);
  mc->add_option("--b", M.b);
  mc->add_option("--mu1", M.mu1);
  mc->add_option("--mu2", M.mu2);
  mc->add_option("--n-samples", M.n_samples);
  mc->add_option("--n-modes", M.n_modes);
  mc->add_option("--n-grid", M.n_grid);
  mc->add_option("--seed", M.seed);
  mc->add_option("--order", M.order, "assumed order of the refinement bias");

  SweepArgs W;
  Params SP;
  CLI::App* sw = app.add_subcommand("sweep", "tabulate a structure constant along one parameter");
  sw->add_option("--target", W.target)->check(CLI::IsMember({"U", "G", "R", "H"}));
  sw->add_option("--axis", W.axis);
  sw->add_option("--from", W.from)->required();
  sw->add_option("--to", W.to)->required();
  sw->add_option("--steps", W.steps);
  add_gamma(sw);
  add_param_options(sw, SP);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (!S.config_path.empty()) S.cfg = read_config_file(S.config_path);
    if (*ev) return cmd_eval(eval_kind, P, gamma, S, out);
    if (*ve) return cmd_verify(suite, tol, gamma, points, S, out, err);
    if (*mc) return cmd_mc(M, gamma, S, out);
    if (*sw) return cmd_sweep(W, SP, gamma, S, out);
  } catch (const Error& e) {
    err << e.name() << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace bcft
