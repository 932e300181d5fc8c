#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "bcft/cli.hpp"
#include "bcft/structure_constants.hpp"

using namespace bcft;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream o, e;
  Run r;
  r.code = run_cli(args, o, e);
  r.out = o.str();
  r.err = e.str();
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
    v.push_back(l);
  }
  return v;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> v;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      v.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  v.push_back(cur);
  return v;
}

std::string temp_path(const std::string& name) { return (std::string(P_tmpdir) + "/bcft_test_") + name; }

}  // namespace

TEST_CASE("complex parsing") {
  CHECK(parse_complex("1.5") == cplx(1.5, 0.0));
  CHECK(parse_complex("-0.2i") == cplx(0.0, -0.2));
  CHECK(parse_complex("1.25+0.1i") == cplx(1.25, 0.1));
  CHECK(parse_complex("1.25-0.1j") == cplx(1.25, -0.1));
  CHECK(parse_complex("(1.25,0.1)") == cplx(1.25, 0.1));
  CHECK(parse_complex("2e-1+3e0i") == cplx(0.2, 3.0));
  CHECK(parse_complex("i") == cplx(0.0, 1.0));
  CHECK_THROWS_AS(parse_complex("1.2.3"), DomainError);
  CHECK_THROWS_AS(parse_complex(""), DomainError);
}

TEST_CASE("eval prints a JSON record") {
  const Run r = run({"eval", "U", "--gamma", "1", "--alpha", "2"});
  REQUIRE(r.code == kExitPass);
  const json j = json::parse(r.out);
  CHECK(j["kind"] == "U");
  CHECK(j["gamma"] == 1.0);
  CHECK(std::abs(j["value_re"].get<double>() - kPi) < 1e-9);
  CHECK(j["value_im"].get<double>() == doctest::Approx(0.0));
  CHECK(j.contains("abs_error_estimate"));
  CHECK(j["params"]["alpha"][0] == 2.0);

  const json rq = json::parse(run({"eval", "R", "--gamma", "1", "--beta", "2.5", "--sigma1", "1.25", "--sigma2", "1.25"}).out);
  CHECK(std::abs(rq["value_re"].get<double>() - 1.0) < 1e-9);

  const json hi = json::parse(run({"eval", "H_interval", "--gamma", "1", "--p", "0.5", "--a", "0", "--b", "0"}).out);
  CHECK(std::abs(hi["value_re"].get<double>() - interval_moment_M(0.5, 0.0, 0.0, LiouvilleCoupling::make(1.0))) < 1e-9);
}

TEST_CASE("eval with mu parameters and correlators") {
  // mu = 1 everywhere is sigma = Q/2
  const Run a = run({"eval", "R", "--gamma", "1", "--beta", "1.7", "--mu1", "1", "--mu2", "1"});
  const Run b = run({"eval", "R", "--gamma", "1", "--beta", "1.7"});
  CHECK(json::parse(a.out)["value_re"] == json::parse(b.out)["value_re"]);
  const Run bad = run({"eval", "R", "--gamma", "1", "--mu1", "1", "--sigma1", "1.25"});
  CHECK(bad.code == kExitUsage);

  const Run c = run({"eval", "correlator", "--of", "R", "--positions", "0", "2", "--gamma", "1", "--beta", "1.4"});
  REQUIRE(c.code == kExitPass);
  const json j = json::parse(c.out);
  CorrelatorParams p;
  p.beta = 1.4;
  p.sigmas = {1.25, 1.25, 1.25};
  const cplx expect = assemble_correlator(CorrelatorKind::R, {0.0, 2.0}, p, LiouvilleCoupling::make(1.0));
  CHECK(j["value_re"].get<double>() == doctest::Approx(expect.real()).epsilon(1e-14));
}

TEST_CASE("errors carry the error name and exit 2") {
  const Run pole = run({"eval", "U", "--gamma", "1", "--alpha", "0.5"});
  CHECK(pole.code == kExitUsage);
  CHECK(pole.err.find("PoleError") != std::string::npos);
  const Run dom = run({"eval", "U", "--gamma", "2.5"});
  CHECK(dom.code == kExitUsage);
  CHECK(dom.err.find("DomainError") != std::string::npos);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"eval", "Z"}).code == kExitUsage);
}

TEST_CASE("verify prints one JSON line per identity") {
  const Run r = run({"verify", "--suite", "reflect_R", "--gamma", "1", "--points", "5"});
  CHECK(r.code == kExitPass);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 1);
  const json j = json::parse(ls[0]);
  CHECK(j["identity"] == "reflect_R");
  CHECK(j["n_points"] == 5);
  CHECK(j["max_residual"].get<double>() < 1e-8);
  CHECK(j["pass"] == true);

  const Run strict = run({"verify", "--suite", "reflect_R", "--gamma", "1", "--points", "5", "--tol", "1e-30"});
  CHECK(strict.code == kExitCheckFailed);
  CHECK(json::parse(strict.out)["pass"] == false);

  CHECK(run({"verify", "--suite", "nonsense"}).code == kExitUsage);
  // more admissible points than the generator may draw
  const Run grid = run({"verify", "--suite", "shift_R_gamma", "--gamma", "1", "--points", "1000"});
  CHECK(grid.code == kExitUsage);
  CHECK(grid.err.find("GridError") != std::string::npos);
}

TEST_CASE("mc output is CSV and reproducible") {
  const std::vector<std::string> args = {"mc",          "--check",     "fyodorov_bouchaud", "--gamma", "1",
                                         "--p",         "0.5",         "--n-samples",       "3000",    "--n-modes",
                                         "128",         "--seed",      "4"};
  const Run a = run(args), b = run(args);
  CHECK(a.code == kExitPass);
  CHECK(a.out == b.out);
  const auto ls = lines(a.out);
  REQUIRE(ls.size() == 4);
  const auto head = split(ls[0]);
  CHECK(head == std::vector<std::string>{"check", "gamma", "p", "beta", "a", "b", "stage", "exact", "mc_mean",
                                         "mc_stderr", "z_score", "n_samples", "n_modes", "seed", "pass"});
  CHECK(split(ls[1])[6] == "coarse");
  CHECK(split(ls[2])[6] == "fine");
  CHECK(split(ls[3])[6] == "extrapolated");
  CHECK(split(ls[3])[14] == "PASS");
  CHECK(a.out.find("\r\n") != std::string::npos);

  const Run other = run({"mc", "--check", "fyodorov_bouchaud", "--gamma", "1", "--p", "0.5", "--n-samples", "3000",
                         "--n-modes", "128", "--seed", "5"});
  CHECK(other.out != a.out);

  CHECK(run({"mc", "--check", "interval", "--gamma", "1", "--p", "9"}).code == kExitUsage);
  CHECK(run({"mc", "--check", "nope"}).code == kExitUsage);
}

TEST_CASE("sweep") {
  const auto c = LiouvilleCoupling::make(1.0);
  const double lo = c.gamma / 2.0 + 0.05, hi = c.Q() - 0.05;
  const Run r = run({"sweep", "--target", "R", "--axis", "beta", "--from", std::to_string(lo), "--to",
                     std::to_string(hi), "--steps", "100", "--gamma", "1"});
  CHECK(r.code == kExitPass);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 101);
  CHECK(ls[0] == "beta,value_re,value_im,skipped");
  for (size_t i = 1; i < ls.size(); ++i) {
    const auto f = split(ls[i]);
    REQUIRE(f.size() == 4);
    CHECK(f[3] == "0");
    CHECK(std::isfinite(std::stod(f[1])));
  }

  // U has a pole at alpha = gamma/2; a grid hitting it flags that row only
  const Run p = run({"sweep", "--target", "U", "--axis", "alpha", "--from", "0.3", "--to", "0.7", "--steps", "5",
                     "--gamma", "1"});
  ls = lines(p.out);
  REQUIRE(ls.size() == 6);
  CHECK(split(ls[3])[3] == "1");
  CHECK(split(ls[2])[3] == "0");
  CHECK(split(ls[4])[3] == "0");
  CHECK(std::isfinite(std::stod(split(ls[2])[1])));
  CHECK(std::isfinite(std::stod(split(ls[4])[1])));

  // U is real for real alpha
  const Run u = run({"sweep", "--target", "U", "--axis", "alpha", "--from", "0.55", "--to", "5.0", "--steps", "23",
                     "--gamma", "1"});
  for (const auto& l : lines(u.out)) {
    const auto f = split(l);
    if (f[0] == "alpha" || f[3] == "1") continue;
    CHECK(std::abs(std::stod(f[2])) <= 1e-12 * std::abs(std::stod(f[1])));
  }
}

TEST_CASE("config file and output file") {
  const std::string cfg = temp_path("cfg.toml");
  {
    std::ofstream f(cfg);
    f << "gamma = 1.3\n[tolerances]\nreflect_R = 1e-30\n[mc]\nn_samples = 2000\nn_modes = 64\nseed = 9\n";
  }
  const ConfigFile cf = read_config_file(cfg);
  REQUIRE(cf.find("mc", "seed") != nullptr);
  CHECK(*cf.find("mc", "seed") == "9");
  CHECK(*cf.find("", "gamma") == "1.3");
  CHECK(cf.find("mc", "missing") == nullptr);

  // tolerance from the file, then overridden by the flag
  CHECK(run({"--config", cfg, "verify", "--suite", "reflect_R", "--points", "4"}).code == kExitCheckFailed);
  CHECK(run({"--config", cfg, "verify", "--suite", "reflect_R", "--points", "4", "--tol", "1e-8"}).code == kExitPass);

  const std::string out = temp_path("mc.csv");
  const Run m = run({"--config", cfg, "mc", "--check", "circle_insertion", "--beta", "0.4", "--output", out});
  CHECK(m.out.empty());
  std::ifstream in(out, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto ls = lines(ss.str());
  REQUIRE(ls.size() == 4);
  const auto row = split(ls[3]);
  CHECK(row[1] == "1.3");
  CHECK(row[11] == "2000");
  CHECK(row[12] == "64");
  CHECK(row[13] == "9");
  const Run flag = run({"--config", cfg, "mc", "--check", "circle_insertion", "--beta", "0.4", "--seed", "10"});
  CHECK(split(lines(flag.out)[3])[13] == "10");

  std::remove(cfg.c_str());
  std::remove(out.c_str());
  CHECK(run({"--config", "/nonexistent/bcft.toml", "eval", "U"}).code == kExitUsage);
}
