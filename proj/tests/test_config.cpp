#include "doctest.h"

#include <cmath>
#include <string>

#include "cgap/config.hpp"

using namespace cgap;
using namespace cgap::cfg;
using doctest::Approx;

namespace {
int error_line(const std::string& text) {
  try {
    run_spec(Config::parse(text));
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string error_text(const std::string& text) {
  try {
    run_spec(Config::parse(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kMinimal = "[initial]\nh = 0.3\ntheta = 0.2\n[run]\nt_end = 10\n";
} // namespace

TEST_CASE("parser basics") {
  const auto c = Config::parse("top = 1\n[A]\n  Key = 2.5   # trailing\n; comment\nname = hooke\nL = 1, 2,3\n");
  CHECK(c.num("", "top") == 1.0);
  CHECK(c.num("a", "key") == 2.5);
  CHECK(c.str("a", "name") == "hooke");
  CHECK(c.list("a", "l") == std::vector<double>{1, 2, 3});
  CHECK(c.line("a", "key") == 3);
  CHECK(c.line("a", "missing") == 0);
  CHECK(c.num("a", "missing", 7.0) == 7.0);
  CHECK(c.has_section("a"));
  CHECK_FALSE(c.has("b", "key"));
}

TEST_CASE("parser errors carry line numbers") {
  try {
    Config::parse("[a]\nx = 1\nx = 2\n");
    FAIL("duplicate accepted");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(Config::parse("[a]\njunk line\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[a\nx=1\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[a]\nx =\n"), ConfigError);
}

TEST_CASE("numbers are parsed without locale") {
  CHECK(parse_number("1e-3") == 1e-3);
  CHECK(parse_number("  -2.5 ") == -2.5);
  CHECK_THROWS_AS(parse_number("1,5"), ConfigError);
  CHECK_THROWS_AS(parse_number("abc"), ConfigError);
  CHECK_THROWS_AS(parse_number(""), ConfigError);
}

TEST_CASE("run spec defaults") {
  const auto s = run_spec(Config::parse(kMinimal));
  CHECK(s.sim.initial.h == 0.3);
  CHECK(s.sim.initial.theta == 0.2);
  CHECK(s.sim.initial.hdot == 0.0);
  CHECK(s.sim.t_end == 10.0);
  CHECK(s.sim.lambda0 == 0.0);
  CHECK(s.sim.body.e == 0.5);
  CHECK(s.sim.body.L == 3.0);
  CHECK(s.sim.omega < 0.0);
  CHECK(s.sim.source == dyn::ResistanceSource::table);
  CHECK(s.table.n_dist == 32);
}

TEST_CASE("run spec options") {
  const auto s = run_spec(Config::parse(std::string(kMinimal) +
                                        "omega = 0.25\nresistance = exact\nrtol = 1e-8\ndiagnostics = false\n"
                                        "[flow]\nlambda0 = 0.1\n[potential]\nr_h = 2\n[table]\nn_dist = 8\n"));
  CHECK(s.sim.omega == 0.25);
  CHECK(s.sim.source == dyn::ResistanceSource::exact);
  CHECK(s.sim.tol.rel == 1e-8);
  CHECK_FALSE(s.sim.diagnostics);
  CHECK(s.sim.lambda0 == 0.1);
  CHECK(s.sim.potential.r_h == 2.0);
  CHECK(s.table.n_dist == 8);
}

TEST_CASE("run spec errors name the key") {
  CHECK(error_text("[initial]\nh = 0.3\n[run]\nt_end = 1\n").find("theta") != std::string::npos);
  CHECK(error_text("[initial]\nh = 0.3\ntheta = 0\n").find("t_end") != std::string::npos);
  CHECK(error_line(std::string(kMinimal) + "bogus = 1\n") == 6);
  CHECK(error_text(std::string(kMinimal) + "bogus = 1\n").find("bogus") != std::string::npos);
  CHECK(error_line(std::string(kMinimal) + "resistance = maybe\n") == 6);
  CHECK(error_line(std::string(kMinimal) + "[potential]\nkind = cubic\n") == 7);
  CHECK_THROWS_AS(run_spec(Config::parse(std::string(kMinimal) + "[nonsense]\nx = 1\n")), ConfigError);
  CHECK_THROWS_AS(run_spec(Config::parse("[initial]\nh = 5\ntheta = 0\n[run]\nt_end = 1\n")), ConfigError);
}

TEST_CASE("sweep spec") {
  const auto s = sweep_spec(Config::parse(std::string(kMinimal) + "[sweep]\nlambda0 = 0, 0.1\ne0 = 0.01, 0.1, 1\n"));
  CHECK(s.lambda0.size() == 2);
  CHECK(s.energy.size() == 3);
  CHECK_THROWS_AS(sweep_spec(Config::parse(std::string(kMinimal) + "[sweep]\nlambda0 = 0\n")), ConfigError);
}

TEST_CASE("start with energy lies on the ray at rest") {
  const auto p = dyn::PotentialSpec::hooke(1.0, 2.0);
  const auto s = start_with_energy(p, 0.3, 0.2, 0.05);
  CHECK(p.value(s.h, s.theta) == Approx(0.05).epsilon(1e-10));
  CHECK(s.h / s.theta == Approx(1.5).epsilon(1e-12));
  CHECK(s.hdot == 0.0);
  CHECK(s.thetadot == 0.0);
  // Hooke: H = (r_h h^2 + r_theta theta^2) / 2, so the scale is sqrt(E0 / H(dir)).
  const double k = std::sqrt(0.05 / p.value(0.3, 0.2));
  CHECK(s.h == Approx(0.3 * k).epsilon(1e-10));
}
