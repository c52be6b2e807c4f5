#include <doctest.h>

#include <sstream>

#include "roughsig/config.hpp"

using namespace roughsig;

namespace {

const std::string dir = std::string(ROUGHSIG_SOURCE_DIR) + "/scenarios/";

ScenarioConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string serialize(const ScenarioConfig& c) {
  std::ostringstream out;
  write_config(out, c);
  return out.str();
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("canonical scenarios load") {
  const auto a = load_config(dir + "case_a.ini");
  CHECK(a.name == "case_a");
  CHECK(a.data_regime() == Regime::A);
  CHECK(a.limit_regime() == Regime::A);
  CHECK(a.eps.size() == 4);
  CHECK(a.eps.back() == Rational(1, 32));
  CHECK(a.nx_per_period == 16);
  CHECK(load_config(dir + "case_b.ini").data_regime() == Regime::B);
  CHECK(load_config(dir + "case_c.ini").data_regime() == Regime::C);
  const auto neg = load_config(dir + "negative_control.ini");
  CHECK(neg.data_regime() == Regime::A);
  CHECK(neg.limit_regime() == Regime::B);
  CHECK_THROWS_AS(load_config(dir + "missing.ini"), IoError);
}

TEST_CASE("serialize then parse is the identity") {
  ScenarioConfig c;
  c.name = "round";
  c.length = 2.0;
  c.half_height = 0.75;
  c.profile_preset = "samples";
  c.profile_abscissae = {0.0, 0.3, 0.7, 1.0};
  c.profile_values = {0.3, 0.1 + 0.2, 0.45, 0.3};
  c.coefficient_preset = "rotated-anisotropic";
  c.coefficient_theta = 0.123456789012345;
  c.coefficient_alpha = 0.4;
  c.conductance_preset = "samples";
  c.conductance_abscissae = {0.0, 0.5, 1.0};
  c.conductance_values = {1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0};
  c.conductance_h0 = 0.25;
  c.k = Rational(1, 3);
  c.gamma = Rational(2, 3);
  c.source_preset = "bump";
  c.source_c = -2.5;
  c.source_center = Vec2(0.5, 0.25);
  c.source_radius = 0.3;
  c.source_reverse_beyond = 0.7;
  c.nx_per_period = 12;
  c.ny = 6;
  c.flat_nx = 40;
  c.cell_n = 16;
  c.eps = {Rational(1, 2), Rational(1, 4), Rational(1, 8)};
  c.limit = "B";
  c.grad_ratio = 2.5;
  c.trend_factor = 0.6;
  c.tol = 1e-9;
  c.max_iter = 5000;
  c.relaxation = 1.3;
  c.output_dir = "elsewhere";
  c.validate();
  const std::string text = serialize(c);
  const auto back = parse(text);
  CHECK(back == c);
  CHECK(serialize(back) == text);

  for (const char* name : {"case_a.ini", "case_b.ini", "case_c.ini", "negative_control.ini"}) {
    const auto canonical = load_config(dir + name);
    CHECK(parse(serialize(canonical)) == canonical);
  }
}

TEST_CASE("defaults survive an empty file") {
  CHECK(parse("") == ScenarioConfig{});
}

TEST_CASE("errors carry the field path") {
  CHECK(error_of("[profile]\namplitude = 1.5\n").rfind("profile", 0) == 0);
  CHECK(error_of("[domain]\nlength = -1\n").rfind("domain.length", 0) == 0);
  CHECK(error_of("[mesh]\nny = two\n").rfind("mesh.ny", 0) == 0);
  CHECK(error_of("[exponents]\nk = 0\n").rfind("exponents", 0) == 0);
  CHECK(error_of("[exponents]\ngamma = 0.5x\n").rfind("exponents.gamma", 0) == 0);
  CHECK(error_of("[coefficient]\npreset = layered\nalpha = 1.5\n").rfind("coefficient", 0) == 0);
  CHECK(error_of("[conductance]\npreset = constant\nvalue = 1\nh0 = 2\n").rfind("conductance", 0) == 0);
  CHECK(error_of("[solver]\nrelaxation = 2\n").rfind("solver.relaxation", 0) == 0);
  CHECK(error_of("[sweep]\nlimit = D\n").rfind("sweep.limit", 0) == 0);
}

TEST_CASE("eps must tile the domain with whole periods") {
  const std::string msg = error_of("[sweep]\neps = 1/4, 2/5, 1/8\n");
  CHECK(msg.rfind("sweep.eps", 0) == 0);
  CHECK(error_of("[sweep]\neps = 1/4, 1/8, 1/16\n").empty());
}

TEST_CASE("unknown sections and keys are rejected") {
  CHECK(error_of("[mesh]\nnx = 4\n") == "mesh.nx: unknown key");
  CHECK(error_of("[bogus]\nx = 1\n") == "bogus: unknown section");
}

TEST_CASE("zero-flag conductance skips the lower bound") {
  const auto c = parse("[conductance]\nzero = true\n");
  CHECK(c.conductance().is_zero());
}

TEST_CASE("forced limit and flat resolution") {
  const auto c = parse("[sweep]\nlimit = C\n");
  CHECK(c.limit_regime() == Regime::C);
  CHECK(c.resolved_flat_nx() == 16 * 32);
  CHECK(parse("[mesh]\nflat_nx = 40\n").resolved_flat_nx() == 40);
  const auto o = parse("[solver]\ntol = 1e-7\nmax_iter = 10\nrelaxation = 1.2\n").vi_options();
  CHECK(o.tol == 1e-7);
  CHECK(o.max_iter == 10);
  CHECK(o.relaxation == 1.2);
}
