// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "roughsig/assembly.hpp"
#include "roughsig/config.hpp"
#include "roughsig/harness.hpp"
#include "roughsig/homogenize.hpp"
#include "roughsig/vi_solver.hpp"

using namespace roughsig;
using boost::math::quadrature::gauss_kronrod;

namespace {

const double pi = std::acos(-1.0);
const std::string scenarios = std::string(ROUGHSIG_SOURCE_DIR) + "/scenarios/";

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double integrate(const std::function<double(double)>& f) {
  return gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14);
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << ']';
    }
  }
};

int failures = 0;

void report(int id, const std::string& title, Outcome& o) {
  std::printf("%s criterion %d %s:%s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.str().c_str());
  std::fflush(stdout);
  failures += o.pass ? 0 : 1;
}

double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

// Energy identity residuals of every converged solve across the gate.
double worst_energy = 0.0;
Index energy_solves = 0;

void note_energy(double r) {
  worst_energy = std::max(worst_energy, r);
  ++energy_solves;
}

void criterion1() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto data = homogenized_tensor(PeriodicCoefficient::identity(), build_cell_mesh(64));
  const double t = seconds_since(t0);
  const double err = max_abs(data.tensor - Mat2::Identity());
  o.detail << " |A0 - I|max = " << err << ", " << t << " s";
  o.require(err <= 1e-8, "tensor");
  o.require(t < 5.0, "runtime");
  report(1, "identity tensor", o);
}

void criterion2() {
  Outcome o;
  const double harmonic = 1.0 / integrate([](double y) { return 1.0 / (2.0 + std::sin(2.0 * pi * y)); });
  const auto coeff = PeriodicCoefficient::layered();
  Mat2 exact = Mat2::Zero();
  exact(0, 0) = harmonic;
  exact(1, 1) = 2.0;
  std::vector<Mat2> errs;
  Mat2 t64;
  for (Index n : {16, 32, 64}) {
    const Mat2 t = homogenized_tensor(coeff, build_cell_mesh(n)).tensor;
    errs.push_back((t - exact).cwiseAbs());
    t64 = t;
  }
  const double e11 = std::abs(t64(0, 0) - harmonic), e22 = std::abs(t64(1, 1) - 2.0);
  const double off = std::max(std::abs(t64(0, 1)), std::abs(t64(1, 0)));
  o.detail << " harmonic oracle " << harmonic << ", A0_11 err " << e11 << ", A0_22 err " << e22
           << ", off-diagonal " << off;
  o.require(e11 <= 2e-3 && e22 <= 2e-3, "diagonal");
  o.require(off <= 1e-8, "off-diagonal");
  bool cauchy = true;
  for (Index i = 0; i < 2; ++i) {
    cauchy = cauchy && errs[2](i, i) < errs[1](i, i) + 1e-14 && errs[1](i, i) < errs[0](i, i) + 1e-14;
  }
  cauchy = cauchy && errs[2](0, 0) < errs[1](0, 0) && errs[1](0, 0) < errs[0](0, 0);
  o.detail << ", A0_11 err n=16/32/64: " << errs[0](0, 0) << ' ' << errs[1](0, 0) << ' ' << errs[2](0, 0);
  o.require(cauchy, "refinement decrease");
  report(2, "layered tensor", o);
}

void criterion3() {
  Outcome o;
  for (const auto& coeff : {PeriodicCoefficient::identity(), PeriodicCoefficient::layered()}) {
    const auto data = homogenized_tensor(coeff, build_cell_mesh(64), 360);
    const bool ok = certify_bounds(data, coeff.alpha(), coeff.beta());
    o.detail << ' ' << coeff.name() << ": min form " << data.min_form << " >= " << coeff.alpha()
             << ", max image " << data.max_image << " <= " << coeff.beta() * coeff.beta() / coeff.alpha() << ';';
    o.require(ok, coeff.name());
  }
  report(3, "coercivity certificate", o);
}

void criterion4() {
  Outcome o;
  const auto one = InterfaceConductance::constant(1.0);
  const auto sine = InterfaceProfile::sine();
  const double c1 = *effective_conductance(one, sine, Rational(2), Rational(0));
  const double c2 = *effective_conductance(one, sine, Rational(1, 2), Rational(1, 2));
  const double c3 = *effective_conductance(one, sine, Rational(1), Rational(0));
  const double o2 = integrate([](double y) { return pi * std::abs(std::cos(2.0 * pi * y)); });
  const double o3 = integrate([](double y) { return std::sqrt(1.0 + std::pow(pi * std::cos(2.0 * pi * y), 2)); });
  o.detail << " k=2: " << c1 << "; k=1/2: " << c2 << " (oracle " << o2 << "); k=1: " << c3 << " (oracle " << o3 << ')';
  o.require(std::abs(c1 - 1.0) <= 1e-12, "k=2");
  o.require(std::abs(c2 - 2.0) <= 1e-6 && std::abs(o2 - 2.0) <= 1e-10, "k=1/2");
  o.require(std::abs(c3 - o3) <= 1e-3, "k=1");
  report(4, "effective conductance", o);
}

struct SmallCase {
  std::string label;
  TwoComponentMesh mesh;
  PeriodicCoefficient coeff;
  InterfaceConductance h;
  SourceTerm f;
  double eps;
  double gamma;
};

std::vector<SmallCase> small_cases() {
  std::vector<SmallCase> out;
  auto rough = [&](double length, Rational eps, InterfaceProfile g, Index nxpp, int gamma, SourceTerm f,
                   PeriodicCoefficient a, InterfaceConductance h, const std::string& label) {
    DomainSpec d;
    d.length = length;
    d.eps = eps;
    d.gamma = Rational(gamma);
    out.push_back({label, build_rough_mesh(d, g, nxpp, 4), a, h, f, d.eps_value(), double(gamma)});
  };
  const auto id = PeriodicCoefficient::identity();
  const auto one = InterfaceConductance::constant(1.0);
  for (Index nxpp : {8, 12})
    for (int gamma : {0, 1, -1}) {
      const std::string tag = "nxpp" + std::to_string(nxpp) + " gamma" + std::to_string(gamma);
      rough(0.25, {1, 4}, InterfaceProfile::sine(), nxpp, gamma, SourceTerm::split_sign(1.0, 0.125), id, one, "sine " + tag);
      rough(0.25, {1, 4}, InterfaceProfile::sawtooth(), nxpp, gamma, SourceTerm::split_sign(1.0), id, one, "sawtooth " + tag);
    }
  rough(0.5, {1, 2}, InterfaceProfile::sine(), 8, 0, SourceTerm::split_sign(1.0, 0.25), PeriodicCoefficient::layered(),
        InterfaceConductance::sine_positive(1.0), "layered");
  rough(0.5, {1, 2}, InterfaceProfile::sawtooth(), 8, 0, SourceTerm::bump(-3.0, Vec2(0.25, -0.3), 0.3),
        PeriodicCoefficient::rotated_anisotropic(0.4), one, "anisotropic");
  for (Index nx : {8, 12}) {
    out.push_back({"flat nx" + std::to_string(nx), build_flat_mesh(DomainSpec{}, nx, 4), id, one,
                   SourceTerm::split_sign(1.0, 0.5), 1.0, 0.0});
    out.push_back({"flat h=0 nx" + std::to_string(nx), build_flat_mesh(DomainSpec{}, nx, 4), id,
                   InterfaceConductance::zero(), SourceTerm::split_sign(1.0, 0.5), 1.0, 0.0});
  }
  return out;
}

void criterion5() {
  Outcome o;
  double worst_gap = 0.0, worst_comp = 0.0, worst_scale = 0.0;
  Index meshes = 0, with_active = 0;
  const double t = 3.7;
  for (const auto& c : small_cases()) {
    const auto p = apply_dirichlet(assemble_problem(c.mesh, c.coeff, c.h, c.f, c.eps, c.gamma));
    if (p.pairs.size() > 12) {
      o.require(false, c.label + " has more than 12 pairs");
      continue;
    }
    ++meshes;
    const auto psor = solve_vi(p);
    const auto exact = solve_vi_activeset(p);
    const double gap = (psor.nodal - exact.nodal).cwiseAbs().maxCoeff();
    worst_gap = std::max(worst_gap, gap);
    worst_comp = std::max({worst_comp, psor.complementarity.worst(), exact.complementarity.worst()});
    with_active += !psor.active.empty();
    note_energy(energy_identity_residual(p, psor.free_values));
    note_energy(energy_identity_residual(p, exact.free_values));
    if (gap > 1e-9) o.require(false, c.label);

    const auto scaled = apply_dirichlet(assemble_problem(c.mesh, c.coeff.scaled(t),
                                                         c.h.is_zero() ? c.h : c.h.scaled(t), c.f.scaled(t),
                                                         c.eps, c.gamma));
    const auto ps = solve_vi(scaled);
    worst_comp = std::max(worst_comp, ps.complementarity.worst());
    note_energy(energy_identity_residual(scaled, ps.free_values));
    worst_scale = std::max(worst_scale, (ps.nodal - psor.nodal).cwiseAbs().maxCoeff());
  }
  o.detail << ' ' << meshes << " meshes (" << with_active << " with contact), max gap " << worst_gap
           << ", complementarity " << worst_comp << ", scaling gap " << worst_scale;
  o.require(worst_gap <= 1e-9, "oracle gap");
  o.require(worst_comp <= 1e-8, "complementarity");
  o.require(worst_scale <= 1e-10, "scaling");
  report(5, "VI oracle equivalence", o);
}

unsigned worker_count() { return std::max(1u, std::min(4u, std::thread::hardware_concurrency())); }

struct SweepRun {
  SweepReport report;
  std::vector<Check> checks;
  double seconds = 0.0;
};

SweepRun sweep(const std::string& file) {
  const auto config = load_config(scenarios + file);
  SweepRun r;
  const auto t0 = Clock::now();
  r.report = run_sweep(config, {worker_count()});
  r.seconds = seconds_since(t0);
  r.checks = verify_apriori(r.report, thresholds_from(config));
  for (const auto& row : r.report.rows) note_energy(row.energy_residual);
  return r;
}

const Check* find(const SweepRun& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

bool passed(const SweepRun& r, const std::string& name) {
  const Check* c = find(r, name);
  return c && c->passed;
}

std::string column(const SweepRun& r, double SweepRow::*field) {
  std::ostringstream s;
  for (const auto& row : r.report.rows) s << (s.tellp() ? " " : "") << row.*field;
  return s.str();
}

void require_invariants(Outcome& o, const SweepRun& r) {
  o.require(r.report.rows.size() == 4 && r.report.failures.empty(), "all four rows solved");
  o.require(passed(r, "energy_identity"), "energy identity");
  o.require(passed(r, "complementarity"), "complementarity");
}

SweepRun run_a, run_b, run_c;

void criterion7() {
  Outcome o;
  run_a = sweep("case_a.ini");
  bool positive = !run_a.report.rows.empty();
  for (const auto& row : run_a.report.rows) positive = positive && row.l2_error > 0.0;
  o.detail << " l2 error " << column(run_a, &SweepRow::l2_error) << "; grad " << column(run_a, &SweepRow::grad_norm)
           << "; " << run_a.seconds << " s";
  require_invariants(o, run_a);
  o.require(positive, "error positive");
  o.require(passed(run_a, "l2_error_trend"), "error trend");
  o.require(passed(run_a, "grad_norm_bounded"), "gradient bound");
  o.require(run_a.seconds < 600.0, "runtime");
  report(7, "case A sweep", o);
}

void criterion8() {
  Outcome o;
  run_b = sweep("case_b.ini");
  o.detail << " interface energy " << column(run_b, &SweepRow::interface_energy) << "; l2 error "
           << column(run_b, &SweepRow::l2_error) << "; " << run_b.seconds << " s";
  require_invariants(o, run_b);
  o.require(run_b.report.limit_regime == Regime::B, "limit B");
  o.require(passed(run_b, "interface_energy_decreasing"), "interface energy");
  o.require(passed(run_b, "l2_error_trend"), "error trend");
  report(8, "case B sweep", o);
}

void criterion9() {
  Outcome o;
  run_c = sweep("case_c.ini");
  o.detail << " jump " << column(run_c, &SweepRow::jump_norm) << "; l2 error " << column(run_c, &SweepRow::l2_error)
           << "; scaled jump " << column(run_c, &SweepRow::scaled_jump_norm) << "; " << run_c.seconds << " s";
  require_invariants(o, run_c);
  o.require(run_c.report.limit_regime == Regime::C, "limit C");
  o.require(passed(run_c, "jump_trend"), "jump trend");
  o.require(passed(run_c, "l2_error_trend"), "error trend");
  o.require(passed(run_c, "scaled_jump_bounded"), "scaled jump bound");
  report(9, "case C sweep", o);
}

void criterion6() {
  Outcome o;
  o.detail << ' ' << energy_solves << " solves, worst relative residual " << worst_energy;
  o.require(energy_solves > 0 && worst_energy <= 1e-8, "energy identity");
  report(6, "energy identity", o);
}

void criterion10() {
  Outcome o;
  Index points = 0, mismatches = 0;
  for (int kn = 1; kn <= 36; ++kn)
    for (int gn = -48; gn <= 48; ++gn) {
      const Rational k(kn, 12), g(gn, 12);
      const bool a = (k >= Rational(1) && g == Rational(0)) || (k < Rational(1) && g == Rational(1) - k);
      const bool b = (k >= Rational(1) && g > Rational(0)) || (k < Rational(1) && g > Rational(1) - k);
      const bool c = (k >= Rational(1) && g < Rational(0)) || (k < Rational(1) && g < Rational(1) - k);
      ++points;
      if (int(a) + int(b) + int(c) != 1) ++mismatches;
      const Regime expected = a ? Regime::A : (b ? Regime::B : Regime::C);
      if (classify_regime(k, g) != expected) ++mismatches;
    }
  // Points on gamma = 1 - k whose floating-point evaluation is inexact.
  Index boundary = 0;
  for (int d : {3, 7, 10, 11, 13}) {
    for (int n = 1; n < d; ++n) {
      const Rational k(n, d);
      if (classify_regime(k, Rational(1) - k) != Regime::A) ++mismatches;
      ++boundary;
    }
  }
  bool rejects = false;
  try {
    classify_regime(Rational(0), Rational(0));
  } catch (const DomainError&) {
    rejects = true;
  }
  o.detail << ' ' << points << " grid points, " << boundary << " boundary points, " << mismatches << " mismatches";
  o.require(mismatches == 0, "classification");
  o.require(rejects, "k <= 0 rejected");
  report(10, "regime classifier", o);
}

void criterion11() {
  Outcome o;
  const auto config = load_config(scenarios + "negative_control.ini");
  const auto r = sweep("negative_control.ini");
  o.detail << " data regime " << regime_letter(config.data_regime()) << ", limit " << regime_letter(r.report.limit_regime)
           << ", l2 error " << column(r, &SweepRow::l2_error);
  o.require(config.data_regime() == Regime::A && r.report.limit_regime == Regime::B, "mis-paired limit");
  o.require(find(r, "l2_error_trend") && !passed(r, "l2_error_trend"), "error trend must fail");
  o.require(passed(run_a, "l2_error_trend"), "correctly paired run passes");
  report(11, "negative control", o);
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  auto guarded = [](int id, void (*fn)()) {
    try {
      fn();
    } catch (const std::exception& e) {
      std::printf("FAIL criterion %d: exception: %s\n", id, e.what());
      ++failures;
    }
  };
  guarded(1, criterion1);
  guarded(2, criterion2);
  guarded(3, criterion3);
  guarded(4, criterion4);
  guarded(5, criterion5);
  guarded(7, criterion7);
  guarded(8, criterion8);
  guarded(9, criterion9);
  guarded(6, criterion6);
  guarded(10, criterion10);
  guarded(11, criterion11);
  std::printf("%d of 11 criteria failed, %.1f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
