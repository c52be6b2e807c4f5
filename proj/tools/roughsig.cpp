// roughsig: command-line front end.
//
//   roughsig cell      --config PATH [--out DIR]
//   roughsig solve-eps --config PATH --eps RATIONAL [--out DIR]
//   roughsig sweep     --config PATH [--out DIR] [--threads N]
//   roughsig verify    FIELD PAIRS --config PATH --eps RATIONAL
//
// Exit codes: 0 ok, 1 failed checks, 2 validation, 3 solver, 4 io.
// ROUGHSIG_OUT_DIR overrides the output directory of the config; --out wins over both.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "roughsig/assembly.hpp"
#include "roughsig/config.hpp"
#include "roughsig/harness.hpp"
#include "roughsig/homogenize.hpp"
#include "roughsig/vi_solver.hpp"

using namespace roughsig;

namespace {

enum Exit { kOk = 0, kFailed = 1, kValidation = 2, kSolver = 3, kIo = 4 };

std::string output_dir(const ScenarioConfig& config, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("ROUGHSIG_OUT_DIR"); env && *env) return env;
  return config.output_dir;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

std::string eps_tag(const Rational& eps) {
  return "eps" + std::to_string(eps.numerator()) + "_" + std::to_string(eps.denominator());
}

struct EpsProblem {
  TwoComponentMesh mesh;
  ReducedVIProblem problem;
};

EpsProblem assemble_eps(const ScenarioConfig& config, const Rational& eps) {
  const DomainSpec domain = config.domain(eps);
  domain.validate();
  EpsProblem p;
  p.mesh = build_rough_mesh(domain, config.profile(), config.nx_per_period, config.ny);
  p.problem = apply_dirichlet(assemble_problem(p.mesh, config.coefficient(), config.conductance(),
                                               config.source(), domain.eps_value(),
                                               to_double(config.gamma)));
  return p;
}

int cmd_cell(const ScenarioConfig& config, const std::string& out_flag) {
  HomogenizedData data = homogenized_tensor(config.coefficient(), build_cell_mesh(config.cell_n));
  data.regime = config.data_regime();
  if (data.regime != Regime::C) {
    data.conductance = effective_conductance(config.conductance(), config.profile(), config.k,
                                             config.gamma);
    data.conductance_known = true;
  }
  const PeriodicCoefficient coeff = config.coefficient();
  const double alpha = config.coefficient_alpha.value_or(coeff.alpha());
  const double beta = config.coefficient_beta.value_or(coeff.beta());
  write_homogenized(std::cout, data);
  std::cout << "bounds " << (certify_bounds(data, alpha, beta) ? "certified" : "violated") << '\n';
  const std::filesystem::path dir = output_dir(config, out_flag);
  auto out = open_output(dir / (config.name + "_cell.txt"));
  write_homogenized(out, data);
  out << "bounds " << (certify_bounds(data, alpha, beta) ? "certified" : "violated") << '\n';
  return kOk;
}

int cmd_solve_eps(const ScenarioConfig& config, const Rational& eps, const std::string& out_flag) {
  const EpsProblem p = assemble_eps(config, eps);
  const DiscreteVISolution sol = solve_vi(p.problem, config.vi_options());
  const std::filesystem::path dir = output_dir(config, out_flag);
  const std::string stem = config.name + "_" + eps_tag(eps);
  {
    auto out = open_output(dir / (stem + "_field.txt"));
    write_field(out, sol.nodal);
  }
  {
    auto out = open_output(dir / (stem + "_pairs.txt"));
    write_pair_status(out, sol.pairs);
  }
  {
    auto out = open_output(dir / (stem + "_mesh.txt"));
    write_mesh(out, p.mesh);
  }
  std::cout << "eps " << to_string(eps) << " dofs " << p.problem.size() << " pairs "
            << sol.pairs.size() << " active " << sol.active.size() << " iterations "
            << sol.iterations << '\n';
  if (p.problem.coupling.nonZeros() == 0) std::cout << "interface coupling: empty\n";
  std::cout << "field " << (dir / (stem + "_field.txt")).string() << '\n';
  std::cout << "pairs " << (dir / (stem + "_pairs.txt")).string() << '\n';
  return kOk;
}

int cmd_sweep(const ScenarioConfig& config, const std::string& out_flag, unsigned threads) {
  const SweepReport report = run_sweep(config, {threads});
  for (const auto& f : report.failures)
    std::cerr << "row eps = " << to_string(f.eps) << " failed: " << f.cause << '\n';
  const auto checks = verify_apriori(report, thresholds_from(config));
  const ReportPaths paths = emit_report(report, output_dir(config, out_flag));
  write_csv(std::cout, report);
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
    ok = ok && c.passed;
  }
  std::cout << "csv " << paths.csv << '\n';
  return ok ? kOk : kFailed;
}

int cmd_verify(const ScenarioConfig& config, const Rational& eps, const std::string& field_path,
               const std::string& pairs_path) {
  std::ifstream field_in(field_path);
  if (!field_in) throw IoError("cannot read field dump '" + field_path + "'");
  std::ifstream pairs_in(pairs_path);
  if (!pairs_in) throw IoError("cannot read pair dump '" + pairs_path + "'");
  const VectorXd nodal = read_field(field_in);
  const std::vector<PairStatus> dumped = read_pair_status(pairs_in);

  const EpsProblem p = assemble_eps(config, eps);
  if (nodal.size() != p.mesh.num_nodes())
    throw IoError("field dump has " + std::to_string(nodal.size()) + " values, mesh has " +
                  std::to_string(p.mesh.num_nodes()) + " nodes");
  const VectorXd free_values = p.problem.restrict_full(nodal);
  const std::vector<PairStatus> fresh = pair_status(p.problem, free_values);

  constexpr double tol = 1e-8;
  bool ok = true;
  if (dumped.size() != fresh.size()) {
    std::cout << "FAIL pair count: dump " << dumped.size() << ", mesh " << fresh.size() << '\n';
    ok = false;
  }
  double jump_scale = 1.0, mult_scale = 1.0;
  for (const auto& s : fresh) {
    jump_scale = std::max(jump_scale, std::abs(s.jump));
    mult_scale = std::max(mult_scale, std::abs(s.multiplier));
  }
  double jump_gap = 0.0, mult_gap = 0.0;
  for (std::size_t i = 0; i < std::min(dumped.size(), fresh.size()); ++i) {
    if (dumped[i].mesh_pair != fresh[i].mesh_pair) {
      std::cout << "FAIL pair id mismatch at line " << i + 1 << '\n';
      ok = false;
      break;
    }
    jump_gap = std::max(jump_gap, std::abs(dumped[i].jump - fresh[i].jump));
    mult_gap = std::max(mult_gap, std::abs(dumped[i].multiplier - fresh[i].multiplier));
  }
  const ComplementarityReport comp = check_complementarity(dumped);
  const double energy = energy_identity_residual(p.problem, free_values);
  auto line = [&](const char* name, double value, double limit) {
    const bool pass = value <= limit;
    std::cout << (pass ? "PASS " : "FAIL ") << name << ' ' << value << '\n';
    ok = ok && pass;
  };
  line("jump_consistency", jump_gap, tol * jump_scale);
  line("multiplier_consistency", mult_gap, tol * mult_scale);
  line("primal_feasibility", comp.primal, tol);
  line("dual_feasibility", comp.dual, tol);
  line("complementarity_product", comp.product, tol);
  line("energy_identity", energy, tol);
  return ok ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rough-interface Signorini transmission toolkit"};
  app.require_subcommand(1);
  std::string config_path, eps_text, out_dir, field_path, pairs_path;
  unsigned threads = 1;

  auto* cell = app.add_subcommand("cell", "Homogenized tensor, effective conductance, regime");
  cell->add_option("--config", config_path, "Scenario file")->required();
  cell->add_option("--out", out_dir, "Output directory");

  auto* solve = app.add_subcommand("solve-eps", "Solve the rough problem at one eps");
  solve->add_option("--config", config_path, "Scenario file")->required();
  solve->add_option("--eps", eps_text, "Scale, e.g. 1/8")->required();
  solve->add_option("--out", out_dir, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Run the eps sweep and check the estimates");
  sweep->add_option("--config", config_path, "Scenario file")->required();
  sweep->add_option("--out", out_dir, "Output directory");
  sweep->add_option("--threads", threads, "Rows solved concurrently")->check(CLI::Range(1u, 256u));

  auto* verify = app.add_subcommand("verify", "Recheck complementarity of solution dumps");
  verify->add_option("field", field_path, "Field dump")->required();
  verify->add_option("pairs", pairs_path, "Pair-status dump")->required();
  verify->add_option("--config", config_path, "Scenario file")->required();
  verify->add_option("--eps", eps_text, "Scale of the dumped solve")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    const ScenarioConfig config = load_config(config_path);
    if (cell->parsed()) return cmd_cell(config, out_dir);
    const Rational eps = eps_text.empty() ? Rational(0) : parse_rational(eps_text);
    if (solve->parsed()) return cmd_solve_eps(config, eps, out_dir);
    if (sweep->parsed()) return cmd_sweep(config, out_dir, threads);
    if (verify->parsed()) return cmd_verify(config, eps, field_path, pairs_path);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolver;
  } catch (const AssemblyError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolver;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kOk;
}
