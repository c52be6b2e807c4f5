#ifndef ROUGHSIG_HARNESS_HPP
#define ROUGHSIG_HARNESS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "roughsig/config.hpp"
#include "roughsig/homogenize.hpp"

namespace roughsig {

struct SweepRow {
  Rational eps;
  Index dofs = 0;
  double grad_norm = 0.0;         // broken H^1 seminorm over Q minus the interface
  double jump_norm = 0.0;         // L^2 norm of [u] on the interface polyline
  double scaled_jump_norm = 0.0;  // eps^{gamma/2} jump_norm
  double l2_error = 0.0;          // ||u_eps - u||, quadrature on the rough mesh
  double l2_error_limit_side = 0.0;  // same difference, quadrature on the limit mesh
  double active_fraction = 0.0;
  Index iterations = 0;
  double interface_energy = 0.0;  // eps^gamma int h [u]^2
  double energy_residual = 0.0;
  double complementarity = 0.0;   // worst entry of the triple
};

struct FailedRow {
  Rational eps;
  std::string cause;
};

struct SweepReport {
  std::string scenario;
  Regime regime = Regime::A;        // regime of the data (k, gamma)
  Regime limit_regime = Regime::A;  // limit problem used for the error column
  std::vector<SweepRow> rows;       // decreasing eps
  std::vector<FailedRow> failures;
  double limit_l2 = 0.0;
  double limit_grad = 0.0;
  double limit_jump = 0.0;
};

struct SweepOptions {
  unsigned threads = 1;
};

/// Solves the rough problem for every eps and the matching limit problem once.
/// Throws SolverError when fewer than three rows succeed.
SweepReport run_sweep(const ScenarioConfig& config, const SweepOptions& options = {});

struct Thresholds {
  double grad_ratio = 3.0;
  double jump_ratio = 3.0;
  double trend_factor = 0.5;
  double invariant_tol = 1e-8;
  double cross_mesh_factor = 2.0;
};

Thresholds thresholds_from(const ScenarioConfig& config);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Boundedness, trend and per-row invariant checks.
std::vector<Check> verify_apriori(const SweepReport& report, const Thresholds& thresholds = {});

/// Trend check: last <= factor * first.
bool decays_by(const std::vector<double>& values, double factor);
/// max / median <= ratio; an all-zero column passes.
bool bounded_by(const std::vector<double>& values, double ratio);

void write_csv(std::ostream& os, const SweepReport& report);

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Static log-log line chart; non-positive points are skipped.
void write_svg_chart(std::ostream& os, const std::string& title, const std::string& x_label,
                     const std::string& y_label, const std::vector<ChartSeries>& series);

struct ReportPaths {
  std::string csv;
  std::string error_chart;
  std::string jump_chart;
};

/// Writes <dir>/<scenario>.csv, <dir>/<scenario>_error.svg and <dir>/<scenario>_jump.svg.
ReportPaths emit_report(const SweepReport& report, const std::string& dir);

}  // namespace roughsig

#endif  // ROUGHSIG_HARNESS_HPP
