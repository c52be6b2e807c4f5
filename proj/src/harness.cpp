#include "roughsig/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "roughsig/assembly.hpp"
#include "roughsig/limit_solver.hpp"
#include "roughsig/vi_solver.hpp"

namespace roughsig {

namespace {

struct RowOutcome {
  std::optional<SweepRow> row;
  std::string cause;
};

RowOutcome solve_row(const ScenarioConfig& config, const Rational& eps, const LimitSolution& limit) {
  RowOutcome out;
  try {
    const DomainSpec domain = config.domain(eps);
    const double e = domain.eps_value();
    const double gamma = to_double(config.gamma);
    const TwoComponentMesh mesh =
        build_rough_mesh(domain, config.profile(), config.nx_per_period, config.ny);
    const ReducedVIProblem problem = apply_dirichlet(assemble_problem(
        mesh, config.coefficient(), config.conductance(), config.source(), e, gamma));
    const DiscreteVISolution sol = solve_vi(problem, config.vi_options());
    const FieldNorms norms = l2_norms(mesh, sol.nodal);

    SweepRow row;
    row.eps = eps;
    row.dofs = problem.size();
    row.grad_norm = norms.h1;
    row.jump_norm = norms.jump;
    row.scaled_jump_norm = std::pow(e, 0.5 * gamma) * norms.jump;
    row.l2_error = l2_difference(mesh, sol.nodal, limit.mesh, limit.nodal);
    row.l2_error_limit_side = l2_difference(limit.mesh, limit.nodal, mesh, sol.nodal);
    row.active_fraction = problem.pairs.empty()
                              ? 0.0
                              : static_cast<double>(sol.active.size()) /
                                    static_cast<double>(problem.pairs.size());
    row.iterations = sol.iterations;
    row.interface_energy = interface_energy(problem.coupling, sol.free_values);
    row.energy_residual = energy_identity_residual(problem, sol.free_values);
    row.complementarity = std::max({sol.complementarity.primal, sol.complementarity.dual,
                                    sol.complementarity.product});
    out.row = row;
  } catch (const Error& err) {
    out.cause = err.what();
  }
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

template <typename F>
std::vector<double> column(const SweepReport& r, F&& f) {
  std::vector<double> out;
  for (const auto& row : r.rows) out.push_back(f(row));
  return out;
}

}  // namespace

SweepReport run_sweep(const ScenarioConfig& config, const SweepOptions& options) {
  config.validate();
  if (config.eps.size() < 3) throw ValidationError("sweep.eps: sweep needs >= 3 eps values");

  SweepReport report;
  report.scenario = config.name;
  report.regime = config.data_regime();
  report.limit_regime = config.limit_regime();

  const PeriodicCoefficient coeff = config.coefficient();
  LimitProblemSpec spec;
  spec.regime = report.limit_regime;
  spec.tensor = homogenized_tensor(coeff, build_cell_mesh(config.cell_n)).tensor;
  if (spec.regime == Regime::A) {
    // A limit forced onto other data still needs a conductance: take the case-A
    // formula for this k (gamma on the case-A line).
    const Rational gamma_a = config.k >= Rational(1) ? Rational(0) : Rational(1) - config.k;
    spec.conductance =
        effective_conductance(config.conductance(), config.profile(), config.k, gamma_a);
  }
  spec.source = config.source();
  spec.length = config.length;
  spec.half_height = config.half_height;
  spec.nx = config.resolved_flat_nx();
  spec.ny = config.ny;
  const LimitSolution limit = solve_limit(spec, config.vi_options());
  const FieldNorms limit_norms = l2_norms(limit.mesh, limit.nodal);
  report.limit_l2 = limit_norms.l2;
  report.limit_grad = limit_norms.h1;
  report.limit_jump = limit_norms.jump;

  std::vector<Rational> eps = config.eps;
  std::sort(eps.begin(), eps.end(), [](const Rational& a, const Rational& b) { return a > b; });
  std::vector<RowOutcome> outcomes(eps.size());
  const unsigned threads =
      std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(eps.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < eps.size(); ++i) outcomes[i] = solve_row(config, eps[i], limit);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < eps.size(); i = next++)
          outcomes[i] = solve_row(config, eps[i], limit);
      });
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (outcomes[i].row) report.rows.push_back(*outcomes[i].row);
    else report.failures.push_back({eps[i], outcomes[i].cause});
  }
  if (report.rows.size() < 3) {
    std::string msg = "sweep: only " + std::to_string(report.rows.size()) + " rows succeeded";
    for (const auto& f : report.failures) msg += "; eps = " + to_string(f.eps) + ": " + f.cause;
    throw SolverError(msg);
  }
  return report;
}

Thresholds thresholds_from(const ScenarioConfig& config) {
  Thresholds t;
  t.grad_ratio = config.grad_ratio;
  t.jump_ratio = config.jump_ratio;
  t.trend_factor = config.trend_factor;
  return t;
}

bool decays_by(const std::vector<double>& values, double factor) {
  if (values.size() < 2) return false;
  return values.back() <= factor * values.front();
}

bool bounded_by(const std::vector<double>& values, double ratio) {
  if (values.empty()) return false;
  const double top = *std::max_element(values.begin(), values.end());
  if (top == 0.0) return true;
  const double mid = median(values);
  return mid > 0.0 && top / mid <= ratio;
}

std::vector<Check> verify_apriori(const SweepReport& report, const Thresholds& th) {
  std::vector<Check> checks;
  auto add = [&](std::string name, bool ok, std::string detail) {
    checks.push_back({std::move(name), ok, std::move(detail)});
  };
  if (report.rows.size() < 3) {
    add("rows", false, "need at least 3 rows, have " + std::to_string(report.rows.size()));
    return checks;
  }
  auto ratio_detail = [](const std::vector<double>& v) {
    const double top = *std::max_element(v.begin(), v.end());
    const double mid = median(v);
    return "max/median = " + (mid > 0.0 ? fmt(top / mid) : std::string(top == 0.0 ? "0/0" : "inf"));
  };
  auto trend_detail = [](const std::vector<double>& v) {
    return "first = " + fmt(v.front()) + ", last = " + fmt(v.back());
  };

  const auto grad = column(report, [](const SweepRow& r) { return r.grad_norm; });
  add("grad_norm_bounded", bounded_by(grad, th.grad_ratio), ratio_detail(grad));
  const auto sjump = column(report, [](const SweepRow& r) { return r.scaled_jump_norm; });
  add("scaled_jump_bounded", bounded_by(sjump, th.jump_ratio), ratio_detail(sjump));

  const auto err = column(report, [](const SweepRow& r) { return r.l2_error; });
  add("l2_error_trend", decays_by(err, th.trend_factor), trend_detail(err));
  if (report.regime == Regime::B) {
    const auto ie = column(report, [](const SweepRow& r) { return r.interface_energy; });
    bool ok = true;
    for (std::size_t i = 1; i < ie.size(); ++i) ok = ok && (ie[i] < ie[i - 1] || ie[i] == 0.0);
    add("interface_energy_decreasing", ok, trend_detail(ie));
  }
  if (report.regime == Regime::C) {
    const auto jump = column(report, [](const SweepRow& r) { return r.jump_norm; });
    add("jump_trend", decays_by(jump, th.trend_factor), trend_detail(jump));
  }

  double worst_energy = 0.0, worst_comp = 0.0, worst_cross = 1.0;
  bool finite = true;
  for (const auto& r : report.rows) {
    worst_energy = std::max(worst_energy, r.energy_residual);
    worst_comp = std::max(worst_comp, r.complementarity);
    for (double v : {r.grad_norm, r.jump_norm, r.scaled_jump_norm, r.l2_error})
      finite = finite && std::isfinite(v) && v >= 0.0;
    const double a = r.l2_error, b = r.l2_error_limit_side;
    if (a > 0.0 || b > 0.0)
      worst_cross = std::max(worst_cross, std::max(a, b) / std::max(std::min(a, b), 1e-300));
  }
  add("norms_finite", finite, finite ? "all finite and nonnegative" : "non-finite entry");
  add("energy_identity", worst_energy <= th.invariant_tol, "worst residual " + fmt(worst_energy));
  add("complementarity", worst_comp <= th.invariant_tol, "worst entry " + fmt(worst_comp));
  add("cross_mesh_consistency", worst_cross <= th.cross_mesh_factor,
      "worst ratio " + fmt(worst_cross));
  return checks;
}

void write_csv(std::ostream& os, const SweepReport& report) {
  os << "scenario,regime,eps,dofs,grad_norm,jump_norm,scaled_jump_norm,l2_error,active_fraction,"
        "iters\n";
  os << std::setprecision(10);
  for (const auto& r : report.rows)
    os << report.scenario << ',' << regime_letter(report.regime) << ',' << to_double(r.eps) << ','
       << r.dofs << ',' << r.grad_norm << ',' << r.jump_norm << ',' << r.scaled_jump_norm << ','
       << r.l2_error << ',' << r.active_fraction << ',' << r.iterations << '\n';
}

void write_svg_chart(std::ostream& os, const std::string& title, const std::string& x_label,
                     const std::string& y_label, const std::vector<ChartSeries>& series) {
  constexpr double width = 640.0, height = 420.0;
  constexpr double left = 80.0, right = 160.0, top = 40.0, bottom = 60.0;
  const double pw = width - left - right, ph = height - top - bottom;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      xmin = std::min(xmin, std::log10(s.x[i]));
      xmax = std::max(xmax, std::log10(s.x[i]));
      ymin = std::min(ymin, std::log10(s.y[i]));
      ymax = std::max(ymax, std::log10(s.y[i]));
    }
  const bool empty = !(xmin <= xmax);
  if (empty) xmin = -1.0, xmax = 0.0, ymin = -1.0, ymax = 0.0;
  xmin = std::floor(xmin), xmax = std::ceil(xmax), ymin = std::floor(ymin), ymax = std::ceil(ymax);
  if (xmax == xmin) xmax += 1.0;
  if (ymax == ymin) ymax += 1.0;
  auto px = [&](double lx) { return left + pw * (lx - xmin) / (xmax - xmin); };
  auto py = [&](double ly) { return top + ph * (1.0 - (ly - ymin) / (ymax - ymin)); };

  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"16\">"
     << title << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double d = xmin; d <= xmax + 1e-9; d += 1.0) {
    os << "<line x1=\"" << px(d) << "\" y1=\"" << top << "\" x2=\"" << px(d) << "\" y2=\""
       << top + ph << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << px(d) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"12\">1e"
       << static_cast<int>(d) << "</text>\n";
  }
  for (double d = ymin; d <= ymax + 1e-9; d += 1.0) {
    os << "<line x1=\"" << left << "\" y1=\"" << py(d) << "\" x2=\"" << left + pw << "\" y2=\""
       << py(d) << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << py(d) + 4 << "\" text-anchor=\"end\" "
          "font-family=\"sans-serif\" font-size=\"12\">1e"
       << static_cast<int>(d) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 16 << "\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"13\">"
     << x_label << "</text>\n";
  os << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\" transform=\"rotate(-90 18 "
     << top + ph / 2 << ")\">" << y_label << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % 4];
    std::ostringstream pts;
    pts << std::fixed << std::setprecision(2);
    std::vector<std::pair<double, double>> marks;
    for (std::size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i) {
      if (!(series[s].x[i] > 0.0) || !(series[s].y[i] > 0.0)) continue;
      const double x = px(std::log10(series[s].x[i])), y = py(std::log10(series[s].y[i]));
      pts << (marks.empty() ? "" : " ") << x << ',' << y;
      marks.emplace_back(x, y);
    }
    if (marks.size() > 1)
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
         << pts.str() << "\"/>\n";
    for (const auto& [x, y] : marks)
      os << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    const double ly = top + 16.0 + 20.0 * static_cast<double>(s);
    os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 32
       << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" "
          "font-size=\"12\">"
       << series[s].label << "</text>\n";
  }
  os << "</svg>\n";
}

ReportPaths emit_report(const SweepReport& report, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("report: cannot create directory '" + dir + "': " + ec.message());
  const std::filesystem::path base(dir);
  ReportPaths paths{(base / (report.scenario + ".csv")).string(),
                    (base / (report.scenario + "_error.svg")).string(),
                    (base / (report.scenario + "_jump.svg")).string()};
  auto open = [](const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("report: cannot write '" + path + "'");
    return out;
  };
  const auto eps = column(report, [](const SweepRow& r) { return to_double(r.eps); });
  {
    auto out = open(paths.csv);
    write_csv(out, report);
  }
  {
    auto out = open(paths.error_chart);
    write_svg_chart(out, report.scenario + ": L2 error against the limit", "eps", "error",
                    {{"l2_error", eps, column(report, [](const SweepRow& r) { return r.l2_error; })}});
  }
  {
    auto out = open(paths.jump_chart);
    write_svg_chart(
        out, report.scenario + ": interface jump", "eps", "norm",
        {{"jump_norm", eps, column(report, [](const SweepRow& r) { return r.jump_norm; })},
         {"scaled_jump_norm", eps,
          column(report, [](const SweepRow& r) { return r.scaled_jump_norm; })}});
  }
  return paths;
}

}  // namespace roughsig
