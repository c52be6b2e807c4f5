#ifndef ROUGHSIG_CONFIG_HPP
#define ROUGHSIG_CONFIG_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "roughsig/coefficient.hpp"
#include "roughsig/common.hpp"
#include "roughsig/geometry.hpp"
#include "roughsig/homogenize.hpp"
#include "roughsig/profile.hpp"
#include "roughsig/vi_solver.hpp"

namespace roughsig {

/// Everything needed to run one scenario. INI layout, one section per block:
///
///   [scenario] name
///   [domain] length half_height
///   [profile] preset mean amplitude abscissae values
///   [coefficient] preset alpha beta theta a11 a12 a21 a22
///   [conductance] preset value h0 zero abscissae values
///   [exponents] k gamma
///   [source] preset c reverse_beyond center_x center_y radius
///   [mesh] nx_per_period ny flat_nx cell_n
///   [sweep] eps limit grad_ratio jump_ratio trend_factor
///   [solver] tol max_iter relaxation
///   [output] dir
///
/// Lists are comma separated; k, gamma and eps entries are rationals ("1/2").
struct ScenarioConfig {
  std::string name = "scenario";

  double length = 1.0;
  double half_height = 1.0;

  std::string profile_preset = "sine";
  double profile_mean = 1.0;
  double profile_amplitude = 0.5;
  std::vector<double> profile_abscissae;
  std::vector<double> profile_values;

  std::string coefficient_preset = "identity";
  std::optional<double> coefficient_alpha;
  std::optional<double> coefficient_beta;
  double coefficient_theta = 0.0;
  Mat2 coefficient_matrix = Mat2::Identity();

  std::string conductance_preset = "constant";
  double conductance_value = 1.0;
  std::optional<double> conductance_h0;
  bool conductance_zero = false;
  std::vector<double> conductance_abscissae;
  std::vector<double> conductance_values;

  Rational k{1};
  Rational gamma{0};

  std::string source_preset = "split-sign";
  double source_c = 1.0;
  std::optional<double> source_reverse_beyond;
  Vec2 source_center{0.5, -0.5};
  double source_radius = 0.5;

  Index nx_per_period = 16;
  Index ny = 16;
  Index flat_nx = 0;  // 0: finest x' resolution of the sweep
  Index cell_n = 64;

  std::vector<Rational> eps{Rational(1, 4), Rational(1, 8), Rational(1, 16), Rational(1, 32)};
  std::string limit = "auto";  // auto | A | B | C
  double grad_ratio = 3.0;
  double jump_ratio = 3.0;
  double trend_factor = 0.5;

  double tol = 1e-8;
  Index max_iter = 200000;
  double relaxation = 1.5;

  std::string output_dir = "out";

  InterfaceProfile profile() const;
  PeriodicCoefficient coefficient() const;
  InterfaceConductance conductance() const;
  SourceTerm source() const;
  DomainSpec domain(const Rational& eps_value) const;
  Regime data_regime() const { return classify_regime(k, gamma); }
  /// Regime of the limit problem the sweep compares against.
  Regime limit_regime() const;
  ViOptions vi_options() const;
  /// x' resolution of the limit mesh.
  Index resolved_flat_nx() const;

  /// Re-checks every rule of the underlying modules. Messages carry the field
  /// path ("profile.amplitude: ...").
  void validate() const;

  bool operator==(const ScenarioConfig& other) const;
};

ScenarioConfig parse_config(std::istream& is);
ScenarioConfig load_config(const std::string& path);
void write_config(std::ostream& os, const ScenarioConfig& config);

}  // namespace roughsig

#endif  // ROUGHSIG_CONFIG_HPP
