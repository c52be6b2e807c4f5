#include "roughsig/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace roughsig {

namespace pt = boost::property_tree;

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& path, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  if (first < last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
    throw ValidationError(path + ": expected a finite number, got '" + text + "'");
  return v;
}

Index parse_index(const std::string& path, const std::string& text) {
  const double v = parse_double(path, text);
  if (v != std::floor(v)) throw ValidationError(path + ": expected an integer, got '" + text + "'");
  return static_cast<Index>(v);
}

bool parse_bool(const std::string& path, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ValidationError(path + ": expected true or false, got '" + text + "'");
}

Rational parse_rational_at(const std::string& path, const std::string& text) {
  try {
    return parse_rational(text);
  } catch (const Error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& path, const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split_list(text)) out.push_back(parse_double(path, s));
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> get(const std::string& path) const {
    if (auto v = tree_.get_optional<std::string>(path)) return *v;
    return std::nullopt;
  }
  template <typename T, typename F>
  void read(const std::string& path, T& target, F&& parse) const {
    if (auto v = get(path)) target = parse(path, *v);
  }

 private:
  const pt::ptree& tree_;
};

}  // namespace

InterfaceProfile ScenarioConfig::profile() const {
  const ProfileKind kind = parse_profile_kind(profile_preset);
  switch (kind) {
    case ProfileKind::Sine: return InterfaceProfile::sine(profile_mean, profile_amplitude);
    case ProfileKind::Sawtooth: return InterfaceProfile::sawtooth(profile_mean, profile_amplitude);
    case ProfileKind::Samples: return InterfaceProfile::samples(profile_abscissae, profile_values);
  }
  throw ValidationError("profile.preset: unknown preset '" + profile_preset + "'");
}

PeriodicCoefficient ScenarioConfig::coefficient() const {
  if (coefficient_preset == "identity") return PeriodicCoefficient::identity();
  if (coefficient_preset == "layered") return PeriodicCoefficient::layered();
  if (coefficient_preset == "rotated-anisotropic")
    return PeriodicCoefficient::rotated_anisotropic(coefficient_theta);
  if (coefficient_preset == "constant") return PeriodicCoefficient::constant(coefficient_matrix);
  throw ValidationError("coefficient.preset: unknown preset '" + coefficient_preset + "'");
}

InterfaceConductance ScenarioConfig::conductance() const {
  if (conductance_zero) return InterfaceConductance::zero();
  InterfaceConductance h;
  if (conductance_preset == "constant") h = InterfaceConductance::constant(conductance_value);
  else if (conductance_preset == "sine-positive")
    h = InterfaceConductance::sine_positive(conductance_value);
  else if (conductance_preset == "samples")
    h = InterfaceConductance::samples(conductance_abscissae, conductance_values);
  else throw ValidationError("conductance.preset: unknown preset '" + conductance_preset + "'");
  if (conductance_h0) h = h.with_lower_bound(*conductance_h0);
  return h;
}

SourceTerm ScenarioConfig::source() const {
  switch (parse_source_kind(source_preset)) {
    case SourceKind::Constant: return SourceTerm::constant(source_c);
    case SourceKind::SplitSign: return SourceTerm::split_sign(source_c, source_reverse_beyond);
    case SourceKind::Bump: return SourceTerm::bump(source_c, source_center, source_radius);
  }
  throw ValidationError("source.preset: unknown preset '" + source_preset + "'");
}

DomainSpec ScenarioConfig::domain(const Rational& eps_value) const {
  DomainSpec d;
  d.length = length;
  d.half_height = half_height;
  d.eps = eps_value;
  d.k = k;
  d.gamma = gamma;
  return d;
}

Regime ScenarioConfig::limit_regime() const {
  if (limit == "auto") return data_regime();
  return parse_regime(limit);
}

ViOptions ScenarioConfig::vi_options() const {
  ViOptions o;
  o.tol = tol;
  o.max_iter = max_iter;
  o.relaxation = relaxation;
  return o;
}

Index ScenarioConfig::resolved_flat_nx() const {
  if (flat_nx > 0) return flat_nx;
  Index finest = 2;
  for (const auto& e : eps) finest = std::max(finest, domain(e).periods() * nx_per_period);
  return finest;
}

void ScenarioConfig::validate() const {
  auto rethrow = [](const std::string& block, auto&& fn) {
    try {
      fn();
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      if (msg.rfind(block + ".", 0) == 0) throw;
      throw ValidationError(block + ": " + msg);
    } catch (const GeometryError& e) {
      throw ValidationError(block + ": " + e.what());
    } catch (const DomainError& e) {
      throw ValidationError(block + ": " + e.what());
    }
  };
  if (name.empty()) throw ValidationError("scenario.name: must not be empty");
  if (!(length > 0.0)) throw ValidationError("domain.length: must be positive");
  if (!(half_height > 0.0)) throw ValidationError("domain.half_height: must be positive");
  rethrow("profile", [&] { profile().validate(); });
  rethrow("coefficient", [&] { coefficient().validate(coefficient_alpha, coefficient_beta); });
  rethrow("conductance", [&] { conductance().validate(); });
  rethrow("exponents", [&] { classify_regime(k, gamma); });
  rethrow("source", [&] { (void)source(); });
  if (source_radius <= 0.0) throw ValidationError("source.radius: must be positive");
  if (nx_per_period < 8) throw ValidationError("mesh.nx_per_period: must be at least 8");
  if (ny < 4) throw ValidationError("mesh.ny: must be at least 4");
  if (flat_nx < 0 || flat_nx == 1) throw ValidationError("mesh.flat_nx: must be 0 or at least 2");
  if (cell_n < 4) throw ValidationError("mesh.cell_n: must be at least 4");
  if (eps.empty()) throw ValidationError("sweep.eps: list is empty");
  for (const auto& e : eps) {
    rethrow("sweep.eps", [&] {
      const DomainSpec d = domain(e);
      d.validate();
      if (d.amplitude_scale() * profile().max_value() >= half_height)
        throw ValidationError("interface at eps = " + to_string(e) + " leaves Q (eps^k max g >= ell)");
    });
  }
  if (limit != "auto") rethrow("sweep.limit", [&] { parse_regime(limit); });
  if (!(grad_ratio >= 1.0)) throw ValidationError("sweep.grad_ratio: must be at least 1");
  if (!(jump_ratio >= 1.0)) throw ValidationError("sweep.jump_ratio: must be at least 1");
  if (!(trend_factor > 0.0 && trend_factor <= 1.0))
    throw ValidationError("sweep.trend_factor: must lie in (0, 1]");
  if (!(tol > 0.0)) throw ValidationError("solver.tol: must be positive");
  if (max_iter < 1) throw ValidationError("solver.max_iter: must be positive");
  if (!(relaxation > 0.0 && relaxation < 2.0))
    throw ValidationError("solver.relaxation: must lie in (0, 2)");
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  return name == o.name && length == o.length && half_height == o.half_height &&
         profile_preset == o.profile_preset && profile_mean == o.profile_mean &&
         profile_amplitude == o.profile_amplitude && profile_abscissae == o.profile_abscissae &&
         profile_values == o.profile_values && coefficient_preset == o.coefficient_preset &&
         coefficient_alpha == o.coefficient_alpha && coefficient_beta == o.coefficient_beta &&
         coefficient_theta == o.coefficient_theta && coefficient_matrix == o.coefficient_matrix &&
         conductance_preset == o.conductance_preset && conductance_value == o.conductance_value &&
         conductance_h0 == o.conductance_h0 && conductance_zero == o.conductance_zero &&
         conductance_abscissae == o.conductance_abscissae &&
         conductance_values == o.conductance_values && k == o.k && gamma == o.gamma &&
         source_preset == o.source_preset && source_c == o.source_c &&
         source_reverse_beyond == o.source_reverse_beyond && source_center == o.source_center &&
         source_radius == o.source_radius && nx_per_period == o.nx_per_period && ny == o.ny &&
         flat_nx == o.flat_nx && cell_n == o.cell_n && eps == o.eps && limit == o.limit &&
         grad_ratio == o.grad_ratio && jump_ratio == o.jump_ratio &&
         trend_factor == o.trend_factor && tol == o.tol && max_iter == o.max_iter &&
         relaxation == o.relaxation && output_dir == o.output_dir;
}

ScenarioConfig parse_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  static const std::vector<std::pair<std::string, std::vector<std::string>>> known = {
      {"scenario", {"name"}},
      {"domain", {"length", "half_height"}},
      {"profile", {"preset", "mean", "amplitude", "abscissae", "values"}},
      {"coefficient", {"preset", "alpha", "beta", "theta", "a11", "a12", "a21", "a22"}},
      {"conductance", {"preset", "value", "h0", "zero", "abscissae", "values"}},
      {"exponents", {"k", "gamma"}},
      {"source", {"preset", "c", "reverse_beyond", "center_x", "center_y", "radius"}},
      {"mesh", {"nx_per_period", "ny", "flat_nx", "cell_n"}},
      {"sweep", {"eps", "limit", "grad_ratio", "jump_ratio", "trend_factor"}},
      {"solver", {"tol", "max_iter", "relaxation"}},
      {"output", {"dir"}},
  };
  for (const auto& [section, body] : tree) {
    auto it = std::find_if(known.begin(), known.end(), [&](const auto& k) { return k.first == section; });
    if (it == known.end()) throw ValidationError(section + ": unknown section");
    for (const auto& [key, value] : body) {
      (void)value;
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        throw ValidationError(section + "." + key + ": unknown key");
    }
  }

  ScenarioConfig c;
  const Reader r(tree);
  auto str = [](const std::string&, const std::string& v) { return v; };
  auto num = [](const std::string& p, const std::string& v) { return parse_double(p, v); };
  auto opt_num = [](const std::string& p, const std::string& v) -> std::optional<double> {
    if (v == "none" || v.empty()) return std::nullopt;
    return parse_double(p, v);
  };
  auto idx = [](const std::string& p, const std::string& v) { return parse_index(p, v); };
  auto list = [](const std::string& p, const std::string& v) { return parse_double_list(p, v); };
  auto rat = [](const std::string& p, const std::string& v) { return parse_rational_at(p, v); };

  r.read("scenario.name", c.name, str);
  r.read("domain.length", c.length, num);
  r.read("domain.half_height", c.half_height, num);
  r.read("profile.preset", c.profile_preset, str);
  r.read("profile.mean", c.profile_mean, num);
  r.read("profile.amplitude", c.profile_amplitude, num);
  r.read("profile.abscissae", c.profile_abscissae, list);
  r.read("profile.values", c.profile_values, list);
  r.read("coefficient.preset", c.coefficient_preset, str);
  r.read("coefficient.alpha", c.coefficient_alpha, opt_num);
  r.read("coefficient.beta", c.coefficient_beta, opt_num);
  r.read("coefficient.theta", c.coefficient_theta, num);
  r.read("coefficient.a11", c.coefficient_matrix(0, 0), num);
  r.read("coefficient.a12", c.coefficient_matrix(0, 1), num);
  r.read("coefficient.a21", c.coefficient_matrix(1, 0), num);
  r.read("coefficient.a22", c.coefficient_matrix(1, 1), num);
  r.read("conductance.preset", c.conductance_preset, str);
  r.read("conductance.value", c.conductance_value, num);
  r.read("conductance.h0", c.conductance_h0, opt_num);
  r.read("conductance.zero", c.conductance_zero, parse_bool);
  r.read("conductance.abscissae", c.conductance_abscissae, list);
  r.read("conductance.values", c.conductance_values, list);
  r.read("exponents.k", c.k, rat);
  r.read("exponents.gamma", c.gamma, rat);
  r.read("source.preset", c.source_preset, str);
  r.read("source.c", c.source_c, num);
  r.read("source.reverse_beyond", c.source_reverse_beyond, opt_num);
  r.read("source.center_x", c.source_center.x(), num);
  r.read("source.center_y", c.source_center.y(), num);
  r.read("source.radius", c.source_radius, num);
  r.read("mesh.nx_per_period", c.nx_per_period, idx);
  r.read("mesh.ny", c.ny, idx);
  r.read("mesh.flat_nx", c.flat_nx, idx);
  r.read("mesh.cell_n", c.cell_n, idx);
  r.read("sweep.eps", c.eps, [&](const std::string& p, const std::string& v) {
    std::vector<Rational> out;
    for (const auto& s : split_list(v)) out.push_back(parse_rational_at(p, s));
    return out;
  });
  r.read("sweep.limit", c.limit, str);
  r.read("sweep.grad_ratio", c.grad_ratio, num);
  r.read("sweep.jump_ratio", c.jump_ratio, num);
  r.read("sweep.trend_factor", c.trend_factor, num);
  r.read("solver.tol", c.tol, num);
  r.read("solver.max_iter", c.max_iter, idx);
  r.read("solver.relaxation", c.relaxation, num);
  r.read("output.dir", c.output_dir, str);
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot read '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& os, const ScenarioConfig& c) {
  pt::ptree t;
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("none"); };
  t.put("scenario.name", c.name);
  t.put("domain.length", format_double(c.length));
  t.put("domain.half_height", format_double(c.half_height));
  t.put("profile.preset", c.profile_preset);
  t.put("profile.mean", format_double(c.profile_mean));
  t.put("profile.amplitude", format_double(c.profile_amplitude));
  t.put("profile.abscissae", join_doubles(c.profile_abscissae));
  t.put("profile.values", join_doubles(c.profile_values));
  t.put("coefficient.preset", c.coefficient_preset);
  t.put("coefficient.alpha", opt(c.coefficient_alpha));
  t.put("coefficient.beta", opt(c.coefficient_beta));
  t.put("coefficient.theta", format_double(c.coefficient_theta));
  t.put("coefficient.a11", format_double(c.coefficient_matrix(0, 0)));
  t.put("coefficient.a12", format_double(c.coefficient_matrix(0, 1)));
  t.put("coefficient.a21", format_double(c.coefficient_matrix(1, 0)));
  t.put("coefficient.a22", format_double(c.coefficient_matrix(1, 1)));
  t.put("conductance.preset", c.conductance_preset);
  t.put("conductance.value", format_double(c.conductance_value));
  t.put("conductance.h0", opt(c.conductance_h0));
  t.put("conductance.zero", c.conductance_zero ? "true" : "false");
  t.put("conductance.abscissae", join_doubles(c.conductance_abscissae));
  t.put("conductance.values", join_doubles(c.conductance_values));
  t.put("exponents.k", to_string(c.k));
  t.put("exponents.gamma", to_string(c.gamma));
  t.put("source.preset", c.source_preset);
  t.put("source.c", format_double(c.source_c));
  t.put("source.reverse_beyond", opt(c.source_reverse_beyond));
  t.put("source.center_x", format_double(c.source_center.x()));
  t.put("source.center_y", format_double(c.source_center.y()));
  t.put("source.radius", format_double(c.source_radius));
  t.put("mesh.nx_per_period", std::to_string(c.nx_per_period));
  t.put("mesh.ny", std::to_string(c.ny));
  t.put("mesh.flat_nx", std::to_string(c.flat_nx));
  t.put("mesh.cell_n", std::to_string(c.cell_n));
  std::string eps;
  for (std::size_t i = 0; i < c.eps.size(); ++i) eps += (i ? ", " : "") + to_string(c.eps[i]);
  t.put("sweep.eps", eps);
  t.put("sweep.limit", c.limit);
  t.put("sweep.grad_ratio", format_double(c.grad_ratio));
  t.put("sweep.jump_ratio", format_double(c.jump_ratio));
  t.put("sweep.trend_factor", format_double(c.trend_factor));
  t.put("solver.tol", format_double(c.tol));
  t.put("solver.max_iter", std::to_string(c.max_iter));
  t.put("solver.relaxation", format_double(c.relaxation));
  t.put("output.dir", c.output_dir);
  pt::write_ini(os, t);
}

}  // namespace roughsig
