#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <sstream>

#include "roughsig/homogenize.hpp"

using namespace roughsig;
using boost::math::quadrature::gauss_kronrod;
using doctest::Approx;

namespace {

const double pi = std::acos(-1.0);

double layered_a(double y) { return 2.0 + std::sin(2.0 * pi * y); }

double integrate(const std::function<double(double)>& f, double a, double b) {
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

double harmonic_mean_layered() { return 1.0 / integrate([](double y) { return 1.0 / layered_a(y); }, 0.0, 1.0); }

double p1_mean(const CellMesh& mesh, const VectorXd& v) {
  double total = 0.0;
  for (const auto& t : mesh.triangles) {
    const Vec2 a = mesh.nodes.col(t[0]), b = mesh.nodes.col(t[1]), c = mesh.nodes.col(t[2]);
    const double area = 0.5 * std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    total += area / 3.0 * (v(t[0]) + v(t[1]) + v(t[2]));
  }
  return total;
}

PeriodicCoefficient skew_coefficient() {
  return PeriodicCoefficient::from_function(
      [](const Vec2& y) {
        Mat2 a;
        a << 2.0 + std::sin(2.0 * pi * y.x()), 0.5 * std::cos(2.0 * pi * y.y()), -0.3,
            1.5 + 0.5 * std::cos(2.0 * pi * y.x());
        return a;
      },
      "skew");
}

Regime oracle_regime(const Rational& k, const Rational& g) {
  if (k >= Rational(1)) return g == Rational(0) ? Regime::A : (g > Rational(0) ? Regime::B : Regime::C);
  const Rational line = Rational(1) - k;
  return g == line ? Regime::A : (g > line ? Regime::B : Regime::C);
}

}  // namespace

TEST_CASE("identity coefficient has a trivial corrector") {
  const auto mesh = build_cell_mesh(32);
  const auto c = solve_cell(PeriodicCoefficient::identity(), Vec2(1, 0), mesh);
  CHECK(c.fluctuation.cwiseAbs().maxCoeff() < 1e-12);
  for (Index i = 0; i < mesh.num_nodes(); ++i) CHECK(c.corrector(i) == Approx(mesh.nodes(0, i)).epsilon(1e-12));
  const auto data = homogenized_tensor(PeriodicCoefficient::identity(), build_cell_mesh(64));
  CHECK((data.tensor - Mat2::Identity()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("layered coefficient gives harmonic and arithmetic means") {
  const double harmonic = harmonic_mean_layered();
  CHECK(harmonic == Approx(std::sqrt(3.0)).epsilon(1e-12));
  const auto data = homogenized_tensor(PeriodicCoefficient::layered(), build_cell_mesh(64));
  CHECK(std::abs(data.tensor(0, 0) - harmonic) < 2e-3);
  CHECK(std::abs(data.tensor(1, 1) - 2.0) < 2e-3);
  CHECK(std::abs(data.tensor(0, 1)) < 1e-8);
  CHECK(std::abs(data.tensor(1, 0)) < 1e-8);
  CHECK(data.corrector_e2.fluctuation.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("layered corrector matches the one-dimensional solution") {
  const auto mesh = build_cell_mesh(64);
  const auto c = solve_cell(PeriodicCoefficient::layered(), Vec2(1, 0), mesh);
  const double harmonic = harmonic_mean_layered();
  VectorXd exact(mesh.num_nodes());
  for (Index i = 0; i < mesh.num_nodes(); ++i) {
    const double y1 = mesh.nodes(0, i);
    exact(i) = y1 > 0 ? harmonic * integrate([](double s) { return 1.0 / layered_a(s); }, 0.0, y1) : 0.0;
  }
  VectorXd diff = c.corrector - exact;
  diff.array() -= p1_mean(mesh, diff);
  CHECK(diff.cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("constant coefficient is its own average") {
  Mat2 a;
  a << 3.0, 0.5, 0.5, 2.0;
  const auto data = homogenized_tensor(PeriodicCoefficient::constant(a), build_cell_mesh(16));
  CHECK((data.tensor - a).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("corrector fluctuations have zero mean") {
  const auto mesh = build_cell_mesh(32);
  for (const auto& coeff : {PeriodicCoefficient::layered(), PeriodicCoefficient::rotated_anisotropic(0.7), skew_coefficient()})
    for (const Vec2 dir : {Vec2(1, 0), Vec2(0, 1), Vec2(0.6, 0.8)}) {
      const auto c = solve_cell(coeff, dir, mesh);
      CHECK(std::abs(p1_mean(mesh, c.fluctuation)) < 1e-12);
      for (Index i = 0; i < mesh.num_nodes(); ++i)
        CHECK(c.corrector(i) == Approx(c.fluctuation(i) + dir.dot(mesh.nodes.col(i))).epsilon(1e-12));
    }
}

TEST_CASE("symmetric coefficients give a symmetric tensor") {
  const auto data = homogenized_tensor(PeriodicCoefficient::rotated_anisotropic(0.6), build_cell_mesh(32));
  CHECK(std::abs(data.tensor(0, 1) - data.tensor(1, 0)) < 1e-8);
  CHECK(std::abs(data.tensor(0, 1)) > 1e-3);
}

TEST_CASE("transposed coefficient gives the transposed tensor") {
  const auto coeff = skew_coefficient();
  CHECK_FALSE(coeff.symmetric());
  const auto mesh = build_cell_mesh(32);
  const Mat2 a0 = homogenized_tensor(coeff, mesh).tensor;
  const Mat2 a0t = homogenized_tensor(coeff.transposed(), mesh).tensor;
  CHECK((a0.transpose() - a0t).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("tensor differences shrink under refinement") {
  for (const auto& coeff : {PeriodicCoefficient::layered(), PeriodicCoefficient::rotated_anisotropic(0.4)}) {
    const Mat2 t16 = homogenized_tensor(coeff, build_cell_mesh(16)).tensor;
    const Mat2 t32 = homogenized_tensor(coeff, build_cell_mesh(32)).tensor;
    const Mat2 t64 = homogenized_tensor(coeff, build_cell_mesh(64)).tensor;
    const Mat2 d1 = (t16 - t32).cwiseAbs(), d2 = (t32 - t64).cwiseAbs();
    CHECK(d2.maxCoeff() < d1.maxCoeff());
    for (Index i = 0; i < 4; ++i) CHECK(d2(i) <= d1(i) + 1e-12);
  }
}

TEST_CASE("certified bounds") {
  for (const auto& coeff : {PeriodicCoefficient::identity(), PeriodicCoefficient::layered(),
                            PeriodicCoefficient::rotated_anisotropic(0.3), skew_coefficient()}) {
    const auto data = homogenized_tensor(coeff, build_cell_mesh(32));
    CHECK(certify_bounds(data, coeff.alpha(), coeff.beta()));
    CHECK(data.min_form >= coeff.alpha() - 1e-12);
    CHECK(data.max_image <= coeff.beta() * coeff.beta() / coeff.alpha() + 1e-12);
  }
  auto data = homogenized_tensor(PeriodicCoefficient::identity(), build_cell_mesh(8));
  CHECK_FALSE(certify_bounds(data, 1.5, 2.0));
}

TEST_CASE("effective conductance branches") {
  const auto one = InterfaceConductance::constant(1.0);
  const auto sine = InterfaceProfile::sine();
  CHECK(*effective_conductance(one, sine, Rational(2), Rational(0)) == Approx(1.0).epsilon(1e-14));
  CHECK(*effective_conductance(one, sine, Rational(1, 2), Rational(1, 2)) == Approx(2.0).epsilon(1e-6));

  const double graph = integrate([](double y) { return std::sqrt(1.0 + pi * pi * std::pow(std::cos(2.0 * pi * y), 2)); }, 0.0, 1.0);
  CHECK(std::abs(*effective_conductance(one, sine, Rational(1), Rational(0)) - graph) < 1e-3);
  CHECK(std::abs(*effective_conductance(one, sine, Rational(1), Rational(0)) - graph) < 1e-9);

  // m(|g'|) of a piecewise-linear profile is its total variation over one cell.
  const auto saw = InterfaceProfile::sawtooth();
  double variation = 0.0;
  for (int i = 0; i < 4096; ++i) variation += std::abs(saw.eval((i + 1) / 4096.0).value - saw.eval(i / 4096.0).value);
  CHECK(*effective_conductance(one, saw, Rational(1, 3), Rational(2, 3)) == Approx(variation).epsilon(1e-12));

  CHECK_FALSE(effective_conductance(one, sine, Rational(2), Rational(1, 2)).has_value());
  CHECK_FALSE(effective_conductance(one, sine, Rational(1, 2), Rational(1)).has_value());
  try {
    effective_conductance(one, sine, Rational(1), Rational(-1));
    FAIL("case C accepted");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("no effective conductance in case C") != std::string::npos);
  }
  CHECK_THROWS_AS(effective_conductance(one, sine, Rational(1), Rational(0), 1000), ValidationError);
  CHECK(*effective_conductance(InterfaceConductance::zero(), sine, Rational(1), Rational(0)) == 0.0);
}

TEST_CASE("effective conductance is monotone in h") {
  const auto lo = InterfaceConductance::constant(1.0);
  const auto hi = InterfaceConductance::sine_positive(2.0);  // >= 1 everywhere
  for (const auto& profile : {InterfaceProfile::sine(), InterfaceProfile::sawtooth()})
    for (const auto& [k, g] : {std::pair{Rational(1), Rational(0)}, std::pair{Rational(3), Rational(0)},
                               std::pair{Rational(1, 4), Rational(3, 4)}})
      CHECK(*effective_conductance(lo, profile, k, g) <= *effective_conductance(hi, profile, k, g));
}

TEST_CASE("regime classification") {
  CHECK(classify_regime(Rational(1), Rational(0)) == Regime::A);
  CHECK(classify_regime(Rational(2), Rational(1, 2)) == Regime::B);
  CHECK(classify_regime(Rational(1, 2), Rational(1, 4)) == Regime::C);
  CHECK(classify_regime(Rational(1, 3), Rational(2, 3)) == Regime::A);
  CHECK_THROWS_AS(classify_regime(Rational(0), Rational(0)), DomainError);
  CHECK_THROWS_AS(classify_regime(Rational(-1, 2), Rational(0)), DomainError);
  for (int kn = 1; kn <= 12; ++kn)
    for (int gn = -12; gn <= 12; ++gn) {
      const Rational k(kn, 4), g(gn, 4);
      CHECK(classify_regime(k, g) == oracle_regime(k, g));
    }
  for (Regime r : {Regime::A, Regime::B, Regime::C}) CHECK(parse_regime(std::string(1, regime_letter(r))) == r);
  CHECK_THROWS(parse_regime("D"));
}

TEST_CASE("homogenized text block") {
  auto data = homogenized_tensor(PeriodicCoefficient::identity(), build_cell_mesh(8));
  data.regime = Regime::B;
  data.conductance_known = true;
  std::ostringstream b;
  write_homogenized(b, data);
  CHECK(b.str().find("vanishing") != std::string::npos);
  CHECK(b.str().find("regime B") != std::string::npos);
  data.regime = Regime::A;
  data.conductance = 2.5;
  std::ostringstream a;
  write_homogenized(a, data);
  CHECK(a.str().find("2.5") != std::string::npos);
  CHECK(a.str().find("A0_11") != std::string::npos);
}
