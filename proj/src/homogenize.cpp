#include "roughsig/homogenize.hpp"

#include <Eigen/LU>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

namespace roughsig {

namespace {

using ColSparse = Eigen::SparseMatrix<double>;

// Gradients of the three P1 hat functions (columns) and the area of a triangle.
std::pair<Eigen::Matrix<double, 2, 3>, double> p1_gradients(const Vec2& a, const Vec2& b,
                                                            const Vec2& c) {
  Mat2 jac;
  jac.col(0) = b - a;
  jac.col(1) = c - a;
  const double det = jac.determinant();
  Eigen::Matrix<double, 2, 3> ref;
  ref << -1.0, 1.0, 0.0, -1.0, 0.0, 1.0;
  return {jac.inverse().transpose() * ref, 0.5 * det};
}

// Gauss-Legendre rule on [0, 1] with three nodes.
constexpr std::array<double, 3> kGaussNodes = {0.5 - 0.3872983346207417, 0.5,
                                               0.5 + 0.3872983346207417};
constexpr std::array<double, 3> kGaussWeights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

template <typename F>
double cell_mean(F&& integrand, std::vector<double> breaks, Index panels) {
  breaks.push_back(0.0);
  breaks.push_back(1.0);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = breaks[s];
    const double b = breaks[s + 1];
    const Index count =
        std::max<Index>(1, static_cast<Index>(std::ceil(static_cast<double>(panels) * (b - a))));
    const double h = (b - a) / static_cast<double>(count);
    for (Index p = 0; p < count; ++p) {
      const double x0 = a + static_cast<double>(p) * h;
      for (std::size_t q = 0; q < 3; ++q) total += h * kGaussWeights[q] * integrand(x0 + h * kGaussNodes[q]);
    }
  }
  return total;
}

}  // namespace

char regime_letter(Regime r) {
  switch (r) {
    case Regime::A: return 'A';
    case Regime::B: return 'B';
    case Regime::C: return 'C';
  }
  return '?';
}

Regime parse_regime(const std::string& text) {
  if (text == "A" || text == "a") return Regime::A;
  if (text == "B" || text == "b") return Regime::B;
  if (text == "C" || text == "c") return Regime::C;
  throw ValidationError("regime: expected A, B or C, got '" + text + "'");
}

Regime classify_regime(const Rational& k, const Rational& gamma) {
  if (k <= Rational(0)) throw DomainError("regime: k must be positive, got " + to_string(k));
  const Rational threshold = k >= Rational(1) ? Rational(0) : Rational(1) - k;
  if (gamma == threshold) return Regime::A;
  return gamma > threshold ? Regime::B : Regime::C;
}

CellCorrector solve_cell(const PeriodicCoefficient& coeff, const Vec2& direction,
                         const CellMesh& mesh) {
  const Index ndof = mesh.num_dofs();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.triangles.size() * 9);
  VectorXd rhs = VectorXd::Zero(ndof);
  for (const auto& tri : mesh.triangles) {
    const auto [grad, area] =
        p1_gradients(mesh.nodes.col(tri[0]), mesh.nodes.col(tri[1]), mesh.nodes.col(tri[2]));
    const Vec2 centroid = (mesh.nodes.col(tri[0]) + mesh.nodes.col(tri[1]) + mesh.nodes.col(tri[2])) / 3.0;
    const Mat2 a = coeff(centroid);
    const Eigen::Matrix3d local = area * grad.transpose() * a * grad;
    const Eigen::Vector3d load = -area * grad.transpose() * (a * direction);
    for (int r = 0; r < 3; ++r) {
      const Index dr = mesh.periodic_dof[static_cast<std::size_t>(tri[static_cast<std::size_t>(r)])];
      rhs(dr) += load(r);
      for (int c = 0; c < 3; ++c)
        trip.emplace_back(dr, mesh.periodic_dof[static_cast<std::size_t>(tri[static_cast<std::size_t>(c)])],
                          local(r, c));
    }
  }
  // Pin DOF 0: drop its row and column.
  std::vector<Eigen::Triplet<double>> reduced;
  reduced.reserve(trip.size());
  for (const auto& t : trip)
    if (t.row() > 0 && t.col() > 0) reduced.emplace_back(t.row() - 1, t.col() - 1, t.value());
  ColSparse k(ndof - 1, ndof - 1);
  k.setFromTriplets(reduced.begin(), reduced.end());
  const VectorXd b = rhs.tail(ndof - 1);

  VectorXd x;
  if (coeff.symmetric()) {
    Eigen::SimplicialLDLT<ColSparse> solver(k);
    if (solver.info() != Eigen::Success) throw SolverError("cell problem: singular reduced system");
    x = solver.solve(b);
  } else {
    Eigen::SparseLU<ColSparse> solver;
    solver.compute(k);
    if (solver.info() != Eigen::Success) throw SolverError("cell problem: singular reduced system");
    x = solver.solve(b);
  }
  VectorXd periodic(ndof);
  periodic(0) = 0.0;
  periodic.tail(ndof - 1) = x;
  if (!periodic.allFinite()) throw SolverError("cell problem: non-finite corrector");

  CellCorrector out;
  out.direction = direction;
  out.fluctuation.resize(mesh.num_nodes());
  for (Index i = 0; i < mesh.num_nodes(); ++i)
    out.fluctuation(i) = periodic(mesh.periodic_dof[static_cast<std::size_t>(i)]);
  double mean = 0.0;
  for (const auto& tri : mesh.triangles) {
    const double area = p1_gradients(mesh.nodes.col(tri[0]), mesh.nodes.col(tri[1]),
                                     mesh.nodes.col(tri[2])).second;
    mean += area / 3.0 * (out.fluctuation(tri[0]) + out.fluctuation(tri[1]) + out.fluctuation(tri[2]));
  }
  out.fluctuation.array() -= mean;
  out.corrector = out.fluctuation + mesh.nodes.transpose() * direction;
  return out;
}

HomogenizedData homogenized_tensor(const PeriodicCoefficient& coeff, const CellMesh& mesh,
                                   Index directions) {
  HomogenizedData data;
  data.corrector_e1 = solve_cell(coeff, Vec2::UnitX(), mesh);
  data.corrector_e2 = solve_cell(coeff, Vec2::UnitY(), mesh);
  Mat2 a0 = Mat2::Zero();
  for (const auto& tri : mesh.triangles) {
    const auto [grad, area] =
        p1_gradients(mesh.nodes.col(tri[0]), mesh.nodes.col(tri[1]), mesh.nodes.col(tri[2]));
    const Vec2 centroid = (mesh.nodes.col(tri[0]) + mesh.nodes.col(tri[1]) + mesh.nodes.col(tri[2])) / 3.0;
    const Mat2 a = coeff(centroid);
    const Eigen::Vector3d f1(data.corrector_e1.fluctuation(tri[0]), data.corrector_e1.fluctuation(tri[1]),
                             data.corrector_e1.fluctuation(tri[2]));
    const Eigen::Vector3d f2(data.corrector_e2.fluctuation(tri[0]), data.corrector_e2.fluctuation(tri[1]),
                             data.corrector_e2.fluctuation(tri[2]));
    a0.col(0) += area * a * (Vec2::UnitX() + grad * f1);
    a0.col(1) += area * a * (Vec2::UnitY() + grad * f2);
  }
  data.tensor = a0;
  data.min_form = std::numeric_limits<double>::infinity();
  for (Index d = 0; d < directions; ++d) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(d) / static_cast<double>(directions);
    const Vec2 l(std::cos(t), std::sin(t));
    const double form = l.dot(a0 * l);
    data.min_form = std::min(data.min_form, form);
    data.max_form = std::max(data.max_form, form);
    data.max_image = std::max(data.max_image, (a0 * l).norm());
  }
  return data;
}

bool certify_bounds(const HomogenizedData& data, double alpha, double beta) {
  const double slack = 1e-12 * std::max(1.0, beta);
  return data.min_form >= alpha - slack && data.max_image <= beta * beta / alpha + slack;
}

std::optional<double> effective_conductance(const InterfaceConductance& h,
                                            const InterfaceProfile& profile, const Rational& k,
                                            const Rational& gamma, Index panels) {
  const Regime regime = classify_regime(k, gamma);
  if (regime == Regime::C) throw DomainError("no effective conductance in case C");
  if (regime == Regime::B) return std::nullopt;
  if (panels < 4096) throw ValidationError("effective conductance: need at least 4096 panels");
  if (h.is_zero()) return 0.0;

  std::vector<double> breaks = profile.breakpoints();
  if (h.kind() == ConductanceKind::Samples)
    breaks.insert(breaks.end(), h.sample_abscissae().begin(), h.sample_abscissae().end());

  if (k > Rational(1)) return cell_mean([&](double y) { return h(y); }, breaks, panels);
  if (k == Rational(1))
    return cell_mean(
        [&](double y) {
          const double s = profile.eval(y).slope;
          return h(y) * std::sqrt(1.0 + s * s);
        },
        breaks, panels);
  return cell_mean([&](double y) { return h(y) * std::abs(profile.eval(y).slope); }, breaks,
                   panels);
}

void write_homogenized(std::ostream& os, const HomogenizedData& data) {
  os << std::setprecision(12);
  os << "A0_11 " << data.tensor(0, 0) << '\n';
  os << "A0_12 " << data.tensor(0, 1) << '\n';
  os << "A0_21 " << data.tensor(1, 0) << '\n';
  os << "A0_22 " << data.tensor(1, 1) << '\n';
  os << "min_form " << data.min_form << '\n';
  os << "max_form " << data.max_form << '\n';
  os << "max_image " << data.max_image << '\n';
  os << "conductance ";
  if (!data.conductance_known)
    os << (data.regime == Regime::C ? "none (no effective conductance in case C)" : "none");
  else if (data.conductance) os << *data.conductance;
  else os << "vanishing";
  os << '\n';
  os << "regime " << regime_letter(data.regime) << '\n';
}

}  // namespace roughsig
