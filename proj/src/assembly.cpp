#include "roughsig/assembly.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace roughsig {

namespace {

constexpr double kDegenerateArea = 1e-14;
constexpr double kSnap = 1e-10;

struct ElementGeometry {
  double area;
  Eigen::Matrix<double, 2, 3> grad;  // columns: gradients of the three hat functions
  Vec2 centroid;
};

ElementGeometry element_geometry(const Eigen::Matrix2Xd& nodes, const std::array<Index, 3>& t) {
  const Vec2 a = nodes.col(t[0]);
  Mat2 jac;
  jac.col(0) = nodes.col(t[1]) - a;
  jac.col(1) = nodes.col(t[2]) - a;
  const double det = jac.determinant();
  Eigen::Matrix<double, 2, 3> ref;
  ref << -1.0, 1.0, 0.0, -1.0, 0.0, 1.0;
  ElementGeometry g;
  g.area = 0.5 * det;
  g.grad = jac.inverse().transpose() * ref;
  g.centroid = (a + nodes.col(t[1]) + nodes.col(t[2])) / 3.0;
  return g;
}

}  // namespace

VectorXd ReducedVIProblem::expand(const VectorXd& free_values) const {
  VectorXd full = VectorXd::Zero(full_size);
  for (std::size_t i = 0; i < free_to_full.size(); ++i)
    full(free_to_full[i]) = free_values(static_cast<Index>(i));
  return full;
}

VectorXd ReducedVIProblem::restrict_full(const VectorXd& full_values) const {
  VectorXd r(static_cast<Index>(free_to_full.size()));
  for (std::size_t i = 0; i < free_to_full.size(); ++i)
    r(static_cast<Index>(i)) = full_values(free_to_full[i]);
  return r;
}

SparseMatrix assemble_stiffness(const TwoComponentMesh& mesh, const PeriodicCoefficient& coeff,
                                double eps) {
  if (!(eps > 0.0)) throw ValidationError("assemble_stiffness: eps must be positive");
  std::vector<Triplet> triplets;
  triplets.reserve(mesh.triangles.size() * 9);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const ElementGeometry g = element_geometry(mesh.nodes, tri.nodes);
    if (std::abs(g.area) < kDegenerateArea) {
      std::ostringstream os;
      os << "degenerate triangle " << t << " (area " << g.area << ")";
      throw AssemblyError(os.str());
    }
    const Mat2 a = coeff(g.centroid / eps);
    const Eigen::Matrix3d ke = std::abs(g.area) * g.grad.transpose() * a * g.grad;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) triplets.emplace_back(tri.nodes[i], tri.nodes[j], ke(i, j));
  }
  SparseMatrix k(mesh.num_nodes(), mesh.num_nodes());
  k.setFromTriplets(triplets.begin(), triplets.end());
  return k;
}

SparseMatrix assemble_interface_coupling(const TwoComponentMesh& mesh,
                                         const InterfaceConductance& h, double eps, double gamma) {
  if (!(eps > 0.0)) throw ValidationError("assemble_interface_coupling: eps must be positive");
  SparseMatrix b(mesh.num_nodes(), mesh.num_nodes());
  if (h.is_zero()) return b;
  const double scale = std::pow(eps, gamma);
  std::vector<Triplet> triplets;
  triplets.reserve(mesh.pairs.size() * 4);
  for (const auto& p : mesh.pairs) {
    const double w = 0.5 * (p.left_length + p.right_length);
    const double c = scale * w * h(p.x / eps);
    triplets.emplace_back(p.plus, p.plus, c);
    triplets.emplace_back(p.plus, p.minus, -c);
    triplets.emplace_back(p.minus, p.plus, -c);
    triplets.emplace_back(p.minus, p.minus, c);
  }
  b.setFromTriplets(triplets.begin(), triplets.end());
  return b;
}

VectorXd assemble_load(const TwoComponentMesh& mesh, const SourceTerm& f) {
  VectorXd load = VectorXd::Zero(mesh.num_nodes());
  for (const auto& tri : mesh.triangles) {
    const ElementGeometry g = element_geometry(mesh.nodes, tri.nodes);
    const double w = std::abs(g.area) / 3.0;
    std::array<double, 3> fm{};  // f at the midpoint of edge (i, i+1)
    for (int e = 0; e < 3; ++e) {
      const Vec2 mid = 0.5 * (mesh.nodes.col(tri.nodes[e]) + mesh.nodes.col(tri.nodes[(e + 1) % 3]));
      fm[static_cast<std::size_t>(e)] = f(mid, tri.tag, g.centroid);
    }
    // Node i touches edges (i, i+1) and (i-1, i); the hat is 1/2 at both midpoints.
    for (int i = 0; i < 3; ++i)
      load(tri.nodes[i]) += w * 0.5 * (fm[static_cast<std::size_t>(i)] +
                                       fm[static_cast<std::size_t>((i + 2) % 3)]);
  }
  return load;
}

DiscreteVIProblem assemble_problem(const TwoComponentMesh& mesh, const PeriodicCoefficient& coeff,
                                   const InterfaceConductance& h, const SourceTerm& f, double eps,
                                   double gamma) {
  DiscreteVIProblem p;
  p.stiffness = assemble_stiffness(mesh, coeff, eps);
  p.coupling = assemble_interface_coupling(mesh, h, eps, gamma);
  p.load = assemble_load(mesh, f);
  p.dirichlet = mesh.on_boundary;
  p.pairs.reserve(mesh.pairs.size());
  for (const auto& pr : mesh.pairs) p.pairs.push_back({pr.plus, pr.minus});
  p.symmetric = coeff.symmetric();
  return p;
}

ReducedVIProblem apply_dirichlet(const DiscreteVIProblem& problem) {
  const Index n = problem.load.size();
  std::vector<Index> full_to_free(static_cast<std::size_t>(n), -1);
  ReducedVIProblem r;
  r.full_size = n;
  for (Index i = 0; i < n; ++i) {
    if (!problem.dirichlet[static_cast<std::size_t>(i)]) {
      full_to_free[static_cast<std::size_t>(i)] = static_cast<Index>(r.free_to_full.size());
      r.free_to_full.push_back(i);
    }
  }
  const Index m = static_cast<Index>(r.free_to_full.size());

  auto restrict = [&](const SparseMatrix& a) {
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(a.nonZeros()));
    for (Index row = 0; row < a.outerSize(); ++row) {
      const Index fr = full_to_free[static_cast<std::size_t>(row)];
      if (fr < 0) continue;
      for (SparseMatrix::InnerIterator it(a, row); it; ++it) {
        const Index fc = full_to_free[static_cast<std::size_t>(it.col())];
        if (fc >= 0) triplets.emplace_back(fr, fc, it.value());
      }
    }
    SparseMatrix out(m, m);
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
  };
  r.stiffness = restrict(problem.stiffness);
  r.coupling = restrict(problem.coupling);
  r.load = r.restrict_full(problem.load);
  for (std::size_t i = 0; i < problem.pairs.size(); ++i) {
    const Index fp = full_to_free[static_cast<std::size_t>(problem.pairs[i][0])];
    const Index fm = full_to_free[static_cast<std::size_t>(problem.pairs[i][1])];
    if (fp >= 0 && fm >= 0) r.pairs.push_back({static_cast<Index>(i), fp, fm});
  }
  r.symmetric = problem.symmetric;
  return r;
}

FieldNorms l2_norms(const TwoComponentMesh& mesh, const VectorXd& field) {
  if (field.size() != mesh.num_nodes())
    throw ValidationError("l2_norms: field size does not match the mesh");
  double l2 = 0.0, hp = 0.0, hm = 0.0;
  for (const auto& tri : mesh.triangles) {
    const ElementGeometry g = element_geometry(mesh.nodes, tri.nodes);
    const Eigen::Vector3d u(field(tri.nodes[0]), field(tri.nodes[1]), field(tri.nodes[2]));
    const double area = std::abs(g.area);
    // Exact P1 mass: |T|/12 (sum u_i^2 + (sum u_i)^2).
    l2 += area / 12.0 * (u.squaredNorm() + u.sum() * u.sum());
    const double grad2 = (g.grad * u).squaredNorm() * area;
    (tri.tag == Component::Plus ? hp : hm) += grad2;
  }
  double jump = 0.0;
  for (std::size_t i = 0; i + 1 < mesh.pairs.size(); ++i) {
    const auto& p = mesh.pairs[i];
    const auto& q = mesh.pairs[i + 1];
    const double a = field(p.plus) - field(p.minus);
    const double b = field(q.plus) - field(q.minus);
    jump += p.right_length / 3.0 * (a * a + a * b + b * b);
  }
  FieldNorms n;
  n.l2 = std::sqrt(l2);
  n.h1_plus = std::sqrt(hp);
  n.h1_minus = std::sqrt(hm);
  n.h1 = std::sqrt(hp + hm);
  n.jump = std::sqrt(jump);
  return n;
}

double interface_energy(const SparseMatrix& coupling, const VectorXd& field) {
  return field.dot(coupling * field);
}

PointLocator::PointLocator(const TwoComponentMesh& mesh) : mesh_(&mesh) {
  const Vec2 lo = mesh.nodes.rowwise().minCoeff();
  const Vec2 hi = mesh.nodes.rowwise().maxCoeff();
  const Vec2 span = (hi - lo).cwiseMax(1e-12);
  const double per_bin = std::max<double>(1.0, static_cast<double>(mesh.triangles.size()) / 4.0);
  const double aspect = span.x() / span.y();
  bins_x_ = std::max<Index>(1, static_cast<Index>(std::sqrt(per_bin * aspect)));
  bins_y_ = std::max<Index>(1, static_cast<Index>(per_bin / static_cast<double>(bins_x_)));
  origin_ = lo;
  cell_ = Vec2(span.x() / bins_x_, span.y() / bins_y_);
  bins_.assign(static_cast<std::size_t>(bins_x_ * bins_y_), {});
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    Vec2 tlo = Vec2::Constant(std::numeric_limits<double>::infinity());
    Vec2 thi = -tlo;
    for (Index v : mesh.triangles[t].nodes) {
      tlo = tlo.cwiseMin(mesh.nodes.col(v));
      thi = thi.cwiseMax(mesh.nodes.col(v));
    }
    const auto bin = [&](double x, double o, double c, Index nb) {
      return std::clamp<Index>(static_cast<Index>(std::floor((x - o) / c)), 0, nb - 1);
    };
    const double pad = 1e-9 * span.maxCoeff();
    const Index i0 = bin(tlo.x() - pad, origin_.x(), cell_.x(), bins_x_);
    const Index i1 = bin(thi.x() + pad, origin_.x(), cell_.x(), bins_x_);
    const Index j0 = bin(tlo.y() - pad, origin_.y(), cell_.y(), bins_y_);
    const Index j1 = bin(thi.y() + pad, origin_.y(), cell_.y(), bins_y_);
    for (Index j = j0; j <= j1; ++j)
      for (Index i = i0; i <= i1; ++i) bins_[static_cast<std::size_t>(j * bins_x_ + i)].push_back(t);
  }
}

PointLocator::Hit PointLocator::locate(const Vec2& p) const {
  const Index i = std::clamp<Index>(
      static_cast<Index>(std::floor((p.x() - origin_.x()) / cell_.x())), 0, bins_x_ - 1);
  const Index j = std::clamp<Index>(
      static_cast<Index>(std::floor((p.y() - origin_.y()) / cell_.y())), 0, bins_y_ - 1);
  std::optional<Hit> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t t : bins_[static_cast<std::size_t>(j * bins_x_ + i)]) {
    const auto& tri = mesh_->triangles[t];
    const Vec2 a = mesh_->nodes.col(tri.nodes[0]);
    Mat2 jac;
    jac.col(0) = mesh_->nodes.col(tri.nodes[1]) - a;
    jac.col(1) = mesh_->nodes.col(tri.nodes[2]) - a;
    const Vec2 mu = jac.partialPivLu().solve(p - a);
    const Eigen::Vector3d bary(1.0 - mu.sum(), mu.x(), mu.y());
    const double inside = bary.minCoeff();
    if (inside < -kSnap) continue;
    // Plus side wins ties; otherwise the deepest containing triangle.
    const double score = (tri.tag == Component::Plus ? 2.0 : 0.0) + std::min(inside, 0.0) * 1e6;
    if (!best || score > best_score) {
      best = Hit{t, bary};
      best_score = score;
    }
  }
  if (!best) {
    std::ostringstream os;
    os << std::setprecision(17) << "point (" << p.x() << ", " << p.y()
       << ") lies outside the source mesh";
    throw LookupError(os.str());
  }
  return *best;
}

double PointLocator::evaluate(const VectorXd& field, const Vec2& p) const {
  const Hit hit = locate(p);
  const auto& tri = mesh_->triangles[hit.triangle];
  return hit.barycentric(0) * field(tri.nodes[0]) + hit.barycentric(1) * field(tri.nodes[1]) +
         hit.barycentric(2) * field(tri.nodes[2]);
}

VectorXd evaluate_cross_mesh(const TwoComponentMesh& source, const VectorXd& field,
                             const Eigen::Matrix2Xd& points) {
  const PointLocator locator(source);
  VectorXd out(points.cols());
  for (Index i = 0; i < points.cols(); ++i) out(i) = locator.evaluate(field, points.col(i));
  return out;
}

double l2_difference(const TwoComponentMesh& mesh_a, const VectorXd& field_a,
                     const TwoComponentMesh& mesh_b, const VectorXd& field_b) {
  const PointLocator locator(mesh_b);
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh_a.triangles.size(); ++t) {
    const auto& tri = mesh_a.triangles[t];
    const double w = std::abs(mesh_a.triangle_area(t)) / 3.0;
    for (int e = 0; e < 3; ++e) {
      const Index i = tri.nodes[e];
      const Index j = tri.nodes[(e + 1) % 3];
      const Vec2 mid = 0.5 * (mesh_a.nodes.col(i) + mesh_a.nodes.col(j));
      const double d = 0.5 * (field_a(i) + field_a(j)) - locator.evaluate(field_b, mid);
      sum += w * d * d;
    }
  }
  return std::sqrt(sum);
}

void write_field(std::ostream& os, const VectorXd& field) {
  os << std::setprecision(17);
  for (Index i = 0; i < field.size(); ++i) os << i << ' ' << field(i) << '\n';
}

VectorXd read_field(std::istream& is) {
  std::vector<double> values;
  std::string line;
  Index line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Index id = -1;
    double v = 0.0;
    if (!(ls >> id >> v) || id != static_cast<Index>(values.size()))
      throw IoError("field dump: malformed line " + std::to_string(line_no));
    values.push_back(v);
  }
  return Eigen::Map<const VectorXd>(values.data(), static_cast<Index>(values.size()));
}

}  // namespace roughsig
