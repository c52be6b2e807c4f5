#ifndef ROUGHSIG_ASSEMBLY_HPP
#define ROUGHSIG_ASSEMBLY_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "roughsig/coefficient.hpp"
#include "roughsig/common.hpp"
#include "roughsig/geometry.hpp"

namespace roughsig {

/// Operators of the weak form on all mesh DOFs (one DOF per mesh node).
struct DiscreteVIProblem {
  SparseMatrix stiffness;  // a(u, v) = int_{Q \ Gamma} A^eps grad u . grad v
  SparseMatrix coupling;   // eps^gamma int_Gamma h^eps [u][v] dsigma
  VectorXd load;           // int_Q f v
  std::vector<std::uint8_t> dirichlet;
  std::vector<std::array<Index, 2>> pairs;  // (plus, minus) per mesh pair
  bool symmetric = true;
};

/// One jump constraint [u] >= 0 between two free DOFs.
struct ConstrainedPair {
  Index mesh_pair;
  Index plus;
  Index minus;
};

/// Problem restricted to free DOFs. Boundary DOFs carry u = 0.
struct ReducedVIProblem {
  SparseMatrix stiffness;
  SparseMatrix coupling;
  VectorXd load;
  std::vector<ConstrainedPair> pairs;
  std::vector<Index> free_to_full;
  Index full_size = 0;
  bool symmetric = true;

  Index size() const { return load.size(); }
  SparseMatrix system() const { return stiffness + coupling; }
  /// Scatters a free-DOF vector into a full nodal vector (zeros on the boundary).
  VectorXd expand(const VectorXd& free_values) const;
  VectorXd restrict_full(const VectorXd& full_values) const;
};

SparseMatrix assemble_stiffness(const TwoComponentMesh& mesh, const PeriodicCoefficient& coeff,
                                double eps);

/// Lumped trapezoid rule on the interface polyline: the quadratic form is
/// eps^gamma sum_i h(x_i / eps) w_i [u]_i^2 with w_i half the adjacent edge lengths.
SparseMatrix assemble_interface_coupling(const TwoComponentMesh& mesh,
                                         const InterfaceConductance& h, double eps, double gamma);

/// Consistent P1 load with the three-point edge-midpoint rule.
VectorXd assemble_load(const TwoComponentMesh& mesh, const SourceTerm& f);

DiscreteVIProblem assemble_problem(const TwoComponentMesh& mesh, const PeriodicCoefficient& coeff,
                                   const InterfaceConductance& h, const SourceTerm& f, double eps,
                                   double gamma);

ReducedVIProblem apply_dirichlet(const DiscreteVIProblem& problem);

struct FieldNorms {
  double l2 = 0.0;
  double h1_plus = 0.0;
  double h1_minus = 0.0;
  double h1 = 0.0;  // sqrt(h1_plus^2 + h1_minus^2)
  double jump = 0.0;
};

/// Exact norms of a P1 field: L^2(Q), broken H^1 seminorm per component, and
/// the L^2 norm of the jump on the interface polyline.
FieldNorms l2_norms(const TwoComponentMesh& mesh, const VectorXd& field);

/// eps^gamma sum_i h_i w_i [u]_i^2, the discrete interface energy.
double interface_energy(const SparseMatrix& coupling, const VectorXd& field);

/// Uniform-bin point location on a triangulation.
class PointLocator {
 public:
  explicit PointLocator(const TwoComponentMesh& mesh);

  struct Hit {
    std::size_t triangle;
    Eigen::Vector3d barycentric;
  };

  /// Triangle containing p within the snap tolerance; plus-tagged triangles
  /// win ties on the interface. Throws LookupError otherwise.
  Hit locate(const Vec2& p) const;
  double evaluate(const VectorXd& field, const Vec2& p) const;

 private:
  const TwoComponentMesh* mesh_;
  Vec2 origin_;
  Vec2 cell_;
  Index bins_x_ = 1;
  Index bins_y_ = 1;
  std::vector<std::vector<std::size_t>> bins_;
};

VectorXd evaluate_cross_mesh(const TwoComponentMesh& source, const VectorXd& field,
                             const Eigen::Matrix2Xd& points);

/// ||u_a - u_b||_{L^2(Q)} with the edge-midpoint rule on mesh a and u_b
/// evaluated by point location on mesh b.
double l2_difference(const TwoComponentMesh& mesh_a, const VectorXd& field_a,
                     const TwoComponentMesh& mesh_b, const VectorXd& field_b);

/// "id value" lines in node order.
void write_field(std::ostream& os, const VectorXd& field);
VectorXd read_field(std::istream& is);

}  // namespace roughsig

#endif  // ROUGHSIG_ASSEMBLY_HPP
