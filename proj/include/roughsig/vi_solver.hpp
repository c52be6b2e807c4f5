#ifndef ROUGHSIG_VI_SOLVER_HPP
#define ROUGHSIG_VI_SOLVER_HPP

#include <algorithm>
#include <iosfwd>
#include <limits>
#include <vector>

#include "roughsig/assembly.hpp"
#include "roughsig/common.hpp"

namespace roughsig {

/// Change of variables (u+, u-) -> (m, s) = ((u+ + u-)/2, u+ - u-) on every
/// constrained pair. The mean lives in the plus slot and the jump in the minus
/// slot, all other free DOFs are untouched. In these coordinates the convex set
/// {[u] >= 0} is the box {s >= 0}.
class JumpCoordinateMap {
 public:
  JumpCoordinateMap(Index size, std::vector<ConstrainedPair> pairs);
  explicit JumpCoordinateMap(const ReducedVIProblem& problem)
      : JumpCoordinateMap(problem.size(), problem.pairs) {}

  Index size() const { return size_; }
  const std::vector<ConstrainedPair>& pairs() const { return pairs_; }
  Index jump_slot(std::size_t pair) const { return pairs_[pair].minus; }
  Index mean_slot(std::size_t pair) const { return pairs_[pair].plus; }

  /// u = T z as a sparse matrix.
  const SparseMatrix& to_nodal_matrix() const { return t_; }
  VectorXd to_nodal(const VectorXd& z) const;
  VectorXd to_jump(const VectorXd& u) const;
  /// T^T A T, the operator in jump coordinates.
  SparseMatrix transform_operator(const SparseMatrix& a) const;
  VectorXd transform_load(const VectorXd& f) const { return t_.transpose() * f; }

 private:
  Index size_;
  std::vector<ConstrainedPair> pairs_;
  SparseMatrix t_;
};

struct PairStatus {
  Index mesh_pair;
  double jump;
  double multiplier;
  bool active;
};

/// Worst violations of [u] >= 0, multiplier >= 0 and [u] * multiplier = 0.
struct ComplementarityReport {
  double primal = 0.0;
  double dual = 0.0;
  double product = 0.0;
  bool holds(double tol) const { return primal <= tol && dual <= tol && product <= tol; }
  double worst() const { return std::max({primal, dual, product}); }
};

struct DiscreteVISolution {
  VectorXd nodal;        // full mesh, zeros on the boundary
  VectorXd free_values;  // reduced problem ordering
  std::vector<PairStatus> pairs;
  std::vector<Index> active;  // mesh pair ids with zero jump and positive multiplier
  std::vector<Index> inactive;
  ComplementarityReport complementarity;
  Index iterations = 0;
  double final_increment = 0.0;
  std::vector<double> energy_history;  // objective after each sweep, when recorded
};

enum class ViStrategy {
  /// Projected relaxation on the jump block after exact elimination of all
  /// unconstrained DOFs (dense Schur complement).
  Schur,
  /// Projected relaxation on every free DOF in jump coordinates.
  Pointwise,
};

enum class InitialGuess { Zero, ClampedUnconstrained };

struct ViOptions {
  double tol = 1e-8;
  Index max_iter = 200000;
  double relaxation = 1.5;
  ViStrategy strategy = ViStrategy::Schur;
  InitialGuess initial = InitialGuess::Zero;
  /// Every `polish_every` sweeps, solve exactly on the current inactive set and
  /// accept when the result is complementary.
  bool polish = true;
  Index polish_every = 20;
  bool record_energy = false;
};

/// Projected SOR for the symmetric discrete VI. Throws SolverError for
/// nonsymmetric problems or when max_iter is exceeded.
DiscreteVISolution solve_vi(const ReducedVIProblem& problem, const ViOptions& options = {});

/// Exhaustive active-set oracle: tries all 2^m subsets of pinned jumps.
DiscreteVISolution solve_vi_activeset(const ReducedVIProblem& problem, Index pair_budget = 16,
                                      double tol = 1e-10);

enum class LinearMethod { Auto, Dense, ConjugateGradient, SparseCholesky };

struct LinearOptions {
  LinearMethod method = LinearMethod::Auto;
  double rel_tol = 1e-10;
  Index max_iter = 100000;
  Index dense_limit = 2000;
};

/// Unconstrained solve of (K + B) u = f on the free DOFs; returns full nodal values.
VectorXd solve_linear(const ReducedVIProblem& problem, const LinearOptions& options = {});

/// Jacobi-preconditioned conjugate gradients. Returns the iteration count and
/// fills the relative residual history.
template <typename MatrixType>
Index conjugate_gradient(const MatrixType& a, const VectorXd& b, VectorXd& x, double rel_tol,
                         Index max_iter, std::vector<double>* history = nullptr) {
  const VectorXd inv_diag = a.diagonal().cwiseInverse();
  VectorXd r = b - a * x;
  const double b_norm = std::max(b.norm(), std::numeric_limits<double>::min());
  VectorXd z = inv_diag.cwiseProduct(r);
  VectorXd p = z;
  double rz = r.dot(z);
  for (Index it = 0; it < max_iter; ++it) {
    const double rel = r.norm() / b_norm;
    if (history) history->push_back(rel);
    if (rel <= rel_tol) return it;
    const VectorXd q = a * p;
    const double step = rz / p.dot(q);
    x += step * p;
    r -= step * q;
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  return -1;
}

/// Recomputes jumps and multipliers of a free-DOF vector from the operators.
/// A pair is active when its jump vanishes and its multiplier is positive.
std::vector<PairStatus> pair_status(const ReducedVIProblem& problem, const VectorXd& free_values,
                                    double active_tol = 1e-12);
ComplementarityReport check_complementarity(const std::vector<PairStatus>& status);

/// |u^T K u + u^T B u - f^T u| / (1 + |f^T u|).
double energy_identity_residual(const ReducedVIProblem& problem, const VectorXd& free_values);

/// 1/2 u^T (K + B) u - f^T u.
double vi_objective(const ReducedVIProblem& problem, const VectorXd& free_values);

/// Pair-status table: "id jump multiplier active" lines, pinned pairs omitted.
void write_pair_status(std::ostream& os, const std::vector<PairStatus>& status);
std::vector<PairStatus> read_pair_status(std::istream& is);

}  // namespace roughsig

#endif  // ROUGHSIG_VI_SOLVER_HPP
