#ifndef ROUGHSIG_LIMIT_SOLVER_HPP
#define ROUGHSIG_LIMIT_SOLVER_HPP

#include <optional>

#include "roughsig/coefficient.hpp"
#include "roughsig/geometry.hpp"
#include "roughsig/homogenize.hpp"
#include "roughsig/vi_solver.hpp"

namespace roughsig {

struct LimitProblemSpec {
  Regime regime = Regime::A;
  Mat2 tensor = Mat2::Identity();
  std::optional<double> conductance;  // regime A only
  SourceTerm source = SourceTerm::constant(0.0);
  double length = 1.0;
  double half_height = 1.0;
  Index nx = 64;
  Index ny = 16;  // rows per component (the single mesh of case C gets 2 ny)

  /// Regime A needs a finite conductance >= 0; B and C carry none.
  void validate() const;
};

/// Flat two-component mesh for A/B, single-component mesh for C.
TwoComponentMesh build_limit_mesh(const LimitProblemSpec& spec);

/// Signorini problem with conductance on the flat interface.
DiscreteVISolution solve_limit_A(const LimitProblemSpec& spec, const ViOptions& options = {});
/// Signorini problem without interface coupling.
DiscreteVISolution solve_limit_B(const LimitProblemSpec& spec, const ViOptions& options = {});
/// Dirichlet problem on all of Q; nodal values on build_limit_mesh(spec).
VectorXd solve_limit_C(const LimitProblemSpec& spec, const LinearOptions& options = {});

struct LimitSolution {
  TwoComponentMesh mesh;
  VectorXd nodal;
  std::optional<DiscreteVISolution> vi;  // A and B
};

LimitSolution solve_limit(const LimitProblemSpec& spec, const ViOptions& vi_options = {},
                          const LinearOptions& linear_options = {});

}  // namespace roughsig

#endif  // ROUGHSIG_LIMIT_SOLVER_HPP
