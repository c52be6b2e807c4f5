#include "roughsig/limit_solver.hpp"

#include <cmath>

#include "roughsig/assembly.hpp"

namespace roughsig {

namespace {

DomainSpec flat_domain(const LimitProblemSpec& spec) {
  DomainSpec d;
  d.length = spec.length;
  d.half_height = spec.half_height;
  d.eps = Rational(1);
  d.k = Rational(1);
  d.gamma = Rational(0);
  return d;
}

DiscreteVISolution solve_flat(const LimitProblemSpec& spec, const InterfaceConductance& h,
                              const ViOptions& options) {
  const TwoComponentMesh mesh = build_limit_mesh(spec);
  const auto problem = apply_dirichlet(assemble_problem(
      mesh, PeriodicCoefficient::constant(spec.tensor), h, spec.source, 1.0, 0.0));
  return solve_vi(problem, options);
}

}  // namespace

void LimitProblemSpec::validate() const {
  if (!(length > 0.0) || !(half_height > 0.0))
    throw ValidationError("limit: domain extents must be positive");
  if (nx < 2 || ny < 2) throw ValidationError("limit: nx and ny must be at least 2");
  if (coercivity_of(tensor) <= 0.0) throw ValidationError("limit: tensor is not coercive");
  if (regime == Regime::A) {
    if (!conductance) throw ValidationError("limit: regime A needs a finite conductance");
    if (!(std::isfinite(*conductance) && *conductance >= 0.0))
      throw ValidationError("limit: conductance must be finite and nonnegative");
  } else if (conductance) {
    throw ValidationError("limit: only regime A carries a conductance");
  }
}

TwoComponentMesh build_limit_mesh(const LimitProblemSpec& spec) {
  if (spec.regime == Regime::C) return build_single_mesh(flat_domain(spec), spec.nx, spec.ny);
  return build_flat_mesh(flat_domain(spec), spec.nx, spec.ny);
}

DiscreteVISolution solve_limit_A(const LimitProblemSpec& spec, const ViOptions& options) {
  if (spec.regime != Regime::A) throw ValidationError("solve_limit_A: regime must be A");
  spec.validate();
  const double h = *spec.conductance;
  return solve_flat(spec, h > 0.0 ? InterfaceConductance::constant(h) : InterfaceConductance::zero(),
                    options);
}

DiscreteVISolution solve_limit_B(const LimitProblemSpec& spec, const ViOptions& options) {
  if (spec.regime != Regime::B) throw ValidationError("solve_limit_B: regime must be B");
  spec.validate();
  return solve_flat(spec, InterfaceConductance::zero(), options);
}

VectorXd solve_limit_C(const LimitProblemSpec& spec, const LinearOptions& options) {
  if (spec.regime != Regime::C) throw ValidationError("solve_limit_C: regime must be C");
  spec.validate();
  const TwoComponentMesh mesh = build_limit_mesh(spec);
  const auto problem = apply_dirichlet(assemble_problem(mesh, PeriodicCoefficient::constant(spec.tensor),
                                                        InterfaceConductance::zero(), spec.source,
                                                        1.0, 0.0));
  return solve_linear(problem, options);
}

LimitSolution solve_limit(const LimitProblemSpec& spec, const ViOptions& vi_options,
                          const LinearOptions& linear_options) {
  LimitSolution out;
  out.mesh = build_limit_mesh(spec);
  switch (spec.regime) {
    case Regime::A: out.vi = solve_limit_A(spec, vi_options); break;
    case Regime::B: out.vi = solve_limit_B(spec, vi_options); break;
    case Regime::C: out.nodal = solve_limit_C(spec, linear_options); return out;
  }
  out.nodal = out.vi->nodal;
  return out;
}

}  // namespace roughsig
