#include "roughsig/vi_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace roughsig {

namespace {

using ColSparse = Eigen::SparseMatrix<double>;

// Splits the jump-coordinate operator into the constrained block (jump slots)
// and the unconstrained remainder.
struct BlockSplit {
  std::vector<Index> jump;   // block index -> slot
  std::vector<Index> other;  // block index -> slot
  std::vector<Index> where;  // slot -> block index
  std::vector<std::uint8_t> is_jump;
};

BlockSplit split_slots(const JumpCoordinateMap& map) {
  BlockSplit b;
  b.is_jump.assign(static_cast<std::size_t>(map.size()), 0);
  for (std::size_t i = 0; i < map.pairs().size(); ++i)
    b.is_jump[static_cast<std::size_t>(map.jump_slot(i))] = 1;
  b.where.resize(static_cast<std::size_t>(map.size()));
  for (Index s = 0; s < map.size(); ++s) {
    auto& list = b.is_jump[static_cast<std::size_t>(s)] ? b.jump : b.other;
    b.where[static_cast<std::size_t>(s)] = static_cast<Index>(list.size());
    list.push_back(s);
  }
  return b;
}

std::string describe_residual(const char* what, double residual) {
  std::ostringstream os;
  os << what << " (last residual " << std::setprecision(6) << residual << ")";
  return os.str();
}

void require_symmetric(const ReducedVIProblem& problem) {
  if (!problem.symmetric)
    throw SolverError(
        "projected relaxation needs a symmetric operator; use solve_vi_activeset for "
        "nonsymmetric coefficients");
}

// Accepts `s` (already solved on its support) as the VI solution when it is
// complementary to the given residual `mult`.
bool complementary(const VectorXd& s, const VectorXd& mult, const std::vector<std::uint8_t>& pinned,
                   double s_scale, double mult_scale) {
  for (Index i = 0; i < s.size(); ++i) {
    if (pinned[static_cast<std::size_t>(i)]) {
      if (mult(i) < -1e-10 * mult_scale) return false;
    } else if (s(i) < -1e-12 * s_scale) {
      return false;
    }
  }
  return true;
}

DiscreteVISolution finish(const ReducedVIProblem& problem, const JumpCoordinateMap& map,
                          const VectorXd& z, Index iterations, double increment,
                          std::vector<double> history) {
  DiscreteVISolution sol;
  sol.free_values = map.to_nodal(z);
  sol.nodal = problem.expand(sol.free_values);
  sol.pairs = pair_status(problem, sol.free_values);
  for (const auto& p : sol.pairs) (p.active ? sol.active : sol.inactive).push_back(p.mesh_pair);
  sol.complementarity = check_complementarity(sol.pairs);
  sol.iterations = iterations;
  sol.final_increment = increment;
  sol.energy_history = std::move(history);
  return sol;
}

// Projected relaxation on the dense Schur complement of the jump block.
DiscreteVISolution solve_schur(const ReducedVIProblem& problem, const JumpCoordinateMap& map,
                               const ViOptions& options) {
  const SparseMatrix kt = map.transform_operator(problem.system());
  const VectorXd ft = map.transform_load(problem.load);
  const BlockSplit split = split_slots(map);
  const Index m = static_cast<Index>(split.jump.size());
  const Index nr = static_cast<Index>(split.other.size());

  std::vector<Eigen::Triplet<double>> rr, rs;
  MatrixXd kss = MatrixXd::Zero(m, m);
  for (Index row = 0; row < kt.outerSize(); ++row) {
    const bool row_jump = split.is_jump[static_cast<std::size_t>(row)];
    const Index br = split.where[static_cast<std::size_t>(row)];
    for (SparseMatrix::InnerIterator it(kt, row); it; ++it) {
      const bool col_jump = split.is_jump[static_cast<std::size_t>(it.col())];
      const Index bc = split.where[static_cast<std::size_t>(it.col())];
      if (row_jump && col_jump) kss(br, bc) += it.value();
      else if (!row_jump && !col_jump) rr.emplace_back(br, bc, it.value());
      else if (!row_jump && col_jump) rs.emplace_back(br, bc, it.value());
    }
  }
  ColSparse krr(nr, nr), krs(nr, m);
  krr.setFromTriplets(rr.begin(), rr.end());
  krs.setFromTriplets(rs.begin(), rs.end());

  VectorXd fr(nr), fs(m);
  for (Index i = 0; i < nr; ++i) fr(i) = ft(split.other[static_cast<std::size_t>(i)]);
  for (Index i = 0; i < m; ++i) fs(i) = ft(split.jump[static_cast<std::size_t>(i)]);

  Eigen::SimplicialLDLT<ColSparse> factor;
  MatrixXd schur = kss;
  VectorXd rhs = fs;
  VectorXd krr_inv_fr = VectorXd::Zero(nr);
  if (nr > 0) {
    factor.compute(krr);
    if (factor.info() != Eigen::Success)
      throw SolverError("factorization of the unconstrained block failed");
    krr_inv_fr = factor.solve(fr);
    rhs -= krs.transpose() * krr_inv_fr;
    constexpr Index chunk = 64;
    for (Index c0 = 0; c0 < m; c0 += chunk) {
      const Index w = std::min(chunk, m - c0);
      const MatrixXd cols = MatrixXd(krs.middleCols(c0, w));
      const MatrixXd x = factor.solve(cols);
      schur.middleCols(c0, w) -= krs.transpose() * x;
    }
  }
  schur = 0.5 * (schur + schur.transpose()).eval();
  const double offset = -0.5 * fr.dot(krr_inv_fr);
  const VectorXd diag = schur.diagonal();
  if ((diag.array() <= 0.0).any()) throw SolverError("Schur complement lost positivity");

  VectorXd s = VectorXd::Zero(m);
  if (options.initial == InitialGuess::ClampedUnconstrained && m > 0)
    s = schur.ldlt().solve(rhs).cwiseMax(0.0);

  const double s_scale = std::max(1e-300, rhs.cwiseAbs().maxCoeff() / diag.maxCoeff());
  const double mult_scale = std::max(1e-300, rhs.cwiseAbs().maxCoeff());
  std::vector<double> history;
  const double omega = options.relaxation;

  auto attempt_polish = [&]() -> bool {
    std::vector<std::uint8_t> pinned(static_cast<std::size_t>(m), 0);
    std::vector<Index> support;
    for (Index i = 0; i < m; ++i) {
      if (s(i) > 0.0) support.push_back(i);
      else pinned[static_cast<std::size_t>(i)] = 1;
    }
    VectorXd trial = VectorXd::Zero(m);
    if (!support.empty()) {
      const Index k = static_cast<Index>(support.size());
      MatrixXd sub(k, k);
      VectorXd b(k);
      for (Index a = 0; a < k; ++a) {
        b(a) = rhs(support[static_cast<std::size_t>(a)]);
        for (Index c = 0; c < k; ++c)
          sub(a, c) = schur(support[static_cast<std::size_t>(a)], support[static_cast<std::size_t>(c)]);
      }
      const VectorXd sol = sub.ldlt().solve(b);
      for (Index a = 0; a < k; ++a) trial(support[static_cast<std::size_t>(a)]) = sol(a);
    }
    const VectorXd mult = schur * trial - rhs;
    if (!complementary(trial, mult, pinned, s_scale, mult_scale)) return false;
    s = trial.cwiseMax(0.0);
    return true;
  };

  double increment = 0.0;
  Index it = 0;
  bool done = m == 0;
  while (!done) {
    if (it >= options.max_iter)
      throw SolverError(describe_residual("projected relaxation did not converge", increment),
                        increment);
    increment = 0.0;
    for (Index i = 0; i < m; ++i) {
      const double r = rhs(i) - schur.col(i).dot(s);
      const double next = std::max(0.0, s(i) + omega * r / diag(i));
      increment = std::max(increment, std::abs(next - s(i)));
      s(i) = next;
    }
    ++it;
    if (options.record_energy) history.push_back(0.5 * s.dot(schur * s) - rhs.dot(s) + offset);
    if (options.polish && it % options.polish_every == 0 && attempt_polish()) break;
    if (increment <= options.tol) {
      const VectorXd mult = schur * s - rhs;
      double comp = 0.0;
      for (Index i = 0; i < m; ++i) comp = std::max(comp, std::abs(std::min(s(i), mult(i))));
      if (comp <= options.tol) {
        if (options.polish) attempt_polish();
        done = true;
      }
    }
  }

  VectorXd z(map.size());
  VectorXd zr = VectorXd::Zero(nr);
  if (nr > 0) zr = factor.solve(fr - krs * s);
  for (Index i = 0; i < nr; ++i) z(split.other[static_cast<std::size_t>(i)]) = zr(i);
  for (Index i = 0; i < m; ++i) z(split.jump[static_cast<std::size_t>(i)]) = s(i);
  return finish(problem, map, z, it, increment, std::move(history));
}

// Projected relaxation on every free DOF of the jump-coordinate system.
DiscreteVISolution solve_pointwise(const ReducedVIProblem& problem, const JumpCoordinateMap& map,
                                   const ViOptions& options) {
  const SparseMatrix kt = map.transform_operator(problem.system());
  const VectorXd ft = map.transform_load(problem.load);
  const BlockSplit split = split_slots(map);
  const Index n = map.size();
  const VectorXd diag = kt.diagonal();

  VectorXd z = VectorXd::Zero(n);
  if (options.initial == InitialGuess::ClampedUnconstrained) {
    Eigen::SimplicialLDLT<ColSparse> factor{ColSparse(kt)};
    z = factor.solve(ft);
    for (Index s : split.jump) z(s) = std::max(0.0, z(s));
  }

  auto objective = [&]() { return 0.5 * z.dot(kt * z) - ft.dot(z); };
  auto polish = [&]() -> bool {
    std::vector<Index> keep;
    std::vector<Index> pos(static_cast<std::size_t>(n), -1);
    for (Index i = 0; i < n; ++i) {
      if (split.is_jump[static_cast<std::size_t>(i)] && z(i) <= 0.0) continue;
      pos[static_cast<std::size_t>(i)] = static_cast<Index>(keep.size());
      keep.push_back(i);
    }
    std::vector<Eigen::Triplet<double>> t;
    for (Index row : keep)
      for (SparseMatrix::InnerIterator it(kt, row); it; ++it)
        if (pos[static_cast<std::size_t>(it.col())] >= 0)
          t.emplace_back(pos[static_cast<std::size_t>(row)], pos[static_cast<std::size_t>(it.col())],
                         it.value());
    const Index k = static_cast<Index>(keep.size());
    ColSparse sub(k, k);
    sub.setFromTriplets(t.begin(), t.end());
    VectorXd b(k);
    for (Index a = 0; a < k; ++a) b(a) = ft(keep[static_cast<std::size_t>(a)]);
    Eigen::SimplicialLDLT<ColSparse> factor(sub);
    const VectorXd sol = factor.solve(b);
    VectorXd trial = VectorXd::Zero(n);
    for (Index a = 0; a < k; ++a) trial(keep[static_cast<std::size_t>(a)]) = sol(a);
    const VectorXd res = kt * trial - ft;
    const Index m = static_cast<Index>(split.jump.size());
    VectorXd s(m), mult(m);
    std::vector<std::uint8_t> pinned(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) {
      const Index slot = split.jump[static_cast<std::size_t>(i)];
      s(i) = trial(slot);
      mult(i) = res(slot);
      pinned[static_cast<std::size_t>(i)] = pos[static_cast<std::size_t>(slot)] < 0;
    }
    const double mult_scale = std::max(1e-300, ft.cwiseAbs().maxCoeff());
    const double s_scale = std::max(1e-300, trial.cwiseAbs().maxCoeff());
    if (!complementary(s, mult, pinned, s_scale, mult_scale)) return false;
    for (Index i = 0; i < m; ++i)
      trial(split.jump[static_cast<std::size_t>(i)]) = std::max(0.0, s(i));
    z = trial;
    return true;
  };

  std::vector<double> history;
  const double omega = options.relaxation;
  double increment = 0.0;
  Index it = 0;
  for (;;) {
    if (it >= options.max_iter)
      throw SolverError(describe_residual("projected relaxation did not converge", increment),
                        increment);
    increment = 0.0;
    for (Index i = 0; i < n; ++i) {
      double r = ft(i);
      for (SparseMatrix::InnerIterator e(kt, i); e; ++e) r -= e.value() * z(e.col());
      double next = z(i) + omega * r / diag(i);
      if (split.is_jump[static_cast<std::size_t>(i)]) next = std::max(0.0, next);
      increment = std::max(increment, std::abs(next - z(i)));
      z(i) = next;
    }
    ++it;
    if (options.record_energy) history.push_back(objective());
    if (options.polish && it % options.polish_every == 0 && polish()) break;
    if (increment <= options.tol) {
      const VectorXd res = kt * z - ft;
      double comp = 0.0;
      for (Index s : split.jump) comp = std::max(comp, std::abs(std::min(z(s), res(s))));
      if (comp <= options.tol) {
        if (options.polish) polish();
        break;
      }
    }
  }
  return finish(problem, map, z, it, increment, std::move(history));
}

}  // namespace

JumpCoordinateMap::JumpCoordinateMap(Index size, std::vector<ConstrainedPair> pairs)
    : size_(size), pairs_(std::move(pairs)) {
  std::vector<std::uint8_t> paired(static_cast<std::size_t>(size), 0);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(size) + 2 * pairs_.size());
  for (const auto& p : pairs_) {
    if (p.plus < 0 || p.minus < 0 || p.plus >= size || p.minus >= size || p.plus == p.minus)
      throw ValidationError("jump map: pair indices out of range");
    if (paired[static_cast<std::size_t>(p.plus)] || paired[static_cast<std::size_t>(p.minus)])
      throw ValidationError("jump map: DOF used by two pairs");
    paired[static_cast<std::size_t>(p.plus)] = paired[static_cast<std::size_t>(p.minus)] = 1;
    t.emplace_back(p.plus, p.plus, 1.0);
    t.emplace_back(p.plus, p.minus, 0.5);
    t.emplace_back(p.minus, p.plus, 1.0);
    t.emplace_back(p.minus, p.minus, -0.5);
  }
  for (Index i = 0; i < size; ++i)
    if (!paired[static_cast<std::size_t>(i)]) t.emplace_back(i, i, 1.0);
  t_.resize(size, size);
  t_.setFromTriplets(t.begin(), t.end());
}

VectorXd JumpCoordinateMap::to_nodal(const VectorXd& z) const { return t_ * z; }

VectorXd JumpCoordinateMap::to_jump(const VectorXd& u) const {
  VectorXd z = u;
  for (const auto& p : pairs_) {
    z(p.plus) = 0.5 * (u(p.plus) + u(p.minus));
    z(p.minus) = u(p.plus) - u(p.minus);
  }
  return z;
}

SparseMatrix JumpCoordinateMap::transform_operator(const SparseMatrix& a) const {
  SparseMatrix out = SparseMatrix(t_.transpose()) * a * t_;
  out.prune(0.0);
  return out;
}

DiscreteVISolution solve_vi(const ReducedVIProblem& problem, const ViOptions& options) {
  require_symmetric(problem);
  if (!(options.relaxation > 0.0 && options.relaxation < 2.0))
    throw ValidationError("solver.relaxation must lie in (0, 2)");
  const JumpCoordinateMap map(problem);
  if (options.strategy == ViStrategy::Pointwise) return solve_pointwise(problem, map, options);
  return solve_schur(problem, map, options);
}

DiscreteVISolution solve_vi_activeset(const ReducedVIProblem& problem, Index pair_budget,
                                      double tol) {
  const Index m = static_cast<Index>(problem.pairs.size());
  if (m > pair_budget || m > 24) {
    std::ostringstream os;
    os << "active-set oracle: " << m << " constrained pairs exceed the budget of " << pair_budget;
    throw ValidationError(os.str());
  }
  const JumpCoordinateMap map(problem);
  const MatrixXd kt = MatrixXd(map.transform_operator(problem.system()));
  const VectorXd ft = map.transform_load(problem.load);
  const Index n = map.size();
  std::vector<Index> jump_slots;
  for (std::size_t i = 0; i < problem.pairs.size(); ++i) jump_slots.push_back(map.jump_slot(i));

  const double load_scale = 1.0 + ft.cwiseAbs().maxCoeff();
  const std::uint64_t subsets = std::uint64_t{1} << m;
  for (std::uint64_t mask = 0; mask < subsets; ++mask) {
    std::vector<std::uint8_t> pinned(static_cast<std::size_t>(n), 0);
    for (Index i = 0; i < m; ++i)
      if (mask & (std::uint64_t{1} << i)) pinned[static_cast<std::size_t>(jump_slots[static_cast<std::size_t>(i)])] = 1;
    std::vector<Index> keep;
    for (Index i = 0; i < n; ++i)
      if (!pinned[static_cast<std::size_t>(i)]) keep.push_back(i);
    const Index k = static_cast<Index>(keep.size());
    MatrixXd sub(k, k);
    VectorXd b(k);
    for (Index a = 0; a < k; ++a) {
      b(a) = ft(keep[static_cast<std::size_t>(a)]);
      for (Index c = 0; c < k; ++c)
        sub(a, c) = kt(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(c)]);
    }
    VectorXd z = VectorXd::Zero(n);
    if (k > 0) {
      const VectorXd sol = sub.fullPivLu().solve(b);
      for (Index a = 0; a < k; ++a) z(keep[static_cast<std::size_t>(a)]) = sol(a);
    }
    const VectorXd res = kt * z - ft;
    const double value_scale = 1.0 + z.cwiseAbs().maxCoeff();
    bool ok = true;
    for (Index i = 0; i < m && ok; ++i) {
      const Index slot = jump_slots[static_cast<std::size_t>(i)];
      if (mask & (std::uint64_t{1} << i)) ok = res(slot) >= -tol * load_scale;
      else ok = z(slot) >= -tol * value_scale;
    }
    if (!ok) continue;
    for (Index slot : jump_slots) z(slot) = std::max(0.0, z(slot));
    return finish(problem, map, z, static_cast<Index>(mask), 0.0, {});
  }
  throw SolverError("active-set oracle: no subset satisfies the optimality conditions "
                    "(numerical conditioning)");
}

VectorXd solve_linear(const ReducedVIProblem& problem, const LinearOptions& options) {
  const SparseMatrix a = problem.system();
  const Index n = problem.size();
  if (n == 0) return problem.expand(VectorXd());
  LinearMethod method = options.method;
  if (method == LinearMethod::Auto)
    method = n < options.dense_limit ? LinearMethod::Dense
                                     : (problem.symmetric ? LinearMethod::ConjugateGradient
                                                          : LinearMethod::SparseCholesky);
  VectorXd x = VectorXd::Zero(n);
  switch (method) {
    case LinearMethod::Dense: {
      const MatrixXd dense(a);
      x = problem.symmetric ? VectorXd(dense.ldlt().solve(problem.load))
                            : VectorXd(dense.partialPivLu().solve(problem.load));
      break;
    }
    case LinearMethod::ConjugateGradient: {
      std::vector<double> history;
      const Index its = conjugate_gradient(a, problem.load, x, options.rel_tol, options.max_iter,
                                           &history);
      if (its < 0) {
        std::ostringstream os;
        os << "conjugate gradients stalled after " << history.size() << " iterations; residuals";
        const std::size_t step = std::max<std::size_t>(1, history.size() / 8);
        for (std::size_t i = 0; i < history.size(); i += step) os << ' ' << history[i];
        throw SolverError(os.str(), history.empty() ? 0.0 : history.back());
      }
      break;
    }
    case LinearMethod::SparseCholesky:
    case LinearMethod::Auto: {
      const ColSparse col(a);
      if (problem.symmetric) {
        Eigen::SimplicialLDLT<ColSparse> solver(col);
        if (solver.info() != Eigen::Success) throw SolverError("sparse factorization failed");
        x = solver.solve(problem.load);
      } else {
        Eigen::SparseLU<ColSparse> solver;
        solver.analyzePattern(col);
        solver.factorize(col);
        if (solver.info() != Eigen::Success) throw SolverError("sparse LU failed");
        x = solver.solve(problem.load);
      }
      break;
    }
  }
  return problem.expand(x);
}

std::vector<PairStatus> pair_status(const ReducedVIProblem& problem, const VectorXd& free_values,
                                    double active_tol) {
  const VectorXd res = problem.system() * free_values - problem.load;
  std::vector<PairStatus> out;
  out.reserve(problem.pairs.size());
  for (const auto& p : problem.pairs) {
    const double jump = free_values(p.plus) - free_values(p.minus);
    const double mult = 0.5 * (res(p.plus) - res(p.minus));
    out.push_back({p.mesh_pair, jump, mult, jump <= active_tol && mult > active_tol});
  }
  return out;
}

ComplementarityReport check_complementarity(const std::vector<PairStatus>& status) {
  ComplementarityReport r;
  for (const auto& p : status) {
    r.primal = std::max(r.primal, -p.jump);
    r.dual = std::max(r.dual, -p.multiplier);
    r.product = std::max(r.product, std::abs(p.jump * p.multiplier));
  }
  return r;
}

double energy_identity_residual(const ReducedVIProblem& problem, const VectorXd& free_values) {
  const double quad = free_values.dot(problem.system() * free_values);
  const double work = problem.load.dot(free_values);
  return std::abs(quad - work) / (1.0 + std::abs(work));
}

double vi_objective(const ReducedVIProblem& problem, const VectorXd& free_values) {
  return 0.5 * free_values.dot(problem.system() * free_values) - problem.load.dot(free_values);
}

void write_pair_status(std::ostream& os, const std::vector<PairStatus>& status) {
  os << std::setprecision(17);
  for (const auto& p : status)
    os << p.mesh_pair << ' ' << p.jump << ' ' << p.multiplier << ' ' << (p.active ? 1 : 0) << '\n';
}

std::vector<PairStatus> read_pair_status(std::istream& is) {
  std::vector<PairStatus> out;
  std::string line;
  Index line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    PairStatus p{};
    int active = 0;
    if (!(ls >> p.mesh_pair >> p.jump >> p.multiplier >> active))
      throw IoError("pair-status dump: malformed line " + std::to_string(line_no));
    p.active = active != 0;
    out.push_back(p);
  }
  return out;
}

}  // namespace roughsig
