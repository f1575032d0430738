#include "slnlap/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slnlap/errors.hpp"

namespace slnlap {
namespace detail {

namespace {

struct EcqpSolution {
  Vector w;
  Vector m;          // multipliers of the general equality rows (half scale)
  Vector grad_half;  // Q w + A^T m
};

// Equality-constrained solve with the given pinned coordinate values.
// Free block by Cholesky of Q_FF; general rows by Cholesky of the Schur
// complement A_F Q_FF^-1 A_F^T.
EcqpSolution solve_ecqp(const Matrix& Q, const Matrix& A, const Vector& c,
                        const std::vector<int>& pinned,
                        const Vector& pin_values) {
  const int n = static_cast<int>(Q.rows());
  const int p = static_cast<int>(A.rows());
  std::vector<bool> is_pinned(n, false);
  for (int i : pinned) is_pinned[i] = true;
  std::vector<int> free_idx;
  for (int i = 0; i < n; ++i) {
    if (!is_pinned[i]) free_idx.push_back(i);
  }
  const int nf = static_cast<int>(free_idx.size());

  Vector w(n);
  for (size_t k = 0; k < pinned.size(); ++k) w[pinned[k]] = pin_values[k];

  EcqpSolution sol;
  sol.m = Vector::Zero(p);
  if (nf == 0) {
    if (p > 0) {
      throw InfeasibleConstraints(
          "equality rows present but every variable is pinned");
    }
    sol.w = w;
    sol.grad_half = Q * w;
    return sol;
  }

  Matrix Qff(nf, nf);
  for (int r = 0; r < nf; ++r) {
    for (int s = 0; s < nf; ++s) Qff(r, s) = Q(free_idx[r], free_idx[s]);
  }
  Vector rhs(nf);  // -(Q_FP w_P)
  for (int r = 0; r < nf; ++r) {
    double acc = 0.0;
    for (size_t k = 0; k < pinned.size(); ++k) {
      acc += Q(free_idx[r], pinned[k]) * pin_values[k];
    }
    rhs[r] = -acc;
  }

  Eigen::LLT<Matrix> llt(Qff);
  if (llt.info() != Eigen::Success) {
    throw InfeasibleConstraints("reduced objective block not positive definite");
  }

  Vector wf;
  if (p == 0) {
    wf = llt.solve(rhs);
  } else {
    Matrix Af(p, nf);
    for (int r = 0; r < p; ++r) {
      for (int s = 0; s < nf; ++s) Af(r, s) = A(r, free_idx[s]);
    }
    Vector r_eq(p);  // c - A_P w_P
    for (int r = 0; r < p; ++r) {
      double acc = 0.0;
      for (size_t k = 0; k < pinned.size(); ++k) {
        acc += A(r, pinned[k]) * pin_values[k];
      }
      r_eq[r] = c[r] - acc;
    }
    const Matrix Y = llt.solve(Af.transpose());  // Q_FF^-1 A_F^T
    const Matrix S = Af * Y;
    Eigen::LLT<Matrix> sllt(S);
    if (sllt.info() != Eigen::Success) {
      throw SingularSubmatrix("rank-deficient equality rows");
    }
    sol.m = sllt.solve(Af * llt.solve(rhs) - r_eq);
    wf = llt.solve(rhs - Af.transpose() * sol.m);
  }
  for (int r = 0; r < nf; ++r) w[free_idx[r]] = wf[r];
  sol.grad_half = Q * w;
  if (p > 0) sol.grad_half += A.transpose() * sol.m;
  sol.w = std::move(w);
  return sol;
}

}  // namespace

ActiveSetResult active_set_solve(
    const ActiveSetProblem& prob,
    std::optional<std::pair<Vector, std::vector<bool>>> start) {
  const int n = static_cast<int>(prob.Q.rows());
  const int nb = static_cast<int>(prob.bounds.size());

  Vector w;
  std::vector<bool> active(nb, true);
  if (start) {
    w = start->first;
    active = start->second;
  }

  const auto assemble_pins = [&](const std::vector<bool>& act) {
    std::vector<int> idx;
    std::vector<double> val;
    for (const auto& [i, v] : prob.pins) {
      idx.push_back(i);
      val.push_back(v);
    }
    for (int b = 0; b < nb; ++b) {
      if (act[b]) {
        idx.push_back(prob.bounds[b].index);
        val.push_back(prob.bounds[b].bound);
      }
    }
    Vector vv = Eigen::Map<Vector>(val.data(), static_cast<Eigen::Index>(val.size()));
    return std::make_pair(idx, vv);
  };

  if (!start) {
    auto [idx, val] = assemble_pins(active);
    w = solve_ecqp(prob.Q, prob.A, prob.c, idx, val).w;
  }

  const int max_iter = 100 + 20 * n;
  // Most-negative-multiplier dropping can stall on degenerate ties; after a
  // while switch to Bland's smallest-index rule, which terminates.
  const int bland_after = max_iter / 2;

  for (int iter = 1; iter <= max_iter; ++iter) {
    auto [idx, val] = assemble_pins(active);
    EcqpSolution ecqp = solve_ecqp(prob.Q, prob.A, prob.c, idx, val);

    const double step_norm = (ecqp.w - w).cwiseAbs().maxCoeff();
    const double wscale = std::max(1.0, w.cwiseAbs().maxCoeff());
    if (step_norm <= 1e-13 * wscale) {
      w = ecqp.w;
      // Optimal iff every working bound has a nonnegative multiplier.
      const double gscale =
          std::max(1.0, ecqp.grad_half.cwiseAbs().maxCoeff());
      int drop = -1;
      double most_negative = -1e-11 * gscale;
      for (int b = 0; b < nb; ++b) {
        if (!active[b]) continue;
        const auto& bc = prob.bounds[b];
        const double lambda = -bc.sign * ecqp.grad_half[bc.index];
        if (lambda < most_negative) {
          if (iter > bland_after) {  // Bland: first violating index
            drop = b;
            break;
          }
          most_negative = lambda;
          drop = b;
        }
      }
      if (drop < 0) {
        ActiveSetResult res;
        res.w = std::move(w);
        res.active = std::move(active);
        res.iterations = iter;
        return res;
      }
      active[drop] = false;
      continue;
    }

    // Move toward the ECQP solution, stopping at the first inactive bound.
    double alpha = 1.0;
    int blocker = -1;
    for (int b = 0; b < nb; ++b) {
      if (active[b]) continue;
      const auto& bc = prob.bounds[b];
      const double d = ecqp.w[bc.index] - w[bc.index];
      const double room = bc.bound - w[bc.index];
      if (bc.sign * d > 1e-300) {
        const double a = (bc.sign * room) / (bc.sign * d);
        if (a < alpha - 1e-15) {
          alpha = std::max(a, 0.0);
          blocker = b;
        }
      }
    }
    if (blocker < 0) {
      w = ecqp.w;
    } else {
      w += alpha * (ecqp.w - w);
      w[prob.bounds[blocker].index] = prob.bounds[blocker].bound;
      active[blocker] = true;
    }
  }
  throw MaxIterations("active-set iteration limit reached");
}

}  // namespace detail

QpSolution solve_qp(const QpProblem& problem) {
  const int n = static_cast<int>(problem.D.rows());
  std::vector<int> seen(n, 0);
  for (const auto& [i, v] : problem.fixed) seen.at(i)++;
  for (const auto& [i, b] : problem.upper) seen.at(i)++;
  for (int i : problem.stationary) seen.at(i)++;
  for (int i = 0; i < n; ++i) {
    if (seen[i] > 1) {
      throw InfeasibleConstraints("constraint index sets must be disjoint");
    }
  }

  detail::ActiveSetProblem p;
  p.Q = problem.D;
  p.pins = problem.fixed;
  for (const auto& [i, b] : problem.upper) p.bounds.push_back({i, b, +1});
  p.A.resize(static_cast<Eigen::Index>(problem.stationary.size()), n);
  p.c = Vector::Zero(static_cast<Eigen::Index>(problem.stationary.size()));
  for (size_t r = 0; r < problem.stationary.size(); ++r) {
    p.A.row(static_cast<Eigen::Index>(r)) = problem.D.row(problem.stationary[r]);
  }

  detail::ActiveSetResult r = detail::active_set_solve(p);
  QpSolution sol;
  sol.w = std::move(r.w);
  sol.active = std::move(r.active);
  sol.iterations = r.iterations;
  sol.residuals = problem.D * sol.w;
  return sol;
}

Vector min_variance_portfolio(const LognormalModel& model) {
  const int n = model.dim;
  detail::ActiveSetProblem p;
  p.Q = model.sigma;
  for (int i = 0; i < n; ++i) p.bounds.push_back({i, 0.0, -1});
  p.A = Matrix::Ones(1, n);
  p.c = Vector::Ones(1);
  // Uniform weights are strictly feasible.
  Vector w0 = Vector::Constant(n, 1.0 / n);
  detail::ActiveSetResult r =
      detail::active_set_solve(p, std::make_pair(w0, std::vector<bool>(n, false)));
  return r.w;
}

}  // namespace slnlap
