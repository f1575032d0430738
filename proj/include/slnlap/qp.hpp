#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "slnlap/model.hpp"
#include "slnlap/types.hpp"

namespace slnlap {

// Convex quadratic subproblem: minimise w^T D w subject to
//   w_i = v_i          for (i, v_i) in fixed,
//   w_i <= b_i         for (i, b_i) in upper,
//   D_{i,.} w = 0      for i in stationary.
// The three index sets must be pairwise disjoint.
struct QpProblem {
  Matrix D;
  std::vector<std::pair<int, double>> fixed;
  std::vector<std::pair<int, double>> upper;
  IndexSet stationary;
};

struct QpSolution {
  Vector w;
  std::vector<bool> active;  // per upper constraint: tight at the optimum
  Vector residuals;          // D_{i,.} w for all i
  int iterations = 0;
};

QpSolution solve_qp(const QpProblem& problem);

// Minimiser of w^T Sigma w over the simplex {sum w_i = 1, w_i >= 0}.
// All row sums of D positive => w_i = a_i / sum(a).
Vector min_variance_portfolio(const LognormalModel& model);

namespace detail {

// Shared active-set engine. General equality rows are (A, c); bounds carry a
// direction (+1: w_i <= b, -1: w_i >= b).
struct BoundConstraint {
  int index;
  double bound;
  int sign;  // +1 upper, -1 lower
};

struct ActiveSetProblem {
  Matrix Q;
  std::vector<std::pair<int, double>> pins;
  std::vector<BoundConstraint> bounds;
  Matrix A;  // may have 0 rows
  Vector c;
};

struct ActiveSetResult {
  Vector w;
  std::vector<bool> active;
  int iterations;
};

// start: optional feasible start with its working set; defaults to the
// all-bounds-active vertex.
ActiveSetResult active_set_solve(
    const ActiveSetProblem& problem,
    std::optional<std::pair<Vector, std::vector<bool>>> start = std::nullopt);

}  // namespace detail

}  // namespace slnlap
