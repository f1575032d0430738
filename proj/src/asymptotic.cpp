#include "slnlap/asymptotic.hpp"

#include <algorithm>
#include <cmath>

#include "slnlap/errors.hpp"
#include "slnlap/qp.hpp"

namespace slnlap {

namespace {

enum class State { unresolved, plus, star, minus };

Matrix submatrix(const Matrix& M, const IndexSet& rows, const IndexSet& cols) {
  Matrix out(rows.size(), cols.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t s = 0; s < cols.size(); ++s) out(r, s) = M(rows[r], cols[s]);
  }
  return out;
}

}  // namespace

AsymptoticExpansion expand(const LognormalModel& model) {
  const int n = model.dim;
  const Matrix& D = model.precision;
  const double res_tol = 1e-9 * std::max(1.0, D.cwiseAbs().maxCoeff());
  const double act_tol = 1e-9;

  Matrix beta = Matrix::Zero(n, n + 1);
  std::vector<State> state(n, State::unresolved);
  std::vector<int> k_index(n, 0);
  AsymptoticExpansion ex;

  // Step 1: minimise w^T D w over { w_i <= -1 }.
  {
    QpProblem p;
    p.D = D;
    for (int i = 0; i < n; ++i) p.upper.push_back({i, -1.0});
    QpSolution sol = solve_qp(p);
    beta.col(0) = sol.w;
    for (int i = 0; i < n; ++i) {
      if (sol.w[i] < -1.0 - act_tol) {
        state[i] = State::minus;
        ex.minus1_set.push_back(i);
        k_index[i] = 1;
      } else if (sol.residuals[i] < -res_tol) {
        state[i] = State::star;
        ex.star1_set.push_back(i);
      }
      // else unresolved: at the bound with zero residual
    }
  }

  int last_col = 0;  // 0-based index of the last written beta column
  for (int k = 2; k <= n + 1; ++k) {
    IndexSet star_prev, zero_prev, minus_prev, plus_prev;
    for (int i = 0; i < n; ++i) {
      switch (state[i]) {
        case State::star: star_prev.push_back(i); break;
        case State::unresolved: zero_prev.push_back(i); break;
        case State::minus: minus_prev.push_back(i); break;
        case State::plus: plus_prev.push_back(i); break;
      }
    }
    if (star_prev.empty() && zero_prev.empty()) break;
    if (k == n + 1 && !zero_prev.empty()) {
      throw PartitionFailure("unresolved indices after n steps");
    }

    QpProblem p;
    p.D = D;
    for (int i : plus_prev) p.fixed.push_back({i, 0.0});
    for (int i : star_prev) p.fixed.push_back({i, 1.0});
    for (int i : zero_prev) p.upper.push_back({i, 0.0});
    p.stationary = minus_prev;
    QpSolution sol = solve_qp(p);
    beta.col(k - 1) = sol.w;
    last_col = k - 1;

    for (int i : star_prev) {
      state[i] = State::plus;
      k_index[i] = k;
    }
    bool any_left = false;
    for (int i : zero_prev) {
      if (sol.w[i] < -act_tol) {
        state[i] = State::minus;
        k_index[i] = k;
        any_left = true;
      } else if (sol.residuals[i] < -res_tol) {
        state[i] = State::star;
        any_left = true;
      }
    }
    if (!zero_prev.empty() && !any_left) {
      throw PartitionFailure(
          "recursion step resolved no index; tolerance breakdown");
    }
  }

  for (int i = 0; i < n; ++i) {
    if (state[i] == State::plus) {
      ex.plus_set.push_back(i);
    } else if (state[i] == State::minus) {
      ex.minus_set.push_back(i);
    } else {
      throw PartitionFailure("index left unclassified");
    }
  }

  // Constants. For i in F+ the defining residual sits one column before the
  // column that pinned the index to one.
  ex.beta = beta.leftCols(std::max(n, last_col + 1));
  Vector c(n);
  const Matrix resid = D * ex.beta;
  for (int i : ex.plus_set) {
    const int ell = k_index[i] - 2;  // 0-based
    const double r = resid(i, ell);
    if (!(r < 0.0)) {
      throw PartitionFailure("nonnegative defining residual in F+");
    }
    c[i] = std::log(-r);
  }
  if (!ex.minus_set.empty()) {
    const Matrix Dmm = submatrix(D, ex.minus_set, ex.minus_set);
    const Matrix Dmp = submatrix(D, ex.minus_set, ex.plus_set);
    Eigen::LLT<Matrix> llt(Dmm);
    if (llt.info() != Eigen::Success) {
      throw SingularSubmatrix("D(-,-) not positive definite");
    }
    ex.C = -llt.solve(Dmp);
    Vector cp_minus_mup(ex.plus_set.size());
    for (size_t r = 0; r < ex.plus_set.size(); ++r) {
      cp_minus_mup[r] = c[ex.plus_set[r]] - model.mu[ex.plus_set[r]];
    }
    const Vector cm = ex.C * cp_minus_mup;
    for (size_t r = 0; r < ex.minus_set.size(); ++r) {
      c[ex.minus_set[r]] = cm[r] + model.mu[ex.minus_set[r]];
    }
  } else {
    ex.C = Matrix(0, ex.plus_set.size());
  }
  ex.c = std::move(c);
  ex.k_index = std::move(k_index);
  return ex;
}

AsymptoticExpansion all_positive_expansion(const LognormalModel& model) {
  const int n = model.dim;
  for (int i = 0; i < n; ++i) {
    if (!(model.row_sums[i] > 0.0)) {
      throw DomainError("all_positive_expansion requires every row sum > 0");
    }
  }
  AsymptoticExpansion ex;
  const int ncols = std::max(n, 2);
  ex.beta = Matrix::Zero(n, ncols);
  ex.beta.col(0).setConstant(-1.0);
  ex.beta.col(1).setConstant(1.0);
  ex.c = model.row_sums.array().log();
  for (int i = 0; i < n; ++i) {
    ex.plus_set.push_back(i);
    ex.star1_set.push_back(i);
  }
  ex.k_index.assign(n, 2);
  ex.C = Matrix(0, n);
  return ex;
}

std::pair<Matrix, Vector> schur_constants(const LognormalModel& model,
                                          const IndexSet& star1) {
  const int n = model.dim;
  const Matrix& D = model.precision;
  std::vector<bool> in_star(n, false);
  for (int i : star1) in_star.at(i) = true;
  IndexSet comp;
  for (int i = 0; i < n; ++i) {
    if (!in_star[i]) comp.push_back(i);
  }
  if (comp.empty()) {
    return {D, model.row_sums};
  }
  const Matrix Dss = submatrix(D, star1, star1);
  const Matrix Dsc = submatrix(D, star1, comp);
  const Matrix Dcc = submatrix(D, comp, comp);
  Eigen::LLT<Matrix> llt(Dcc);
  if (llt.info() != Eigen::Success) {
    throw SingularSubmatrix("complement block not positive definite");
  }
  Matrix Dbar = Dss - Dsc * llt.solve(Dsc.transpose());
  Vector abar = Dbar.rowwise().sum();
  return {std::move(Dbar), std::move(abar)};
}

Vector evaluate(const AsymptoticExpansion& ex, const LognormalModel& model,
                double theta) {
  const int n = model.dim;
  const int ncols = static_cast<int>(ex.beta.cols());
  int used = 0;
  for (int j = 0; j < ncols; ++j) {
    if (ex.beta.col(j).cwiseAbs().maxCoeff() > 0.0) used = j + 1;
  }
  Vector logs(used);
  double t = theta;
  for (int j = 0; j < used; ++j) {
    if (!(t > 0.0)) {
      throw ThetaTooSmall("iterated logarithm undefined at this theta");
    }
    t = std::log(t);
    if (!(t > 0.0)) {
      throw ThetaTooSmall("iterated logarithm nonpositive at this theta");
    }
    logs[j] = t;
  }
  Vector x = ex.c - model.mu;
  for (int j = 0; j < used; ++j) x += ex.beta.col(j) * logs[j];
  return x;
}

}  // namespace slnlap
