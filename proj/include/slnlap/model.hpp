#pragma once

#include <string>
#include <vector>

#include "slnlap/types.hpp"

namespace slnlap {

// Problem instance: (X_1..X_n) ~ N(mu, Sigma) and S = sum_i exp(X_i).
// Construction validates Sigma (symmetric positive definite) and precomputes
// the precision matrix D = Sigma^-1, its lower Cholesky factor, and the row
// sums of D, whose signs drive the asymptotic regime of the minimiser.
struct LognormalModel {
  int dim = 0;
  Vector mu;
  Matrix sigma;
  Matrix precision;       // D = Sigma^-1
  Matrix chol;            // lower triangular, chol * chol^T = Sigma
  Vector row_sums;        // a_i = sum_j D_ij
  std::vector<bool> row_sum_near_zero;  // |a_i| <= 1e-9 * max|D|
  std::string name;

  static LognormalModel from_parts(Vector mu, Matrix sigma,
                                   std::string name = {});
};

// Parses a UTF-8 JSON document {"mu":[...], "sigma":[[...],...], "name"?:...}.
// Throws ParseError, DimensionMismatch, NotPositiveDefinite.
LognormalModel load_model(const std::string& text);

LognormalModel load_model_file(const std::string& path);

struct RowSumReport {
  Vector a;
  IndexSet positive;      // indices with a_i > 0
  IndexSet nonpositive;   // indices with a_i <= 0
  std::vector<bool> near_zero;
  bool all_positive = false;
};

RowSumReport row_sums(const LognormalModel& model);

}  // namespace slnlap
