#pragma once

#include <utility>

#include "slnlap/model.hpp"
#include "slnlap/types.hpp"

namespace slnlap {

// Asymptotic form of the minimiser for large theta:
//   x_i = sum_j beta(i,j) log_j(theta) - mu_i + c_i + o(1),
// with log_j the j-times iterated logarithm. Columns beyond the recursion's
// last step are zero-filled; column n+1 appears only in degenerate boundary
// models whose index chain runs one step past n.
struct AsymptoticExpansion {
  Matrix beta;            // n x ncols, ncols in {n, n+1}
  Vector c;
  IndexSet plus_set;      // F+
  IndexSet minus_set;     // F-
  IndexSet minus1_set;    // F-(1): rows with beta(i,1) < -1
  IndexSet star1_set;     // F*(1): first-step strictly-negative residual rows
  std::vector<int> k_index;  // per index: position of the defining column,
                             // 0 where not applicable
  Matrix C;               // -D(-,-)^-1 D(-,+), |F-| x |F+|
};

// Runs the recursive quadratic programs and assembles (beta, c, partition).
// Throws PartitionFailure if a step leaves the unresolved set unchanged.
AsymptoticExpansion expand(const LognormalModel& model);

// Closed form when every row sum of D is positive:
// x_i = -log theta + log_2 theta - mu_i + log a_i + o(1).
AsymptoticExpansion all_positive_expansion(const LognormalModel& model);

// Schur complement D(*,*) - D(*,~) D(~,~)^-1 D(~,*) over star1 and its row
// sums; the row sums are the exp(c_i) for i in F*(1).
std::pair<Matrix, Vector> schur_constants(const LognormalModel& model,
                                          const IndexSet& star1);

// Truncated expansion value at theta (no remainder estimate). Throws
// ThetaTooSmall when a required iterated logarithm is undefined or
// nonpositive.
Vector evaluate(const AsymptoticExpansion& expansion,
                const LognormalModel& model, double theta);

}  // namespace slnlap
