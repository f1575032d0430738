#pragma once

#include <cstdint>
#include <functional>

#include "slnlap/model.hpp"
#include "slnlap/transform.hpp"
#include "slnlap/types.hpp"

namespace slnlap {

// Real-axis Laplace inversion rule f(x) ~ (ln2/x) sum_k V_k L(k ln2 / x).
// Exact on constants and on polynomials in 1/theta of bounded degree, which
// pins sum V_k = 0 and sum V_k / k = 1.
struct StehfestRule {
  int m = 0;
  Vector weights;
};

// Classical weights, assembled in exact 128-bit rational arithmetic before
// conversion. m even, 2 <= m <= 18 (the weights grow combinatorially and
// double precision runs out beyond that).
StehfestRule stehfest_weights(int m);

// Applies the rule to a transform evaluator. No positivity guarantee: the
// rule may return small negatives where f is essentially zero.
double invert(const std::function<double(double)>& transform, double x,
              const StehfestRule& rule);

enum class DensityMethod { tilde, is, qmc, cond };

std::string to_string(DensityMethod m);
DensityMethod density_method_from_string(const std::string& s);

// Density estimate by numerical inversion of the chosen transform estimator.
// The stochastic estimators reuse one seed across all rule evaluations so the
// inverted curve is smooth in theta.
double density(const LognormalModel& model, double x, DensityMethod method,
               int gs_terms, std::int64_t reps, std::uint64_t seed);

// Conditional Monte Carlo baseline: average over draws of (X_2..X_n) of the
// conditional density of exp(X_1) at x - sum_{i>=2} exp(X_i). Exact (zero
// variance) when n == 1.
EstimateWithError density_cond_mc(const LognormalModel& model, double x,
                                  std::int64_t reps, std::uint64_t seed);

}  // namespace slnlap
