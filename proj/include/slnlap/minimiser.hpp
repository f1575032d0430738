#pragma once

#include <functional>
#include <optional>

#include "slnlap/model.hpp"
#include "slnlap/types.hpp"

namespace slnlap {

enum class MinimiseMethod { newton, fixed_point, hybrid };

struct MinimiserResult {
  Vector x_star;
  Vector lambda_diag;   // theta * exp(mu + x*)
  double residual_inf;  // max |theta e^{mu+x*} + D x*|
  int iterations;
  MinimiseMethod method;
};

// Gradient theta e^{mu+x} + D x of the exponent h_theta. Throws
// OverflowError if any mu_i + x_i > 700.
Vector grad_h(const LognormalModel& model, double theta, const Vector& x);

// Hessian diag(theta e^{mu+x}) + D; symmetric positive definite.
Matrix hessian_h(const LognormalModel& model, double theta, const Vector& x);

// h_theta itself; +inf where the exponential would overflow.
double h_value(const LognormalModel& model, double theta, const Vector& x);

// Solves theta e^{mu+x} + D x = 0. Newton with backtracking from `seed`
// (default: the asymptotic expansion when theta > e^e, else zero), falling
// back to the componentwise Lambert-W fixed point when Newton stalls.
MinimiserResult minimise_h(const LognormalModel& model, double theta,
                           std::optional<Vector> seed = std::nullopt);

// One sweep of the componentwise fixed point
//   x_i' = -W((theta e^{mu_i}/D_ii) exp(-A_i x / D_ii)) - A_i x / D_ii,
// A = D - diag(D). Exact in one step when D is diagonal.
Vector fixed_point_step(const LognormalModel& model, double theta,
                        const Vector& x);

namespace detail {

// Newton driver with an iterate observer, used by tests to check the
// monotone decrease of h along accepted steps.
MinimiserResult minimise_h_observed(
    const LognormalModel& model, double theta, std::optional<Vector> seed,
    const std::function<void(const Vector&, double)>& on_accept);

}  // namespace detail

}  // namespace slnlap
