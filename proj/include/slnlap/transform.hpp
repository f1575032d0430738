#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "slnlap/minimiser.hpp"
#include "slnlap/model.hpp"
#include "slnlap/types.hpp"

namespace slnlap {

enum class LaplaceMethod { tilde, cmc, is, qmc };

std::string to_string(LaplaceMethod m);
LaplaceMethod laplace_method_from_string(const std::string& s);

struct EstimateWithError {
  double value = 0.0;
  double log_value = 0.0;  // -inf when value underflows to 0
  double std_error = 0.0;  // 0 for the deterministic estimators
  std::int64_t reps = 0;
  LaplaceMethod method = LaplaceMethod::tilde;
  double theta = 0.0;
  std::optional<std::uint64_t> seed;
};

// Saddlepoint factor: exp{(1 - x*/2)^T D x*} / sqrt(det(I + Sigma Lambda)),
// the Gaussian integral of the second-order expansion of the exponent at x*.
// The determinant is evaluated through the symmetric congruence
// I + chol^T Lambda chol.
double laplace_tilde(const LognormalModel& model, double theta);
double log_laplace_tilde(const LognormalModel& model, double theta);

// Correction integrand v(u) = exp{(x*)^T D (e^u - 1 - u)}; v is in (0,1]
// whenever x* is the minimiser (D x* has no positive entries there).
double correction_integrand_v(const LognormalModel& model,
                              const Vector& x_star, const Vector& u);

// Monte Carlo correction factor sqrt(det(I+Sigma Lambda)) E[v(Z)],
// Z ~ N(0, Sigma), with common random numbers across theta for a fixed seed.
EstimateWithError estimate_I_is(const LognormalModel& model, double theta,
                                std::int64_t reps, std::uint64_t seed);

// Deterministic variant driven by the Sobol sequence (always started at the
// same point, so repeated calls and different theta share the points).
EstimateWithError estimate_I_qmc(const LognormalModel& model, double theta,
                                 std::int64_t reps);

// Crude Monte Carlo of E exp(-theta S); underflows to exactly 0 when every
// sampled term does.
EstimateWithError laplace_cmc(const LognormalModel& model, double theta,
                              std::int64_t reps, std::uint64_t seed);

// Dispatch: tilde -> deterministic factor; is/qmc -> tilde times estimated
// correction; cmc -> direct.
EstimateWithError laplace(const LognormalModel& model, double theta,
                          LaplaceMethod method, std::int64_t reps,
                          std::uint64_t seed);

namespace detail {

// Quantities shared by the closed form and the correction estimators.
struct SaddleContext {
  Vector x_star;
  Vector lambda;        // theta e^{mu + x*}
  Vector y;             // D x*
  double exponent;      // (1 - x*/2)^T D x*
  double half_logdet;   // 0.5 log det(I + Sigma Lambda)
  Matrix congruence;    // I + chol^T Lambda chol
};

SaddleContext saddle(const LognormalModel& model, double theta);

// First-expectation form of the correction factor with the quadratic
// reweighting exp(u^T Lambda u / 2); points u = chol K^{-1/2} z have the
// covariance (Lambda + D)^{-1} the change of variables requires. Agrees with
// estimate_I_is in distribution; used to cross-check it.
EstimateWithError estimate_I_g(const LognormalModel& model, double theta,
                               std::int64_t reps, std::uint64_t seed);

}  // namespace detail

}  // namespace slnlap
