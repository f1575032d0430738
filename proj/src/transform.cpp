#include "slnlap/transform.hpp"

#include <cmath>
#include <limits>

#include "slnlap/errors.hpp"
#include "slnlap/quasirandom.hpp"
#include "slnlap/rng.hpp"
#include "slnlap/special.hpp"

namespace slnlap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Streaming mean / variance (Welford).
struct Accumulator {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }
  double std_error() const {
    if (count < 2) return 0.0;
    return std::sqrt(m2 / (static_cast<double>(count) * (count - 1)));
  }
};

inline double v_from_y(const Vector& y, const Vector& u) {
  double e = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    e += y[i] * (std::expm1(u[i]) - u[i]);
  }
  if (e > 700.0) throw OverflowError("correction exponent exceeds 700");
  return std::exp(e);
}

}  // namespace

std::string to_string(LaplaceMethod m) {
  switch (m) {
    case LaplaceMethod::tilde: return "tilde";
    case LaplaceMethod::cmc: return "cmc";
    case LaplaceMethod::is: return "is";
    case LaplaceMethod::qmc: return "qmc";
  }
  return "?";
}

LaplaceMethod laplace_method_from_string(const std::string& s) {
  if (s == "tilde") return LaplaceMethod::tilde;
  if (s == "cmc") return LaplaceMethod::cmc;
  if (s == "is") return LaplaceMethod::is;
  if (s == "qmc") return LaplaceMethod::qmc;
  throw UsageError("unknown method: " + s);
}

namespace detail {

SaddleContext saddle(const LognormalModel& model, double theta) {
  SaddleContext ctx;
  MinimiserResult min = minimise_h(model, theta);
  ctx.x_star = std::move(min.x_star);
  ctx.lambda = std::move(min.lambda_diag);
  ctx.y = model.precision * ctx.x_star;
  ctx.exponent = (Vector::Ones(model.dim) - 0.5 * ctx.x_star).dot(ctx.y);
  ctx.congruence =
      Matrix::Identity(model.dim, model.dim) +
      model.chol.transpose() * ctx.lambda.asDiagonal() * model.chol;
  Eigen::LLT<Matrix> llt(ctx.congruence);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("I + Sigma Lambda congruence not PD");
  }
  double half_logdet = 0.0;
  const Matrix L = llt.matrixL();
  for (int i = 0; i < model.dim; ++i) half_logdet += std::log(L(i, i));
  ctx.half_logdet = half_logdet;
  return ctx;
}

}  // namespace detail

double log_laplace_tilde(const LognormalModel& model, double theta) {
  if (theta < 0.0) throw DomainError("theta must be >= 0");
  if (theta == 0.0) return 0.0;
  const detail::SaddleContext ctx = detail::saddle(model, theta);
  return ctx.exponent - ctx.half_logdet;
}

double laplace_tilde(const LognormalModel& model, double theta) {
  return std::exp(log_laplace_tilde(model, theta));
}

double correction_integrand_v(const LognormalModel& model,
                              const Vector& x_star, const Vector& u) {
  if (x_star.size() != model.dim || u.size() != model.dim) {
    throw DimensionMismatch("x_star and u must have the model dimension");
  }
  return v_from_y(model.precision * x_star, u);
}

EstimateWithError estimate_I_is(const LognormalModel& model, double theta,
                                std::int64_t reps, std::uint64_t seed) {
  if (!(theta > 0.0)) throw DomainError("estimate_I_is requires theta > 0");
  if (reps < 2) throw DomainError("estimate_I_is requires reps >= 2");
  const detail::SaddleContext ctx = detail::saddle(model, theta);
  const double sqdet = std::exp(ctx.half_logdet);
  const int n = model.dim;
  const CounterRng rng(seed);

  Accumulator acc;
  Vector z(n), u(n);
  for (std::int64_t r = 0; r < reps; ++r) {
    for (int i = 0; i < n; ++i) {
      z[i] = rng.normal(static_cast<std::uint64_t>(r) * n + i);
    }
    u.noalias() = model.chol * z;
    acc.add(v_from_y(ctx.y, u));
  }

  EstimateWithError est;
  est.value = sqdet * acc.mean;
  est.log_value = std::log(est.value);
  est.std_error = sqdet * acc.std_error();
  est.reps = reps;
  est.method = LaplaceMethod::is;
  est.theta = theta;
  est.seed = seed;
  return est;
}

EstimateWithError estimate_I_qmc(const LognormalModel& model, double theta,
                                 std::int64_t reps) {
  if (!(theta > 0.0)) throw DomainError("estimate_I_qmc requires theta > 0");
  if (reps < 1) throw DomainError("estimate_I_qmc requires reps >= 1");
  const detail::SaddleContext ctx = detail::saddle(model, theta);
  const double sqdet = std::exp(ctx.half_logdet);
  const int n = model.dim;

  SobolStream stream(n);
  Vector z(n), u(n);
  double sum = 0.0, comp = 0.0;  // Kahan
  for (std::int64_t r = 0; r < reps; ++r) {
    stream.next(z.data());
    for (int i = 0; i < n; ++i) z[i] = inv_norm_cdf(z[i]);
    u.noalias() = model.chol * z;
    const double t = v_from_y(ctx.y, u) - comp;
    const double s = sum + t;
    comp = (s - sum) - t;
    sum = s;
  }

  EstimateWithError est;
  est.value = sqdet * (sum / static_cast<double>(reps));
  est.log_value = std::log(est.value);
  est.std_error = 0.0;
  est.reps = reps;
  est.method = LaplaceMethod::qmc;
  est.theta = theta;
  return est;
}

EstimateWithError laplace_cmc(const LognormalModel& model, double theta,
                              std::int64_t reps, std::uint64_t seed) {
  if (theta < 0.0) throw DomainError("theta must be >= 0");
  if (reps < 2) throw DomainError("laplace_cmc requires reps >= 2");
  const int n = model.dim;
  const CounterRng rng(seed);

  Accumulator acc;
  Vector z(n), x(n);
  for (std::int64_t r = 0; r < reps; ++r) {
    for (int i = 0; i < n; ++i) {
      z[i] = rng.normal(static_cast<std::uint64_t>(r) * n + i);
    }
    x.noalias() = model.chol * z;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::exp(model.mu[i] + x[i]);
    acc.add(std::exp(-theta * s));
  }

  EstimateWithError est;
  est.value = acc.mean;
  est.log_value = est.value > 0.0 ? std::log(est.value) : -kInf;
  est.std_error = acc.std_error();
  est.reps = reps;
  est.method = LaplaceMethod::cmc;
  est.theta = theta;
  est.seed = seed;
  return est;
}

EstimateWithError laplace(const LognormalModel& model, double theta,
                          LaplaceMethod method, std::int64_t reps,
                          std::uint64_t seed) {
  switch (method) {
    case LaplaceMethod::tilde: {
      EstimateWithError est;
      est.log_value = log_laplace_tilde(model, theta);
      est.value = std::exp(est.log_value);
      est.std_error = 0.0;
      est.reps = 0;
      est.method = method;
      est.theta = theta;
      return est;
    }
    case LaplaceMethod::cmc:
      return laplace_cmc(model, theta, reps, seed);
    case LaplaceMethod::is:
    case LaplaceMethod::qmc: {
      EstimateWithError corr = method == LaplaceMethod::is
                                   ? estimate_I_is(model, theta, reps, seed)
                                   : estimate_I_qmc(model, theta, reps);
      const double log_tilde = log_laplace_tilde(model, theta);
      const double tilde = std::exp(log_tilde);
      EstimateWithError est = corr;
      est.value = tilde * corr.value;
      est.log_value = log_tilde + corr.log_value;
      est.std_error = tilde * corr.std_error;
      return est;
    }
  }
  throw UsageError("unknown laplace method");
}

namespace detail {

EstimateWithError estimate_I_g(const LognormalModel& model, double theta,
                               std::int64_t reps, std::uint64_t seed) {
  if (!(theta > 0.0)) throw DomainError("estimate_I_g requires theta > 0");
  const SaddleContext ctx = saddle(model, theta);
  const int n = model.dim;

  // chol K^{-1/2}: maps standard normals to N(0, (Lambda+D)^{-1}).
  Eigen::SelfAdjointEigenSolver<Matrix> es(ctx.congruence);
  const Matrix Kinvsqrt = es.operatorInverseSqrt();
  const Matrix T = model.chol * Kinvsqrt;

  const CounterRng rng(seed);
  Accumulator acc;
  Vector z(n), u(n);
  for (std::int64_t r = 0; r < reps; ++r) {
    for (int i = 0; i < n; ++i) {
      z[i] = rng.normal(static_cast<std::uint64_t>(r) * n + i);
    }
    u.noalias() = T * z;
    double quad = 0.0;
    for (int i = 0; i < n; ++i) quad += ctx.lambda[i] * u[i] * u[i];
    acc.add(v_from_y(ctx.y, u) * std::exp(0.5 * quad));
  }

  EstimateWithError est;
  est.value = acc.mean;
  est.log_value = std::log(est.value);
  est.std_error = acc.std_error();
  est.reps = reps;
  est.method = LaplaceMethod::is;
  est.theta = theta;
  est.seed = seed;
  return est;
}

}  // namespace detail

}  // namespace slnlap
