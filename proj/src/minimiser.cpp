#include "slnlap/minimiser.hpp"

#include <cmath>
#include <limits>

#include "slnlap/asymptotic.hpp"
#include "slnlap/errors.hpp"
#include "slnlap/special.hpp"

namespace slnlap {

namespace {

constexpr double kExpGuard = 700.0;
constexpr int kMaxNewton = 200;
constexpr int kMaxFixedPoint = 400;

void check_exponents(const LognormalModel& model, const Vector& x) {
  for (int i = 0; i < model.dim; ++i) {
    if (model.mu[i] + x[i] > kExpGuard) {
      throw OverflowError("exp argument exceeds 700");
    }
  }
}

double residual_scale(const LognormalModel& model, double theta,
                      const Vector& x) {
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < model.dim; ++i) m = std::max(m, model.mu[i] + x[i]);
  return std::max(1.0, theta * std::exp(m));
}

}  // namespace

Vector grad_h(const LognormalModel& model, double theta, const Vector& x) {
  check_exponents(model, x);
  return theta * (model.mu + x).array().exp().matrix() +
         model.precision * x;
}

Matrix hessian_h(const LognormalModel& model, double theta, const Vector& x) {
  check_exponents(model, x);
  Matrix H = model.precision;
  for (int i = 0; i < model.dim; ++i) {
    H(i, i) += theta * std::exp(model.mu[i] + x[i]);
  }
  return H;
}

double h_value(const LognormalModel& model, double theta, const Vector& x) {
  double e = 0.0;
  for (int i = 0; i < model.dim; ++i) {
    const double a = model.mu[i] + x[i];
    if (a > kExpGuard) return std::numeric_limits<double>::infinity();
    e += std::exp(a);
  }
  return theta * e + 0.5 * x.dot(model.precision * x);
}

Vector fixed_point_step(const LognormalModel& model, double theta,
                        const Vector& x) {
  if (!(theta > 0.0)) throw DomainError("fixed_point_step requires theta > 0");
  check_exponents(model, x);
  const int n = model.dim;
  Vector out(n);
  for (int i = 0; i < n; ++i) {
    const double dii = model.precision(i, i);
    double off = 0.0;  // A_i x with A = D - diag(D)
    for (int j = 0; j < n; ++j) {
      if (j != i) off += model.precision(i, j) * x[j];
    }
    const double shift = off / dii;
    // Argument theta e^{mu_i}/D_ii * e^{-shift} can overflow; solve through
    // the log form W(e^u).
    const double u = std::log(theta) + model.mu[i] - std::log(dii) - shift;
    out[i] = -detail::lambert_w0_exp(u) - shift;
  }
  return out;
}

namespace detail {

MinimiserResult minimise_h_observed(
    const LognormalModel& model, double theta, std::optional<Vector> seed,
    const std::function<void(const Vector&, double)>& on_accept) {
  if (theta < 0.0) throw DomainError("theta must be >= 0");
  const int n = model.dim;

  MinimiserResult res;
  if (theta == 0.0) {
    res.x_star = Vector::Zero(n);
    res.lambda_diag = Vector::Zero(n);
    res.residual_inf = 0.0;
    res.iterations = 0;
    res.method = MinimiseMethod::newton;
    return res;
  }

  Vector x;
  if (seed) {
    x = *seed;
  } else {
    x = Vector::Zero(n);
    static const double kThetaSeedCut = std::exp(std::exp(1.0));
    if (theta > kThetaSeedCut) {
      try {
        x = evaluate(expand(model), model, theta);
      } catch (const Error&) {
        x.setZero();  // fall back to the zero seed
      }
    }
  }

  // Converge well past the contract threshold (1e-8 * scale): downstream
  // closed forms inherit the minimiser error linearly. The loop also stops
  // once the line search cannot improve h, so an unreachable target is safe.
  const double target_rel = 1e-15;
  const double accept_rel = 1e-8;

  int iters = 0;
  MinimiseMethod method = MinimiseMethod::newton;
  double best = h_value(model, theta, x);
  if (!std::isfinite(best)) {
    x.setZero();
    best = h_value(model, theta, x);
  }
  if (on_accept) on_accept(x, best);

  auto converged = [&](double rel_target) {
    const Vector g = grad_h(model, theta, x);
    return g.cwiseAbs().maxCoeff() <=
           rel_target * residual_scale(model, theta, x);
  };

  int stalled = 0;
  for (; iters < kMaxNewton; ++iters) {
    const Vector g = grad_h(model, theta, x);
    const double scale = residual_scale(model, theta, x);
    if (g.cwiseAbs().maxCoeff() <= target_rel * scale) break;

    const Matrix H = hessian_h(model, theta, x);
    Eigen::LLT<Matrix> llt(H);
    Vector step = llt.solve(-g);
    const double slope = g.dot(step);  // < 0 for a descent direction

    double t = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      const Vector cand = x + t * step;
      const double hc = h_value(model, theta, cand);
      if (hc <= best + 1e-4 * t * slope) {
        x = cand;
        stalled = hc < best ? 0 : stalled + 1;
        best = hc;
        accepted = true;
        break;
      }
      t /= 2.0;
    }
    if (!accepted) break;  // no further progress representable
    if (on_accept) on_accept(x, best);
    if (stalled >= 2) break;  // h at its floating-point floor
  }

  // h is quadratically flat at its floor while the gradient still contracts
  // under full Newton steps; polish until the contraction stops.
  for (int polish = 0; polish < 6; ++polish) {
    const Vector g = grad_h(model, theta, x);
    const double gnorm = g.cwiseAbs().maxCoeff();
    if (gnorm <= target_rel * residual_scale(model, theta, x)) break;
    Eigen::LLT<Matrix> llt(hessian_h(model, theta, x));
    const Vector cand = x + llt.solve(-g);
    if (grad_h(model, theta, cand).cwiseAbs().maxCoeff() >= gnorm) break;
    x = cand;
    ++iters;
  }

  if (!converged(accept_rel)) {
    // Lambert-W fixed point fallback.
    method = MinimiseMethod::hybrid;
    Vector prev = x;
    for (int k = 0; k < kMaxFixedPoint; ++k) {
      Vector next = fixed_point_step(model, theta, prev);
      ++iters;
      const double delta = (next - prev).cwiseAbs().maxCoeff();
      prev = next;
      if (delta <= 1e-13 * std::max(1.0, prev.cwiseAbs().maxCoeff())) break;
    }
    x = prev;
    if (!converged(accept_rel)) {
      throw NoConvergence("minimiser did not reach the residual target");
    }
  }

  res.x_star = x;
  res.lambda_diag = theta * (model.mu + x).array().exp().matrix();
  res.residual_inf = grad_h(model, theta, x).cwiseAbs().maxCoeff();
  res.iterations = iters;
  res.method = method;
  return res;
}

}  // namespace detail

MinimiserResult minimise_h(const LognormalModel& model, double theta,
                           std::optional<Vector> seed) {
  return detail::minimise_h_observed(model, theta, std::move(seed), nullptr);
}

}  // namespace slnlap
