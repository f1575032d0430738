#include "slnlap/oracle.hpp"

#include <cmath>

#include "slnlap/errors.hpp"
#include "slnlap/minimiser.hpp"

namespace slnlap {

namespace {

constexpr double kRefineRelTol = 1e-10;
constexpr double kNodeBudget = 1e7;

double laplace_gh_once(const LognormalModel& model, double theta, int m,
                       QuadratureCentering centering) {
  const int n = model.dim;
  Vector nodes, log_weights;
  detail::gauss_hermite_rule(m, nodes, log_weights);

  Vector centre;
  Matrix H;
  if (centering == QuadratureCentering::at_minimiser) {
    centre = minimise_h(model, theta).x_star;
    H = hessian_h(model, theta, centre);
  } else {
    centre = Vector::Zero(n);
    H = model.precision;
  }
  Eigen::LLT<Matrix> llt(H);
  Matrix S = Matrix::Identity(n, n);
  llt.matrixL().transpose().solveInPlace(S);  // S = L_H^-T, S S^T = H^-1

  const double h_centre = h_value(model, theta, centre);
  double log_det_s = 0.0;
  const Matrix Lh = llt.matrixL();
  for (int i = 0; i < n; ++i) log_det_s -= std::log(Lh(i, i));
  double log_det_sigma = 0.0;
  for (int i = 0; i < n; ++i) log_det_sigma += 2.0 * std::log(model.chol(i, i));

  // sum over the tensor grid of exp{-h(centre + S y) + h(centre) + |y|^2/2},
  // with the weight folded into the exponent
  std::vector<int> idx(n, 0);
  Vector y(n), x(n);
  double sum = 0.0, comp = 0.0;
  while (true) {
    double logw = 0.0, ysq = 0.0;
    for (int d = 0; d < n; ++d) {
      y[d] = nodes[idx[d]];
      logw += log_weights[idx[d]];
      ysq += y[d] * y[d];
    }
    x.noalias() = centre + S * y;
    const double e = -h_value(model, theta, x) + h_centre + 0.5 * ysq;
    const double t = std::exp(logw + e) - comp;
    const double s = sum + t;
    comp = (s - sum) - t;
    sum = s;

    int d = 0;
    while (d < n && ++idx[d] == m) idx[d++] = 0;
    if (d == n) break;
  }

  const double log_norm = -h_centre + log_det_s -
                          0.5 * n * std::log(2.0 * M_PI) - 0.5 * log_det_sigma;
  return sum * std::exp(log_norm);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

double laplace_adaptive_1d(const LognormalModel& model, double theta) {
  // E[exp(-theta e^X)], X ~ N(mu, sigma^2), over mu +- 12 sigma.
  const double mu = model.mu[0];
  const double sd = std::sqrt(model.sigma(0, 0));
  const auto f = [&](double x) {
    const double z = (x - mu) / sd;
    return std::exp(-theta * std::exp(x) - 0.5 * z * z) /
           (sd * std::sqrt(2.0 * M_PI));
  };
  const double a = mu - 12.0 * sd, b = mu + 12.0 * sd;
  const double m = 0.5 * (a + b);
  return adaptive_simpson(f, a, b, f(a), f(m), f(b), 1e-14, 48);
}

}  // namespace

namespace detail {

void gauss_hermite_rule(int n, Vector& nodes, Vector& log_weights) {
  Matrix J = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(static_cast<double>(k));
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(J, Eigen::EigenvaluesOnly);
  nodes = es.eigenvalues();

  // w(x) = 1 / sum_{k<n} p_k(x)^2 with the orthonormal recurrence
  // p_{k+1} = (x p_k - sqrt(k) p_{k-1}) / sqrt(k+1); values grow like
  // exp(x^2/4), so rescale on the fly and track the log of the scale.
  log_weights.resize(n);
  const double log_p0 = -0.25 * std::log(2.0 * M_PI);
  for (int i = 0; i < n; ++i) {
    const double x = nodes[i];
    double pk = 1.0, pk1 = 0.0;  // p_k / p_0 and p_{k-1} / p_0
    double sumsq = 1.0;
    double log_scale = 0.0;
    for (int k = 0; k + 1 < n; ++k) {
      const double next =
          (x * pk - std::sqrt(static_cast<double>(k)) * pk1) /
          std::sqrt(static_cast<double>(k + 1));
      pk1 = pk;
      pk = next;
      sumsq += pk * pk;
      if (sumsq > 1e250) {
        sumsq *= 1e-250;
        pk *= 1e-125;
        pk1 *= 1e-125;
        log_scale += 250.0 * std::log(10.0);
      }
    }
    log_weights[i] = -2.0 * log_p0 - log_scale - std::log(sumsq);
  }
}

}  // namespace detail

double laplace_quadrature(const LognormalModel& model, double theta,
                          const QuadratureSpec& spec) {
  if (model.dim > 3) {
    throw DimensionTooLarge("laplace_quadrature supports n <= 3");
  }
  if (theta < 0.0) throw DomainError("theta must be >= 0");

  if (spec.scheme == QuadratureScheme::adaptive) {
    if (model.dim != 1) {
      throw DimensionTooLarge("adaptive scheme supports n == 1");
    }
    return laplace_adaptive_1d(model, theta);
  }

  int m = std::max(8, spec.nodes_per_dim);
  double prev = laplace_gh_once(model, theta, m, spec.centering);
  while (true) {
    const int m2 = 2 * m;
    if (std::pow(static_cast<double>(m2), model.dim) > kNodeBudget) {
      throw NonConvergent("node budget exhausted before refinement settled");
    }
    const double next = laplace_gh_once(model, theta, m2, spec.centering);
    if (std::abs(next - prev) <= kRefineRelTol * std::abs(next)) {
      return next;
    }
    prev = next;
    m = m2;
  }
}

double density_convolution(const LognormalModel& model, double x,
                           const QuadratureSpec& spec) {
  (void)spec;
  if (model.dim != 2) {
    throw DimensionTooLarge("density_convolution requires n == 2");
  }
  if (!(x > 0.0)) return 0.0;

  const Matrix& D = model.precision;
  const double norm =
      1.0 / (2.0 * M_PI * model.chol(0, 0) * model.chol(1, 1));
  const auto joint = [&](double u, double v) {
    if (!(u > 0.0) || !(v > 0.0)) return 0.0;
    const double lu = std::log(u) - model.mu[0];
    const double lv = std::log(v) - model.mu[1];
    const double q =
        D(0, 0) * lu * lu + 2.0 * D(0, 1) * lu * lv + D(1, 1) * lv * lv;
    return norm * std::exp(-0.5 * q) / (u * v);
  };

  // tanh-sinh on (0, x): s = x/2 (1 + tanh(pi/2 sinh t)).
  const double T = 3.8;
  const auto level_sum = [&](double step) {
    double sum = 0.0;
    const int kmax = static_cast<int>(std::ceil(T / step));
    for (int k = -kmax; k <= kmax; ++k) {
      const double t = k * step;
      const double sh = 0.5 * M_PI * std::sinh(t);
      const double ch = std::cosh(sh);
      const double s = 0.5 * x * (1.0 + std::tanh(sh));
      const double jac = 0.5 * x * 0.5 * M_PI * std::cosh(t) / (ch * ch);
      sum += jac * joint(s, x - s);
    }
    return sum * step;
  };

  double step = 0.5;
  double prev = level_sum(step);
  for (int level = 0; level < 12; ++level) {
    step *= 0.5;
    const double next = level_sum(step);
    if (std::abs(next - prev) <=
        kRefineRelTol * std::max(std::abs(next), 1e-300)) {
      return next;
    }
    prev = next;
  }
  throw NonConvergent("tanh-sinh refinement did not settle");
}

}  // namespace slnlap
