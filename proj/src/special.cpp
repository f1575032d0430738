#include "slnlap/special.hpp"

#include <cmath>

#include "slnlap/errors.hpp"

namespace slnlap {

namespace {

// One Halley update for f(w) = w e^w - z.
inline double halley_step(double w, double z) {
  const double ew = std::exp(w);
  const double f = w * ew - z;
  const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * (w + 1.0));
  return w - f / denom;
}

// Quantile of the lower half, p in (0, 0.5]; returns z <= 0.
// Rational approximations from Wichura's algorithm AS 241 (PPND16),
// then one Halley polish step against the erfc-based CDF.
double inv_norm_cdf_lower(double p) {
  const double q = p - 0.5;  // in (-0.5, 0]
  double z;
  if (q >= -0.425) {
    const double r = 0.180625 - q * q;
    z = q *
        (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
              6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
            1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
          1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
            5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
          4.2313330701600911252e1) * r + 1.0);
  } else {
    double r = std::sqrt(-std::log(p));
    if (r <= 5.0) {
      r -= 1.6;
      z = -(((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                 2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
               3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
             4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
    } else {
      r -= 5.0;
      z = -(((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
               2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
             5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
    }
  }

  // z <= 0 here, so the lower-tail CDF via erfc(-z/sqrt2) has no cancellation.
  const double phi = std::exp(-0.5 * z * z) * 0.3989422804014326779;
  if (phi > 0.0 && std::isfinite(z)) {
    const double err = 0.5 * std::erfc(-z * 0.7071067811865475244) - p;
    const double u = err / phi;
    z -= u / (1.0 + 0.5 * z * u);
  }
  return z;
}

}  // namespace

double lambert_w0(double z) {
  if (std::isnan(z) || z < 0.0) {
    throw DomainError("lambert_w0 requires z >= 0");
  }
  if (z == 0.0) return 0.0;

  // Initial guess: series for small z, log z - log log z for large z,
  // linear blend on [1, e).
  static const double kE = std::exp(1.0);
  double w;
  if (z < 1.0) {
    w = z * (1.0 - z);
  } else if (z < kE) {
    const double t = (z - 1.0) / (kE - 1.0);
    w = (1.0 - t) * 0.567143290409784 + t * 1.0;
  } else {
    const double lz = std::log(z);
    const double llz = std::log(lz);
    w = lz - llz + llz / lz;
  }

  for (int i = 0; i < 12; ++i) {
    const double next = halley_step(w, z);
    if (std::abs(next - w) <= 1e-16 * (1.0 + std::abs(next))) return next;
    w = next;
  }
  return w;
}

namespace detail {

double lambert_w0_exp(double u) {
  // w + log w = u. For moderate u just use W(exp u).
  if (u < 500.0) return lambert_w0(std::exp(u));
  double w = u - std::log(u);
  for (int i = 0; i < 10; ++i) {
    const double f = w + std::log(w) - u;
    const double next = w - f * w / (w + 1.0);
    if (std::abs(next - w) <= 1e-16 * next) return next;
    w = next;
  }
  return w;
}

}  // namespace detail

double norm_cdf(double z) {
  return 0.5 * std::erfc(-z * 0.7071067811865475244);
}

double inv_norm_cdf(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw DomainError("inv_norm_cdf requires p in (0,1)");
  }
  if (p == 0.5) return 0.0;
  // Mirror through the lower half so that p and 1-p map to exactly
  // opposite quantiles.
  if (p < 0.5) return inv_norm_cdf_lower(p);
  return -inv_norm_cdf_lower(1.0 - p);
}

}  // namespace slnlap
