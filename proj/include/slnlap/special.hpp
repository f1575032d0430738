#pragma once

namespace slnlap {

// Principal branch of the Lambert W function on z >= 0:
// returns w >= 0 with w * exp(w) = z. Throws DomainError for z < 0.
double lambert_w0(double z);

// Inverse of the standard normal CDF on p in (0,1).
// Throws DomainError outside the open interval.
double inv_norm_cdf(double p);

// Standard normal CDF (erfc-based), accurate into both tails.
double norm_cdf(double z);

namespace detail {

// W(exp(u)) without forming exp(u); solves w + log w = u for w > 0.
// Stable for arbitrarily large u where exp(u) would overflow.
double lambert_w0_exp(double u);

}  // namespace detail

}  // namespace slnlap
