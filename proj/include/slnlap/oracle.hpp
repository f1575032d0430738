#pragma once

#include "slnlap/model.hpp"
#include "slnlap/types.hpp"

namespace slnlap {

enum class QuadratureCentering { at_minimiser, at_mean };
enum class QuadratureScheme { gauss_hermite, adaptive };

// Ground-truth evaluation parameters. Values are accepted only after a
// refinement (node doubling / step halving) changes them by < 1e-10 relative;
// the total node budget is capped at 10^7.
struct QuadratureSpec {
  int nodes_per_dim = 16;
  QuadratureCentering centering = QuadratureCentering::at_minimiser;
  QuadratureScheme scheme = QuadratureScheme::gauss_hermite;
};

// Tensor-product Gauss-Hermite evaluation of the defining Laplace-transform
// integral after an affine change of variables centred at the minimiser with
// the inverse Hessian factor as scale. n <= 3.
double laplace_quadrature(const LognormalModel& model, double theta,
                          const QuadratureSpec& spec = {});

// f(x) as the convolution of the bivariate lognormal density over the line
// u + v = x, by tanh-sinh quadrature on (0, x). n == 2.
double density_convolution(const LognormalModel& model, double x,
                           const QuadratureSpec& spec = {});

namespace detail {

// Gauss-Hermite rule for weight exp(-t^2/2); weights sum to sqrt(2 pi).
// Nodes from the Jacobi-matrix eigenvalues; weights through the orthonormal
// recurrence w = 1 / sum_k p_k(x)^2, which keeps full relative accuracy in
// the far tail where eigenvector components degenerate to noise. Weights are
// returned as logarithms: the saddle-frame integrand can grow against the
// weight and the products must be formed in log space.
void gauss_hermite_rule(int n, Vector& nodes, Vector& log_weights);

}  // namespace detail

}  // namespace slnlap
