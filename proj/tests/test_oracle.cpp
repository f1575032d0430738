#include <doctest.h>

#include <cmath>

#include "slnlap/errors.hpp"
#include "slnlap/oracle.hpp"
#include "test_support.hpp"

using namespace slnlap;

namespace {

LognormalModel scalar_model(double mu, double var) {
  Matrix sigma(1, 1);
  sigma << var;
  Vector m(1);
  m << mu;
  return LognormalModel::from_parts(m, sigma);
}

}  // namespace

TEST_CASE("gauss-hermite rule moments") {
  for (int n : {3, 8, 21, 64}) {
    Vector nodes, logw;
    detail::gauss_hermite_rule(n, nodes, logw);
    double s0 = 0, s2 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
      const double w = std::exp(logw[i]);
      s0 += w;
      s2 += w * nodes[i] * nodes[i];
      s4 += w * std::pow(nodes[i], 4);
    }
    const double mu0 = std::sqrt(2.0 * M_PI);
    CHECK(s0 == doctest::Approx(mu0).epsilon(1e-13));
    CHECK(s2 == doctest::Approx(mu0).epsilon(1e-13));
    if (n >= 3) CHECK(s4 == doctest::Approx(3.0 * mu0).epsilon(1e-12));
  }
}

TEST_CASE("tail weights keep relative accuracy") {
  // w(x) ~ exp(-x^2/2) far out; an eigenvector-based rule loses these digits
  Vector nodes, logw;
  detail::gauss_hermite_rule(128, nodes, logw);
  const double x = nodes[0];
  CHECK(logw[0] < -0.5 * x * x + 10.0);
  CHECK(logw[0] > -0.5 * x * x - 10.0);
}

TEST_CASE("laplace quadrature anchors") {
  const LognormalModel m = testsup::table1_model();
  CHECK(laplace_quadrature(m, 0.0) == doctest::Approx(1.0).epsilon(1e-12));

  SUBCASE("dimension cap") {
    const LognormalModel big =
        LognormalModel::from_parts(Vector::Zero(4), Matrix::Identity(4, 4));
    CHECK_THROWS_AS(laplace_quadrature(big, 1.0), DimensionTooLarge);
  }
}

TEST_CASE("one-dimensional value against independent integrators") {
  const LognormalModel s = scalar_model(0.0, 1.0);
  const double theta = 1.0;
  const double gh = laplace_quadrature(s, theta);

  QuadratureSpec adaptive;
  adaptive.scheme = QuadratureScheme::adaptive;
  const double ada = laplace_quadrature(s, theta, adaptive);
  CHECK(gh == doctest::Approx(ada).epsilon(1e-10));

  // test-side Simpson over mu +- 12 sd
  const double simpson = testsup::integrate(
      [&](double x) {
        return std::exp(-theta * std::exp(x) - 0.5 * x * x) /
               std::sqrt(2.0 * M_PI);
      },
      -12.0, 12.0, 1e-14);
  CHECK(gh == doctest::Approx(simpson).epsilon(1e-10));
}

TEST_CASE("quadrature decreases in theta") {
  const LognormalModel m = testsup::example32_model();
  double prev = 2.0;
  for (double theta : {0.0, 0.5, 2.0, 20.0, 300.0, 5e3}) {
    const double v = laplace_quadrature(m, theta);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("density convolution") {
  const LognormalModel m = testsup::table1_model();

  SUBCASE("support") {
    CHECK(density_convolution(m, 0.0) == 0.0);
    CHECK(density_convolution(m, -2.0) == 0.0);
  }
  SUBCASE("requires two summands") {
    CHECK_THROWS_AS(density_convolution(scalar_model(0, 1), 1.0),
                    DimensionTooLarge);
  }
  SUBCASE("symmetric in the two summand roles") {
    Matrix sigma(2, 2);
    sigma << 0.8, 0.2, 0.2, 1.3;
    Vector mu(2);
    mu << -0.4, 0.6;
    const LognormalModel a = LognormalModel::from_parts(mu, sigma);
    Vector mu_swapped(2);
    mu_swapped << 0.6, -0.4;
    Matrix sigma_swapped(2, 2);
    sigma_swapped << 1.3, 0.2, 0.2, 0.8;
    const LognormalModel b = LognormalModel::from_parts(mu_swapped, sigma_swapped);
    for (double x : {0.5, 1.0, 3.0}) {
      CHECK(density_convolution(a, x) ==
            doctest::Approx(density_convolution(b, x)).epsilon(1e-9));
    }
  }
}

TEST_CASE("transform and density oracles are mutually consistent") {
  const LognormalModel m = testsup::table1_model();
  for (double theta : {0.5, 1.0, 2.0}) {
    const double via_quadrature = laplace_quadrature(m, theta);
    // panelled so the adaptive rule cannot mistake the localized mass for zero
    const double panels[] = {1e-9, 0.25, 1.0, 4.0, 16.0, 80.0};
    double via_density = 0.0;
    for (int p = 0; p + 1 < 6; ++p) {
      via_density += testsup::integrate(
          [&](double x) {
            return std::exp(-theta * x) * density_convolution(m, x);
          },
          panels[p], panels[p + 1], 1e-12);
    }
    CHECK(std::abs(via_density / via_quadrature - 1.0) <= 1e-6);
  }
}
