#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "slnlap/errors.hpp"
#include "slnlap/quasirandom.hpp"
#include "test_support.hpp"

using namespace slnlap;

namespace {

// First eight points of the published 5-dimensional sequence (raw indices
// 1..8), frozen from an independent generator of the same parameter set.
const double kGolden5[8][5] = {
    {0.5, 0.5, 0.5, 0.5, 0.5},
    {0.75, 0.25, 0.25, 0.25, 0.75},
    {0.25, 0.75, 0.75, 0.75, 0.25},
    {0.375, 0.375, 0.625, 0.875, 0.375},
    {0.875, 0.875, 0.125, 0.375, 0.875},
    {0.625, 0.125, 0.875, 0.625, 0.625},
    {0.125, 0.625, 0.375, 0.125, 0.125},
    {0.1875, 0.3125, 0.9375, 0.4375, 0.5625},
};

// Counts points per dyadic box for the level split (l_1,..,l_d).
bool boxes_balanced(const Matrix& pts, const std::vector<int>& levels,
                    int points_per_box) {
  std::map<std::vector<long>, int> counts;
  for (Eigen::Index r = 0; r < pts.rows(); ++r) {
    std::vector<long> key(levels.size());
    for (size_t d = 0; d < levels.size(); ++d) {
      key[d] = static_cast<long>(pts(r, static_cast<Eigen::Index>(d)) *
                                 std::pow(2.0, levels[d]));
    }
    counts[key]++;
  }
  long boxes = 1;
  for (int l : levels) boxes <<= l;
  if (static_cast<long>(counts.size()) != boxes) return false;
  for (const auto& [key, c] : counts) {
    if (c != points_per_box) return false;
  }
  return true;
}

void level_splits(int dim, int total, std::vector<std::vector<int>>& out,
                  std::vector<int> prefix = {}) {
  if (static_cast<int>(prefix.size()) == dim - 1) {
    int used = 0;
    for (int l : prefix) used += l;
    if (used <= total) {
      prefix.push_back(total - used);
      out.push_back(prefix);
    }
    return;
  }
  for (int l = 0; l <= total; ++l) {
    auto next = prefix;
    next.push_back(l);
    level_splits(dim, total, out, next);
  }
}

}  // namespace

TEST_CASE("first point and determinism") {
  const Matrix one = sobol_points(1, 1);
  CHECK(one(0, 0) == 0.5);
  const Matrix a = sobol_points(6, 100);
  const Matrix b = sobol_points(6, 100);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("matches the published sequence") {
  const Matrix pts = sobol_points(5, 8);
  for (int r = 0; r < 8; ++r)
    for (int d = 0; d < 5; ++d)
      CHECK(pts(r, d) == doctest::Approx(kGolden5[r][d]).epsilon(1e-15));
}

TEST_CASE("coordinates strictly inside the unit cube") {
  for (int dim : {1, 2, 8, 64}) {
    const Matrix pts = sobol_points(dim, 4096);
    CHECK(pts.minCoeff() > 0.0);
    CHECK(pts.maxCoeff() < 1.0);
  }
}

TEST_CASE("dimension limits") {
  CHECK_THROWS_AS(sobol_points(0, 1), DimensionUnsupported);
  CHECK_THROWS_AS(sobol_points(65, 1), DimensionUnsupported);
  CHECK_NOTHROW(sobol_points(64, 2));
}

TEST_CASE("half-interval balance of the emitted stream") {
  // first 2^k emitted points split every coordinate's halves evenly (k >= 2)
  const Matrix pts = sobol_points(2, 1 << 12);
  for (int k = 2; k <= 12; ++k) {
    for (int d = 0; d < 2; ++d) {
      int low = 0;
      for (int r = 0; r < (1 << k); ++r) {
        if (pts(r, d) < 0.5) ++low;
      }
      CHECK(low == (1 << (k - 1)));
    }
  }
}

TEST_CASE("net property on aligned blocks") {
  // aligned blocks [2^k, 2^{k+1}) avoid the skipped zero point entirely;
  // dimensions 1-2 give one point per dyadic box of volume 2^-k, dimension 3
  // two points per box of volume 2^{1-k}
  for (int dim : {1, 2, 3}) {
    SobolStream stream(dim);
    for (int k = 1; k <= (dim == 3 ? 8 : 9); ++k) {
      const int count = 1 << k;
      stream.skip_to(static_cast<std::uint64_t>(count));
      Matrix pts(count, dim);
      std::vector<double> row(dim);
      for (int r = 0; r < count; ++r) {
        stream.next(row.data());
        for (int d = 0; d < dim; ++d) pts(r, d) = row[d];
      }
      std::vector<std::vector<int>> splits;
      const int level = dim == 3 ? k - 1 : k;
      if (level < 0) continue;
      level_splits(dim, level, splits);
      for (const auto& s : splits) {
        CHECK(boxes_balanced(pts, s, dim == 3 ? 2 : 1));
      }
    }
  }
}

TEST_CASE("skip_to matches sequential generation") {
  SobolStream a(4);
  std::vector<double> row(4);
  for (int i = 0; i < 16; ++i) a.next(row.data());
  const std::vector<double> expected = [&] {
    a.next(row.data());
    return row;
  }();

  SobolStream b(4);
  b.skip_to(17);
  b.next(row.data());
  for (int d = 0; d < 4; ++d) CHECK(row[d] == expected[d]);
}

TEST_CASE("gaussian qmc points") {
  SUBCASE("single dimension median maps to zero") {
    const LognormalModel m = LognormalModel::from_parts(
        Vector::Zero(1), Matrix::Identity(1, 1));
    const Matrix q = gaussian_qmc_points(m, 1);
    CHECK(q(0, 0) == 0.0);
  }
  SUBCASE("sample covariance approaches sigma") {
    const LognormalModel m = testsup::table1_model();
    const Matrix q = gaussian_qmc_points(m, 1 << 14);
    Matrix cov = (q.transpose() * q) / static_cast<double>(q.rows());
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        CHECK(std::abs(cov(i, j) - m.sigma(i, j)) <=
              0.02 * std::abs(m.sigma(i, j)));
      }
    }
  }
  SUBCASE("deterministic") {
    const LognormalModel m = testsup::table1_model();
    const Matrix a = gaussian_qmc_points(m, 128);
    const Matrix b = gaussian_qmc_points(m, 128);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  }
}
