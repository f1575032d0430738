#include "slnlap/quasirandom.hpp"

#include <bit>

#include "slnlap/errors.hpp"
#include "slnlap/special.hpp"

namespace slnlap {

SobolStream::SobolStream(int dim) : dim_(dim), index_(1) {
  if (dim < 1 || dim > kMaxDim) {
    throw DimensionUnsupported("Sobol dimension must be in [1, 64]");
  }
  direction_.assign(static_cast<size_t>(dim) * kBits, 0);
  state_.assign(dim, 0);

  for (int d = 0; d < dim; ++d) {
    std::uint64_t* v = direction_.data() + static_cast<size_t>(d) * kBits;
    if (d == 0) {
      // van der Corput: m_k = 1 for all k
      for (int k = 0; k < kBits; ++k) v[k] = 1ULL << (kBits - 1 - k);
      continue;
    }
    const detail::JoeKuoRow& row = detail::kJoeKuoTable[d - 1];
    const int s = row.degree;
    for (int k = 0; k < s && k < kBits; ++k) {
      v[k] = static_cast<std::uint64_t>(row.m[k]) << (kBits - 1 - k);
    }
    for (int k = s; k < kBits; ++k) {
      std::uint64_t val = v[k - s] ^ (v[k - s] >> s);
      for (int j = 1; j < s; ++j) {
        if ((row.poly_a >> (s - 1 - j)) & 1U) val ^= v[k - j];
      }
      v[k] = val;
    }
  }
}

void SobolStream::next(double* out) {
  // Antonov-Saleev: point at raw index i is obtained from index i-1 by
  // XORing direction vector c, where c is the lowest zero bit of i-1.
  const unsigned c = std::countr_one(index_ - 1);
  for (int d = 0; d < dim_; ++d) {
    state_[d] ^= direction_[static_cast<size_t>(d) * kBits + c];
    out[d] = static_cast<double>(state_[d]) * 0x1.0p-52;
  }
  ++index_;
}

void SobolStream::skip_to(std::uint64_t index) {
  if (index < 1) throw DomainError("Sobol index 0 is never emitted");
  // next() advances from the point at index_-1, whose value is the XOR of
  // the direction vectors selected by its Gray code.
  const std::uint64_t gray = (index - 1) ^ ((index - 1) >> 1);
  for (int d = 0; d < dim_; ++d) {
    std::uint64_t acc = 0;
    for (int b = 0; b < kBits; ++b) {
      if ((gray >> b) & 1ULL) acc ^= direction_[static_cast<size_t>(d) * kBits + b];
    }
    state_[d] = acc;
  }
  index_ = index;
}

Matrix sobol_points(int dim, std::int64_t count) {
  if (count < 1) throw DomainError("count must be >= 1");
  SobolStream stream(dim);
  Matrix pts(count, dim);
  std::vector<double> row(dim);
  for (std::int64_t r = 0; r < count; ++r) {
    stream.next(row.data());
    for (int d = 0; d < dim; ++d) pts(r, d) = row[d];
  }
  return pts;
}

Matrix gaussian_qmc_points(const LognormalModel& model, std::int64_t count) {
  Matrix pts = sobol_points(model.dim, count);
  for (std::int64_t r = 0; r < count; ++r) {
    for (int d = 0; d < model.dim; ++d) pts(r, d) = inv_norm_cdf(pts(r, d));
  }
  return pts * model.chol.transpose();
}

}  // namespace slnlap
