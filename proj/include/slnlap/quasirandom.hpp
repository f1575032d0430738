#pragma once

#include <cstdint>

#include "slnlap/model.hpp"
#include "slnlap/types.hpp"

namespace slnlap {

namespace detail {

struct JoeKuoRow {
  std::uint8_t degree;
  std::uint32_t poly_a;  // interior coefficients of the primitive polynomial
  std::uint32_t m[9];    // initial direction values m_1..m_degree
};

// Dimensions 2..64 of the Joe-Kuo parameter set (dimension 1 is van der
// Corput and parameter-free).
extern const JoeKuoRow kJoeKuoTable[63];

}  // namespace detail

// Sobol sequence stream in (0,1)^dim, Gray-code order, with the index-0
// all-zeros point skipped so every emitted coordinate is strictly inside
// (0,1). Deterministic: no scrambling.
class SobolStream {
 public:
  static constexpr int kMaxDim = 64;
  static constexpr int kBits = 52;  // coordinates are multiples of 2^-52

  explicit SobolStream(int dim);

  int dim() const { return dim_; }
  std::uint64_t index() const { return index_; }  // next raw index to emit

  // Writes the next point into out[0..dim); advances the cursor.
  void next(double* out);

  // Positions the stream so the next emitted point is raw index `index`
  // (index >= 1; index 0 is never emitted).
  void skip_to(std::uint64_t index);

 private:
  int dim_;
  std::uint64_t index_;
  std::vector<std::uint64_t> state_;       // dim entries, current XOR state
  std::vector<std::uint64_t> direction_;   // dim * kBits direction integers
};

// Points 1..count of the Sobol sequence (row r = point r+1 of the raw
// sequence); repeated calls are identical.
Matrix sobol_points(int dim, std::int64_t count);

// Row r = chol * invPhi(u_r) elementwise over the Sobol row u_r.
Matrix gaussian_qmc_points(const LognormalModel& model, std::int64_t count);

}  // namespace slnlap
