#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lpp {

enum class Dist { Exponential, Geometric };

namespace detail {

// splitmix64 finalizer (Steele/Lea/Flood via Vigna). A bijection on 64 bits.
inline constexpr uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr uint64_t kStepI = 0x9E3779B97F4A7C15ULL;  // odd
inline constexpr uint64_t kStepJ = 0xC2B2AE3D27D4EB4FULL;  // odd

// Key for the whole field; per-cell inputs are affine in (i, j), so row
// sweeps reduce to one add per cell before the finalizer.
inline constexpr uint64_t field_key(uint64_t seed) { return mix64(seed + 0x632BE59BD9B4E019ULL); }

inline constexpr uint64_t cell_bits(uint64_t key, int64_t i, int64_t j) {
  return mix64(key + static_cast<uint64_t>(i) * kStepI + static_cast<uint64_t>(j) * kStepJ);
}

// Exact double(v) for v < 2^52 without an int-to-float instruction (keeps
// the transform loops vectorizable on AVX2).
inline double small_to_double(uint64_t v) {
  return std::bit_cast<double>(v | 0x4330000000000000ULL) - 0x1.0p52;
}

// 52 random bits offset by half a grid step: strictly inside (0,1), mean
// exactly 1/2.
inline double uniform_from_bits(uint64_t bits) {
  return (small_to_double(bits >> 12) + 0.5) * 0x1.0p-52;
}

// Deterministic natural log for x in (0,1). Defined in exactly one
// translation unit so FMA contraction cannot make call sites disagree;
// relative accuracy ~1e-13, validated against std::log in the tests.
double fast_log_unit(double x);

// Weights snapped to the 2^-32 grid: every path sum up to ~2^20 stays exact
// in double arithmetic, which is what makes superadditivity and the oracle
// comparisons exact rather than tolerance-based.
inline double quantize(double w) {
  return __builtin_rint(w * 0x1.0p32) * 0x1.0p-32;
}

}  // namespace detail

// Uniform variate attached to lattice cell (i, j) of the field keyed by
// `seed`. Total and pure: any evaluation order, thread count or process
// yields the same value.
inline double cell_uniform(uint64_t seed, int64_t i, int64_t j) {
  return detail::uniform_from_bits(detail::cell_bits(detail::field_key(seed), i, j));
}

// Inverse-CDF transforms, exposed for direct testing.
double exponential_from_uniform(double u);          // Exp(1), quantized to 2^-32
double geometric_from_uniform(double u, double q);  // P(X=k) = (1-q) q^k, k >= 0

// One realization of the infinite i.i.d. array (X_{i,j}), i,j >= 1.
struct WeightField {
  uint64_t seed = 0;
  Dist dist = Dist::Exponential;
  double q = 0.5;  // geometric parameter, ignored for Dist::Exponential

  WeightField() = default;
  WeightField(uint64_t s, Dist d, double q_ = 0.5) : seed(s), dist(d), q(q_) {
    if (d == Dist::Geometric && !(q_ > 0.0 && q_ < 1.0))
      throw std::invalid_argument("geometric parameter q must lie in (0,1), got " +
                                  std::to_string(q_));
    key_ = detail::field_key(s);
  }

  double operator()(int64_t i, int64_t j) const;

  uint64_t key() const { return key_; }

 private:
  uint64_t key_ = detail::field_key(0);
};

inline double weight(const WeightField& f, int64_t i, int64_t j) { return f(i, j); }

namespace detail {
// Hot path for the sweep kernels: w[1..m] = field(1..m, j), bit-identical
// to per-cell operator() calls but written as vectorizable passes.
void row_weights(const WeightField& f, int64_t j, int64_t m, double* w);
}  // namespace detail

// Replica seed for stream `tag`, replica `index`: base xor a high-byte tag
// xor the index. Injective in (tag, index) for index < 2^56, which keeps
// seed pools disjoint by construction.
inline uint64_t derive_seed(uint64_t base, uint8_t tag, uint64_t index) {
  if (index >= (1ULL << 56)) throw std::invalid_argument("replica index exceeds 2^56");
  return base ^ (static_cast<uint64_t>(tag) << 56) ^ index;
}

}  // namespace lpp
