#include "lpp/weights.hpp"

#include <cmath>
#include <vector>

namespace lpp {
namespace detail {

namespace {

constexpr double kLn2 = 0x1.62e42fefa39efp-1;

// P(s2) with log(m) = 2s(1 + s2*P(s2)), s = (m-1)/(m+1). The atanh series
// truncated after s^15; |s| <= 0.1716 on the reduced range.
inline double log_poly(double s2) {
  double p = 1.0 / 15.0;
  p = p * s2 + 1.0 / 13.0;
  p = p * s2 + 1.0 / 11.0;
  p = p * s2 + 1.0 / 9.0;
  p = p * s2 + 1.0 / 7.0;
  p = p * s2 + 1.0 / 5.0;
  p = p * s2 + 1.0 / 3.0;
  return p;
}

inline double log_unit_impl(double x) {
  // x in (0,1): always a positive normal double, so no special cases.
  const uint64_t bits = std::bit_cast<uint64_t>(x);
  const uint64_t expo = bits >> 52;  // biased; in [971, 1022] for our uniforms
  const uint64_t mant = bits & 0x000FFFFFFFFFFFFFULL;
  // Normalize the mantissa into [sqrt(1/2), sqrt(2)).
  constexpr uint64_t kMantSqrt2 = 0x0006A09E667F3BCDULL;  // fraction bits of sqrt(2)
  const uint64_t hi = static_cast<uint64_t>(mant >= kMantSqrt2);
  const double e = small_to_double(expo + hi) - 1023.0;
  const double m = std::bit_cast<double>((mant | 0x3FF0000000000000ULL) - (hi << 52));
  const double s = (m - 1.0) / (m + 1.0);
  const double s2 = s * s;
  return e * kLn2 + 2.0 * s * (1.0 + s2 * log_poly(s2));
}

}  // namespace

double fast_log_unit(double x) { return log_unit_impl(x); }

void row_weights(const WeightField& f, int64_t j, int64_t m, double* w) {
  thread_local std::vector<uint64_t> bits;
  if (bits.size() < static_cast<size_t>(m) + 1) bits.resize(static_cast<size_t>(m) + 1);
  uint64_t* const bp = bits.data();
  uint64_t h = f.key() + static_cast<uint64_t>(j) * kStepJ;
  for (int64_t i = 1; i <= m; ++i) {
    h += kStepI;
    bp[i] = mix64(h);
  }
  if (f.dist == Dist::Exponential) {
    for (int64_t i = 1; i <= m; ++i) w[i] = quantize(-log_unit_impl(uniform_from_bits(bp[i])));
  } else {
    const double inv_log_q = 1.0 / log_unit_impl(f.q);
    for (int64_t i = 1; i <= m; ++i)
      w[i] = std::floor(log_unit_impl(uniform_from_bits(bp[i])) * inv_log_q);
  }
}

}  // namespace detail

double exponential_from_uniform(double u) {
  return detail::quantize(-detail::fast_log_unit(u));
}

double geometric_from_uniform(double u, double q) {
  return std::floor(detail::fast_log_unit(u) * (1.0 / detail::fast_log_unit(q)));
}

double WeightField::operator()(int64_t i, int64_t j) const {
  const double u = detail::uniform_from_bits(detail::cell_bits(key_, i, j));
  if (dist == Dist::Exponential) return detail::quantize(-detail::fast_log_unit(u));
  return std::floor(detail::fast_log_unit(u) * (1.0 / detail::fast_log_unit(q)));
}

}  // namespace lpp
