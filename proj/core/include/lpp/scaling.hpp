#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "lpp/weights.hpp"

namespace lpp {

enum class ConstantsSource { ExponentialClosedForm, UserSupplied, EmpiricalFit };

// Centering and fluctuation constants of the coupled sequence:
// h_tilde[N] = (h[N] - a N) / (b N^{1/3}).
struct ScalingConstants {
  double gamma = 1.0;
  double a = 4.0;
  double b = 2.5198420997897464;  // 2^{4/3}
  ConstantsSource source = ConstantsSource::ExponentialClosedForm;
};

// Closed forms for exponential weights: a = (1+sqrt(gamma))^2,
// b = gamma^{-1/6} (1+sqrt(gamma))^{4/3}. Only valid for gamma >= 1.
ScalingConstants exponential_constants(double gamma);

ScalingConstants user_constants(double gamma, double a, double b);

// Requests closed-form constants for a distribution; rejects the geometric
// case, which has no closed form here (supply values or fit them instead).
ScalingConstants closed_form_constants(double gamma, Dist dist);

inline double rescale(double h, int64_t n, const ScalingConstants& c) {
  return (h - c.a * static_cast<double>(n)) / (c.b * std::cbrt(static_cast<double>(n)));
}

inline double unrescale(double h_tilde, int64_t n, const ScalingConstants& c) {
  return c.a * static_cast<double>(n) + h_tilde * c.b * std::cbrt(static_cast<double>(n));
}

// Small-epsilon right-tail rate: (4 / (3 b^{3/2})) epsilon^{3/2}. This is the
// epsilon -> 0 asymptote of the large-deviation rate, used as a fit target.
double right_rate_asymptote(double epsilon, const ScalingConstants& c);

// Tracy-Widom tail exponent coefficients: 1-F2(x) ~ exp(-(4/3) x^{3/2}) on
// the right, F2(-x) ~ exp(-(1/12) x^3) on the left.
struct TwTailExponents {
  double right = 4.0 / 3.0;
  double left = 1.0 / 12.0;
};
constexpr TwTailExponents tw_tail_exponents() { return {}; }

// Reference lines for trajectory plots: the limsup bound (3/4)^{2/3} and the
// conjectured liminf constant -(12)^{1/3}.
inline double limsup_reference() { return std::pow(0.75, 2.0 / 3.0); }
inline double liminf_reference() { return -std::cbrt(12.0); }

enum class NormalizerKind { LimsupPhi, LiminfPsi };

// phi(n) = (log log n)^{2/3} for n >= e^e, else 1.
double phi(int64_t n);
// psi(n) = (log log n)^{1/3} for n >= e^e, else 1.
double psi(int64_t n);
double normalizer(NormalizerKind kind, int64_t n);

// Blocking subsequences: floor(rho^k) (rho > 1) and floor(e^{k^eta})
// (0 < eta < 1), k = 1..k_max, deduplicated to a strictly increasing list.
std::vector<int64_t> geometric_subsequence(double rho, int64_t k_max);
std::vector<int64_t> stretched_subsequence(double eta, int64_t k_max);

struct ConstantsFit {
  ScalingConstants constants;       // source = EmpiricalFit
  double a_se = 0.0;                // OLS slope standard errors
  double b_se = 0.0;
  double a_rms_residual = 0.0;      // mean(h[N]) vs N
  double b_rms_residual = 0.0;      // std(h[N]) vs N^{1/3}
  bool b_degenerate = false;        // all per-N sample deviations ~ 0
};

// a = OLS slope of mean(h[N]) vs N; b = OLS slope of std(h[N]) vs N^{1/3}.
// Requires >= 3 distinct N with >= 100 samples each.
ConstantsFit fit_constants(const std::map<int64_t, std::vector<double>>& samples);

}  // namespace lpp
