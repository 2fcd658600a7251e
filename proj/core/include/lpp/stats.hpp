#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace lpp::stats {

struct MeanStd {
  double mean = 0.0;
  double sd = 0.0;  // Bessel-corrected
  size_t n = 0;
};

MeanStd mean_std(std::span<const double> xs);

double pearson_correlation(std::span<const double> xs, std::span<const double> ys);

// One-sample Kolmogorov-Smirnov distance against a continuous CDF. Ties in
// the sample are grouped.
template <class Cdf>
double ks_vs_cdf(std::vector<double> samples, Cdf&& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_vs_cdf: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  size_t i = 0;
  while (i < samples.size()) {
    size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));   // left limit of the ECDF
    d = std::max(d, std::abs(static_cast<double>(j) / n - f));   // ECDF at the value
    i = j;
  }
  return d;
}

// KS distance for integer-supported distributions: sup over the support of
// |ECDF(k) - F(k)| (both CDFs are flat between integers). The usual critical
// values are conservative here.
template <class Cdf>
double ks_vs_integer_cdf(std::vector<double> samples, Cdf&& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_vs_integer_cdf: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  const int64_t lo = static_cast<int64_t>(samples.front());
  const int64_t hi = static_cast<int64_t>(samples.back());
  double d = std::abs(cdf(static_cast<double>(lo) - 1.0));  // ECDF is 0 below the sample
  size_t idx = 0;
  for (int64_t k = lo; k <= hi; ++k) {
    while (idx < samples.size() && samples[idx] <= static_cast<double>(k)) ++idx;
    d = std::max(d, std::abs(static_cast<double>(idx) / n - cdf(static_cast<double>(k))));
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Large-sample critical distance: c(alpha) / sqrt(n), c = sqrt(-ln(alpha/2)/2).
double ks_critical_one_sample(double alpha, size_t n);
double ks_critical_two_sample(double alpha, size_t n, size_t m);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
  double rms_residual = 0.0;
  size_t n = 0;
};

// Weighted least squares y = intercept + slope*x with known per-point
// variances (weights = 1/sigma^2); standard errors from the weight matrix.
LineFit wls(std::span<const double> x, std::span<const double> y, std::span<const double> weight);

// Ordinary least squares; standard errors from the residual variance.
LineFit ols(std::span<const double> x, std::span<const double> y);

}  // namespace lpp::stats
