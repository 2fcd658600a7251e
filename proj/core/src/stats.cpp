#include "lpp/stats.hpp"

namespace lpp::stats {

MeanStd mean_std(std::span<const double> xs) {
  MeanStd out;
  out.n = xs.size();
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) {
    const double d = x - out.mean;
    ss += d * d;
  }
  out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return out;
}

double pearson_correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("pearson_correlation: need two equally sized samples");
  const auto mx = mean_std(xs);
  const auto my = mean_std(ys);
  double sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx.mean) * (ys[i] - my.mean);
  sxy /= static_cast<double>(xs.size() - 1);
  return sxy / (mx.sd * my.sd);
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    const double v = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= v) ++ia;
    while (ib < b.size() && b[ib] <= v) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
  }
  return d;
}

namespace {
double ks_scale(double alpha) { return std::sqrt(-0.5 * std::log(alpha / 2.0)); }
}  // namespace

double ks_critical_one_sample(double alpha, size_t n) {
  return ks_scale(alpha) / std::sqrt(static_cast<double>(n));
}

double ks_critical_two_sample(double alpha, size_t n, size_t m) {
  const double ne = static_cast<double>(n) * static_cast<double>(m) /
                    static_cast<double>(n + m);
  return ks_scale(alpha) / std::sqrt(ne);
}

namespace {

LineFit fit_weighted(std::span<const double> x, std::span<const double> y,
                     std::span<const double> w, bool known_variance) {
  if (x.size() != y.size() || x.size() != w.size())
    throw std::invalid_argument("line fit: mismatched input lengths");
  if (x.size() < 2) throw std::invalid_argument("line fit: need at least 2 points");
  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
  }
  if (!(sw > 0.0)) throw std::invalid_argument("line fit: nonpositive total weight");
  const double xbar = swx / sw;
  const double ybar = swy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("line fit: degenerate abscissa (zero spread)");
  LineFit out;
  out.n = x.size();
  out.slope = sxy / sxx;
  out.intercept = ybar - out.slope * xbar;
  double ssr = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (out.intercept + out.slope * x[i]);
    ssr += w[i] * r * r;
  }
  out.rms_residual = std::sqrt(ssr / sw);
  if (known_variance) {
    out.slope_se = std::sqrt(1.0 / sxx);
    out.intercept_se = std::sqrt(1.0 / sw + xbar * xbar / sxx);
  } else if (x.size() > 2) {
    const double s2 = ssr / static_cast<double>(x.size() - 2);
    out.slope_se = std::sqrt(s2 / sxx);
    out.intercept_se = std::sqrt(s2 * (1.0 / sw + xbar * xbar / sxx));
  }
  return out;
}

}  // namespace

LineFit wls(std::span<const double> x, std::span<const double> y, std::span<const double> weight) {
  return fit_weighted(x, y, weight, /*known_variance=*/true);
}

LineFit ols(std::span<const double> x, std::span<const double> y) {
  std::vector<double> w(x.size(), 1.0);
  return fit_weighted(x, y, w, /*known_variance=*/false);
}

}  // namespace lpp::stats
