#include "lpp/scaling.hpp"

#include <stdexcept>
#include <string>

#include "lpp/errors.hpp"
#include "lpp/stats.hpp"

namespace lpp {

ScalingConstants exponential_constants(double gamma) {
  if (!(gamma >= 1.0))
    throw std::invalid_argument("exponential_constants: gamma must be >= 1, got " +
                                std::to_string(gamma));
  const double r = std::sqrt(gamma);
  ScalingConstants c;
  c.gamma = gamma;
  c.a = (1.0 + r) * (1.0 + r);
  c.b = std::pow(gamma, -1.0 / 6.0) * std::pow(1.0 + r, 4.0 / 3.0);
  c.source = ConstantsSource::ExponentialClosedForm;
  return c;
}

ScalingConstants user_constants(double gamma, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("user_constants: a and b must be positive");
  return {gamma, a, b, ConstantsSource::UserSupplied};
}

ScalingConstants closed_form_constants(double gamma, Dist dist) {
  if (dist == Dist::Geometric)
    throw std::invalid_argument(
        "no closed-form a(gamma), b(gamma) for geometric weights; pass --a/--b or fit them "
        "(fit-constants)");
  return exponential_constants(gamma);
}

double right_rate_asymptote(double epsilon, const ScalingConstants& c) {
  if (!(epsilon >= 0.0))
    throw std::invalid_argument("right_rate_asymptote: epsilon must be >= 0");
  return 4.0 / (3.0 * std::pow(c.b, 1.5)) * std::pow(epsilon, 1.5);
}

namespace {
// e^e = 15.154...; both normalizers are 1 below it, so for integer n the
// formula applies exactly when n >= 16.
constexpr int64_t kLogLogThreshold = 16;

double log_log(int64_t n) { return std::log(std::log(static_cast<double>(n))); }
}  // namespace

double phi(int64_t n) {
  if (n < kLogLogThreshold) return 1.0;
  return std::pow(log_log(n), 2.0 / 3.0);
}

double psi(int64_t n) {
  if (n < kLogLogThreshold) return 1.0;
  return std::cbrt(log_log(n));
}

double normalizer(NormalizerKind kind, int64_t n) {
  return kind == NormalizerKind::LimsupPhi ? phi(n) : psi(n);
}

namespace {

std::vector<int64_t> dedupe_increasing(std::vector<double> raw) {
  std::vector<int64_t> out;
  out.reserve(raw.size());
  for (double v : raw) {
    if (!(v < 9.2e18)) throw std::invalid_argument("subsequence value overflows 64-bit range");
    const int64_t k = static_cast<int64_t>(std::floor(v));
    if (k >= 1 && (out.empty() || k > out.back())) out.push_back(k);
  }
  return out;
}

}  // namespace

std::vector<int64_t> geometric_subsequence(double rho, int64_t k_max) {
  if (!(rho > 1.0)) throw std::invalid_argument("geometric_subsequence: rho must be > 1");
  if (k_max < 1) throw std::invalid_argument("geometric_subsequence: k_max must be >= 1");
  std::vector<double> raw;
  raw.reserve(static_cast<size_t>(k_max));
  for (int64_t k = 1; k <= k_max; ++k) raw.push_back(std::pow(rho, static_cast<double>(k)));
  return dedupe_increasing(std::move(raw));
}

std::vector<int64_t> stretched_subsequence(double eta, int64_t k_max) {
  if (!(eta > 0.0 && eta < 1.0))
    throw std::invalid_argument("stretched_subsequence: eta must lie in (0,1)");
  if (k_max < 1) throw std::invalid_argument("stretched_subsequence: k_max must be >= 1");
  std::vector<double> raw;
  raw.reserve(static_cast<size_t>(k_max));
  for (int64_t k = 1; k <= k_max; ++k)
    raw.push_back(std::exp(std::pow(static_cast<double>(k), eta)));
  return dedupe_increasing(std::move(raw));
}

ConstantsFit fit_constants(const std::map<int64_t, std::vector<double>>& samples) {
  if (samples.size() < 3)
    throw estimation_error("fit_constants: need at least 3 distinct N, got " +
                           std::to_string(samples.size()));
  std::vector<double> ns, means, stds, cbrts;
  for (const auto& [n, h] : samples) {
    if (h.size() < 100)
      throw estimation_error("fit_constants: need >= 100 samples per N, got " +
                             std::to_string(h.size()) + " at N=" + std::to_string(n));
    const auto ms = stats::mean_std(h);
    ns.push_back(static_cast<double>(n));
    cbrts.push_back(std::cbrt(static_cast<double>(n)));
    means.push_back(ms.mean);
    stds.push_back(ms.sd);
  }
  ConstantsFit out;
  const auto a_fit = stats::ols(ns, means);
  out.constants.gamma = 0.0;  // unknown to the fit; caller fills it in
  out.constants.a = a_fit.slope;
  out.a_se = a_fit.slope_se;
  out.a_rms_residual = a_fit.rms_residual;
  out.constants.source = ConstantsSource::EmpiricalFit;

  double scale = 0.0;
  for (size_t i = 0; i < means.size(); ++i) scale = std::max(scale, std::abs(means[i]));
  double max_sd = 0.0;
  for (double s : stds) max_sd = std::max(max_sd, s);
  if (max_sd <= 1e-9 * (1.0 + scale)) {
    out.b_degenerate = true;
    out.constants.b = 0.0;
    return out;
  }
  const auto b_fit = stats::ols(cbrts, stds);
  out.constants.b = b_fit.slope;
  out.b_se = b_fit.slope_se;
  out.b_rms_residual = b_fit.rms_residual;
  return out;
}

}  // namespace lpp
