#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lpp/passage.hpp"
#include "lpp/scaling.hpp"
#include "lpp/weights.hpp"

namespace lpp {

// Stream tags keep every experiment's seed pool disjoint (see derive_seed).
enum class Stream : uint8_t {
  TailScan = 1,
  LdpFit = 2,
  MaximalLhs = 3,
  MaximalNum = 4,
  MaximalDen = 5,
  Superadd = 6,
  IdentityA = 7,
  IdentityB = 8,
  ConstantsFit = 9,
  Reference = 10,
};

struct ExperimentContext {
  uint64_t base_seed = 1;
  int workers = 0;  // 0 = hardware concurrency; results never depend on it
  CellBudget budget;
};

enum class TailSide { Right, Left };

// One empirical tail probability. Censored cells (zero hits) carry the
// rule-of-three 95% upper bound ln(3/trials) instead of -inf.
struct TailEstimate {
  int64_t n = 0;
  double threshold = 0.0;  // x in rescaled units, or a raw-unit threshold for LDP cells
  TailSide side = TailSide::Right;
  uint64_t hits = 0;
  uint64_t trials = 0;
  double prob = 0.0;
  double log_prob = 0.0;
  double std_err = 0.0;  // SE of log_prob; NaN when censored
  bool censored = false;
};

TailEstimate make_tail_estimate(int64_t n, double threshold, TailSide side, uint64_t hits,
                                uint64_t trials);

struct TailScanSpec {
  double gamma = 1.0;
  Dist dist = Dist::Exponential;
  double q = 0.5;
  ScalingConstants constants;
  int64_t n = 1000;
  std::vector<double> x_grid;
  uint64_t trials = 1000;
};

// P(h_tilde[n] >= x) / P(h_tilde[n] <= -x) for each x in the grid, over one
// pool of `trials` independent field realizations (one DP sweep each).
std::vector<TailEstimate> right_tail_scan(const TailScanSpec& spec, const ExperimentContext& ctx);
std::vector<TailEstimate> left_tail_scan(const TailScanSpec& spec, const ExperimentContext& ctx);

struct TailSlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  size_t points_used = 0;
  size_t censored = 0;
};

// Weighted fit of -log p against x^{3/2} (right) or x^3 (left); weights are
// 1/SE^2 and censored cells are excluded. Targets 4/3 and 1/12.
TailSlopeFit fit_tail_slope(const std::vector<TailEstimate>& estimates, TailSide side);

struct LdpSpec {
  double gamma = 1.0;
  Dist dist = Dist::Exponential;
  double q = 0.5;
  ScalingConstants constants;
  double epsilon = 0.2;
  std::vector<int64_t> n_grid;
  uint64_t trials = 10000;
};

struct LdpFit {
  std::vector<TailEstimate> right;  // P(W_N >= (a+eps) N) per N
  std::vector<TailEstimate> left;   // P(W_N <= (a-eps) N) per N
  double slope_vs_n = 0.0;          // log p_right vs N
  double slope_vs_n_se = 0.0;
  double slope_vs_n2 = 0.0;         // log p_left vs N^2
  double slope_vs_n2_se = 0.0;
  double right_asymptote = 0.0;     // (4/(3 b^{3/2})) eps^{3/2}, the slope target
};

LdpFit ldp_rate_fit(const LdpSpec& spec, const ExperimentContext& ctx);

struct TrajectorySpec {
  uint64_t seed = 1;
  double gamma = 1.0;
  Dist dist = Dist::Exponential;
  double q = 0.5;
  ScalingConstants constants;
  int64_t n_max = 1000;
  NormalizerKind kind = NormalizerKind::LimsupPhi;
  std::vector<int64_t> checkpoints;  // subsequence points; all N added when n_max <= 1000
};

struct TrajectoryCheckpoint {
  int64_t n = 0;
  double h = 0.0;
  double h_tilde = 0.0;
  double normalized = 0.0;   // h_tilde / phi(n) or h_tilde / psi(n)
  double running_sup = 0.0;  // over ALL N' <= n, not just checkpoints
  double running_inf = 0.0;
  bool block_gap_ok = true;  // liminf blocking margin 2N^{1/3}psi(N) - n_prev^{1/3}psi(n_prev) >= N^{1/3}
};

struct TrajectoryRecord {
  uint64_t seed = 0;
  double gamma = 1.0;
  NormalizerKind kind = NormalizerKind::LimsupPhi;
  std::vector<TrajectoryCheckpoint> checkpoints;
  double terminal_running_sup = 0.0;
  double terminal_running_inf = 0.0;
  double ref_limsup = 0.0;  // (3/4)^{2/3}
  double ref_liminf = 0.0;  // -(12)^{1/3}
};

TrajectoryRecord lil_trajectory(const TrajectorySpec& spec, const ExperimentContext& ctx);

struct SuperadditivityReport {
  uint64_t seeds = 0;
  int64_t l_max = 0;
  uint64_t checks = 0;
  uint64_t violations = 0;
  uint64_t strict_slack = 0;  // pairs with slack > 0 (N < L)
  double min_slack = 0.0;
  double max_slack = 0.0;
  double mean_slack = 0.0;
  std::vector<std::string> violation_details;  // first few, for diagnosis
};

// Exact pathwise check of h[N] + W_{[N,L]} <= h[L] for all 1 <= N <= L <= l_max
// on `seeds` independent fields. Any violation is an implementation bug.
SuperadditivityReport superadditivity_audit(double gamma, Dist dist, double q, uint64_t seeds,
                                            int64_t l_max, const ExperimentContext& ctx);

struct MaximalSpec {
  double gamma = 1.0;
  Dist dist = Dist::Exponential;
  double q = 0.5;
  ScalingConstants constants;
  int64_t k = 10;
  int64_t l = 40;
  double t = 0.0;
  double s = 0.0;
  uint64_t trials = 10000;
};

struct DenominatorTerm {
  int64_t m = 0;  // compares W_m against a(m-1) + s
  uint64_t hits = 0;
  uint64_t trials = 0;
  double prob = 0.0;
  double se = 0.0;
  bool exact = false;  // h[1] is deterministic when [gamma] = 1; its term is 0/1 exactly
};

// Empirical audit of the Ottaviani-style maximal inequality
//   P(max_{K<=N<=L}(W_N - aN) >= t) <= P(W_L - aL >= t+s) / min_m P(W_m - a(m-1) >= s)
// with the three probabilities estimated from disjoint seed pools.
//
// When gamma < 2 and s > 0 the m = 1 denominator term is exactly zero
// (W_1 == 0 under the omitted-origin convention), which makes the formal
// bound vacuous. The audit reports that case with denominator_degenerate set
// and evaluates satisfied_within_3se against the minimum over the remaining
// informative terms.
struct MaximalIneqReport {
  int64_t k = 0, l = 0;
  double t = 0.0, s = 0.0;
  double lhs = 0.0, lhs_se = 0.0;
  uint64_t lhs_hits = 0;
  double num = 0.0, num_se = 0.0;
  uint64_t num_hits = 0;
  std::vector<DenominatorTerm> denominator;
  double denom_min = 0.0;
  int64_t denom_argmin = 0;
  bool denominator_degenerate = false;
  double rhs = 0.0;  // num / (informative) minimum denominator
  double rhs_se = 0.0;
  double combined_se = 0.0;
  bool satisfied_within_3se = false;
};

MaximalIneqReport maximal_inequality_audit(const MaximalSpec& spec, const ExperimentContext& ctx);

struct IdentityCheck {
  double ks = 0.0;
  double critical = 0.0;  // 1% two-sample threshold
  uint64_t samples = 0;
  bool rejected = false;
};

// Two-sample KS between transversal(n, l) values and h[l-n+1] values from
// disjoint pools: W_{[N,L]} has the law of W_{L-N+1} (exact at gamma = 1).
IdentityCheck transversal_identity_check(double gamma, Dist dist, double q, int64_t n, int64_t l,
                                         uint64_t samples, const ExperimentContext& ctx);

// Monte Carlo sampler used by fit-constants and compare-f2: `reps` coupled
// sweeps to n_max, harvested at the given N values.
std::map<int64_t, std::vector<double>> sample_ray_ensemble(double gamma, Dist dist, double q,
                                                           const std::vector<int64_t>& n_values,
                                                           uint64_t reps, Stream stream,
                                                           const ExperimentContext& ctx);

int resolve_workers(int workers);

}  // namespace lpp
