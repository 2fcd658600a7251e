#include "lpp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "lpp/stats.hpp"

namespace lpp {

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

namespace {

// Runs fn(r) for r = 0..count-1 on a worker pool, storing results by replica
// index. Aggregations downstream read the indexed array in order, so results
// are bit-identical for any worker count or scheduling.
template <class T, class Fn>
std::vector<T> map_indexed(uint64_t count, int workers, Fn&& fn) {
  std::vector<T> out(count);
  const int w = resolve_workers(workers);
  if (w <= 1 || count <= 1) {
    for (uint64_t r = 0; r < count; ++r) out[r] = fn(r);
    return out;
  }
  std::atomic<uint64_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  const uint64_t chunk = std::max<uint64_t>(1, count / (static_cast<uint64_t>(w) * 64));
  auto run = [&] {
    for (;;) {
      const uint64_t begin = next.fetch_add(chunk, std::memory_order_relaxed);
      if (begin >= count) return;
      const uint64_t end = std::min(count, begin + chunk);
      try {
        for (uint64_t r = begin; r < end; ++r) out[r] = fn(r);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(w));
  for (int i = 0; i < w; ++i) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return out;
}

uint64_t to_index(Stream s) { return static_cast<uint64_t>(s); }

WeightField replica_field(const ExperimentContext& ctx, Stream stream, uint64_t index, Dist dist,
                          double q) {
  return WeightField(derive_seed(ctx.base_seed, static_cast<uint8_t>(to_index(stream)), index),
                     dist, q);
}

}  // namespace

TailEstimate make_tail_estimate(int64_t n, double threshold, TailSide side, uint64_t hits,
                                uint64_t trials) {
  if (trials == 0) throw std::invalid_argument("tail estimate: trials must be >= 1");
  if (hits > trials) throw std::invalid_argument("tail estimate: hits > trials");
  TailEstimate e;
  e.n = n;
  e.threshold = threshold;
  e.side = side;
  e.hits = hits;
  e.trials = trials;
  if (hits == 0) {
    e.censored = true;
    e.prob = 0.0;
    e.log_prob = std::log(3.0 / static_cast<double>(trials));  // rule-of-three upper bound
    e.std_err = std::numeric_limits<double>::quiet_NaN();
  } else {
    e.prob = static_cast<double>(hits) / static_cast<double>(trials);
    e.log_prob = std::log(e.prob);
    // SE of log p; (1-p) floored at 1/trials keeps the p == 1 cell sane.
    e.std_err =
        std::sqrt(std::max(1.0 - e.prob, 1.0 / static_cast<double>(trials)) / static_cast<double>(hits));
  }
  return e;
}

namespace {

std::vector<double> sample_h_tilde_pool(const TailScanSpec& spec, const ExperimentContext& ctx) {
  if (!(spec.gamma >= 1.0)) throw std::invalid_argument("tail scan: gamma must be >= 1");
  if (spec.n < 1) throw std::invalid_argument("tail scan: n must be >= 1");
  if (spec.trials < 1000) throw std::invalid_argument("tail scan: trials must be >= 1000");
  if (spec.x_grid.empty()) throw std::invalid_argument("tail scan: empty x grid");
  const int64_t m = ray_col(spec.gamma, spec.n);
  return map_indexed<double>(spec.trials, ctx.workers, [&](uint64_t r) {
    const WeightField f = replica_field(ctx, Stream::TailScan, r, spec.dist, spec.q);
    const double h = grid_passage(f, m, spec.n, /*omit_origin=*/true, ctx.budget);
    return rescale(h, spec.n, spec.constants);
  });
}

std::vector<TailEstimate> count_tail(const TailScanSpec& spec, const std::vector<double>& pool,
                                     TailSide side) {
  std::vector<TailEstimate> out;
  out.reserve(spec.x_grid.size());
  for (double x : spec.x_grid) {
    uint64_t hits = 0;
    if (side == TailSide::Right) {
      for (double v : pool) hits += (v >= x);
    } else {
      for (double v : pool) hits += (v <= -x);
    }
    out.push_back(make_tail_estimate(spec.n, x, side, hits, spec.trials));
  }
  return out;
}

}  // namespace

std::vector<TailEstimate> right_tail_scan(const TailScanSpec& spec, const ExperimentContext& ctx) {
  return count_tail(spec, sample_h_tilde_pool(spec, ctx), TailSide::Right);
}

std::vector<TailEstimate> left_tail_scan(const TailScanSpec& spec, const ExperimentContext& ctx) {
  return count_tail(spec, sample_h_tilde_pool(spec, ctx), TailSide::Left);
}

TailSlopeFit fit_tail_slope(const std::vector<TailEstimate>& estimates, TailSide side) {
  std::vector<double> xs, ys, ws;
  TailSlopeFit out;
  for (const auto& e : estimates) {
    if (e.censored) {
      ++out.censored;
      continue;
    }
    if (!(e.threshold > 0.0)) continue;
    const double x =
        side == TailSide::Right ? std::pow(e.threshold, 1.5) : std::pow(e.threshold, 3.0);
    xs.push_back(x);
    ys.push_back(-e.log_prob);
    ws.push_back(1.0 / (e.std_err * e.std_err));
  }
  if (xs.size() < 2)
    throw estimation_error("tail slope fit: fewer than 2 uncensored cells with positive x");
  const auto fit = stats::wls(xs, ys, ws);
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.slope_se = fit.slope_se;
  out.points_used = xs.size();
  return out;
}

LdpFit ldp_rate_fit(const LdpSpec& spec, const ExperimentContext& ctx) {
  if (!(spec.epsilon > 0.0) || !std::isfinite(spec.epsilon))
    throw std::invalid_argument("ldp_rate_fit: epsilon must be positive (the epsilon = 0 event is "
                                "out of the large-deviation regime)");
  if (spec.n_grid.size() < 2) throw std::invalid_argument("ldp_rate_fit: need >= 2 grid points");
  if (spec.trials < 1) throw std::invalid_argument("ldp_rate_fit: trials must be >= 1");
  const double a = spec.constants.a;

  LdpFit out;
  for (size_t ni = 0; ni < spec.n_grid.size(); ++ni) {
    const int64_t n = spec.n_grid[ni];
    if (n < 1) throw std::invalid_argument("ldp_rate_fit: grid values must be >= 1");
    const int64_t m = ray_col(spec.gamma, n);
    const auto values = map_indexed<double>(spec.trials, ctx.workers, [&](uint64_t r) {
      const WeightField f =
          replica_field(ctx, Stream::LdpFit, ni * spec.trials + r, spec.dist, spec.q);
      return grid_passage(f, m, n, /*omit_origin=*/true, ctx.budget);
    });
    const double up = (a + spec.epsilon) * static_cast<double>(n);
    const double lo = (a - spec.epsilon) * static_cast<double>(n);
    uint64_t hits_up = 0, hits_lo = 0;
    for (double v : values) {
      hits_up += (v >= up);
      hits_lo += (v <= lo);
    }
    out.right.push_back(make_tail_estimate(n, up, TailSide::Right, hits_up, spec.trials));
    out.left.push_back(make_tail_estimate(n, lo, TailSide::Left, hits_lo, spec.trials));
  }

  auto censored_count = [](const std::vector<TailEstimate>& v) {
    return static_cast<size_t>(std::count_if(v.begin(), v.end(),
                                             [](const TailEstimate& e) { return e.censored; }));
  };
  if (2 * censored_count(out.right) > out.right.size())
    throw estimation_error("ldp_rate_fit: more than half the right-side grid is censored; "
                           "reduce epsilon or raise trials");
  if (2 * censored_count(out.left) > out.left.size())
    throw estimation_error("ldp_rate_fit: more than half the left-side grid is censored; "
                           "reduce epsilon or raise trials");

  auto side_fit = [](const std::vector<TailEstimate>& cells, bool square_x) {
    std::vector<double> xs, ys, ws;
    for (const auto& e : cells) {
      if (e.censored) continue;
      const double n = static_cast<double>(e.n);
      xs.push_back(square_x ? n * n : n);
      ys.push_back(e.log_prob);
      ws.push_back(1.0 / (e.std_err * e.std_err));
    }
    if (xs.size() < 2) throw estimation_error("ldp_rate_fit: fewer than 2 uncensored grid cells");
    return stats::wls(xs, ys, ws);
  };
  const auto rf = side_fit(out.right, /*square_x=*/false);
  out.slope_vs_n = rf.slope;
  out.slope_vs_n_se = rf.slope_se;
  const auto lf = side_fit(out.left, /*square_x=*/true);
  out.slope_vs_n2 = lf.slope;
  out.slope_vs_n2_se = lf.slope_se;
  out.right_asymptote = right_rate_asymptote(spec.epsilon, spec.constants);
  return out;
}

TrajectoryRecord lil_trajectory(const TrajectorySpec& spec, const ExperimentContext& ctx) {
  if (spec.n_max < 1) throw std::invalid_argument("lil_trajectory: n_max must be >= 1");

  std::vector<int64_t> marks = spec.checkpoints;
  if (spec.n_max <= 1000) {
    marks.resize(static_cast<size_t>(spec.n_max));
    for (int64_t n = 1; n <= spec.n_max; ++n) marks[static_cast<size_t>(n - 1)] = n;
  } else {
    marks.push_back(spec.n_max);
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    std::erase_if(marks, [&](int64_t n) { return n < 1 || n > spec.n_max; });
  }

  RayConfig cfg;
  cfg.gamma = spec.gamma;
  cfg.n_max = spec.n_max;
  cfg.field = WeightField(spec.seed, spec.dist, spec.q);
  cfg.budget = ctx.budget;
  const std::vector<double> h = ray_sweep(cfg);

  TrajectoryRecord rec;
  rec.seed = spec.seed;
  rec.gamma = spec.gamma;
  rec.kind = spec.kind;
  rec.ref_limsup = limsup_reference();
  rec.ref_liminf = liminf_reference();

  double run_sup = -std::numeric_limits<double>::infinity();
  double run_inf = std::numeric_limits<double>::infinity();
  size_t mark_at = 0;
  int64_t prev_mark = 0;
  for (int64_t n = 1; n <= spec.n_max; ++n) {
    const double ht = rescale(h[static_cast<size_t>(n - 1)], n, spec.constants);
    const double norm = ht / normalizer(spec.kind, n);
    run_sup = std::max(run_sup, norm);
    run_inf = std::min(run_inf, norm);
    if (mark_at < marks.size() && marks[mark_at] == n) {
      TrajectoryCheckpoint cp;
      cp.n = n;
      cp.h = h[static_cast<size_t>(n - 1)];
      cp.h_tilde = ht;
      cp.normalized = norm;
      cp.running_sup = run_sup;
      cp.running_inf = run_inf;
      if (spec.kind == NormalizerKind::LiminfPsi && prev_mark >= 1) {
        const double lhs = 2.0 * std::cbrt(static_cast<double>(n)) * psi(n) -
                           std::cbrt(static_cast<double>(prev_mark)) * psi(prev_mark);
        cp.block_gap_ok = lhs >= std::cbrt(static_cast<double>(n));
      }
      rec.checkpoints.push_back(cp);
      prev_mark = n;
      ++mark_at;
    }
  }
  rec.terminal_running_sup = run_sup;
  rec.terminal_running_inf = run_inf;
  return rec;
}

SuperadditivityReport superadditivity_audit(double gamma, Dist dist, double q, uint64_t seeds,
                                            int64_t l_max, const ExperimentContext& ctx) {
  if (l_max < 1 || l_max > 200)
    throw std::invalid_argument("superadditivity_audit: l_max must lie in [1, 200]");
  if (seeds < 1) throw std::invalid_argument("superadditivity_audit: seeds must be >= 1");

  struct Partial {
    uint64_t checks = 0, violations = 0, strict = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    double max_slack = -std::numeric_limits<double>::infinity();
    double sum_slack = 0.0;
    std::vector<std::string> details;
  };

  const auto partials = map_indexed<Partial>(seeds, ctx.workers, [&](uint64_t s) {
    Partial p;
    const WeightField field = replica_field(ctx, Stream::Superadd, s, dist, q);
    RayConfig cfg{gamma, l_max, field, ctx.budget};
    const auto h = ray_sweep(cfg);
    for (int64_t n = 1; n <= l_max; ++n) {
      for (int64_t l = n; l <= l_max; ++l) {
        const double w = detail::transversal_with(field, gamma, n, l, ctx.budget);
        const double slack =
            h[static_cast<size_t>(l - 1)] - h[static_cast<size_t>(n - 1)] - w;
        ++p.checks;
        const bool bad = (slack < 0.0) || (n == l && slack != 0.0);
        if (bad) {
          ++p.violations;
          if (p.details.size() < 5)
            p.details.push_back("replica " + std::to_string(s) + " N=" + std::to_string(n) +
                                " L=" + std::to_string(l) + " slack=" + std::to_string(slack));
        }
        if (n < l) {
          p.min_slack = std::min(p.min_slack, slack);
          p.max_slack = std::max(p.max_slack, slack);
          p.sum_slack += slack;
          if (slack > 0.0) ++p.strict;
        }
      }
    }
    return p;
  });

  SuperadditivityReport rep;
  rep.seeds = seeds;
  rep.l_max = l_max;
  rep.min_slack = std::numeric_limits<double>::infinity();
  rep.max_slack = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (const auto& p : partials) {
    rep.checks += p.checks;
    rep.violations += p.violations;
    rep.strict_slack += p.strict;
    rep.min_slack = std::min(rep.min_slack, p.min_slack);
    rep.max_slack = std::max(rep.max_slack, p.max_slack);
    sum += p.sum_slack;
    for (const auto& d : p.details)
      if (rep.violation_details.size() < 5) rep.violation_details.push_back(d);
  }
  const uint64_t offdiag = rep.checks - seeds * static_cast<uint64_t>(l_max);
  rep.mean_slack = offdiag > 0 ? sum / static_cast<double>(offdiag) : 0.0;
  return rep;
}

MaximalIneqReport maximal_inequality_audit(const MaximalSpec& spec, const ExperimentContext& ctx) {
  if (spec.k < 1 || spec.l < spec.k || spec.l > 100)
    throw std::invalid_argument("maximal_inequality_audit: need 1 <= K <= L <= 100");
  if (spec.trials < 1) throw std::invalid_argument("maximal_inequality_audit: trials must be >= 1");
  const double a = spec.constants.a;
  const int64_t m_max = spec.l - spec.k + 1;

  // LHS pool: P(max_{K<=N<=L} (W_N - aN) >= t).
  const auto lhs_hits_v = map_indexed<uint8_t>(spec.trials, ctx.workers, [&](uint64_t r) {
    const WeightField f = replica_field(ctx, Stream::MaximalLhs, r, spec.dist, spec.q);
    RayConfig cfg{spec.gamma, spec.l, f, ctx.budget};
    const auto h = ray_sweep(cfg);
    for (int64_t n = spec.k; n <= spec.l; ++n)
      if (h[static_cast<size_t>(n - 1)] - a * static_cast<double>(n) >= spec.t) return uint8_t{1};
    return uint8_t{0};
  });

  // Numerator pool: P(W_L - aL >= t + s).
  const int64_t m_l = ray_col(spec.gamma, spec.l);
  const auto num_hits_v = map_indexed<uint8_t>(spec.trials, ctx.workers, [&](uint64_t r) {
    const WeightField f = replica_field(ctx, Stream::MaximalNum, r, spec.dist, spec.q);
    const double h = grid_passage(f, m_l, spec.l, true, ctx.budget);
    return static_cast<uint8_t>(h - a * static_cast<double>(spec.l) >= spec.t + spec.s);
  });

  // Denominator pool: P(W_m - a(m-1) >= s) for m = 1..L-K+1, one sweep per
  // replica harvesting every m at once.
  const auto den_masks = map_indexed<std::vector<uint8_t>>(spec.trials, ctx.workers, [&](uint64_t r) {
    const WeightField f = replica_field(ctx, Stream::MaximalDen, r, spec.dist, spec.q);
    RayConfig cfg{spec.gamma, m_max, f, ctx.budget};
    const auto h = ray_sweep(cfg);
    std::vector<uint8_t> mask(static_cast<size_t>(m_max));
    for (int64_t m = 1; m <= m_max; ++m)
      mask[static_cast<size_t>(m - 1)] =
          static_cast<uint8_t>(h[static_cast<size_t>(m - 1)] - a * static_cast<double>(m - 1) >=
                               spec.s);
    return mask;
  });

  MaximalIneqReport rep;
  rep.k = spec.k;
  rep.l = spec.l;
  rep.t = spec.t;
  rep.s = spec.s;

  uint64_t lhs_hits = 0;
  for (auto v : lhs_hits_v) lhs_hits += v;
  uint64_t num_hits = 0;
  for (auto v : num_hits_v) num_hits += v;
  rep.lhs_hits = lhs_hits;
  rep.num_hits = num_hits;
  const double trials = static_cast<double>(spec.trials);
  rep.lhs = static_cast<double>(lhs_hits) / trials;
  rep.lhs_se = std::sqrt(std::max(rep.lhs * (1.0 - rep.lhs), 1.0 / trials) / trials);
  rep.num = static_cast<double>(num_hits) / trials;
  rep.num_se = std::sqrt(std::max(rep.num * (1.0 - rep.num), 1.0 / trials) / trials);
  if (lhs_hits < 10)
    throw estimation_error("maximal_inequality_audit: LHS event has fewer than 10 hits; lower t");
  if (num_hits < 10)
    throw estimation_error("maximal_inequality_audit: numerator has fewer than 10 hits; lower t+s");

  // W_1 is deterministic whenever [gamma] = 1: the 1x1 ray rectangle holds
  // only the omitted origin, so the m = 1 term is exactly 1{s <= 0}.
  const bool m1_deterministic = ray_col(spec.gamma, 1) == 1;
  for (int64_t m = 1; m <= m_max; ++m) {
    uint64_t hits = 0;
    for (const auto& mask : den_masks) hits += mask[static_cast<size_t>(m - 1)];
    DenominatorTerm term;
    term.m = m;
    term.hits = hits;
    term.trials = spec.trials;
    if (m == 1 && m1_deterministic) {
      term.exact = true;
      term.prob = spec.s <= 0.0 ? 1.0 : 0.0;
      term.se = 0.0;
    } else {
      if (hits < 10)
        throw estimation_error("maximal_inequality_audit: denominator term m=" + std::to_string(m) +
                               " has fewer than 10 hits; pick t, s keeping all probabilities "
                               "estimable");
      term.prob = static_cast<double>(hits) / trials;
      term.se = std::sqrt(std::max(term.prob * (1.0 - term.prob), 1.0 / trials) / trials);
    }
    rep.denominator.push_back(term);
  }

  const DenominatorTerm* min_term = nullptr;
  const DenominatorTerm* min_positive = nullptr;
  for (const auto& term : rep.denominator) {
    if (!min_term || term.prob < min_term->prob) min_term = &term;
    if (term.prob > 0.0 && (!min_positive || term.prob < min_positive->prob))
      min_positive = &term;
  }
  rep.denom_min = min_term->prob;
  rep.denom_argmin = min_term->m;
  rep.denominator_degenerate = !(min_term->prob > 0.0);
  const DenominatorTerm* used = rep.denominator_degenerate ? min_positive : min_term;
  if (!used)
    throw estimation_error("maximal_inequality_audit: every denominator term is zero");
  rep.rhs = rep.num / used->prob;
  rep.rhs_se = rep.rhs * std::sqrt((rep.num_se / rep.num) * (rep.num_se / rep.num) +
                                   (used->se / used->prob) * (used->se / used->prob));
  rep.combined_se = std::sqrt(rep.lhs_se * rep.lhs_se + rep.rhs_se * rep.rhs_se);
  rep.satisfied_within_3se = rep.lhs <= rep.rhs + 3.0 * rep.combined_se;
  return rep;
}

IdentityCheck transversal_identity_check(double gamma, Dist dist, double q, int64_t n, int64_t l,
                                         uint64_t samples, const ExperimentContext& ctx) {
  if (n < 1 || l < n) throw std::invalid_argument("transversal_identity_check: need 1 <= n <= l");
  if (samples < 10) throw std::invalid_argument("transversal_identity_check: need >= 10 samples");
  const auto a = map_indexed<double>(samples, ctx.workers, [&](uint64_t r) {
    const WeightField f = replica_field(ctx, Stream::IdentityA, r, dist, q);
    return detail::transversal_with(f, gamma, n, l, ctx.budget);
  });
  const int64_t m = l - n + 1;
  const int64_t mc = ray_col(gamma, m);
  const auto b = map_indexed<double>(samples, ctx.workers, [&](uint64_t r) {
    const WeightField f = replica_field(ctx, Stream::IdentityB, r, dist, q);
    return grid_passage(f, mc, m, true, ctx.budget);
  });
  IdentityCheck out;
  out.samples = samples;
  out.ks = stats::ks_two_sample(a, b);
  out.critical = stats::ks_critical_two_sample(0.01, samples, samples);
  out.rejected = out.ks > out.critical;
  return out;
}

std::map<int64_t, std::vector<double>> sample_ray_ensemble(double gamma, Dist dist, double q,
                                                           const std::vector<int64_t>& n_values,
                                                           uint64_t reps, Stream stream,
                                                           const ExperimentContext& ctx) {
  if (n_values.empty()) throw std::invalid_argument("sample_ray_ensemble: empty n grid");
  if (reps < 1) throw std::invalid_argument("sample_ray_ensemble: reps must be >= 1");
  std::vector<int64_t> ns = n_values;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  if (ns.front() < 1) throw std::invalid_argument("sample_ray_ensemble: n values must be >= 1");
  const int64_t n_top = ns.back();

  const auto draws = map_indexed<std::vector<double>>(reps, ctx.workers, [&](uint64_t r) {
    const WeightField f = replica_field(ctx, stream, r, dist, q);
    RayConfig cfg{gamma, n_top, f, ctx.budget};
    const auto h = ray_sweep(cfg);
    std::vector<double> picked(ns.size());
    for (size_t i = 0; i < ns.size(); ++i) picked[i] = h[static_cast<size_t>(ns[i] - 1)];
    return picked;
  });

  std::map<int64_t, std::vector<double>> out;
  for (size_t i = 0; i < ns.size(); ++i) {
    auto& v = out[ns[i]];
    v.reserve(reps);
    for (const auto& d : draws) v.push_back(d[i]);
  }
  return out;
}

}  // namespace lpp
