#include "lpp/passage.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace lpp {

double grid_passage(const WeightField& field, int64_t m, int64_t n, bool omit_origin,
                    const CellBudget& budget) {
  return detail::grid_passage_with(field, m, n, omit_origin, budget);
}

std::vector<double> ray_sweep(const RayConfig& config) {
  if (!(config.gamma >= 1.0))
    throw std::invalid_argument("ray_sweep: gamma must be >= 1, got " + std::to_string(config.gamma));
  if (config.n_max < 1) throw std::invalid_argument("ray_sweep: n_max must be >= 1");
  const int64_t m_max = ray_col(config.gamma, config.n_max);
  detail::check_grid_dims(m_max, config.n_max, "ray_sweep");
  config.budget.charge(static_cast<uint64_t>(m_max) * static_cast<uint64_t>(config.n_max),
                       "ray_sweep");
  const double x11 = config.field(1, 1);
  std::vector<double> h(static_cast<size_t>(config.n_max));
  detail::frontier_sweep(config.field, m_max, config.n_max,
                         [&](int64_t j, std::span<const double> g) {
                           h[static_cast<size_t>(j - 1)] =
                               g[static_cast<size_t>(ray_col(config.gamma, j))] - x11;
                         });
  return h;
}

TransversalTime transversal(const WeightField& field, double gamma, int64_t n, int64_t l,
                            const CellBudget& budget) {
  return {n, l, detail::transversal_with(field, gamma, n, l, budget)};
}

WeightMatrix WeightMatrix::sample(const WeightField& field, int64_t m, int64_t n) {
  WeightMatrix out;
  out.m = m;
  out.n = n;
  out.w.resize(static_cast<size_t>(m) * static_cast<size_t>(n));
  for (int64_t j = 1; j <= n; ++j)
    for (int64_t i = 1; i <= m; ++i) out.w[static_cast<size_t>((j - 1) * m + (i - 1))] = field(i, j);
  return out;
}

namespace {

void enumerate_paths(const WeightMatrix& w, int64_t i, int64_t j, double acc, double& best) {
  acc += w.at(i, j);
  if (i == w.m && j == w.n) {
    best = std::max(best, acc);
    return;
  }
  if (i < w.m) enumerate_paths(w, i + 1, j, acc, best);
  if (j < w.n) enumerate_paths(w, i, j + 1, acc, best);
}

}  // namespace

double oracle_passage(const WeightMatrix& weights, bool omit_origin) {
  if (weights.m < 1 || weights.n < 1 || weights.m > 8 || weights.n > 8)
    throw std::invalid_argument("oracle_passage: requires 1 <= m, n <= 8, got " +
                                std::to_string(weights.m) + "x" + std::to_string(weights.n));
  if (weights.w.size() != static_cast<size_t>(weights.m) * static_cast<size_t>(weights.n))
    throw std::invalid_argument("oracle_passage: matrix storage size does not match m*n");
  double best = -std::numeric_limits<double>::infinity();
  enumerate_paths(weights, 1, 1, 0.0, best);
  return omit_origin ? best - weights.at(1, 1) : best;
}

}  // namespace lpp
