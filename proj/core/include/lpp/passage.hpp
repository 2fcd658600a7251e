#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lpp/errors.hpp"
#include "lpp/weights.hpp"

namespace lpp {

// Soft cap on DP cell updates per operation. Fails fast instead of thrashing.
struct CellBudget {
  uint64_t soft_cap = 1'000'000'000;

  void charge(uint64_t cells, const char* op) const {
    if (cells > soft_cap)
      throw budget_error(std::string(op) + ": " + std::to_string(cells) +
                         " cell updates exceed the budget of " + std::to_string(soft_cap));
  }
};

// [gamma*N], the bracket read as integer part. One shared definition so the
// sweep, the transversal and the experiments can never disagree on a column.
inline int64_t ray_col(double gamma, int64_t n) {
  return static_cast<int64_t>(std::floor(gamma * static_cast<double>(n)));
}

namespace detail {

// Fallback row fill for arbitrary field functors; WeightField uses the
// vectorized overload from weights.hpp.
template <class FieldFn>
inline void row_weights(const FieldFn& field, int64_t j, int64_t m, double* w) {
  for (int64_t i = 1; i <= m; ++i) w[i] = field(i, j);
}

// Frontier dynamic program over the m x n rectangle:
//   G(i,j) = X(i,j) + max(G(i-1,j), G(i,j-1)),  G == 0 outside.
// The zero boundary is exact for nonnegative weights: extending any path
// back to (1,1) only adds weight. FieldFn is (i, j) -> double; HarvestFn is
// called after each row j with g where g[i] = G(i, j), i = 1..m.
template <class FieldFn, class HarvestFn>
void frontier_sweep(FieldFn&& field, int64_t m, int64_t n, HarvestFn&& harvest) {
  std::vector<double> g(static_cast<size_t>(m) + 1, 0.0);
  std::vector<double> wrow(static_cast<size_t>(m) + 1, 0.0);
  double* const gp = g.data();
  double* const wp = wrow.data();
  for (int64_t j = 1; j <= n; ++j) {
    row_weights(field, j, m, wp);
    double left = 0.0;
    for (int64_t i = 1; i <= m; ++i) {
      const double up = gp[i];
      left = wp[i] + (up > left ? up : left);
      gp[i] = left;
    }
    harvest(j, std::span<const double>(g));
  }
}

inline void check_grid_dims(int64_t m, int64_t n, const char* op) {
  if (m < 1 || n < 1)
    throw std::invalid_argument(std::string(op) + ": grid dimensions must be >= 1, got " +
                                std::to_string(m) + "x" + std::to_string(n));
  if (m > (int64_t{1} << 31) || n > (int64_t{1} << 31))
    throw std::invalid_argument(std::string(op) + ": grid dimension too large");
}

// Generic versions, templated on the field so tests can instrument accesses.

template <class FieldFn>
double grid_passage_with(FieldFn&& field, int64_t m, int64_t n, bool omit_origin,
                         const CellBudget& budget) {
  check_grid_dims(m, n, "grid_passage");
  budget.charge(static_cast<uint64_t>(m) * static_cast<uint64_t>(n), "grid_passage");
  double corner = 0.0;
  frontier_sweep(field, m, n, [&](int64_t j, std::span<const double> g) {
    if (j == n) corner = g[static_cast<size_t>(m)];
  });
  return omit_origin ? corner - field(1, 1) : corner;
}

// Passage time between ray points ([gamma n], n) -> ([gamma l], l), start
// cell omitted. Reads only the subrectangle.
template <class FieldFn>
double transversal_with(FieldFn&& field, double gamma, int64_t n, int64_t l,
                        const CellBudget& budget) {
  if (!(gamma >= 1.0)) throw std::invalid_argument("transversal: gamma must be >= 1");
  if (n < 1 || l < n)
    throw std::invalid_argument("transversal: need 1 <= n <= l, got n=" + std::to_string(n) +
                                " l=" + std::to_string(l));
  const int64_t i0 = ray_col(gamma, n);
  const int64_t j0 = n;
  const int64_t wd = ray_col(gamma, l) - i0 + 1;
  const int64_t ht = l - j0 + 1;
  budget.charge(static_cast<uint64_t>(wd) * static_cast<uint64_t>(ht), "transversal");
  auto local = [&](int64_t di, int64_t dj) -> double {
    if (di == 1 && dj == 1) return 0.0;  // start weight omitted
    return field(i0 + di - 1, j0 + dj - 1);
  };
  double value = 0.0;
  frontier_sweep(local, wd, ht, [&](int64_t j, std::span<const double> g) {
    if (j == ht) value = g[static_cast<size_t>(wd)];
  });
  return value;
}

}  // namespace detail

// H(m, n) on the weight field: max up/right path weight sum from (1,1) to
// (m,n). With omit_origin the weight at (1,1) is excluded (every path
// contains it, so this is the full value minus X(1,1)).
double grid_passage(const WeightField& field, int64_t m, int64_t n, bool omit_origin = true,
                    const CellBudget& budget = {});

struct RayConfig {
  double gamma = 1.0;
  int64_t n_max = 1;
  WeightField field;
  CellBudget budget;
};

// The coupled sequence h[N] = H([gamma N], N) - X(1,1) for every N <= n_max,
// harvested from a single row-major sweep of the enclosing rectangle.
// Returned vector is indexed by N-1. Memory: O([gamma n_max]).
std::vector<double> ray_sweep(const RayConfig& config);

struct TransversalTime {
  int64_t n = 1;
  int64_t l = 1;
  double value = 0.0;
};

TransversalTime transversal(const WeightField& field, double gamma, int64_t n, int64_t l,
                            const CellBudget& budget = {});

// Explicit m x n weight matrix, 1-indexed as at(i, j), column-major storage
// (entry (i,j) at w[(j-1)*m + (i-1)]).
struct WeightMatrix {
  int64_t m = 0;
  int64_t n = 0;
  std::vector<double> w;

  double at(int64_t i, int64_t j) const { return w[static_cast<size_t>((j - 1) * m + (i - 1))]; }
  static WeightMatrix sample(const WeightField& field, int64_t m, int64_t n);
};

// Exhaustive enumeration of all C(m+n-2, n-1) up/right paths. Verification
// oracle for the dynamic program; rejects grids larger than 8x8.
double oracle_passage(const WeightMatrix& weights, bool omit_origin = true);

}  // namespace lpp
