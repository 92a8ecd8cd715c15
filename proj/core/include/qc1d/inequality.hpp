#ifndef QC1D_INEQUALITY_HPP
#define QC1D_INEQUALITY_HPP

#include <utility>
#include <vector>

namespace qc1d {

/// Value sequence with positive weight sequences. eps0 weighs the values,
/// eps1 defines first differences g'_i = (g_i - g_{i-1}) / eps1_i, eps2 the
/// second differences g''_i = (g'_{i+1} - g'_i) / eps2_i.
struct WeightedVector {
  std::vector<double> g;
  std::vector<double> eps0;
  std::vector<double> eps1;
  std::vector<double> eps2; // only needed by interpolation_error_bound

  int size() const { return static_cast<int>(g.size()); }
  std::vector<double> first_diff() const;  // indices 2..L stored at [1..L-1]
  std::vector<double> second_diff() const; // indices 2..L-1 stored at [1..L-2]
};

struct BoundPair {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Pointwise pre-Poincare bound |g_i| <= (1/h) sum_k eps1_k |g'_k| phi_{i,k}
/// (proof's eps1 weights). Returns (|g_i|, bound) for index i (0-based).
BoundPair pre_poincare_bound(const WeightedVector& v, int i);

/// Discrete Poincare inequality, p in {1, inf} (p = 0 means inf).
/// Requires sum eps0_i g_i = 0 within 1e-10 * scale.
BoundPair poincare_bound(const WeightedVector& v, int p);

/// Discrete Friedrichs inequality, p in {1, inf}; requires g_1 = g_L = 0.
BoundPair friedrichs_bound(const WeightedVector& v, int p);

/// Interpolation error against the weighted-linear interpolant
/// F_i = f_1 + (sum_{j=2..i} eps0_j / h) (f_L - f_1), h = sum_{j=2..L} eps0_j.
/// The stated bound requires eps1 proportional to eps0 (F'' = 0).
BoundPair interpolation_error_bound(const WeightedVector& v, int p);

} // namespace qc1d

#endif
