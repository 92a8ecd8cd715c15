#ifndef QC1D_POTENTIAL_HPP
#define QC1D_POTENTIAL_HPP

#include <functional>

namespace qc1d {

/// Pair interaction potential with closed-form derivatives up to third
/// order. Immutable value object; safe to evaluate concurrently.
///
/// The potential is assumed convex on (0, r_star) and concave on
/// (r_star, inf). `tail_envelope(i, s)` must return an upper bound for
/// sup_{r >= s} |phi^(i)(r)| when `decaying_tail` is set.
struct Potential {
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  std::function<double(double)> d2phi;
  std::function<double(double)> d3phi;
  double r_star = 0.0;
  bool decaying_tail = false;
  std::function<double(int, double)> tail_envelope;
};

struct MorseParams {
  double alpha; // stiffness, > 0
};

/// Morse potential phi(r) = exp(-2 a (r-1)) - 2 exp(-a (r-1)).
/// Inflection radius r_star = 1 + ln(2)/a. Throws DomainError for a <= 0.
Potential morse(const MorseParams& params);

/// Upper bound for max_{r in [mu, inf)} |phi^(order)(r)|, order in {2, 3}.
/// Dense sampling on [mu, mu+W] plus the analytic tail envelope beyond;
/// the window W is widened until the tail is dominated by the sampled max.
/// Throws DomainError if the potential does not declare a decaying tail.
double derivative_bound(const Potential& p, int order, double mu);

} // namespace qc1d

#endif
