#include "qc1d/potential.hpp"
#include "qc1d/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qc1d {

Potential morse(const MorseParams& params) {
  const double a = params.alpha;
  if (!(a > 0.0)) {
    throw DomainError("morse: alpha must be positive, got " + std::to_string(a));
  }
  Potential p;
  p.phi = [a](double r) {
    return std::exp(-2.0 * a * (r - 1.0)) - 2.0 * std::exp(-a * (r - 1.0));
  };
  p.dphi = [a](double r) {
    return -2.0 * a * std::exp(-2.0 * a * (r - 1.0)) + 2.0 * a * std::exp(-a * (r - 1.0));
  };
  p.d2phi = [a](double r) {
    return 4.0 * a * a * std::exp(-2.0 * a * (r - 1.0)) - 2.0 * a * a * std::exp(-a * (r - 1.0));
  };
  p.d3phi = [a](double r) {
    return -8.0 * a * a * a * std::exp(-2.0 * a * (r - 1.0)) +
           2.0 * a * a * a * std::exp(-a * (r - 1.0));
  };
  p.r_star = 1.0 + std::log(2.0) / a;
  p.decaying_tail = true;
  // |phi^(i)(r)| <= (2a)^i e^{-2a(r-1)} + 2 a^i e^{-a(r-1)}; for s >= 1 the
  // slower exponential dominates both terms.
  p.tail_envelope = [a](int order, double s) {
    const double e1 = std::exp(-a * (s - 1.0));
    const double e2 = std::exp(-2.0 * a * (s - 1.0));
    return std::pow(2.0 * a, order) * e2 + 2.0 * std::pow(a, order) * e1;
  };
  return p;
}

double derivative_bound(const Potential& p, int order, double mu) {
  if (order != 2 && order != 3) {
    throw DomainError("derivative_bound: order must be 2 or 3");
  }
  if (!(mu > 0.0)) {
    throw DomainError("derivative_bound: mu must be positive");
  }
  if (!p.decaying_tail || !p.tail_envelope) {
    throw DomainError("derivative_bound: potential lacks a decaying tail; bound unverifiable");
  }
  const auto& f = order == 2 ? p.d2phi : p.d3phi;

  double window = 10.0;
  for (int widen = 0; widen < 8; ++widen) {
    const std::size_t samples = 1u << 20;
    double best = 0.0;
    for (std::size_t i = 0; i <= samples; ++i) {
      const double r = mu + window * static_cast<double>(i) / static_cast<double>(samples);
      best = std::max(best, std::abs(f(r)));
    }
    const double tail = p.tail_envelope(order, mu + window);
    if (tail <= best || tail < 1e-300) {
      return std::max(best, tail);
    }
    window *= 2.0; // tail not yet dominated, widen the sampled window
  }
  throw DomainError("derivative_bound: tail never dominated by sampled maximum");
}

} // namespace qc1d
