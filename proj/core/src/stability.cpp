#include "qc1d/stability.hpp"
#include "qc1d/errors.hpp"

#include <algorithm>

namespace qc1d {

StabilityReport assess_stability(const AtomisticState& y_proj, const Potential& p) {
  const AtomisticHessian h = hessian_a(y_proj, p); // validates stretches
  StabilityReport r;
  r.A = h.A;
  r.B = h.B;
  r.a_star = *std::min_element(r.A.begin(), r.A.end());
  const std::vector<double> d = y_proj.y.derivative();
  r.min_stretch = *std::min_element(d.begin(), d.end());
  r.stretch_ok = r.min_stretch >= 0.5 * p.r_star;
  r.mu = r.min_stretch;
  const double m3_mu = derivative_bound(p, 3, r.mu);
  const double m3_2mu = derivative_bound(p, 3, 2.0 * r.mu);
  const double m2_mu = derivative_bound(p, 2, r.mu);
  r.c_lip = m3_mu + 8.0 * m3_2mu;
  r.c_lip_energy = 0.5 * m2_mu + 2.0 * m3_2mu;
  return r;
}

} // namespace qc1d
