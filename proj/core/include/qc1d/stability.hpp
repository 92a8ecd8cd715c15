#ifndef QC1D_STABILITY_HPP
#define QC1D_STABILITY_HPP

#include "qc1d/atomistic.hpp"
#include "qc1d/potential.hpp"

#include <vector>

namespace qc1d {

/// A posteriori stability data evaluated at the lattice projection
/// J_{U_qc} y_qc of a QC solution.
struct StabilityReport {
  std::vector<double> A;      // A_ell = phi''(y'_ell) + 2 phi''(y'_{ell-1}+y'_ell) + 2 phi''(y'_ell+y'_{ell+1})
  std::vector<double> B;      // B_ell = -phi''(y'_ell + y'_{ell+1})
  double a_star = 0.0;        // min_ell A_ell
  double min_stretch = 0.0;   // mu
  bool stretch_ok = false;    // min stretch >= r_star / 2
  double c_lip = 0.0;         // M3([mu,inf)) + 8 M3([2mu,inf))
  double c_lip_energy = 0.0;  // M2([mu,inf))/2 + 2 M3([2mu,inf))
  double mu = 0.0;
};

/// Coefficients of Lemma 4.1 at a lattice deformation (typically the
/// projected QC solution). Throws DomainError on nonpositive stretches.
StabilityReport assess_stability(const AtomisticState& y_proj, const Potential& p);

} // namespace qc1d

#endif
