#ifndef QC1D_ATOMISTIC_HPP
#define QC1D_ATOMISTIC_HPP

#include "qc1d/field.hpp"
#include "qc1d/lattice.hpp"
#include "qc1d/potential.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qc1d {

/// Deformation of one period of the chain: y_ell at atoms ell = 1..N,
/// y(x+1) = y(x) + F. Displacement u = y - Fx has zero eps-mean.
struct AtomisticState {
  ChainConfig cfg;
  Field y; // deformation on the uniform partition

  const std::vector<double>& values() const { return y.values(); }
  std::vector<double> stretches() const { return y.derivative(); }
};

AtomisticState make_atomistic_state(const ChainConfig& cfg, Field y);
AtomisticState homogeneous_state(const ChainConfig& cfg);

struct SolveReport {
  int iterations = 0;
  double grad_norm = 0.0;
  std::vector<double> step_history;
  double min_stretch = 0.0;
  bool success = false;
  std::string message;
};

/// Total energy E_a(y) = eps sum phi(y'_ell) + eps sum phi(y'_ell + y'_{ell+1})
/// - <f,u>_eps. Throws DomainError naming the first bond with nonpositive
/// stretch.
double energy_a(const AtomisticState& state, const Potential& p, const Field& f);

/// Nodal gradient G_j = dE_a/dy_j (external term included).
std::vector<double> gradient_a(const AtomisticState& state, const Potential& p, const Field& f);

/// Second variation of the stored energy in both the raw bond form and the
/// rewritten local form with coefficients A_ell, B_ell.
struct AtomisticHessian {
  ChainConfig cfg;
  std::vector<double> phi2_nn;  // phi''(y'_ell)
  std::vector<double> phi2_nnn; // phi''(y'_ell + y'_{ell+1})
  std::vector<double> A;        // A_ell = phi''(y'_ell) + 2 phi''(y'_{ell-1}+y'_ell) + 2 phi''(y'_ell+y'_{ell+1})
  std::vector<double> B;        // B_ell = -phi''(y'_ell + y'_{ell+1})

  /// eps sum phi''(y') |v'|^2 + eps sum phi''(y'+y'_+) |v' + v'_+|^2.
  double quadratic_form_raw(const std::vector<double>& v) const;
  /// eps sum A |v'|^2 + eps sum B |v''|^2 (identical value).
  double quadratic_form_local(const std::vector<double>& v) const;
  std::vector<double> apply(const std::vector<double>& v) const;
};

AtomisticHessian hessian_a(const AtomisticState& state, const Potential& p);

struct NewtonOptions {
  int max_iterations = 100;
  double tolerance_scale = 1e-10; // tolerance = scale * sqrt(dofs)
  double min_stretch_floor_fraction = 0.25; // keep min y' > r_star * fraction
  int max_backtracks = 60;
};

/// Newton minimization of E_a over the admissible set, zero-mean gauge
/// re-imposed every step. Throws SolverFailure (with the last iterate
/// discarded) only on line-search breakdown; non-converged runs return
/// success = false.
std::pair<AtomisticState, SolveReport> solve_atomistic(
    const ChainConfig& cfg, const Potential& p, const Field& f,
    std::optional<AtomisticState> initial = std::nullopt, const NewtonOptions& opts = {});

} // namespace qc1d

#endif
