#ifndef QC1D_REFINE_HPP
#define QC1D_REFINE_HPP

#include "qc1d/estimator.hpp"
#include "qc1d/field.hpp"
#include "qc1d/lattice.hpp"
#include "qc1d/potential.hpp"
#include "qc1d/qc.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace qc1d {

enum class RefineScheme { optimal, gradient, energy };

const char* to_string(RefineScheme s);
RefineScheme refine_scheme_from(const std::string& name);

struct RefinementConfig {
  RefineScheme scheme = RefineScheme::optimal;
  int k_atoms = 8;              // scheme 1: atoms per side of the defect
  int max_dof = 0;              // adaptive schemes: stop at this many nodes
  double marking_fraction = 0.5; // Doerfler prefix threshold
  int initial_atoms_per_side = 5;
  int initial_splits_per_side = 2;
};

/// Radial force magnitude |f|(r) with r the distance to the defect centre.
using RadialMagnitude = std::function<double(double)>;

/// Quasi-optimal graded mesh: 2*eps elements near the interface until
/// h(r) = (f(K eps)/f(r) * r/(K eps))^{2/3} exceeds 2*eps, then nodes at
/// exact h(r) increments, truncated at the period boundary. Continuum nodes
/// are generally not atom positions.
Mesh optimal_mesh(const ChainConfig& cfg, const RadialMagnitude& fmag, int k_atoms);

/// The closed-form mesh-size function above (exposed for tests).
double optimal_mesh_size(const RadialMagnitude& fmag, double k_eps, double r);

struct RefineLevel {
  int level = 0;
  std::shared_ptr<const Mesh> mesh;
  QcState state;
  EstimatorReport report;
  double indicator_total = 0.0; // sqrt(sum eta_i^2) of the scheme's indicator
  bool solve_ok = true;
  std::string note;
};

/// Solve -> estimate -> mark -> refine loop (Algorithms 2 and 3). Elements
/// adjacent to the atomistic region are merged into it instead of bisected;
/// bisection midpoints snap to atom positions. Returns the level trajectory,
/// truncated (with a note) if a solve fails or refinement stalls.
std::vector<RefineLevel> refine_adaptive(const ChainConfig& cfg, const Potential& pot,
                                         const Field& f, RefineScheme scheme, int max_dof,
                                         const RefinementConfig& rc = {});

/// Per-element indicator used by the adaptive schemes.
std::vector<double> refinement_indicator(const EstimatorReport& report, RefineScheme scheme);

/// Doerfler prefix: minimal M with sum of the M largest eta_i^2 >= frac * total.
/// Returns indices in marking order (stable by element index on ties).
std::vector<int> doerfler_mark(const std::vector<double>& eta, double frac);

} // namespace qc1d

#endif
