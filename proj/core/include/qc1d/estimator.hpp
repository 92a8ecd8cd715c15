#ifndef QC1D_ESTIMATOR_HPP
#define QC1D_ESTIMATOR_HPP

#include "qc1d/field.hpp"
#include "qc1d/lattice.hpp"
#include "qc1d/potential.hpp"
#include "qc1d/qc.hpp"
#include "qc1d/stability.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace qc1d {

/// Jump terms carried by one continuum-boundary or interface node.
/// grad[j] is the coefficient of eps * v'_{ell+j} (j = 0,1,2) in the exact
/// residual identity; energy[j] is the signed stored-energy jump indexed at
/// atom offsets j-1 in {-1,0,1}. All terms vanish on locally homogeneous
/// states.
struct JumpTriple {
  int node = 0; // mesh node index
  long ell = 0;
  double theta = 0.0;
  NodeKind kind = NodeKind::interior_continuum;
  std::array<double, 3> grad{};
  std::array<double, 3> energy{};
};

struct StoredResidual {
  std::vector<JumpTriple> triples;
  std::vector<double> eta_e;  // per element, 0 outside K_c
  std::vector<double> eta_Ee; // per element, abs-aggregated energy jumps
  double total = 0.0;         // E_store = (sum eta_e^2)^{1/2}
};

/// Theorem 3.1 estimator with the full interface/interior case taxonomy.
StoredResidual stored_energy_residual(const QcState& y_qc, const Potential& p);

/// Evaluates the closed-form side of the residual identity,
/// sum over nodes of eps * sum_j grad_j * v'_{ell+j}, for a lattice test
/// field v. Equals E'_a(J_{U_qc} y_h)[v] - E'_qc(y_h)[J_U v] exactly.
double apply_gradient_jumps(const StoredResidual& sr, const ChainConfig& cfg, const Field& v);

/// Signed sum of all energy jumps; equals E_a(J_{U_qc} y_h) - E_qc(y_h)
/// for the stored energies.
double sum_energy_jumps(const StoredResidual& sr);

struct ExternalResidual {
  std::vector<double> eta_f;   // per element, 0 outside K_c
  double total = 0.0;          // E_ext = (sum eta_f^2)^{1/2}
  std::vector<double> h_tilde; // per element
  std::vector<double> h_hat;   // per element
  std::vector<int> ku;         // K_U: nodes not on the lattice
  int n_merged = 0;
};

/// Theorem 3.5 estimator of the external-force residual. f must live on the
/// lattice partition with zero eps-mean.
ExternalResidual external_force_residual(const Field& f, const Mesh& mesh,
                                         const MergedPartition& merged);

struct DeformationBound {
  double bound = 0.0; // (2 / A_*) (E_store + E_ext)
  bool stretch_ok = false;
  bool stability_ok = false;
  bool tau_assumed = true; // closeness parameter of the theorem: recorded, unverifiable
};

/// Theorem 5.1 deformation-gradient error bound with the proof's computable
/// constant A_*(J_{U_qc} y_qc). Throws StabilityLost if A_* <= 0.
DeformationBound deformation_error_bound(const StoredResidual& stored,
                                         const ExternalResidual& ext,
                                         const StabilityReport& stability);

struct EnergyBound {
  double bound = 0.0;
  std::vector<double> eta_Ee; // per element
  std::vector<double> eta_Ef; // per element
  double jump_sum_signed = 0.0;   // sum of signed external trapezoid differences
};

/// Section 5.2 energy-difference bound:
/// C^E_Lip * (deformation bound)^2 + sum_k (eta_Ee_k + eta_Ef_k).
EnergyBound energy_error_bound(const QcState& y_qc, const Field& f,
                               const StoredResidual& stored, const DeformationBound& def_bound,
                               const StabilityReport& stability);

/// Everything the adaptive loop and the CLI consume.
struct EstimatorReport {
  std::vector<double> eta_e, eta_f, eta_Ee, eta_Ef;
  double store_total = 0.0;
  double ext_total = 0.0;
  StabilityReport stability;
  DeformationBound deformation;
  double energy_bound = 0.0;
  std::vector<double> h_tilde, h_hat;
  std::vector<int> ku;
  int n_merged = 0;
};

EstimatorReport estimate(const QcState& y_qc, const Potential& p, const Field& f);

/// CSV dump: "k,case,eta_e,eta_f,eta_Ee,eta_Ef" rows plus a '#' summary line
/// with the global quantities.
void write_estimator_csv(std::ostream& os, const Mesh& mesh, const EstimatorReport& report);
void write_estimator_csv_file(const std::string& path, const Mesh& mesh,
                              const EstimatorReport& report);

} // namespace qc1d

#endif
