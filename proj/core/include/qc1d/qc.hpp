#ifndef QC1D_QC_HPP
#define QC1D_QC_HPP

#include "qc1d/atomistic.hpp"
#include "qc1d/field.hpp"
#include "qc1d/lattice.hpp"
#include "qc1d/potential.hpp"

#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace qc1d {

/// QC deformation: nodal values on the mesh, per-element gradients, and the
/// bond set reused across solver iterations.
struct QcState {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const BondSet> bonds;
  Field y; // deformation on the mesh partition

  const ChainConfig& cfg() const { return mesh->cfg; }
  std::vector<double> elem_gradients() const { return y.derivative(); }
};

QcState make_qc_state(std::shared_ptr<const Mesh> mesh, std::shared_ptr<const BondSet> bonds,
                      Field y);
QcState homogeneous_qc_state(std::shared_ptr<const Mesh> mesh,
                             std::shared_ptr<const BondSet> bonds);

/// Difference quotient D_omega y = (y(R) - y(L)) / |omega|. Throws for an
/// empty interval.
double bond_difference(const Field& y, double lo, double hi);

/// E_qc(y) = sum_b [a_b + c_b] - <f, u_h>_h. The force f lives on the
/// lattice partition; its mesh vectorization interpolates.
double energy_qc(const QcState& state, const Potential& p, const Field& f);

/// Nodal gradient of E_qc.
std::vector<double> gradient_qc(const QcState& state, const Potential& p, const Field& f);

/// Sparse symmetric second variation of the stored QC energy.
struct QcHessian {
  struct Entry {
    int row;
    int col;
    double value;
  };
  int dofs = 0;
  std::vector<Entry> entries;

  std::vector<double> apply(const std::vector<double>& v) const;
  double quadratic_form(const std::vector<double>& v, const std::vector<double>& w) const;
};

QcHessian hessian_qc(const QcState& state, const Potential& p);

std::pair<QcState, SolveReport> solve_qc(std::shared_ptr<const Mesh> mesh, const Potential& p,
                                         const Field& f,
                                         std::optional<QcState> initial = std::nullopt,
                                         const NewtonOptions& opts = {});

} // namespace qc1d

#endif
