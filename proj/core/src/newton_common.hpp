#ifndef QC1D_NEWTON_COMMON_HPP
#define QC1D_NEWTON_COMMON_HPP

// Shared Newton driver for the atomistic and QC minimizations. Both problems
// are smooth periodic energies with a translation gauge; the driver solves
// the reduced system (one unknown pinned), projects increments back onto the
// gauge and backtracks to keep stretches positive.

#include "qc1d/atomistic.hpp"
#include "qc1d/errors.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <functional>
#include <vector>

namespace qc1d::detail {

struct NewtonProblem {
  int dofs = 0;
  std::function<double(const std::vector<double>&)> energy;
  std::function<std::vector<double>(const std::vector<double>&)> gradient;
  // Triplets of the full (gauge-free) Hessian.
  std::function<std::vector<Eigen::Triplet<double>>(const std::vector<double>&)> hessian;
  std::function<double(const std::vector<double>&)> min_stretch;
  // Zero-mean projections: states carry the deformation gauge (mean of
  // y - Fx), steps the plain displacement gauge.
  std::function<void(std::vector<double>&)> regauge_state;
  std::function<void(std::vector<double>&)> regauge_step;
  double stretch_floor = 0.0;
};

inline double norm2(const std::vector<double>& v) {
  double acc = 0.0;
  for (double z : v) acc += z * z;
  return std::sqrt(acc);
}

inline SolveReport newton_minimize(const NewtonProblem& prob, std::vector<double>& y,
                                   const NewtonOptions& opts) {
  SolveReport report;
  const int n = prob.dofs;
  const double tol = opts.tolerance_scale * std::sqrt(static_cast<double>(n));
  prob.regauge_state(y);
  if (!(prob.min_stretch(y) > 0.0)) {
    throw SolverFailure("newton: initial guess has nonpositive stretch");
  }

  for (int it = 0; it < opts.max_iterations; ++it) {
    const std::vector<double> g = prob.gradient(y);
    report.grad_norm = norm2(g);
    report.iterations = it;
    if (report.grad_norm <= tol) {
      report.success = true;
      report.min_stretch = prob.min_stretch(y);
      return report;
    }

    // Reduced system: pin unknown 0 (translation gauge), solve for the rest.
    const std::vector<Eigen::Triplet<double>> trips = prob.hessian(y);
    std::vector<Eigen::Triplet<double>> reduced;
    reduced.reserve(trips.size());
    for (const auto& t : trips) {
      if (t.row() == 0 || t.col() == 0) continue;
      reduced.emplace_back(t.row() - 1, t.col() - 1, t.value());
    }
    Eigen::SparseMatrix<double> H(n - 1, n - 1);
    H.setFromTriplets(reduced.begin(), reduced.end());
    H.makeCompressed();
    Eigen::VectorXd rhs(n - 1);
    for (int j = 1; j < n; ++j) rhs[j - 1] = -g[static_cast<std::size_t>(j)];
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(H);
    lu.factorize(H);
    if (lu.info() != Eigen::Success) {
      throw SolverFailure("newton: Hessian factorization failed (indefinite or singular)");
    }
    const Eigen::VectorXd dx = lu.solve(rhs);
    std::vector<double> step(static_cast<std::size_t>(n), 0.0);
    for (int j = 1; j < n; ++j) step[static_cast<std::size_t>(j)] = dx[j - 1];
    prob.regauge_step(step);

    double dir_deriv = 0.0;
    for (int j = 0; j < n; ++j) {
      dir_deriv += g[static_cast<std::size_t>(j)] * step[static_cast<std::size_t>(j)];
    }
    if (dir_deriv > 0.0) {
      for (double& s : step) s = -s;
      dir_deriv = -dir_deriv;
    }

    const double e0 = prob.energy(y);
    // Absolute slack keeps the line search usable once energy differences
    // fall below the floating-point resolution of e0.
    const double slack = 1e-13 * (1.0 + std::abs(e0));
    bool accepted = false;
    double t = 1.0;
    std::vector<double> trial(static_cast<std::size_t>(n));
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      for (int j = 0; j < n; ++j) {
        trial[static_cast<std::size_t>(j)] =
            y[static_cast<std::size_t>(j)] + t * step[static_cast<std::size_t>(j)];
      }
      if (prob.min_stretch(trial) > prob.stretch_floor &&
          prob.energy(trial) <= e0 + 1e-4 * t * dir_deriv + slack) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      throw SolverFailure("newton: line search failed (stretch barrier or no descent)");
    }
    y = trial;
    prob.regauge_state(y);
    report.step_history.push_back(t);
  }

  const std::vector<double> g = prob.gradient(y);
  report.grad_norm = norm2(g);
  report.iterations = opts.max_iterations;
  report.success = report.grad_norm <= tol;
  if (!report.success) report.message = "newton: iteration limit reached";
  report.min_stretch = prob.min_stretch(y);
  return report;
}

} // namespace qc1d::detail

#endif
