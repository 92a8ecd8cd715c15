#ifndef QC1D_TEST_SUPPORT_HPP
#define QC1D_TEST_SUPPORT_HPP

// Shared fixtures and independent oracles for the unit and acceptance
// suites. Everything here recomputes geometry from scratch (no reuse of the
// production bond classification) so the oracles stay independent of the
// implementation paths they check.

#include "qc1d/atomistic.hpp"
#include "qc1d/estimator.hpp"
#include "qc1d/field.hpp"
#include "qc1d/lattice.hpp"
#include "qc1d/potential.hpp"
#include "qc1d/qc.hpp"

#include <memory>
#include <random>
#include <vector>

namespace qc1d::testing {

using Rng = std::mt19937_64;

struct RandomMeshOptions {
  bool unaligned_interfaces = true;  // allow theta in (0,1) at La/Ra nodes
  bool unaligned_continuum = true;   // allow theta in (0,1) at interior nodes
  int max_regions = 1;
};

/// Random valid mesh on the given chain; retries until the validator
/// accepts. Deterministic for a given rng state.
Mesh random_mesh(const ChainConfig& cfg, Rng& rng, const RandomMeshOptions& opts = {});

/// Zero eps-mean lattice displacement with values in [-amp, amp].
Field random_zero_mean_lattice_field(const ChainConfig& cfg, Rng& rng, double amp = 1.0);

/// Admissible QC deformation whose element gradients lie in
/// [lo*F, hi*F]; the zero-mean gauge is imposed.
QcState random_qc_state(std::shared_ptr<const Mesh> mesh, std::shared_ptr<const BondSet> bonds,
                        Rng& rng, double lo = 0.9, double hi = 1.1);

/// Brute-force bond-loop evaluation of the stored atomistic energy of a
/// lattice deformation (independent of the production loop structure).
double oracle_stored_energy_a(const ChainConfig& cfg, const Potential& p, const Field& y);

/// eps * sum_b phi'(r_b D_b y) r_b D_b v, all quantities via Field::eval.
double oracle_stored_variation_a(const ChainConfig& cfg, const Potential& p, const Field& y,
                                 const Field& v);

/// Independent segmentation of a bond against mesh + regions; returns the
/// stored QC energy sum_b [a_b + c_b].
double oracle_stored_energy_qc(const Mesh& mesh, const Potential& p, const Field& yh);

/// sum_b [a'_b(y_h)[w] + c'_b(y_h)[w]] with w any continuous field.
double oracle_stored_variation_qc(const Mesh& mesh, const Potential& p, const Field& yh,
                                  const Field& w);

/// <f,g>_eps by direct summation.
double oracle_inner_eps(const ChainConfig& cfg, const Field& f, const Field& g);

} // namespace qc1d::testing

#endif
