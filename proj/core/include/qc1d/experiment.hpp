#ifndef QC1D_EXPERIMENT_HPP
#define QC1D_EXPERIMENT_HPP

#include "qc1d/atomistic.hpp"
#include "qc1d/field.hpp"
#include "qc1d/lattice.hpp"
#include "qc1d/potential.hpp"
#include "qc1d/refine.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qc1d {

/// The Section 6 external force: antisymmetric about the chain centre,
/// 1/r decay with a linear taper that vanishes at the period boundary.
struct BenchmarkForce {
  double scale = 0.1;
  double center_index = 0.0; // (N-1)/2 + 0.5, in atom-index units
  Field f;                   // realized lattice field, zero eps-mean
  double mean_correction = 0.0;

  /// Radial magnitude used by the quasi-optimal mesh formula.
  RadialMagnitude radial_magnitude(const ChainConfig& cfg) const;
};

struct Benchmark {
  ChainConfig cfg;
  Potential pot;
  BenchmarkForce force;
};

/// Builds the benchmark problem (F, Morse alpha, the two-branch force).
/// Requires odd N >= 33.
Benchmark build_benchmark(int n, double alpha, double big_f);

struct ExperimentRecord {
  std::string scheme;
  int level = 0;
  int dof = 0;
  double e_deformation = 0.0; // relative
  double e_energy = 0.0;      // relative
  double est_store = 0.0;
  double est_ext = 0.0;
  double deformation_bound = 0.0; // absolute
  double energy_bound = 0.0;      // absolute
  double efficiency_deformation = 0.0;
  double efficiency_energy = 0.0;
  double a_star = 0.0;
  double wall_time_s = 0.0;
};

struct SweepLadder {
  std::vector<int> k_atoms; // scheme 1: atoms per side at each level
  int max_dof = 0;          // adaptive schemes
};

/// Runs one scheme over the ladder. The atomistic reference is solved once
/// if not supplied.
std::vector<ExperimentRecord> run_sweep(const Benchmark& bench, RefineScheme scheme,
                                        const SweepLadder& ladder,
                                        const AtomisticState* reference = nullptr);

/// All three schemes with a shared atomistic reference, merged and sorted by
/// (scheme, level).
std::vector<ExperimentRecord> run_experiment(const Benchmark& bench, const SweepLadder& ladder);

/// CSV with a fixed header, '.' decimal, 17 significant digits.
void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records);
void write_records_csv_file(const std::string& path, const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records_csv(std::istream& is);
std::vector<ExperimentRecord> read_records_csv_file(const std::string& path);

/// Emits records.csv and the four log-log SVG convergence plots into out_dir.
/// Returns the paths written.
std::vector<std::string> emit_outputs(const std::vector<ExperimentRecord>& records,
                                      const std::string& out_dir);

} // namespace qc1d

#endif
