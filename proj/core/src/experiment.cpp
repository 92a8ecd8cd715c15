#include "qc1d/experiment.hpp"
#include "qc1d/errors.hpp"
#include "qc1d/estimator.hpp"
#include "qc1d/svg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace qc1d {

namespace {

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

} // namespace

RadialMagnitude BenchmarkForce::radial_magnitude(const ChainConfig& cfg) const {
  const double eps = cfg.eps();
  const double half = static_cast<double>((cfg.n_atoms - 1) / 2); // c, in index units
  const double s = scale;
  return [eps, half, s](double r) {
    const double taper = 1.0 - (r / eps - 0.5) / half;
    if (!(taper > 0.0) || !(r > 0.0)) return 0.0;
    return s * taper / r;
  };
}

Benchmark build_benchmark(int n, double alpha, double big_f) {
  if (n % 2 == 0) throw ValidationError("build_benchmark: N must be odd (centre formula)");
  if (n < 33) throw ValidationError("build_benchmark: N >= 33 required");
  Benchmark b;
  b.cfg = ChainConfig(n, big_f);
  b.pot = morse(MorseParams{alpha});
  b.force.scale = 0.1;
  const long c = (static_cast<long>(n) - 1) / 2;
  b.force.center_index = static_cast<double>(c) + 0.5;

  std::vector<double> fv(static_cast<std::size_t>(n));
  const double nd = static_cast<double>(n);
  const double cd = static_cast<double>(c);
  for (long ell = 1; ell <= n; ++ell) {
    const double ld = static_cast<double>(ell);
    double v;
    if (ell <= c) {
      v = -0.1 * (1.0 - (cd - ld) / cd) * nd / std::abs(ld - cd - 0.5);
    } else {
      v = 0.1 * (1.0 - (ld - cd - 1.0) / cd) * nd / std::abs(ld - cd - 0.5);
    }
    fv[static_cast<std::size_t>(ell - 1)] = v;
  }
  // The force is antisymmetric, hence mean-zero up to rounding; project and
  // record the correction.
  const double eps = b.cfg.eps();
  double mean = 0.0;
  for (double v : fv) mean += eps * v;
  b.force.mean_correction = mean;
  if (std::abs(mean) > 1e-10) {
    for (double& v : fv) v -= mean;
  }
  b.force.f = Field(Partition::uniform(n), std::move(fv), FieldKind::displacement);
  return b;
}

namespace {

ExperimentRecord make_record(const Benchmark& bench, const AtomisticState& ref,
                             double ref_energy, double denom_def, double denom_energy,
                             const QcState& state, const EstimatorReport& report,
                             const char* scheme, int level, double wall) {
  const ChainConfig& cfg = bench.cfg;
  ExperimentRecord rec;
  rec.scheme = scheme;
  rec.level = level;
  rec.dof = state.mesh->num_elems();

  const Field proj = transfer_to_lattice(state.y, cfg);
  const std::vector<double> d_ref = ref.y.derivative();
  const std::vector<double> d_qc = proj.derivative();
  std::vector<double> diff(d_ref.size());
  for (std::size_t j = 0; j < d_ref.size(); ++j) diff[j] = d_qc[j] - d_ref[j];
  const auto& w = ref.y.partition().elem_size;
  const double err_def = weighted_norm(diff, w, 2);
  const double e_qc = energy_qc(state, bench.pot, bench.force.f);
  const double err_energy = std::abs(ref_energy - e_qc);

  rec.e_deformation = err_def / denom_def;
  rec.e_energy = err_energy / denom_energy;
  rec.est_store = report.store_total;
  rec.est_ext = report.ext_total;
  rec.deformation_bound = report.deformation.bound;
  rec.energy_bound = report.energy_bound;
  rec.efficiency_deformation = err_def > 0.0 ? report.deformation.bound / err_def : 0.0;
  rec.efficiency_energy = err_energy > 0.0 ? report.energy_bound / err_energy : 0.0;
  rec.a_star = report.stability.a_star;
  rec.wall_time_s = wall;
  return rec;
}

} // namespace

std::vector<ExperimentRecord> run_sweep(const Benchmark& bench, RefineScheme scheme,
                                        const SweepLadder& ladder,
                                        const AtomisticState* reference) {
  const ChainConfig& cfg = bench.cfg;
  AtomisticState ref = homogeneous_state(cfg);
  if (reference != nullptr) {
    ref = *reference;
  } else {
    auto [state, rep] = solve_atomistic(cfg, bench.pot, bench.force.f);
    if (!rep.success) throw SolverFailure("run_sweep: atomistic reference did not converge");
    ref = std::move(state);
  }
  const double ref_energy = energy_a(ref, bench.pot, bench.force.f);
  const AtomisticState homog = homogeneous_state(cfg);
  const double homog_energy = energy_a(homog, bench.pot, bench.force.f);
  // Denominators of the two relative errors.
  std::vector<double> dev = ref.y.derivative();
  for (double& v : dev) v -= cfg.big_f;
  const double denom_def = weighted_norm(dev, ref.y.partition().elem_size, 2);
  const double denom_energy = std::abs(ref_energy - homog_energy);

  std::vector<ExperimentRecord> records;
  if (scheme == RefineScheme::optimal) {
    const RadialMagnitude fmag = bench.force.radial_magnitude(cfg);
    int level = 0;
    for (int k : ladder.k_atoms) {
      const double t0 = now_s();
      auto mesh = std::make_shared<const Mesh>(optimal_mesh(cfg, fmag, k));
      auto [state, rep] = solve_qc(mesh, bench.pot, bench.force.f);
      if (!rep.success) {
        continue; // sweep continues past failed levels
      }
      const EstimatorReport report = estimate(state, bench.pot, bench.force.f);
      records.push_back(make_record(bench, ref, ref_energy, denom_def, denom_energy, state, report,
                                    "optimal", level, now_s() - t0));
      ++level;
    }
  } else {
    const double t0 = now_s();
    const std::vector<RefineLevel> levels =
        refine_adaptive(cfg, bench.pot, bench.force.f, scheme, ladder.max_dof);
    double prev = t0;
    for (const RefineLevel& rl : levels) {
      if (!rl.solve_ok) break;
      const double t1 = now_s();
      records.push_back(make_record(bench, ref, ref_energy, denom_def, denom_energy, rl.state,
                                    rl.report, to_string(scheme), rl.level, t1 - prev));
      prev = t1;
    }
  }
  return records;
}

std::vector<ExperimentRecord> run_experiment(const Benchmark& bench, const SweepLadder& ladder) {
  auto [ref, rep] = solve_atomistic(bench.cfg, bench.pot, bench.force.f);
  if (!rep.success) throw SolverFailure("run_experiment: atomistic reference did not converge");
  std::vector<ExperimentRecord> all;
  for (RefineScheme s : {RefineScheme::optimal, RefineScheme::gradient, RefineScheme::energy}) {
    std::vector<ExperimentRecord> recs = run_sweep(bench, s, ladder, &ref);
    all.insert(all.end(), recs.begin(), recs.end());
  }
  std::stable_sort(all.begin(), all.end(), [](const ExperimentRecord& a, const ExperimentRecord& b) {
    if (a.scheme != b.scheme) return a.scheme < b.scheme;
    return a.level < b.level;
  });
  return all;
}

namespace {
constexpr const char* kCsvHeader =
    "scheme,level,dof,e_deformation,e_energy,est_store,est_ext,deformation_bound,energy_bound,"
    "efficiency_deformation,efficiency_energy,a_star,wall_time_s";
}

void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  os << std::setprecision(17);
  os << kCsvHeader << "\n";
  for (const ExperimentRecord& r : records) {
    os << r.scheme << "," << r.level << "," << r.dof << "," << r.e_deformation << "," << r.e_energy
       << "," << r.est_store << "," << r.est_ext << "," << r.deformation_bound << ","
       << r.energy_bound << "," << r.efficiency_deformation << "," << r.efficiency_energy << ","
       << r.a_star << "," << r.wall_time_s << "\n";
  }
}

void write_records_csv_file(const std::string& path, const std::vector<ExperimentRecord>& records) {
  std::ofstream os(path);
  if (!os) throw ValidationError("write_records_csv_file: cannot open " + path);
  write_records_csv(os, records);
}

std::vector<ExperimentRecord> read_records_csv(std::istream& is) {
  std::vector<ExperimentRecord> out;
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) {
    throw ValidationError("read_records_csv: bad header");
  }
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    ExperimentRecord r;
    std::string tok;
    auto next = [&]() {
      if (!std::getline(ls, tok, ',')) throw ValidationError("read_records_csv: short row");
      return tok;
    };
    r.scheme = next();
    r.level = std::stoi(next());
    r.dof = std::stoi(next());
    r.e_deformation = std::stod(next());
    r.e_energy = std::stod(next());
    r.est_store = std::stod(next());
    r.est_ext = std::stod(next());
    r.deformation_bound = std::stod(next());
    r.energy_bound = std::stod(next());
    r.efficiency_deformation = std::stod(next());
    r.efficiency_energy = std::stod(next());
    r.a_star = std::stod(next());
    r.wall_time_s = std::stod(next());
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ExperimentRecord> read_records_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("read_records_csv_file: cannot open " + path);
  return read_records_csv(is);
}

std::vector<std::string> emit_outputs(const std::vector<ExperimentRecord>& records,
                                      const std::string& out_dir) {
  if (records.empty()) throw ValidationError("emit_outputs: no records");
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;

  const std::string csv = out_dir + "/records.csv";
  write_records_csv_file(csv, records);
  written.push_back(csv);

  std::vector<std::string> schemes;
  for (const auto& r : records) {
    if (std::find(schemes.begin(), schemes.end(), r.scheme) == schemes.end()) {
      schemes.push_back(r.scheme);
    }
  }
  struct PlotSpec {
    const char* file;
    const char* title;
    const char* ylabel;
    double ExperimentRecord::* field;
  };
  const PlotSpec plots[] = {
      {"error_deformation.svg", "Relative error of the deformation gradient", "relative error",
       &ExperimentRecord::e_deformation},
      {"efficiency_deformation.svg", "Efficiency factor of the deformation-gradient estimator",
       "efficiency factor", &ExperimentRecord::efficiency_deformation},
      {"error_energy.svg", "Relative error of the total energy", "relative error",
       &ExperimentRecord::e_energy},
      {"efficiency_energy.svg", "Efficiency factor of the energy estimator", "efficiency factor",
       &ExperimentRecord::efficiency_energy},
  };
  for (const PlotSpec& spec : plots) {
    std::vector<SvgSeries> series;
    for (const std::string& s : schemes) {
      SvgSeries ser;
      ser.label = s;
      for (const auto& r : records) {
        if (r.scheme != s) continue;
        ser.x.push_back(static_cast<double>(r.dof));
        ser.y.push_back(r.*spec.field);
      }
      series.push_back(std::move(ser));
    }
    const std::string path = out_dir + "/" + spec.file;
    write_loglog_svg(path, spec.title, "degrees of freedom", spec.ylabel, series);
    written.push_back(path);
  }
  return written;
}

} // namespace qc1d
