#include "test_support.hpp"

#include "qc1d/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qc1d::testing {

namespace {

bool point_in_atomistic(const RegionDecomposition& regions, double p) {
  if (regions.whole_chain) return true;
  while (p > 1.0) p -= 1.0;
  while (p <= 0.0) p += 1.0;
  for (const auto& [lo, hi] : regions.atomistic) {
    if (p > lo && p < hi) return true;
  }
  return false;
}

} // namespace

Mesh random_mesh(const ChainConfig& cfg, Rng& rng, const RandomMeshOptions& opts) {
  const int N = cfg.n_atoms;
  const double eps = cfg.eps();
  std::uniform_real_distribution<double> frac(0.1, 0.9);
  std::uniform_real_distribution<double> step_dist(2.6, 5.0);
  std::uniform_int_distribution<int> coin(0, 1);

  for (int attempt = 0; attempt < 500; ++attempt) {
    try {
      const int n_regions =
          opts.max_regions > 1 && N >= 64 ? 1 + coin(rng) : 1;
      std::vector<std::pair<double, double>> ivals;
      std::vector<double> nodes;

      // Place regions by atom index; each holds >= 3 interior atoms.
      std::vector<std::pair<int, int>> slots; // [a0, a1] interface base atoms
      if (n_regions == 1) {
        std::uniform_int_distribution<int> a0d(3, N / 2);
        const int a0 = a0d(rng);
        std::uniform_int_distribution<int> spand(4, std::max(4, N / 3));
        const int a1 = std::min(a0 + spand(rng), N - 3);
        if (a1 - a0 < 4) continue;
        slots.emplace_back(a0, a1);
      } else {
        const int a0 = 3 + static_cast<int>(rng() % static_cast<unsigned>(N / 8));
        const int a1 = a0 + 4 + static_cast<int>(rng() % 4);
        const int b0 = a1 + 4 + static_cast<int>(rng() % static_cast<unsigned>(N / 8));
        const int b1 = b0 + 4 + static_cast<int>(rng() % 4);
        if (b1 > N - 3) continue;
        slots.emplace_back(a0, a1);
        slots.emplace_back(b0, b1);
      }
      for (auto& [a0, a1] : slots) {
        double lo = static_cast<double>(a0) * eps;
        double hi = static_cast<double>(a1) * eps;
        if (opts.unaligned_interfaces && coin(rng)) lo = (static_cast<double>(a0) + frac(rng)) * eps;
        if (opts.unaligned_interfaces && coin(rng)) {
          hi = (static_cast<double>(a1 - 1) + frac(rng)) * eps;
        }
        if (hi - lo < 4.0 * eps) {
          lo = static_cast<double>(a0) * eps;
          hi = static_cast<double>(a1) * eps;
        }
        ivals.emplace_back(lo, hi);
      }

      // Continuum walks between interfaces (and the period boundaries).
      auto walk = [&](double from, double to) {
        double x = from;
        while (true) {
          const double step = step_dist(rng) * eps;
          double next = x + step;
          if (opts.unaligned_continuum && coin(rng)) {
            // keep the raw (non-aligned) position
          } else {
            next = std::round(next / eps) * eps;
          }
          if (next > to - 2.2 * eps) break;
          nodes.push_back(next);
          x = next;
        }
      };
      walk(0.0, ivals.front().first);
      for (std::size_t i = 0; i + 1 < ivals.size(); ++i) {
        walk(ivals[i].second, ivals[i + 1].first);
      }
      walk(ivals.back().second, 1.0);

      return build_mesh(cfg, RegionDecomposition::from_intervals_exact(ivals), nodes);
    } catch (const ValidationError&) {
      continue;
    }
  }
  throw std::runtime_error("random_mesh: could not generate a valid mesh");
}

Field random_zero_mean_lattice_field(const ChainConfig& cfg, Rng& rng, double amp) {
  const int n = cfg.n_atoms;
  std::uniform_real_distribution<double> dist(-amp, amp);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& z : v) z = dist(rng);
  double mean = 0.0;
  for (double z : v) mean += z;
  mean /= static_cast<double>(n);
  for (double& z : v) z -= mean;
  return Field(Partition::uniform(n), std::move(v), FieldKind::displacement);
}

QcState random_qc_state(std::shared_ptr<const Mesh> mesh, std::shared_ptr<const BondSet> bonds,
                        Rng& rng, double lo, double hi) {
  const ChainConfig& cfg = mesh->cfg;
  const int K = mesh->num_elems();
  std::uniform_real_distribution<double> dist(lo * cfg.big_f, hi * cfg.big_f);
  std::vector<double> grad(static_cast<std::size_t>(K));
  for (double& g : grad) g = dist(rng);
  double total = 0.0;
  for (int k = 0; k < K; ++k) total += grad[static_cast<std::size_t>(k)] * mesh->elem_size[static_cast<std::size_t>(k)];
  const double c = cfg.big_f - total; // period sums to F
  for (double& g : grad) g += c;
  std::vector<double> y(static_cast<std::size_t>(K));
  double acc = 0.0;
  for (int k = 0; k < K; ++k) {
    acc += grad[static_cast<std::size_t>(k)] * mesh->elem_size[static_cast<std::size_t>(k)];
    y[static_cast<std::size_t>(k)] = acc;
  }
  Field yf(Partition::of_mesh(*mesh), std::move(y), FieldKind::deformation, cfg.big_f);
  return make_qc_state(std::move(mesh), std::move(bonds), yf.gauged());
}

double oracle_stored_energy_a(const ChainConfig& cfg, const Potential& p, const Field& y) {
  const int n = cfg.n_atoms;
  const double eps = cfg.eps();
  double acc = 0.0;
  for (int r = 1; r <= 2; ++r) {
    for (int i = 0; i < n; ++i) {
      const double a = static_cast<double>(i) * eps;
      const double b = static_cast<double>(i + r) * eps;
      const double d = (y.eval(b) - y.eval(a)) / (b - a);
      acc += eps * p.phi(static_cast<double>(r) * d);
    }
  }
  return acc;
}

double oracle_stored_variation_a(const ChainConfig& cfg, const Potential& p, const Field& y,
                                 const Field& v) {
  const int n = cfg.n_atoms;
  const double eps = cfg.eps();
  double acc = 0.0;
  for (int r = 1; r <= 2; ++r) {
    for (int i = 0; i < n; ++i) {
      const double a = static_cast<double>(i) * eps;
      const double b = static_cast<double>(i + r) * eps;
      const double dy = (y.eval(b) - y.eval(a)) / (b - a);
      const double dv = (v.eval(b) - v.eval(a)) / (b - a);
      acc += eps * p.dphi(static_cast<double>(r) * dy) * static_cast<double>(r) * dv;
    }
  }
  return acc;
}

namespace {

// Breakpoints of a bond against mesh nodes and region boundaries
// (independent re-scan; positions unwrapped into (0, 1 + 2 eps)).
std::vector<double> bond_breaks(const Mesh& mesh, double lo, double hi) {
  std::vector<double> pts{lo, hi};
  auto push = [&](double c) {
    if (c > lo + 1e-15 && c < hi - 1e-15) pts.push_back(c);
  };
  for (double v : mesh.x) {
    push(v);
    push(v + 1.0);
  }
  for (const auto& [rlo, rhi] : mesh.regions.atomistic) {
    push(rlo);
    push(rhi);
    push(rlo + 1.0);
    push(rhi + 1.0);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-15; }),
            pts.end());
  return pts;
}

} // namespace

double oracle_stored_energy_qc(const Mesh& mesh, const Potential& p, const Field& yh) {
  const ChainConfig& cfg = mesh.cfg;
  const double eps = cfg.eps();
  double acc = 0.0;
  for (int r = 1; r <= 2; ++r) {
    for (int i = 0; i < cfg.n_atoms; ++i) {
      const double lo = static_cast<double>(i) * eps;
      const double hi = static_cast<double>(i + r) * eps;
      const std::vector<double> pts = bond_breaks(mesh, lo, hi);
      double a_lo = 0.0, a_hi = 0.0;
      bool has_a = false;
      for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
        const double mid = 0.5 * (pts[s] + pts[s + 1]);
        const double len = pts[s + 1] - pts[s];
        if (point_in_atomistic(mesh.regions, mid)) {
          if (!has_a) a_lo = pts[s];
          a_hi = pts[s + 1];
          has_a = true;
        } else {
          const double slope = (yh.eval(pts[s + 1]) - yh.eval(pts[s])) / len;
          acc += len / static_cast<double>(r) * p.phi(static_cast<double>(r) * slope);
        }
      }
      if (has_a) {
        const double len = a_hi - a_lo;
        const double d = (yh.eval(a_hi) - yh.eval(a_lo)) / len;
        acc += len / static_cast<double>(r) * p.phi(static_cast<double>(r) * d);
      }
    }
  }
  return acc;
}

double oracle_stored_variation_qc(const Mesh& mesh, const Potential& p, const Field& yh,
                                  const Field& w) {
  const ChainConfig& cfg = mesh.cfg;
  const double eps = cfg.eps();
  double acc = 0.0;
  for (int r = 1; r <= 2; ++r) {
    for (int i = 0; i < cfg.n_atoms; ++i) {
      const double lo = static_cast<double>(i) * eps;
      const double hi = static_cast<double>(i + r) * eps;
      const std::vector<double> pts = bond_breaks(mesh, lo, hi);
      double a_lo = 0.0, a_hi = 0.0;
      bool has_a = false;
      for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
        const double mid = 0.5 * (pts[s] + pts[s + 1]);
        const double len = pts[s + 1] - pts[s];
        if (point_in_atomistic(mesh.regions, mid)) {
          if (!has_a) a_lo = pts[s];
          a_hi = pts[s + 1];
          has_a = true;
        } else {
          const double sy = (yh.eval(pts[s + 1]) - yh.eval(pts[s])) / len;
          const double sw = (w.eval(pts[s + 1]) - w.eval(pts[s])) / len;
          acc += len * p.dphi(static_cast<double>(r) * sy) * sw;
        }
      }
      if (has_a) {
        const double len = a_hi - a_lo;
        const double dy = (yh.eval(a_hi) - yh.eval(a_lo)) / len;
        const double dw = (w.eval(a_hi) - w.eval(a_lo)) / len;
        acc += len * p.dphi(static_cast<double>(r) * dy) * dw;
      }
    }
  }
  return acc;
}

double oracle_inner_eps(const ChainConfig& cfg, const Field& f, const Field& g) {
  const double eps = cfg.eps();
  double acc = 0.0;
  for (int ell = 1; ell <= cfg.n_atoms; ++ell) {
    const double x = cfg.atom_x(ell);
    acc += eps * f.eval(x) * g.eval(x);
  }
  return acc;
}

} // namespace qc1d::testing
