#include "qc1d/refine.hpp"
#include "qc1d/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qc1d {

const char* to_string(RefineScheme s) {
  switch (s) {
    case RefineScheme::optimal: return "optimal";
    case RefineScheme::gradient: return "gradient";
    case RefineScheme::energy: return "energy";
  }
  return "?";
}

RefineScheme refine_scheme_from(const std::string& name) {
  if (name == "optimal") return RefineScheme::optimal;
  if (name == "gradient") return RefineScheme::gradient;
  if (name == "energy") return RefineScheme::energy;
  throw ValidationError("unknown refinement scheme: " + name);
}

double optimal_mesh_size(const RadialMagnitude& fmag, double k_eps, double r) {
  const double f_ref = fmag(k_eps);
  const double f_r = fmag(r);
  if (!(f_r > 0.0)) return std::numeric_limits<double>::infinity();
  return std::pow(f_ref / f_r * r / k_eps, 2.0 / 3.0);
}

namespace {

long mid_atom(const ChainConfig& cfg) { return (static_cast<long>(cfg.n_atoms) - 1) / 2 + 1; }

} // namespace

Mesh optimal_mesh(const ChainConfig& cfg, const RadialMagnitude& fmag, int k_atoms) {
  const double eps = cfg.eps();
  const long mid = mid_atom(cfg);
  const double center = (static_cast<double>(mid) - 0.5) * eps;
  const double a_lo = static_cast<double>(mid - 1 - k_atoms) * eps;
  const double a_hi = static_cast<double>(mid + k_atoms) * eps;
  if (k_atoms < 2 || !(a_lo > 2.0 * eps) || !(a_hi < 1.0 - 2.0 * eps)) {
    throw ValidationError("optimal_mesh: K out of range (atomistic region exceeds the period)");
  }
  const double k_eps = static_cast<double>(k_atoms) * eps;

  std::vector<double> nodes;
  // Right-hand march from the interface towards the period boundary.
  double x = a_hi;
  while (true) {
    const double r = x - center;
    const double h = std::max(2.0 * eps, optimal_mesh_size(fmag, k_eps, r));
    const double next = x + h;
    if (next >= 1.0 - 2.0 * eps) break; // last element extends to the boundary node
    nodes.push_back(next);
    x = next;
  }
  // Mirrored left-hand march.
  x = a_lo;
  while (true) {
    const double r = center - x;
    const double h = std::max(2.0 * eps, optimal_mesh_size(fmag, k_eps, r));
    const double next = x - h;
    if (next <= 2.0 * eps) break; // first element of the period reaches x = 0
    nodes.push_back(next);
    x = next;
  }
  auto regions = RegionDecomposition::from_intervals_exact({{a_lo, a_hi}});
  return build_mesh(cfg, regions, std::move(nodes));
}

std::vector<double> refinement_indicator(const EstimatorReport& report, RefineScheme scheme) {
  const std::size_t K = report.eta_e.size();
  std::vector<double> eta(K, 0.0);
  const double half_a = 0.5 * report.stability.a_star;
  for (std::size_t k = 0; k < K; ++k) {
    const double def =
        std::sqrt(report.eta_e[k] * report.eta_e[k] + report.eta_f[k] * report.eta_f[k]) / half_a;
    if (scheme == RefineScheme::energy) {
      eta[k] = report.stability.c_lip_energy * def * def + report.eta_Ee[k] + report.eta_Ef[k];
    } else {
      eta[k] = def;
    }
  }
  return eta;
}

std::vector<int> doerfler_mark(const std::vector<double>& eta, double frac) {
  std::vector<int> order(eta.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return eta[static_cast<std::size_t>(a)] > eta[static_cast<std::size_t>(b)];
  });
  double total = 0.0;
  for (double v : eta) total += v * v;
  if (!(total > 0.0)) return {};
  std::vector<int> marked;
  double acc = 0.0;
  for (int idx : order) {
    marked.push_back(idx);
    acc += eta[static_cast<std::size_t>(idx)] * eta[static_cast<std::size_t>(idx)];
    if (acc >= frac * total) break;
  }
  return marked;
}

namespace {

struct InitialLayout {
  RegionDecomposition regions;
  std::vector<double> nodes;
};

double snap_to_atom(const ChainConfig& cfg, double x) {
  return std::round(x / cfg.eps()) * cfg.eps();
}

InitialLayout initial_layout(const ChainConfig& cfg, const RefinementConfig& rc) {
  const double eps = cfg.eps();
  const long mid = mid_atom(cfg);
  const long side = rc.initial_atoms_per_side;
  const double a_lo = static_cast<double>(mid - 1 - side) * eps;
  const double a_hi = static_cast<double>(mid + side) * eps;
  InitialLayout layout;
  layout.regions = RegionDecomposition::from_intervals_exact({{a_lo, a_hi}});
  // Two equally large elements per continuum side, split points snapped.
  const double right_mid = snap_to_atom(cfg, 0.5 * (a_hi + 1.0));
  const double left_mid = snap_to_atom(cfg, 0.5 * a_lo);
  layout.nodes = {left_mid, right_mid};
  return layout;
}

} // namespace

std::vector<RefineLevel> refine_adaptive(const ChainConfig& cfg, const Potential& pot,
                                         const Field& f, RefineScheme scheme, int max_dof,
                                         const RefinementConfig& rc) {
  if (scheme == RefineScheme::optimal) {
    throw ValidationError("refine_adaptive: use optimal_mesh for scheme 1");
  }
  const double eps = cfg.eps();
  InitialLayout layout = initial_layout(cfg, rc);

  std::vector<RefineLevel> levels;
  for (int level = 0;; ++level) {
    auto mesh = std::make_shared<const Mesh>(build_mesh(cfg, layout.regions, layout.nodes));
    RefineLevel rl;
    rl.level = level;
    rl.mesh = mesh;
    try {
      auto [state, report] = solve_qc(mesh, pot, f);
      if (!report.success) {
        rl.solve_ok = false;
        rl.note = "solver did not converge: " + report.message;
        levels.push_back(std::move(rl));
        break;
      }
      rl.state = std::move(state);
      rl.report = estimate(rl.state, pot, f);
    } catch (const std::exception& e) {
      rl.solve_ok = false;
      rl.note = e.what();
      levels.push_back(std::move(rl));
      break;
    }

    const std::vector<double> eta = refinement_indicator(rl.report, scheme);
    double total_sq = 0.0;
    for (double v : eta) total_sq += v * v;
    rl.indicator_total = std::sqrt(total_sq);

    const int dof = mesh->num_elems();
    if (dof >= max_dof) {
      rl.note = "max dof reached";
      levels.push_back(std::move(rl));
      break;
    }
    if (!(total_sq > 0.0)) {
      rl.note = "all indicators zero";
      levels.push_back(std::move(rl));
      break;
    }

    const std::vector<int> marked = doerfler_mark(eta, rc.marking_fraction);
    // Apply the operations on a copy of the geometry.
    auto regions = layout.regions.atomistic;
    std::vector<double> nodes = mesh->x;
    nodes.pop_back(); // 1.0 is re-added by build_mesh
    bool changed = false;
    const int K = mesh->num_elems();
    for (int m : marked) {
      if (!mesh->is_continuum(m)) continue;
      const int left = (m + K - 1) % K;
      const bool right_abuts =
          mesh->node_kind[static_cast<std::size_t>(m)] == NodeKind::left_interface;
      const bool left_abuts =
          mesh->node_kind[static_cast<std::size_t>(left)] == NodeKind::right_interface;
      const double lo = mesh->elem_lo(m);
      const double hi = mesh->elem_hi(m);
      if (right_abuts || left_abuts) {
        // Merge the element into the touching atomistic subregion.
        for (auto& [rlo, rhi] : regions) {
          if (right_abuts && std::abs(rlo - hi) < 1e-12) {
            rlo = lo;
            changed = true;
          } else if (left_abuts && std::abs(rhi - lo) < 1e-12) {
            rhi = hi;
            changed = true;
          }
        }
        continue;
      }
      // Bisect with the midpoint snapped to the nearest atom.
      const double midpoint = snap_to_atom(cfg, 0.5 * (lo + hi));
      if (midpoint - lo >= 2.0 * eps * (1.0 - 1e-12) &&
          hi - midpoint >= 2.0 * eps * (1.0 - 1e-12)) {
        nodes.push_back(midpoint);
        changed = true;
      }
    }
    levels.push_back(std::move(rl));
    if (!changed) {
      levels.back().note = "refinement stalled (no applicable operation)";
      break;
    }
    // Coalesce overlapping atomistic intervals after merges.
    std::sort(regions.begin(), regions.end());
    std::vector<std::pair<double, double>> merged_regions;
    for (const auto& iv : regions) {
      if (!merged_regions.empty() && iv.first <= merged_regions.back().second + 1e-12) {
        merged_regions.back().second = std::max(merged_regions.back().second, iv.second);
      } else {
        merged_regions.push_back(iv);
      }
    }
    layout.regions = RegionDecomposition::from_intervals_exact(std::move(merged_regions));
    layout.nodes = std::move(nodes);
  }
  return levels;
}

} // namespace qc1d
