#include "qc1d/lattice.hpp"
#include "qc1d/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace qc1d {

namespace {

constexpr double kNodeTolFactor = 1e-12; // coincidence tolerance, units of eps

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

double wrap_into_period(double p) {
  while (p > 1.0) p -= 1.0;
  while (p <= 0.0) p += 1.0;
  return p;
}

Region region_at(const RegionDecomposition& regions, double p) {
  if (regions.whole_chain) return Region::atomistic;
  const double q = wrap_into_period(p);
  for (const auto& [lo, hi] : regions.atomistic) {
    if (q > lo && q < hi) return Region::atomistic;
  }
  return Region::continuum;
}

} // namespace

ChainConfig::ChainConfig(int n, double f) : n_atoms(n), big_f(f) {
  if (n < 8) throw ValidationError("ChainConfig: N >= 8 required, got " + std::to_string(n));
  if (!(f > 0.0)) throw ValidationError("ChainConfig: F > 0 required");
}

RegionDecomposition RegionDecomposition::full_atomistic() {
  RegionDecomposition r;
  r.whole_chain = true;
  return r;
}

RegionDecomposition RegionDecomposition::from_intervals_exact(
    std::vector<std::pair<double, double>> intervals) {
  std::sort(intervals.begin(), intervals.end());
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& [lo, hi] = intervals[i];
    if (!(lo < hi)) throw ValidationError("RegionDecomposition: interval with lo >= hi");
    if (!(lo > 0.0 && hi < 1.0)) {
      throw ValidationError(
          "RegionDecomposition: atomistic interval must lie strictly inside (0,1) "
          "(the atomistic region is contained in the middle of the chain)");
    }
    if (i > 0 && !(intervals[i - 1].second < lo)) {
      throw ValidationError("RegionDecomposition: atomistic intervals overlap or touch");
    }
  }
  RegionDecomposition r;
  r.atomistic = std::move(intervals);
  return r;
}

RegionDecomposition RegionDecomposition::from_intervals(
    const ChainConfig& cfg, std::vector<std::pair<double, double>> intervals) {
  const double eps = cfg.eps();
  for (auto& [lo, hi] : intervals) {
    lo = std::round(lo / eps) * eps;
    hi = std::round(hi / eps) * eps;
  }
  return from_intervals_exact(std::move(intervals));
}

Anchor anchor_of(const ChainConfig& cfg, double x) {
  const double eps = cfg.eps();
  const double tol = kNodeTolFactor * eps;
  const double nearest = std::round(x / eps);
  if (std::abs(x - nearest * eps) <= tol) {
    return Anchor{static_cast<long>(nearest), 0.0};
  }
  const long ell = static_cast<long>(std::floor(x / eps));
  return Anchor{ell, x / eps - static_cast<double>(ell)};
}

int Mesh::elem_of(double pos) const {
  const auto it = std::lower_bound(x.begin(), x.end(), pos);
  if (it == x.end()) return num_elems() - 1;
  return static_cast<int>(it - x.begin());
}

Mesh build_mesh(const ChainConfig& cfg, const RegionDecomposition& regions,
                std::vector<double> continuum_nodes) {
  const double eps = cfg.eps();
  const double tol = kNodeTolFactor * eps;
  Mesh m;
  m.cfg = cfg;
  m.regions = regions;

  std::vector<double> nodes;
  if (regions.whole_chain) {
    nodes.reserve(static_cast<std::size_t>(cfg.n_atoms));
    for (int ell = 1; ell <= cfg.n_atoms; ++ell) nodes.push_back(cfg.atom_x(ell));
  } else {
    nodes = std::move(continuum_nodes);
    nodes.push_back(1.0); // period-boundary node, deduplicated below
    for (const auto& [lo, hi] : regions.atomistic) {
      nodes.push_back(lo);
      nodes.push_back(hi);
      const long first = static_cast<long>(std::floor(lo / eps)) + 1;
      const long last = static_cast<long>(std::ceil(hi / eps)) - 1;
      int inside = 0;
      for (long a = first; a <= last; ++a) {
        const double ax = cfg.atom_x(a);
        if (ax > lo + tol && ax < hi - tol) {
          nodes.push_back(ax);
          ++inside;
        }
      }
      if (inside < 3) {
        throw ValidationError(
            "build_mesh: atomistic subregion must contain at least 3 atoms strictly inside "
            "(interface jump formulas reach two atomistic elements past the interface)");
      }
      if (!(lo > 2.0 * eps * (1.0 + 1e-12)) || !(hi < 1.0 - 2.0 * eps * (1.0 + 1e-12))) {
        throw ValidationError(
            "build_mesh: exists delta > 2*eps with (0,delta) and (1-delta,1) in the continuum "
            "region violated (atomistic region too close to the period boundary)");
      }
    }
  }

  // Snap near-atom nodes to the exact atom position, sort and deduplicate.
  for (double& v : nodes) {
    const double nearest = std::round(v / eps);
    if (std::abs(v - nearest * eps) <= tol) v = nearest * eps;
    if (!(v > 0.0 && v <= 1.0 + tol)) {
      throw ValidationError("build_mesh: node outside (0,1]: " + std::to_string(v));
    }
    if (v > 1.0) v = 1.0;
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [tol](double a, double b) { return close(a, b, tol); }),
              nodes.end());
  if (nodes.empty() || !close(nodes.back(), 1.0, tol)) {
    throw ValidationError("build_mesh: the period boundary x = 1 must be a node");
  }
  nodes.back() = 1.0;

  m.x = std::move(nodes);
  const int K = m.num_elems();
  m.ell.resize(static_cast<std::size_t>(K));
  m.theta.resize(static_cast<std::size_t>(K));
  m.elem_region.resize(static_cast<std::size_t>(K));
  m.elem_size.resize(static_cast<std::size_t>(K));
  m.node_kind.resize(static_cast<std::size_t>(K));

  for (int k = 0; k < K; ++k) {
    const Anchor a = anchor_of(cfg, m.x[static_cast<std::size_t>(k)]);
    m.ell[static_cast<std::size_t>(k)] = a.ell;
    m.theta[static_cast<std::size_t>(k)] = a.theta;
  }

  for (int k = 0; k < K; ++k) {
    const double lo = m.elem_lo(k);
    const double hi = m.elem_hi(k);
    m.elem_size[static_cast<std::size_t>(k)] = hi - lo;
    if (!(hi - lo > tol)) {
      throw ValidationError("build_mesh: degenerate element of size ~0");
    }
    // An element interior must not cross a region boundary.
    for (const auto& [rlo, rhi] : regions.atomistic) {
      for (double b : {rlo, rhi}) {
        if (b > lo + tol && b < hi - tol) {
          throw ValidationError(
              "build_mesh: each element is contained in only one of the two regions violated "
              "(region boundary inside an element; boundary of Omega_c must be a node)");
        }
      }
    }
    m.elem_region[static_cast<std::size_t>(k)] =
        region_at(regions, 0.5 * (lo + hi));
  }

  for (int k = 0; k < K; ++k) {
    if (!m.is_continuum(k)) continue;
    if (m.elem_size[static_cast<std::size_t>(k)] < 2.0 * eps * (1.0 - 1e-12)) {
      throw ValidationError(
          "build_mesh: size >= 2*eps violated for a continuum element (element " +
          std::to_string(k) + " has size " +
          std::to_string(m.elem_size[static_cast<std::size_t>(k)]) + ")");
    }
  }

  if (!regions.whole_chain) {
    // Every atom strictly inside an atomistic region must be a node, and a
    // node strictly inside an atomistic region must be an atom.
    for (const auto& [lo, hi] : regions.atomistic) {
      const long first = static_cast<long>(std::floor(lo / eps)) + 1;
      const long last = static_cast<long>(std::ceil(hi / eps)) - 1;
      for (long a = first; a <= last; ++a) {
        const double ax = cfg.atom_x(a);
        if (!(ax > lo + tol && ax < hi - tol)) continue;
        const auto it = std::lower_bound(m.x.begin(), m.x.end(), ax - tol);
        if (it == m.x.end() || !close(*it, ax, tol)) {
          throw ValidationError(
              "build_mesh: every position of an atom in the atomistic region is a node violated");
        }
      }
      for (int k = 0; k < K; ++k) {
        const double xv = m.x[static_cast<std::size_t>(k)];
        if (xv > lo + tol && xv < hi - tol &&
            m.theta[static_cast<std::size_t>(k)] != 0.0) {
          throw ValidationError(
              "build_mesh: node strictly inside the atomistic region is not an atom position");
        }
      }
      for (double b : {lo, hi}) {
        const auto it = std::lower_bound(m.x.begin(), m.x.end(), b - tol);
        if (it == m.x.end() || !close(*it, b, tol)) {
          throw ValidationError("build_mesh: boundary of Omega_c is not a mesh node");
        }
      }
    }
  }

  for (int k = 0; k < K; ++k) {
    const bool left_a = !m.is_continuum(k);
    const bool right_a = !m.is_continuum((k + 1) % K);
    if (left_a && right_a) {
      m.node_kind[static_cast<std::size_t>(k)] = NodeKind::interior_atomistic;
    } else if (!left_a && right_a) {
      m.node_kind[static_cast<std::size_t>(k)] = NodeKind::left_interface;
    } else if (left_a && !right_a) {
      m.node_kind[static_cast<std::size_t>(k)] = NodeKind::right_interface;
    } else {
      m.node_kind[static_cast<std::size_t>(k)] = NodeKind::interior_continuum;
    }
  }

  for (int k = 0; k < K; ++k) {
    if (!m.is_continuum(k)) continue;
    m.kc.push_back(k);
    const bool left_abuts =
        m.node_kind[static_cast<std::size_t>((k + K - 1) % K)] == NodeKind::right_interface;
    const bool right_abuts =
        m.node_kind[static_cast<std::size_t>(k)] == NodeKind::left_interface;
    if (!left_abuts && !right_abuts) m.kc_prime.push_back(k);
  }

  return m;
}

MergedPartition merge_partitions(const ChainConfig& cfg, const Mesh& mesh) {
  const double eps = cfg.eps();
  const double tol = kNodeTolFactor * eps;
  MergedPartition r;
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(cfg.n_atoms) + mesh.x.size());
  for (int ell = 1; ell <= cfg.n_atoms; ++ell) pts.push_back(cfg.atom_x(ell));
  for (double v : mesh.x) pts.push_back(v);
  std::sort(pts.begin(), pts.end());
  // Keep the atom representative on coincidence so lattice values are exact.
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [tol](double a, double b) { return close(a, b, tol); }),
            pts.end());
  r.x = std::move(pts);
  const int n = r.count();
  r.size.resize(static_cast<std::size_t>(n));
  r.avg.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double lo = j == 0 ? 0.0 : r.x[static_cast<std::size_t>(j - 1)];
    r.size[static_cast<std::size_t>(j)] = r.x[static_cast<std::size_t>(j)] - lo;
  }
  for (int j = 0; j < n; ++j) {
    r.avg[static_cast<std::size_t>(j)] =
        0.5 * (r.size[static_cast<std::size_t>(j)] + r.size[static_cast<std::size_t>((j + 1) % n)]);
  }
  r.j_of_node.resize(mesh.x.size());
  for (std::size_t k = 0; k < mesh.x.size(); ++k) {
    const auto it = std::lower_bound(r.x.begin(), r.x.end(), mesh.x[k] - tol);
    if (it == r.x.end() || !close(*it, mesh.x[k], tol)) {
      throw ValidationError("merge_partitions: mesh node missing from merged partition");
    }
    r.j_of_node[k] = static_cast<int>(it - r.x.begin());
  }
  return r;
}

double Bond::lo() const {
  if (a_len > 0.0 && c_pieces.empty()) return a_lo;
  if (a_len == 0.0) return c_pieces.front().lo;
  return std::min(a_lo, c_pieces.front().lo);
}

double Bond::hi() const {
  if (a_len > 0.0 && c_pieces.empty()) return a_hi;
  if (a_len == 0.0) return c_pieces.back().hi;
  return std::max(a_hi, c_pieces.back().hi);
}

const char* to_string(BondCase c) {
  switch (c) {
    case BondCase::interior_atomistic: return "interior_atomistic";
    case BondCase::interior_element: return "interior_element";
    case BondCase::across_sub1: return "across_sub1";
    case BondCase::across_sub2: return "across_sub2";
    case BondCase::across_sub3: return "across_sub3";
    case BondCase::left_interface_sub1: return "left_interface_sub1";
    case BondCase::left_interface_sub2: return "left_interface_sub2";
    case BondCase::left_interface_sub3: return "left_interface_sub3";
    case BondCase::right_interface_sub1: return "right_interface_sub1";
    case BondCase::right_interface_sub2: return "right_interface_sub2";
    case BondCase::right_interface_sub3: return "right_interface_sub3";
  }
  return "?";
}

namespace {

// Element index for a point possibly past x = 1; indices in [K, 2K) denote
// the periodic image of element (idx - K).
int elem_of_unwrapped(const Mesh& mesh, double p) {
  const int K = mesh.num_elems();
  if (p > 1.0) return mesh.elem_of(p - 1.0) + K;
  return mesh.elem_of(p);
}

} // namespace

BondSet classify_bonds(const ChainConfig& cfg, const Mesh& mesh) {
  const double eps = cfg.eps();
  const double tol = kNodeTolFactor * eps;
  const int N = cfg.n_atoms;
  BondSet set;
  set.bonds.reserve(static_cast<std::size_t>(2 * N));

  // Breakpoint candidates: mesh nodes and region boundaries, plus their +1
  // periodic images (bonds reach at most 1 + 2*eps).
  std::vector<double> cuts;
  for (double v : mesh.x) {
    cuts.push_back(v);
    cuts.push_back(v + 1.0);
  }
  if (!mesh.regions.whole_chain) {
    for (const auto& [lo, hi] : mesh.regions.atomistic) {
      cuts.push_back(lo);
      cuts.push_back(hi);
      cuts.push_back(lo + 1.0);
      cuts.push_back(hi + 1.0);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [tol](double a, double b) { return close(a, b, tol); }),
             cuts.end());

  for (int r = 1; r <= 2; ++r) {
    for (int i = 0; i < N; ++i) {
      Bond b;
      b.i = i;
      b.r = r;
      const double lo = static_cast<double>(i) * eps;
      const double hi = static_cast<double>(i + r) * eps;

      std::vector<double> pts{lo};
      for (double c : cuts) {
        if (c > lo + tol && c < hi - tol) pts.push_back(c);
      }
      pts.push_back(hi);

      int a_runs = 0;
      bool prev_atomistic = false;
      for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
        const double plo = pts[s], phi = pts[s + 1];
        if (phi - plo <= tol) continue;
        const double mid = 0.5 * (plo + phi);
        if (region_at(mesh.regions, mid) == Region::atomistic) {
          if (!prev_atomistic) {
            ++a_runs;
            b.a_lo = plo;
          }
          b.a_hi = phi;
          prev_atomistic = true;
        } else {
          BondPiece piece;
          piece.lo = plo;
          piece.hi = phi;
          piece.elem = elem_of_unwrapped(mesh, mid);
          // Merge with the previous piece when it is the same element.
          if (!b.c_pieces.empty() && b.c_pieces.back().elem == piece.elem &&
              close(b.c_pieces.back().hi, piece.lo, tol)) {
            b.c_pieces.back().hi = piece.hi;
          } else {
            b.c_pieces.push_back(piece);
          }
          prev_atomistic = false;
        }
      }
      if (a_runs > 1) {
        throw ValidationError("classify_bonds: bond intersects two atomistic subregions");
      }
      b.a_len = a_runs == 0 ? 0.0 : b.a_hi - b.a_lo;
      if (b.c_pieces.size() > 2) {
        throw ValidationError(
            "classify_bonds: bond spans more than two continuum elements (excluded by "
            "eps_k >= 2*eps)");
      }
      if (a_runs == 1 && b.c_pieces.size() > 1) {
        throw ValidationError(
            "classify_bonds: bond with an atomistic fragment touches two continuum elements");
      }

      // Case label.
      if (b.a_len > (static_cast<double>(r) * eps) * (1.0 - 1e-9) || mesh.regions.whole_chain) {
        b.label = BondCase::interior_atomistic;
        b.a_lo = lo;
        b.a_hi = hi;
        b.a_len = hi - lo;
        b.c_pieces.clear();
      } else if (a_runs == 0 && b.c_pieces.size() == 1) {
        b.label = BondCase::interior_element;
      } else if (a_runs == 0) {
        // Straddles one interior continuum node; identify its anchor.
        const double node_x = b.c_pieces[0].hi;
        const long ell_k = anchor_of(cfg, wrap_into_period(node_x)).ell;
        long ell_node = ell_k;
        if (node_x > 1.0) ell_node += N;
        if (r == 1) {
          b.label = BondCase::across_sub1;
        } else {
          b.label = (i == ell_node - 1) ? BondCase::across_sub2 : BondCase::across_sub3;
        }
      } else {
        const bool fragment_right = b.c_pieces[0].lo < b.a_lo || close(b.c_pieces[0].lo, lo, tol);
        // fragment_right: continuum first, atomistic fragment after -> bond
        // crosses the left interface La of the region.
        const double node_x = fragment_right ? b.a_lo : b.a_hi;
        const long ell_k = anchor_of(cfg, wrap_into_period(node_x)).ell;
        long ell_node = ell_k;
        if (node_x > 1.0) ell_node += N;
        if (fragment_right) {
          if (r == 1) {
            b.label = BondCase::left_interface_sub1;
          } else {
            b.label = (i == ell_node - 1) ? BondCase::left_interface_sub2
                                          : BondCase::left_interface_sub3;
          }
        } else {
          if (r == 1) {
            b.label = BondCase::right_interface_sub1;
          } else {
            b.label = (i == ell_node) ? BondCase::right_interface_sub2
                                      : BondCase::right_interface_sub3;
          }
        }
      }
      set.bonds.push_back(std::move(b));
    }
  }
  return set;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << std::setprecision(17);
  os << "N " << mesh.cfg.n_atoms << " F " << mesh.cfg.big_f << " K " << mesh.num_elems() << "\n";
  for (int k = 0; k < mesh.num_elems(); ++k) {
    os << k << " " << mesh.x[static_cast<std::size_t>(k)] << " "
       << mesh.ell[static_cast<std::size_t>(k)] << " " << mesh.theta[static_cast<std::size_t>(k)]
       << " " << (mesh.is_continuum(k) ? "c" : "a") << "\n";
  }
}

void write_mesh_file(const std::string& path, const Mesh& mesh) {
  std::ofstream os(path);
  if (!os) throw ValidationError("write_mesh_file: cannot open " + path);
  write_mesh(os, mesh);
}

Mesh read_mesh(std::istream& is) {
  std::string line;
  int n = 0, K = 0;
  double f = 0.0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream hs(line);
    std::string tn, tf, tk;
    if (!(hs >> tn >> n >> tf >> f >> tk >> K) || tn != "N" || tf != "F" || tk != "K") {
      throw ValidationError("read_mesh: malformed header");
    }
    break;
  }
  ChainConfig cfg(n, f);
  std::vector<double> xs;
  std::vector<char> regions;
  xs.reserve(static_cast<std::size_t>(K));
  while (static_cast<int>(xs.size()) < K && std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int idx;
    double x, theta;
    long ell;
    std::string reg;
    if (!(ls >> idx >> x >> ell >> theta >> reg)) {
      throw ValidationError("read_mesh: malformed node line");
    }
    xs.push_back(x);
    regions.push_back(reg == "c" ? 'c' : 'a');
  }
  if (static_cast<int>(xs.size()) != K) throw ValidationError("read_mesh: truncated node list");

  // Reconstruct the region decomposition from the per-element labels.
  RegionDecomposition rd;
  bool any_c = false;
  for (char c : regions) any_c = any_c || c == 'c';
  if (!any_c) {
    rd = RegionDecomposition::full_atomistic();
  } else {
    std::vector<std::pair<double, double>> ivals;
    int k = 0;
    while (k < K) {
      if (regions[static_cast<std::size_t>(k)] == 'a') {
        const double lo = k == 0 ? 0.0 : xs[static_cast<std::size_t>(k - 1)];
        int j = k;
        while (j < K && regions[static_cast<std::size_t>(j)] == 'a') ++j;
        ivals.emplace_back(lo, xs[static_cast<std::size_t>(j - 1)]);
        k = j;
      } else {
        ++k;
      }
    }
    rd = RegionDecomposition::from_intervals_exact(std::move(ivals));
  }
  return build_mesh(cfg, rd, xs);
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("read_mesh_file: cannot open " + path);
  return read_mesh(is);
}

} // namespace qc1d
