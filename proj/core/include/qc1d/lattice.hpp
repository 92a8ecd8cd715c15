#ifndef QC1D_LATTICE_HPP
#define QC1D_LATTICE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qc1d {

/// Reference lattice: N atoms per period, spacing eps = 1/N, macroscopic
/// deformation gradient F. Atoms of one period sit at ell*eps, ell = 1..N.
struct ChainConfig {
  int n_atoms = 0;
  double big_f = 1.0;

  ChainConfig() = default;
  ChainConfig(int n, double f);

  double eps() const { return 1.0 / static_cast<double>(n_atoms); }
  /// Position of atom ell (any integer; periodic images included).
  double atom_x(long ell) const { return static_cast<double>(ell) * eps(); }
};

/// Atomistic/continuum split of the period. `atomistic` holds disjoint open
/// intervals inside (0,1), sorted; empty means all-continuum. `whole_chain`
/// marks the degenerate everything-atomistic decomposition used by the
/// model-coincidence tests.
struct RegionDecomposition {
  std::vector<std::pair<double, double>> atomistic;
  bool whole_chain = false;

  static RegionDecomposition all_continuum() { return {}; }
  static RegionDecomposition full_atomistic();
  /// Intervals with endpoints snapped to the nearest atom position.
  static RegionDecomposition from_intervals(const ChainConfig& cfg,
                                            std::vector<std::pair<double, double>> intervals);
  /// Intervals kept verbatim (interfaces may fall between atoms).
  static RegionDecomposition from_intervals_exact(std::vector<std::pair<double, double>> intervals);
};

enum class Region : std::uint8_t { atomistic, continuum };

/// Node-anchor pair: x = (ell + theta) * eps with theta in [0,1).
/// theta == 0 is canonical for atom-coincident nodes.
struct Anchor {
  long ell = 0;
  double theta = 0.0;
};

/// Computes the anchor of position x; positions within 1e-12*eps of an atom
/// collapse to theta = 0.
Anchor anchor_of(const ChainConfig& cfg, double x);

/// How a mesh node touches the region decomposition.
enum class NodeKind : std::uint8_t {
  interior_continuum, // continuum elements on both sides
  left_interface,     // continuum left, atomistic right  (x = La_i)
  right_interface,    // atomistic left, continuum right  (x = Ra_i)
  interior_atomistic  // atomistic on both sides
};

/// QC partition of one period. Nodes x[0] < ... < x[K-1] = 1.0; element k is
/// [x[k-1], x[k]] with x[-1] := 0. Everything is validated on construction
/// through build_mesh.
struct Mesh {
  ChainConfig cfg;
  RegionDecomposition regions;
  std::vector<double> x;        // node positions, x.back() == 1.0
  std::vector<long> ell;        // anchors
  std::vector<double> theta;
  std::vector<Region> elem_region;
  std::vector<double> elem_size;
  std::vector<NodeKind> node_kind;
  std::vector<int> kc;          // indices of continuum elements (K_c)
  std::vector<int> kc_prime;    // K'_c: continuum elements not touching Omega_a

  int num_elems() const { return static_cast<int>(x.size()); }
  double node(int k) const { return x[static_cast<std::size_t>(k)]; }
  /// Left endpoint of element k (x[k-1], or 0 for k == 0).
  double elem_lo(int k) const { return k == 0 ? 0.0 : x[static_cast<std::size_t>(k - 1)]; }
  double elem_hi(int k) const { return x[static_cast<std::size_t>(k)]; }
  bool is_continuum(int k) const { return elem_region[static_cast<std::size_t>(k)] == Region::continuum; }
  /// Element containing position x in (0,1]; ties at nodes resolve to the
  /// element ending at that node.
  int elem_of(double pos) const;
};

/// Validates the full Section-2.3 constraint list and fills in anchors,
/// classifications and index sets. `continuum_nodes` lists the nodes the
/// caller wants in the continuum region (interface nodes and atoms inside
/// atomistic regions are added automatically). Throws ValidationError with
/// the violated rule named.
Mesh build_mesh(const ChainConfig& cfg, const RegionDecomposition& regions,
                std::vector<double> continuum_nodes);

/// Common refinement of the lattice partition and the mesh.
struct MergedPartition {
  std::vector<double> x;      // sorted nodes in (0,1], x.back() == 1.0
  std::vector<double> size;   // size[j] = x[j] - x[j-1] (x[-1] := 0)
  std::vector<double> avg;    // avg[j] = (size[j] + size[j+1 mod n]) / 2
  std::vector<int> j_of_node; // mesh node k sits at merged index j_of_node[k]

  int count() const { return static_cast<int>(x.size()); }
};

MergedPartition merge_partitions(const ChainConfig& cfg, const Mesh& mesh);

enum class BondCase : std::uint8_t {
  interior_atomistic,
  interior_element,
  across_sub1,
  across_sub2,
  across_sub3,
  left_interface_sub1,
  left_interface_sub2,
  left_interface_sub3,
  right_interface_sub1,
  right_interface_sub2,
  right_interface_sub3
};

const char* to_string(BondCase c);

/// Continuum fragment of a bond inside one element (unwrapped coordinates;
/// elem indices may reach [K, 2K) for fragments past x = 1).
struct BondPiece {
  double lo = 0.0;
  double hi = 0.0;
  int elem = 0;
};

/// One interaction bond b = (i*eps, (i+r)*eps), i in 0..N-1, r in {1,2}.
struct Bond {
  int i = 0;
  int r = 1;
  BondCase label = BondCase::interior_atomistic;
  double a_lo = 0.0, a_hi = 0.0; // atomistic fragment (a_len == 0 if none)
  double a_len = 0.0;
  std::vector<BondPiece> c_pieces;

  double lo() const;
  double hi() const;
};

struct BondSet {
  std::vector<Bond> bonds; // size 2N: r=1 block then r=2 block
};

/// Splits every bond into its atomistic fragment and continuum element
/// pieces and labels it with the Appendix-A case. Throws ValidationError if
/// a bond would span more than two continuum elements.
BondSet classify_bonds(const ChainConfig& cfg, const Mesh& mesh);

/// Plain-text mesh serialization, bit-exact round trip.
/// Header line: "N <n> F <f> K <k>", then one node per line:
/// "<index> <x> <ell> <theta> <region-of-element>".
void write_mesh(std::ostream& os, const Mesh& mesh);
void write_mesh_file(const std::string& path, const Mesh& mesh);
Mesh read_mesh(std::istream& is);
Mesh read_mesh_file(const std::string& path);

} // namespace qc1d

#endif
