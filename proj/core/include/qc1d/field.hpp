#ifndef QC1D_FIELD_HPP
#define QC1D_FIELD_HPP

#include "qc1d/lattice.hpp"

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace qc1d {

/// Node set of one period, shared between fields. Nodes live in (0,1] and
/// the last node is the period boundary 1.0; element j is [x[j-1], x[j]]
/// with x[-1] := 0.
struct Partition {
  std::vector<double> x;
  std::vector<double> elem_size;

  static std::shared_ptr<const Partition> uniform(int n);
  static std::shared_ptr<const Partition> of_mesh(const Mesh& mesh);
  static std::shared_ptr<const Partition> of_merged(const MergedPartition& merged);
  static std::shared_ptr<const Partition> from_nodes(std::vector<double> nodes);

  int count() const { return static_cast<int>(x.size()); }
  /// Trapezoidal weight of node j: (x[j+1] - x[j-1]) / 2, periodic.
  double trapezoid_weight(int j) const;
};

enum class FieldKind { displacement, deformation };

/// 1-periodic continuous piecewise-linear function: value(x + 1) = value(x)
/// for displacements, value(x) + F for deformations. Immutable after
/// construction.
class Field {
public:
  Field() = default;
  Field(std::shared_ptr<const Partition> part, std::vector<double> values, FieldKind kind,
        double big_f = 0.0);

  static Field zero(std::shared_ptr<const Partition> part);
  /// Homogeneous deformation y = F x sampled on the partition.
  static Field homogeneous(std::shared_ptr<const Partition> part, double big_f);

  const Partition& partition() const { return *part_; }
  std::shared_ptr<const Partition> partition_ptr() const { return part_; }
  FieldKind kind() const { return kind_; }
  double big_f() const { return kind_ == FieldKind::deformation ? big_f_ : 0.0; }
  int size() const { return static_cast<int>(v_.size()); }
  const std::vector<double>& values() const { return v_; }
  double value(int j) const { return v_[static_cast<std::size_t>(j)]; }

  /// Evaluate anywhere on the real line (periodic extension). Elements are
  /// taken half-open [x_{j-1}, x_j) with periodic wrap; values at nodes are
  /// returned exactly.
  double eval(double x) const;

  /// First discrete derivative per element: d[j] = (v[j]-v[j-1])/size[j].
  std::vector<double> derivative() const;
  /// Second discrete derivative over averaged sizes:
  /// dd[j] = (d[j+1]-d[j]) / avg_j, avg_j = (size[j]+size[j+1])/2, periodic.
  std::vector<double> second_derivative() const;

  double min_derivative() const;

  /// Displacement part (v - F x for deformations, v itself otherwise).
  double displacement_value(int j) const;
  /// Weighted (trapezoidal) mean of the displacement part.
  double trapezoid_mean() const;

  /// Returns a copy whose displacement part has zero trapezoidal mean.
  Field gauged() const;
  Field shifted(double c) const;

private:
  std::shared_ptr<const Partition> part_;
  std::vector<double> v_;
  FieldKind kind_ = FieldKind::displacement;
  double big_f_ = 0.0;
};

/// P1 nodal interpolation of src onto a target partition.
Field interpolate(const Field& src, std::shared_ptr<const Partition> target);

/// J_U: mean-corrected interpolation onto the mesh partition,
/// J_U u = I_h u - sum_k (x_{k+1}-x_{k-1})/2 * u(x_k).
Field transfer_to_mesh(const Field& u, const Mesh& mesh);
Field transfer_to_mesh(const Field& u, std::shared_ptr<const Partition> mesh_part);

/// J_{U_qc}: mean-corrected interpolation onto the lattice,
/// J_{U_qc} u_h = I_eps u_h - eps * sum_ell u_h(ell * eps).
Field transfer_to_lattice(const Field& uh, const ChainConfig& cfg);

/// Weighted lp norm of a vector: (sum_j w_j |v_j|^p)^{1/p}, max for p=inf
/// (pass p = 0 for infinity). `idx` restricts the sum; empty idx means all
/// indices. Throws DomainError for an empty index range with p = inf.
double weighted_norm(std::span<const double> values, std::span<const double> weights, int p,
                     std::span<const int> idx = {});

/// L2 norm of the derivative of a piecewise-linear field; equals the
/// eps-weighted l2 norm of the discrete derivative.
double derivative_l2(const Field& v);

/// <f,g>_m = sum_j w_j f(x_j) g(x_j) with the trapezoidal weights of the
/// given partition; equals the integral of I_m(f g) over one period.
double inner_product(const Field& f, const Field& g, const Partition& part);

/// Plain-text dump "x value" per line; reader skips '#' comments.
void write_field(std::ostream& os, const Field& f);
void write_field_file(const std::string& path, const Field& f);
Field read_field(std::istream& is, FieldKind kind, double big_f = 0.0);
Field read_field_file(const std::string& path, FieldKind kind, double big_f = 0.0);

} // namespace qc1d

#endif
