#include "qc1d/field.hpp"
#include "qc1d/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace qc1d {

std::shared_ptr<const Partition> Partition::from_nodes(std::vector<double> nodes) {
  auto p = std::make_shared<Partition>();
  p->x = std::move(nodes);
  if (p->x.empty() || p->x.back() != 1.0) {
    throw ValidationError("Partition: last node must be 1.0");
  }
  p->elem_size.resize(p->x.size());
  for (std::size_t j = 0; j < p->x.size(); ++j) {
    const double lo = j == 0 ? 0.0 : p->x[j - 1];
    p->elem_size[j] = p->x[j] - lo;
    if (!(p->elem_size[j] > 0.0)) throw ValidationError("Partition: nodes not strictly sorted");
  }
  return p;
}

std::shared_ptr<const Partition> Partition::uniform(int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  const double eps = 1.0 / static_cast<double>(n);
  for (int j = 0; j < n; ++j) xs[static_cast<std::size_t>(j)] = static_cast<double>(j + 1) * eps;
  xs.back() = 1.0;
  return from_nodes(std::move(xs));
}

std::shared_ptr<const Partition> Partition::of_mesh(const Mesh& mesh) {
  return from_nodes(mesh.x);
}

std::shared_ptr<const Partition> Partition::of_merged(const MergedPartition& merged) {
  return from_nodes(merged.x);
}

double Partition::trapezoid_weight(int j) const {
  const int n = count();
  const std::size_t ju = static_cast<std::size_t>(j);
  const double next = elem_size[static_cast<std::size_t>((j + 1) % n)];
  return 0.5 * (elem_size[ju] + next);
}

Field::Field(std::shared_ptr<const Partition> part, std::vector<double> values, FieldKind kind,
             double big_f)
    : part_(std::move(part)), v_(std::move(values)), kind_(kind), big_f_(big_f) {
  if (static_cast<int>(v_.size()) != part_->count()) {
    throw ValidationError("Field: value count does not match partition");
  }
}

Field Field::zero(std::shared_ptr<const Partition> part) {
  std::vector<double> v(static_cast<std::size_t>(part->count()), 0.0);
  return Field(std::move(part), std::move(v), FieldKind::displacement);
}

Field Field::homogeneous(std::shared_ptr<const Partition> part, double big_f) {
  std::vector<double> v(static_cast<std::size_t>(part->count()));
  for (int j = 0; j < part->count(); ++j) {
    v[static_cast<std::size_t>(j)] = big_f * part->x[static_cast<std::size_t>(j)];
  }
  return Field(std::move(part), std::move(v), FieldKind::deformation, big_f);
}

double Field::eval(double x) const {
  const double shift_per_period = big_f();
  double offset = 0.0;
  while (x > 1.0) {
    x -= 1.0;
    offset += shift_per_period;
  }
  while (x <= 0.0) {
    x += 1.0;
    offset -= shift_per_period;
  }
  const auto& xs = part_->x;
  const auto it = std::lower_bound(xs.begin(), xs.end(), x);
  const int j = it == xs.end() ? part_->count() - 1 : static_cast<int>(it - xs.begin());
  const std::size_t ju = static_cast<std::size_t>(j);
  if (xs[ju] == x) return v_[ju] + offset; // exact at nodes
  const int n = part_->count();
  const double hi = xs[ju];
  const double lo = j == 0 ? 0.0 : xs[ju - 1];
  const double vlo = j == 0 ? v_[static_cast<std::size_t>(n - 1)] - shift_per_period : v_[ju - 1];
  const double t = (x - lo) / (hi - lo);
  return (1.0 - t) * vlo + t * v_[ju] + offset;
}

std::vector<double> Field::derivative() const {
  const int n = part_->count();
  std::vector<double> d(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const std::size_t ju = static_cast<std::size_t>(j);
    const double prev = j == 0 ? v_[static_cast<std::size_t>(n - 1)] - big_f() : v_[ju - 1];
    d[ju] = (v_[ju] - prev) / part_->elem_size[ju];
  }
  return d;
}

std::vector<double> Field::second_derivative() const {
  const int n = part_->count();
  const std::vector<double> d = derivative();
  std::vector<double> dd(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double avg =
        0.5 * (part_->elem_size[static_cast<std::size_t>(j)] +
               part_->elem_size[static_cast<std::size_t>((j + 1) % n)]);
    dd[static_cast<std::size_t>(j)] =
        (d[static_cast<std::size_t>((j + 1) % n)] - d[static_cast<std::size_t>(j)]) / avg;
  }
  return dd;
}

double Field::min_derivative() const {
  const std::vector<double> d = derivative();
  return *std::min_element(d.begin(), d.end());
}

double Field::displacement_value(int j) const {
  const std::size_t ju = static_cast<std::size_t>(j);
  if (kind_ == FieldKind::deformation) return v_[ju] - big_f_ * part_->x[ju];
  return v_[ju];
}

double Field::trapezoid_mean() const {
  double mean = 0.0;
  for (int j = 0; j < part_->count(); ++j) {
    mean += part_->trapezoid_weight(j) * displacement_value(j);
  }
  return mean;
}

Field Field::shifted(double c) const {
  std::vector<double> v = v_;
  for (double& z : v) z += c;
  return Field(part_, std::move(v), kind_, big_f_);
}

Field Field::gauged() const { return shifted(-trapezoid_mean()); }

Field interpolate(const Field& src, std::shared_ptr<const Partition> target) {
  std::vector<double> v(static_cast<std::size_t>(target->count()));
  for (int j = 0; j < target->count(); ++j) {
    v[static_cast<std::size_t>(j)] = src.eval(target->x[static_cast<std::size_t>(j)]);
  }
  return Field(std::move(target), std::move(v), src.kind(), src.big_f());
}

Field transfer_to_mesh(const Field& u, std::shared_ptr<const Partition> mesh_part) {
  Field ih = interpolate(u, std::move(mesh_part));
  return ih.shifted(-ih.trapezoid_mean());
}

Field transfer_to_mesh(const Field& u, const Mesh& mesh) {
  return transfer_to_mesh(u, Partition::of_mesh(mesh));
}

Field transfer_to_lattice(const Field& uh, const ChainConfig& cfg) {
  Field ie = interpolate(uh, Partition::uniform(cfg.n_atoms));
  // eps * sum u(ell*eps) is the uniform-partition trapezoidal mean.
  double mean = 0.0;
  const double eps = cfg.eps();
  for (int j = 0; j < ie.size(); ++j) mean += eps * ie.displacement_value(j);
  return ie.shifted(-mean);
}

double weighted_norm(std::span<const double> values, std::span<const double> weights, int p,
                     std::span<const int> idx) {
  const auto value_at = [&](std::size_t pos) {
    const std::size_t j = idx.empty() ? pos : static_cast<std::size_t>(idx[pos]);
    return std::pair<double, double>(values[j], weights[j]);
  };
  const std::size_t count = idx.empty() ? values.size() : idx.size();
  if (p == 0) { // infinity
    if (count == 0) throw DomainError("weighted_norm: empty index set with p = inf");
    double best = 0.0;
    for (std::size_t s = 0; s < count; ++s) best = std::max(best, std::abs(value_at(s).first));
    return best;
  }
  if (p != 1 && p != 2) throw DomainError("weighted_norm: p must be 1, 2 or inf");
  double acc = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    const auto [v, w] = value_at(s);
    acc += p == 1 ? w * std::abs(v) : w * v * v;
  }
  return p == 1 ? acc : std::sqrt(acc);
}

double derivative_l2(const Field& v) {
  const std::vector<double> d = v.derivative();
  return weighted_norm(d, v.partition().elem_size, 2);
}

double inner_product(const Field& f, const Field& g, const Partition& part) {
  double acc = 0.0;
  for (int j = 0; j < part.count(); ++j) {
    const double x = part.x[static_cast<std::size_t>(j)];
    acc += part.trapezoid_weight(j) * f.eval(x) * g.eval(x);
  }
  return acc;
}

void write_field(std::ostream& os, const Field& f) {
  os << std::setprecision(17);
  for (int j = 0; j < f.size(); ++j) {
    os << f.partition().x[static_cast<std::size_t>(j)] << " " << f.value(j) << "\n";
  }
}

void write_field_file(const std::string& path, const Field& f) {
  std::ofstream os(path);
  if (!os) throw ValidationError("write_field_file: cannot open " + path);
  write_field(os, f);
}

Field read_field(std::istream& is, FieldKind kind, double big_f) {
  std::vector<double> xs, vs;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double x, v;
    if (!(ls >> x >> v)) throw ValidationError("read_field: malformed line: " + line);
    xs.push_back(x);
    vs.push_back(v);
  }
  return Field(Partition::from_nodes(std::move(xs)), std::move(vs), kind, big_f);
}

Field read_field_file(const std::string& path, FieldKind kind, double big_f) {
  std::ifstream is(path);
  if (!is) throw ValidationError("read_field_file: cannot open " + path);
  return read_field(is, kind, big_f);
}

} // namespace qc1d
