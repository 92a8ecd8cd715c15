#include "qc1d/qc.hpp"
#include "qc1d/errors.hpp"
#include "newton_common.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

namespace qc1d {

namespace {

// Linear functional of the nodal vector: s(y) = sum c_i y[idx_i] + f_coeff*F.
struct LinForm {
  int n = 0;
  std::array<int, 6> idx{};
  std::array<double, 6> c{};
  double f_coeff = 0.0;

  void add(int node, double w) {
    for (int i = 0; i < n; ++i) {
      if (idx[static_cast<std::size_t>(i)] == node) {
        c[static_cast<std::size_t>(i)] += w;
        return;
      }
    }
    idx[static_cast<std::size_t>(n)] = node;
    c[static_cast<std::size_t>(n)] = w;
    ++n;
  }
  double value(const std::vector<double>& y, double big_f) const {
    double acc = f_coeff * big_f;
    for (int i = 0; i < n; ++i) {
      acc += c[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    }
    return acc;
  }
};

// Evaluation stencil of the mesh field at an unwrapped position in (0, 2].
void add_eval(LinForm& form, const Mesh& mesh, double pos, double weight) {
  double shift = 0.0;
  if (pos > 1.0) {
    pos -= 1.0;
    shift = 1.0;
  }
  form.f_coeff += weight * shift;
  const int K = mesh.num_elems();
  const int k = mesh.elem_of(pos);
  const double hi = mesh.node(k);
  if (pos == hi) {
    form.add(k, weight);
    return;
  }
  const double lo = mesh.elem_lo(k);
  const double t = (pos - lo) / (hi - lo);
  form.add(k, weight * t);
  if (k == 0) {
    form.add(K - 1, weight * (1.0 - t));
    form.f_coeff -= weight * (1.0 - t);
  } else {
    form.add(k - 1, weight * (1.0 - t));
  }
}

// r * D over an interval: r * (y(hi) - y(lo)) / (hi - lo).
LinForm scaled_difference(const Mesh& mesh, double lo, double hi, int r) {
  LinForm form;
  const double w = static_cast<double>(r) / (hi - lo);
  add_eval(form, mesh, hi, w);
  add_eval(form, mesh, lo, -w);
  return form;
}

// r * (gradient of element m), m possibly in [K, 2K).
LinForm scaled_elem_gradient(const Mesh& mesh, int m, int r) {
  const int K = mesh.num_elems();
  const int base = m % K;
  LinForm form;
  const double w = static_cast<double>(r) / mesh.elem_size[static_cast<std::size_t>(base)];
  form.add(base, w);
  if (base == 0) {
    form.add(K - 1, -w);
    form.f_coeff += w;
  } else {
    form.add(base - 1, -w);
  }
  return form;
}

// Per-bond terms: pairs (weight, linear form); the bond energy is
// sum_t weight_t * phi(form_t(y)).
struct BondTerms {
  int count = 0;
  std::array<double, 3> weight{};
  std::array<LinForm, 3> form{};
};

std::vector<BondTerms> build_terms(const Mesh& mesh, const BondSet& bonds) {
  std::vector<BondTerms> terms;
  terms.reserve(bonds.bonds.size());
  for (const Bond& b : bonds.bonds) {
    BondTerms t;
    if (b.a_len > 0.0) {
      t.weight[static_cast<std::size_t>(t.count)] = b.a_len / static_cast<double>(b.r);
      t.form[static_cast<std::size_t>(t.count)] = scaled_difference(mesh, b.a_lo, b.a_hi, b.r);
      ++t.count;
    }
    for (const BondPiece& piece : b.c_pieces) {
      t.weight[static_cast<std::size_t>(t.count)] = (piece.hi - piece.lo) / static_cast<double>(b.r);
      t.form[static_cast<std::size_t>(t.count)] = scaled_elem_gradient(mesh, piece.elem, b.r);
      ++t.count;
    }
    terms.push_back(t);
  }
  return terms;
}

std::vector<BondTerms> terms_of(const QcState& state) {
  return build_terms(*state.mesh, *state.bonds);
}

void check_positive_gradients(const QcState& state) {
  const std::vector<double> g = state.y.derivative();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!(g[k] > 0.0)) {
      throw DomainError("qc: nonpositive deformation gradient on element " + std::to_string(k));
    }
  }
}

std::vector<double> mesh_force(const Mesh& mesh, const Field& f) {
  std::vector<double> fh(static_cast<std::size_t>(mesh.num_elems()));
  for (int k = 0; k < mesh.num_elems(); ++k) fh[static_cast<std::size_t>(k)] = f.eval(mesh.node(k));
  return fh;
}

double external_h(const QcState& state, const Field& f) {
  const Mesh& mesh = *state.mesh;
  const std::vector<double> fh = mesh_force(mesh, f);
  const Partition& part = state.y.partition();
  double acc = 0.0;
  for (int k = 0; k < mesh.num_elems(); ++k) {
    const double u = state.y.value(k) - state.cfg().big_f * mesh.node(k);
    acc += part.trapezoid_weight(k) * fh[static_cast<std::size_t>(k)] * u;
  }
  return acc;
}

} // namespace

QcState make_qc_state(std::shared_ptr<const Mesh> mesh, std::shared_ptr<const BondSet> bonds,
                      Field y) {
  if (y.kind() != FieldKind::deformation) {
    throw ValidationError("make_qc_state: field must be a deformation");
  }
  if (y.size() != mesh->num_elems()) {
    throw ValidationError("make_qc_state: field must live on the mesh partition");
  }
  return QcState{std::move(mesh), std::move(bonds), std::move(y)};
}

QcState homogeneous_qc_state(std::shared_ptr<const Mesh> mesh,
                             std::shared_ptr<const BondSet> bonds) {
  Field y = Field::homogeneous(Partition::of_mesh(*mesh), mesh->cfg.big_f);
  return QcState{std::move(mesh), std::move(bonds), std::move(y)};
}

double bond_difference(const Field& y, double lo, double hi) {
  if (!(hi > lo)) throw DomainError("bond_difference: empty interval");
  return (y.eval(hi) - y.eval(lo)) / (hi - lo);
}

double energy_qc(const QcState& state, const Potential& p, const Field& f) {
  check_positive_gradients(state);
  const std::vector<BondTerms> terms = terms_of(state);
  const std::vector<double>& y = state.y.values();
  const double big_f = state.cfg().big_f;
  double stored = 0.0;
  for (const BondTerms& t : terms) {
    for (int i = 0; i < t.count; ++i) {
      const double s = t.form[static_cast<std::size_t>(i)].value(y, big_f);
      if (!(s > 0.0)) {
        throw DomainError("qc: nonpositive stretch in a bond fragment");
      }
      stored += t.weight[static_cast<std::size_t>(i)] * p.phi(s);
    }
  }
  return stored - external_h(state, f);
}

std::vector<double> gradient_qc(const QcState& state, const Potential& p, const Field& f) {
  check_positive_gradients(state);
  const Mesh& mesh = *state.mesh;
  const int K = mesh.num_elems();
  const std::vector<BondTerms> terms = terms_of(state);
  const std::vector<double>& y = state.y.values();
  const double big_f = state.cfg().big_f;
  std::vector<double> g(static_cast<std::size_t>(K), 0.0);
  for (const BondTerms& t : terms) {
    for (int i = 0; i < t.count; ++i) {
      const LinForm& form = t.form[static_cast<std::size_t>(i)];
      const double s = form.value(y, big_f);
      if (!(s > 0.0)) throw DomainError("qc: nonpositive stretch in a bond fragment");
      const double w = t.weight[static_cast<std::size_t>(i)] * p.dphi(s);
      for (int j = 0; j < form.n; ++j) {
        g[static_cast<std::size_t>(form.idx[static_cast<std::size_t>(j)])] +=
            w * form.c[static_cast<std::size_t>(j)];
      }
    }
  }
  const std::vector<double> fh = mesh_force(mesh, f);
  const Partition& part = state.y.partition();
  for (int k = 0; k < K; ++k) {
    g[static_cast<std::size_t>(k)] -= part.trapezoid_weight(k) * fh[static_cast<std::size_t>(k)];
  }
  return g;
}

std::vector<double> QcHessian::apply(const std::vector<double>& v) const {
  std::vector<double> out(static_cast<std::size_t>(dofs), 0.0);
  for (const Entry& e : entries) {
    out[static_cast<std::size_t>(e.row)] += e.value * v[static_cast<std::size_t>(e.col)];
  }
  return out;
}

double QcHessian::quadratic_form(const std::vector<double>& v, const std::vector<double>& w) const {
  double acc = 0.0;
  for (const Entry& e : entries) {
    acc += w[static_cast<std::size_t>(e.row)] * e.value * v[static_cast<std::size_t>(e.col)];
  }
  return acc;
}

QcHessian hessian_qc(const QcState& state, const Potential& p) {
  check_positive_gradients(state);
  const int K = state.mesh->num_elems();
  const std::vector<BondTerms> terms = terms_of(state);
  const std::vector<double>& y = state.y.values();
  const double big_f = state.cfg().big_f;
  QcHessian h;
  h.dofs = K;
  for (const BondTerms& t : terms) {
    for (int i = 0; i < t.count; ++i) {
      const LinForm& form = t.form[static_cast<std::size_t>(i)];
      const double s = form.value(y, big_f);
      const double w = t.weight[static_cast<std::size_t>(i)] * p.d2phi(s);
      for (int a = 0; a < form.n; ++a) {
        for (int b = 0; b < form.n; ++b) {
          h.entries.push_back({form.idx[static_cast<std::size_t>(a)],
                               form.idx[static_cast<std::size_t>(b)],
                               w * form.c[static_cast<std::size_t>(a)] *
                                   form.c[static_cast<std::size_t>(b)]});
        }
      }
    }
  }
  return h;
}

std::pair<QcState, SolveReport> solve_qc(std::shared_ptr<const Mesh> mesh, const Potential& p,
                                         const Field& f, std::optional<QcState> initial,
                                         const NewtonOptions& opts) {
  auto bonds = initial.has_value() && initial->bonds
                   ? initial->bonds
                   : std::make_shared<const BondSet>(classify_bonds(mesh->cfg, *mesh));
  const int K = mesh->num_elems();
  auto part = Partition::of_mesh(*mesh);
  std::vector<double> y = initial.has_value()
                              ? initial->y.values()
                              : Field::homogeneous(part, mesh->cfg.big_f).values();

  const std::vector<BondTerms> terms = build_terms(*mesh, *bonds);
  const double big_f = mesh->cfg.big_f;
  const std::vector<double> fh = mesh_force(*mesh, f);
  std::vector<double> weights(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) weights[static_cast<std::size_t>(k)] = part->trapezoid_weight(k);
  double fx_mean = 0.0;
  for (int k = 0; k < K; ++k) {
    fx_mean += weights[static_cast<std::size_t>(k)] * big_f * mesh->node(k);
  }

  auto stretches = [&](const std::vector<double>& v) {
    std::vector<double> d(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
      const double prev = k == 0 ? v[static_cast<std::size_t>(K - 1)] - big_f
                                 : v[static_cast<std::size_t>(k - 1)];
      d[static_cast<std::size_t>(k)] =
          (v[static_cast<std::size_t>(k)] - prev) / mesh->elem_size[static_cast<std::size_t>(k)];
    }
    return d;
  };

  detail::NewtonProblem prob;
  prob.dofs = K;
  prob.stretch_floor = p.r_star * opts.min_stretch_floor_fraction;
  prob.energy = [&](const std::vector<double>& v) {
    double stored = 0.0;
    for (const BondTerms& t : terms) {
      for (int i = 0; i < t.count; ++i) {
        const double s = t.form[static_cast<std::size_t>(i)].value(v, big_f);
        if (!(s > 0.0)) throw DomainError("qc: nonpositive stretch in a bond fragment");
        stored += t.weight[static_cast<std::size_t>(i)] * p.phi(s);
      }
    }
    double ext = 0.0;
    for (int k = 0; k < K; ++k) {
      ext += weights[static_cast<std::size_t>(k)] * fh[static_cast<std::size_t>(k)] *
             (v[static_cast<std::size_t>(k)] - big_f * mesh->node(k));
    }
    return stored - ext;
  };
  prob.gradient = [&](const std::vector<double>& v) {
    std::vector<double> g(static_cast<std::size_t>(K), 0.0);
    for (const BondTerms& t : terms) {
      for (int i = 0; i < t.count; ++i) {
        const LinForm& form = t.form[static_cast<std::size_t>(i)];
        const double s = form.value(v, big_f);
        if (!(s > 0.0)) throw DomainError("qc: nonpositive stretch in a bond fragment");
        const double w = t.weight[static_cast<std::size_t>(i)] * p.dphi(s);
        for (int j = 0; j < form.n; ++j) {
          g[static_cast<std::size_t>(form.idx[static_cast<std::size_t>(j)])] +=
              w * form.c[static_cast<std::size_t>(j)];
        }
      }
    }
    for (int k = 0; k < K; ++k) {
      g[static_cast<std::size_t>(k)] -=
          weights[static_cast<std::size_t>(k)] * fh[static_cast<std::size_t>(k)];
    }
    return g;
  };
  prob.hessian = [&](const std::vector<double>& v) {
    std::vector<Eigen::Triplet<double>> trips;
    for (const BondTerms& t : terms) {
      for (int i = 0; i < t.count; ++i) {
        const LinForm& form = t.form[static_cast<std::size_t>(i)];
        const double s = form.value(v, big_f);
        const double w = t.weight[static_cast<std::size_t>(i)] * p.d2phi(s);
        for (int a = 0; a < form.n; ++a) {
          for (int b = 0; b < form.n; ++b) {
            trips.emplace_back(form.idx[static_cast<std::size_t>(a)],
                               form.idx[static_cast<std::size_t>(b)],
                               w * form.c[static_cast<std::size_t>(a)] *
                                   form.c[static_cast<std::size_t>(b)]);
          }
        }
      }
    }
    return trips;
  };
  prob.min_stretch = [&](const std::vector<double>& v) {
    const std::vector<double> d = stretches(v);
    return *std::min_element(d.begin(), d.end());
  };
  prob.regauge_state = [&](std::vector<double>& v) {
    double m = 0.0;
    for (int k = 0; k < K; ++k) m += weights[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(k)];
    const double c = m - fx_mean;
    for (double& z : v) z -= c;
  };
  prob.regauge_step = [&](std::vector<double>& v) {
    double m = 0.0;
    for (int k = 0; k < K; ++k) m += weights[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(k)];
    for (double& z : v) z -= m;
  };

  SolveReport report = detail::newton_minimize(prob, y, opts);
  Field yf(part, std::move(y), FieldKind::deformation, big_f);
  return {QcState{std::move(mesh), std::move(bonds), std::move(yf)}, std::move(report)};
}

} // namespace qc1d
