#include "qc1d/atomistic.hpp"
#include "qc1d/errors.hpp"
#include "newton_common.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace qc1d {

namespace {

// Stretches of one period of a deformation vector (periodic wrap adds F).
std::vector<double> deformation_stretches(const ChainConfig& cfg, const std::vector<double>& y) {
  const int n = cfg.n_atoms;
  const double eps = cfg.eps();
  std::vector<double> d(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double prev =
        j == 0 ? y[static_cast<std::size_t>(n - 1)] - cfg.big_f : y[static_cast<std::size_t>(j - 1)];
    d[static_cast<std::size_t>(j)] = (y[static_cast<std::size_t>(j)] - prev) / eps;
  }
  return d;
}

// Discrete derivative of a plain N-periodic vector (test functions).
std::vector<double> periodic_diff(const std::vector<double>& v, double eps) {
  const int n = static_cast<int>(v.size());
  std::vector<double> d(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    d[static_cast<std::size_t>(j)] =
        (v[static_cast<std::size_t>(j)] - v[static_cast<std::size_t>((j + n - 1) % n)]) / eps;
  }
  return d;
}

void check_stretches(const std::vector<double>& d) {
  const int n = static_cast<int>(d.size());
  for (int j = 0; j < n; ++j) {
    if (!(d[static_cast<std::size_t>(j)] > 0.0)) {
      throw DomainError("atomistic: nonpositive stretch in bond ending at atom " +
                        std::to_string(j + 1));
    }
    if (!(d[static_cast<std::size_t>(j)] + d[static_cast<std::size_t>((j + 1) % n)] > 0.0)) {
      throw DomainError("atomistic: nonpositive next-nearest stretch at atom " +
                        std::to_string(j + 1));
    }
  }
}

double energy_raw(const ChainConfig& cfg, const Potential& p, const std::vector<double>& y,
                  const Field& f) {
  const int n = cfg.n_atoms;
  const double eps = cfg.eps();
  const std::vector<double> d = deformation_stretches(cfg, y);
  check_stretches(d);
  double stored = 0.0;
  for (int j = 0; j < n; ++j) {
    stored += p.phi(d[static_cast<std::size_t>(j)]);
    stored += p.phi(d[static_cast<std::size_t>(j)] + d[static_cast<std::size_t>((j + 1) % n)]);
  }
  stored *= eps;
  double ext = 0.0;
  for (int j = 0; j < n; ++j) {
    ext += eps * f.value(j) * (y[static_cast<std::size_t>(j)] - cfg.big_f * cfg.atom_x(j + 1));
  }
  return stored - ext;
}

std::vector<double> gradient_raw(const ChainConfig& cfg, const Potential& p,
                                 const std::vector<double>& y, const Field& f) {
  const int n = cfg.n_atoms;
  const double eps = cfg.eps();
  const std::vector<double> d = deformation_stretches(cfg, y);
  check_stretches(d);
  std::vector<double> dphi_nn(static_cast<std::size_t>(n));
  std::vector<double> dphi_nnn(static_cast<std::size_t>(n)); // bond (j-1, j+1) stored at j
  for (int j = 0; j < n; ++j) {
    dphi_nn[static_cast<std::size_t>(j)] = p.dphi(d[static_cast<std::size_t>(j)]);
    dphi_nnn[static_cast<std::size_t>(j)] =
        p.dphi(d[static_cast<std::size_t>(j)] + d[static_cast<std::size_t>((j + 1) % n)]);
  }
  // E'_a[v] = sum_j dphi_nn_j (v_j - v_{j-1}) + sum_j dphi_nnn_j (v_{j+1} - v_{j-1})
  //           - eps sum f_j v_j.
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const int jm = (j + n - 1) % n;
    const int jp = (j + 1) % n;
    double acc = dphi_nn[static_cast<std::size_t>(j)] - dphi_nn[static_cast<std::size_t>(jp)];
    acc += dphi_nnn[static_cast<std::size_t>(jm)] - dphi_nnn[static_cast<std::size_t>(jp)];
    acc -= eps * f.value(j);
    g[static_cast<std::size_t>(j)] = acc;
  }
  return g;
}

} // namespace

AtomisticState make_atomistic_state(const ChainConfig& cfg, Field y) {
  if (y.kind() != FieldKind::deformation) {
    throw ValidationError("make_atomistic_state: field must be a deformation");
  }
  if (y.size() != cfg.n_atoms) {
    throw ValidationError("make_atomistic_state: field must live on the lattice partition");
  }
  return AtomisticState{cfg, std::move(y)};
}

AtomisticState homogeneous_state(const ChainConfig& cfg) {
  return AtomisticState{cfg, Field::homogeneous(Partition::uniform(cfg.n_atoms), cfg.big_f)};
}

double energy_a(const AtomisticState& state, const Potential& p, const Field& f) {
  return energy_raw(state.cfg, p, state.y.values(), f);
}

std::vector<double> gradient_a(const AtomisticState& state, const Potential& p, const Field& f) {
  return gradient_raw(state.cfg, p, state.y.values(), f);
}

double AtomisticHessian::quadratic_form_raw(const std::vector<double>& v) const {
  const int n = cfg.n_atoms;
  const double eps = cfg.eps();
  const std::vector<double> dv = periodic_diff(v, eps);
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    const int jp = (j + 1) % n;
    const double s = dv[static_cast<std::size_t>(j)] + dv[static_cast<std::size_t>(jp)];
    acc += phi2_nn[static_cast<std::size_t>(j)] * dv[static_cast<std::size_t>(j)] *
           dv[static_cast<std::size_t>(j)];
    acc += phi2_nnn[static_cast<std::size_t>(j)] * s * s;
  }
  return eps * acc;
}

double AtomisticHessian::quadratic_form_local(const std::vector<double>& v) const {
  const int n = cfg.n_atoms;
  const double eps = cfg.eps();
  const std::vector<double> dv = periodic_diff(v, eps);
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    const int jp = (j + 1) % n;
    const double ddv = (dv[static_cast<std::size_t>(jp)] - dv[static_cast<std::size_t>(j)]) / eps;
    acc += A[static_cast<std::size_t>(j)] * dv[static_cast<std::size_t>(j)] *
           dv[static_cast<std::size_t>(j)];
    // the strain-gradient identity carries eps^2 on the second difference
    acc += B[static_cast<std::size_t>(j)] * eps * eps * ddv * ddv;
  }
  return eps * acc;
}

std::vector<double> AtomisticHessian::apply(const std::vector<double>& v) const {
  const int n = cfg.n_atoms;
  const double eps = cfg.eps();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  auto add = [&](int a, int b, double w) {
    const double z = w * (v[static_cast<std::size_t>(a)] - v[static_cast<std::size_t>(b)]);
    out[static_cast<std::size_t>(a)] += z;
    out[static_cast<std::size_t>(b)] -= z;
  };
  for (int j = 0; j < n; ++j) {
    const int jm = (j + n - 1) % n;
    const int jp = (j + 1) % n;
    add(j, jm, phi2_nn[static_cast<std::size_t>(j)] / eps);
    add(jp, jm, phi2_nnn[static_cast<std::size_t>(j)] / eps);
  }
  return out;
}

AtomisticHessian hessian_a(const AtomisticState& state, const Potential& p) {
  const ChainConfig& cfg = state.cfg;
  const int n = cfg.n_atoms;
  const std::vector<double> d = state.y.derivative();
  check_stretches(d);
  AtomisticHessian h;
  h.cfg = cfg;
  h.phi2_nn.resize(static_cast<std::size_t>(n));
  h.phi2_nnn.resize(static_cast<std::size_t>(n));
  h.A.resize(static_cast<std::size_t>(n));
  h.B.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    h.phi2_nn[static_cast<std::size_t>(j)] = p.d2phi(d[static_cast<std::size_t>(j)]);
    h.phi2_nnn[static_cast<std::size_t>(j)] =
        p.d2phi(d[static_cast<std::size_t>(j)] + d[static_cast<std::size_t>((j + 1) % n)]);
  }
  for (int j = 0; j < n; ++j) {
    const int jm = (j + n - 1) % n;
    h.A[static_cast<std::size_t>(j)] = h.phi2_nn[static_cast<std::size_t>(j)] +
                                       2.0 * h.phi2_nnn[static_cast<std::size_t>(jm)] +
                                       2.0 * h.phi2_nnn[static_cast<std::size_t>(j)];
    h.B[static_cast<std::size_t>(j)] = -h.phi2_nnn[static_cast<std::size_t>(j)];
  }
  return h;
}

std::pair<AtomisticState, SolveReport> solve_atomistic(const ChainConfig& cfg, const Potential& p,
                                                       const Field& f,
                                                       std::optional<AtomisticState> initial,
                                                       const NewtonOptions& opts) {
  const int n = cfg.n_atoms;
  const double eps = cfg.eps();
  std::vector<double> y = initial.has_value()
                              ? initial->y.values()
                              : Field::homogeneous(Partition::uniform(n), cfg.big_f).values();

  double fx_mean = 0.0;
  for (int j = 0; j < n; ++j) fx_mean += eps * cfg.big_f * cfg.atom_x(j + 1);

  detail::NewtonProblem prob;
  prob.dofs = n;
  prob.stretch_floor = p.r_star * opts.min_stretch_floor_fraction;
  prob.energy = [&](const std::vector<double>& v) { return energy_raw(cfg, p, v, f); };
  prob.gradient = [&](const std::vector<double>& v) { return gradient_raw(cfg, p, v, f); };
  prob.min_stretch = [&](const std::vector<double>& v) {
    const std::vector<double> d = deformation_stretches(cfg, v);
    return *std::min_element(d.begin(), d.end());
  };
  prob.regauge_state = [&](std::vector<double>& v) {
    double m = 0.0;
    for (int j = 0; j < n; ++j) m += eps * v[static_cast<std::size_t>(j)];
    const double c = m - fx_mean; // displacement mean of y - Fx
    for (double& z : v) z -= c;
  };
  prob.regauge_step = [&](std::vector<double>& v) {
    double m = 0.0;
    for (int j = 0; j < n; ++j) m += eps * v[static_cast<std::size_t>(j)];
    for (double& z : v) z -= m;
  };
  prob.hessian = [&](const std::vector<double>& v) {
    const std::vector<double> d = deformation_stretches(cfg, v);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(8 * n));
    auto add_pair = [&](int a, int b, double w) {
      trips.emplace_back(a, a, w);
      trips.emplace_back(b, b, w);
      trips.emplace_back(a, b, -w);
      trips.emplace_back(b, a, -w);
    };
    for (int j = 0; j < n; ++j) {
      const int jm = (j + n - 1) % n;
      const int jp = (j + 1) % n;
      add_pair(j, jm, p.d2phi(d[static_cast<std::size_t>(j)]) / eps);
      add_pair(jp, jm,
               p.d2phi(d[static_cast<std::size_t>(j)] + d[static_cast<std::size_t>(jp)]) / eps);
    }
    return trips;
  };

  SolveReport report = detail::newton_minimize(prob, y, opts);
  Field yf(Partition::uniform(n), std::move(y), FieldKind::deformation, cfg.big_f);
  return {AtomisticState{cfg, std::move(yf)}, std::move(report)};
}

} // namespace qc1d
