#include "qc1d/estimator.hpp"
#include "qc1d/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace qc1d {

namespace {

// Gradient of the mesh element m (periodic image for m >= K).
double grad_at(const std::vector<double>& g, int m, int K) {
  return g[static_cast<std::size_t>(((m % K) + K) % K)];
}

// Jump terms at an interior continuum boundary node.
// gl/gr: element gradients left/right of the node, th = theta.
void interior_jumps(const Potential& p, double th, double gl, double gr, double eps,
                    JumpTriple& out) {
  const double x1 = (1.0 - th) * gr + th * gl;
  const double x2 = (1.0 - th) * gr + (1.0 + th) * gl;
  const double x3 = (2.0 - th) * gr + th * gl;
  out.grad[0] = p.dphi(x2) - p.dphi(2.0 * gl);
  out.grad[1] = (p.dphi(x1) - th * p.dphi(gl) - (1.0 - th) * p.dphi(gr)) +
                (p.dphi(x2) - (1.0 - th) * p.dphi(2.0 * gr) - th * p.dphi(2.0 * gl)) +
                (p.dphi(x3) - (1.0 - th) * p.dphi(2.0 * gr) - th * p.dphi(2.0 * gl));
  out.grad[2] = p.dphi(x3) - p.dphi(2.0 * gr);
  out.energy[0] =
      eps * (p.phi(x2) - 0.5 * (1.0 + th) * p.phi(2.0 * gl) - 0.5 * (1.0 - th) * p.phi(2.0 * gr));
  out.energy[1] = eps * (p.phi(x1) - th * p.phi(gl) - (1.0 - th) * p.phi(gr));
  out.energy[2] =
      eps * (p.phi(x3) - 0.5 * th * p.phi(2.0 * gl) - 0.5 * (2.0 - th) * p.phi(2.0 * gr));
}

// Jump terms at a left interface node La (continuum gl left; atomistic
// elements g1 on (x_k, (ell+1)eps) and g2 on ((ell+1)eps, (ell+2)eps)).
void left_interface_jumps(const Potential& p, double th, double gl, double g1, double g2,
                          double eps, JumpTriple& out) {
  const double x1 = (1.0 - th) * g1 + th * gl;
  const double x2 = (1.0 - th) * g1 + (1.0 + th) * gl;
  const double a = (2.0 * g2 + 2.0 * (1.0 - th) * g1) / (2.0 - th);
  const double b = g2 + (1.0 - th) * g1 + th * gl;
  out.grad[0] = p.dphi(x2) - p.dphi(2.0 * gl);
  out.grad[1] = (p.dphi(x1) - (1.0 - th) * p.dphi(g1) - th * p.dphi(gl)) +
                (p.dphi(x2) - (1.0 - th) * p.dphi(2.0 * g1) - th * p.dphi(2.0 * gl)) +
                (p.dphi(b) - (1.0 - th) * p.dphi(a) - th * p.dphi(2.0 * gl));
  out.grad[2] = p.dphi(b) - p.dphi(a);
  out.energy[0] =
      eps * (p.phi(x2) - 0.5 * (1.0 - th) * p.phi(2.0 * g1) - 0.5 * (1.0 + th) * p.phi(2.0 * gl));
  out.energy[1] = eps * (p.phi(x1) - (1.0 - th) * p.phi(g1) - th * p.phi(gl));
  out.energy[2] = eps * (p.phi(b) - 0.5 * (2.0 - th) * p.phi(a) - 0.5 * th * p.phi(2.0 * gl));
}

// Jump terms at a right interface node Ra (atomistic ga on
// ((ell-1)eps, ell*eps), gb on (ell*eps, x_k); continuum gr right).
void right_interface_jumps(const Potential& p, double th, double ga, double gb, double gr,
                           double eps, JumpTriple& out) {
  const double x1 = (1.0 - th) * gr + th * gb;
  const double x3 = (2.0 - th) * gr + th * gb;
  const double c = (2.0 * th * gb + 2.0 * ga) / (1.0 + th);
  const double d = (1.0 - th) * gr + th * gb + ga;
  out.grad[0] = p.dphi(d) - p.dphi(c);
  out.grad[1] = (p.dphi(x1) - th * p.dphi(gb) - (1.0 - th) * p.dphi(gr)) +
                (p.dphi(d) - th * p.dphi(c) - (1.0 - th) * p.dphi(2.0 * gr)) +
                (p.dphi(x3) - th * p.dphi(2.0 * gb) - (1.0 - th) * p.dphi(2.0 * gr));
  out.grad[2] = p.dphi(x3) - p.dphi(2.0 * gr);
  out.energy[0] =
      eps * (p.phi(d) - 0.5 * (1.0 + th) * p.phi(c) - 0.5 * (1.0 - th) * p.phi(2.0 * gr));
  out.energy[1] = eps * (p.phi(x1) - th * p.phi(gb) - (1.0 - th) * p.phi(gr));
  out.energy[2] =
      eps * (p.phi(x3) - 0.5 * th * p.phi(2.0 * gb) - 0.5 * (2.0 - th) * p.phi(2.0 * gr));
}

} // namespace

StoredResidual stored_energy_residual(const QcState& y_qc, const Potential& p) {
  const Mesh& mesh = *y_qc.mesh;
  const ChainConfig& cfg = mesh.cfg;
  const int K = mesh.num_elems();
  const double eps = cfg.eps();
  const std::vector<double> g = y_qc.elem_gradients();
  for (double v : g) {
    if (!(v > 0.0)) throw DomainError("stored_energy_residual: nonpositive element gradient");
  }

  StoredResidual sr;
  sr.eta_e.assign(static_cast<std::size_t>(K), 0.0);
  sr.eta_Ee.assign(static_cast<std::size_t>(K), 0.0);

  for (int k = 0; k < K; ++k) {
    const NodeKind kind = mesh.node_kind[static_cast<std::size_t>(k)];
    if (kind == NodeKind::interior_atomistic) continue;
    JumpTriple t;
    t.node = k;
    t.ell = mesh.ell[static_cast<std::size_t>(k)];
    t.theta = mesh.theta[static_cast<std::size_t>(k)];
    t.kind = kind;
    const double th = t.theta;
    if (kind == NodeKind::interior_continuum) {
      interior_jumps(p, th, grad_at(g, k, K), grad_at(g, k + 1, K), eps, t);
    } else if (kind == NodeKind::left_interface) {
      left_interface_jumps(p, th, grad_at(g, k, K), grad_at(g, k + 1, K), grad_at(g, k + 2, K),
                           eps, t);
    } else {
      const double gb = grad_at(g, k, K);
      const double ga = th > 0.0 ? grad_at(g, k - 1, K) : gb;
      right_interface_jumps(p, th, ga, gb, grad_at(g, k + 1, K), eps, t);
    }
    sr.triples.push_back(t);
  }

  // Distribute node contributions to elements: interior nodes split 1/2
  // between their two continuum neighbours, interface triples go entirely to
  // the continuum side.
  std::vector<double> sq(static_cast<std::size_t>(K), 0.0);
  std::vector<double> eabs(static_cast<std::size_t>(K), 0.0);
  std::vector<NodeKind> kind_of(static_cast<std::size_t>(K), NodeKind::interior_atomistic);
  for (const JumpTriple& t : sr.triples) {
    double s = 0.0, ea = 0.0;
    for (int j = 0; j < 3; ++j) {
      s += t.grad[static_cast<std::size_t>(j)] * t.grad[static_cast<std::size_t>(j)];
      ea += std::abs(t.energy[static_cast<std::size_t>(j)]);
    }
    sq[static_cast<std::size_t>(t.node)] = s;
    eabs[static_cast<std::size_t>(t.node)] = ea;
    kind_of[static_cast<std::size_t>(t.node)] = t.kind;
  }
  for (int m : mesh.kc) {
    const int left = (m + K - 1) % K;
    const int right = m;
    double acc = 0.0, acc_e = 0.0;
    if (kind_of[static_cast<std::size_t>(left)] != NodeKind::interior_atomistic) {
      const double w =
          kind_of[static_cast<std::size_t>(left)] == NodeKind::right_interface ? 1.0 : 0.5;
      acc += w * eps * sq[static_cast<std::size_t>(left)];
      acc_e += w * eabs[static_cast<std::size_t>(left)];
    }
    if (kind_of[static_cast<std::size_t>(right)] != NodeKind::interior_atomistic) {
      const double w =
          kind_of[static_cast<std::size_t>(right)] == NodeKind::left_interface ? 1.0 : 0.5;
      acc += w * eps * sq[static_cast<std::size_t>(right)];
      acc_e += w * eabs[static_cast<std::size_t>(right)];
    }
    sr.eta_e[static_cast<std::size_t>(m)] = std::sqrt(acc);
    sr.eta_Ee[static_cast<std::size_t>(m)] = acc_e;
  }
  double total_sq = 0.0;
  for (double v : sr.eta_e) total_sq += v * v;
  sr.total = std::sqrt(total_sq);
  return sr;
}

double apply_gradient_jumps(const StoredResidual& sr, const ChainConfig& cfg, const Field& v) {
  const int n = cfg.n_atoms;
  const double eps = cfg.eps();
  const std::vector<double> dv = v.derivative();
  // v'_m is the derivative on lattice element m = ((m-1)*eps, m*eps].
  auto dv_elem = [&](long m) {
    long idx = (m - 1) % n;
    if (idx < 0) idx += n;
    return dv[static_cast<std::size_t>(idx)];
  };
  double acc = 0.0;
  for (const JumpTriple& t : sr.triples) {
    for (int j = 0; j < 3; ++j) {
      acc += eps * t.grad[static_cast<std::size_t>(j)] * dv_elem(t.ell + j);
    }
  }
  return acc;
}

double sum_energy_jumps(const StoredResidual& sr) {
  double acc = 0.0;
  for (const JumpTriple& t : sr.triples) {
    for (int j = 0; j < 3; ++j) acc += t.energy[static_cast<std::size_t>(j)];
  }
  return acc;
}

ExternalResidual external_force_residual(const Field& f, const Mesh& mesh,
                                         const MergedPartition& merged) {
  const ChainConfig& cfg = mesh.cfg;
  const int K = mesh.num_elems();
  const int N = cfg.n_atoms;
  const double eps = cfg.eps();
  if (f.size() != N) {
    throw ValidationError("external_force_residual: f must live on the lattice partition");
  }
  {
    double mean = 0.0, scale = 0.0;
    for (int j = 0; j < N; ++j) {
      mean += eps * f.value(j);
      scale += eps * std::abs(f.value(j));
    }
    if (std::abs(mean) > 1e-8 * std::max(1.0, scale)) {
      throw ValidationError("external_force_residual: f must have zero eps-mean");
    }
  }

  ExternalResidual er;
  er.eta_f.assign(static_cast<std::size_t>(K), 0.0);
  er.h_tilde.assign(static_cast<std::size_t>(K), 0.0);
  er.h_hat.assign(static_cast<std::size_t>(K), 0.0);
  er.n_merged = merged.count();
  for (int k = 0; k < K; ++k) {
    if (mesh.theta[static_cast<std::size_t>(k)] > 0.0) er.ku.push_back(k);
  }

  const std::vector<double> df = f.derivative(); // lattice f'
  auto df_at = [&](long elem1based) {
    long idx = (elem1based - 1) % N;
    if (idx < 0) idx += N;
    return df[static_cast<std::size_t>(idx)];
  };

  // f on the merged partition and its discrete derivatives.
  const Field fr = interpolate(f, Partition::of_merged(merged));
  const std::vector<double> dfr = fr.derivative();
  const std::vector<double> ddfr = fr.second_derivative();
  const int n = merged.count();
  const double n_eps = static_cast<double>(n) * eps;

  double total_sq = 0.0;
  for (int m : mesh.kc) {
    const int jlo = m == 0 ? -1 : merged.j_of_node[static_cast<std::size_t>(m - 1)];
    const int jhi = merged.j_of_node[static_cast<std::size_t>(m)];
    const int intervals = jhi - jlo;
    const double h_tilde = 0.5 * static_cast<double>(intervals) * eps;
    const double span = static_cast<double>(intervals) * eps;
    const double span1 = static_cast<double>(intervals + 1) * eps;
    const double h_hat =
        std::sqrt(span * span1 * span1 / mesh.elem_size[static_cast<std::size_t>(m)]);
    er.h_tilde[static_cast<std::size_t>(m)] = h_tilde;
    er.h_hat[static_cast<std::size_t>(m)] = h_hat;

    // Lemma 3.2 share: nodes of this element that are off the lattice.
    double term1 = 0.0;
    {
      const int left = (m + K - 1) % K;
      const auto add_node = [&](int node, bool interface_side) {
        if (mesh.theta[static_cast<std::size_t>(node)] <= 0.0) return;
        const double w = interface_side ? 1.0 : 0.5;
        const double fp = df_at(mesh.ell[static_cast<std::size_t>(node)] + 1);
        term1 += w * eps * fp * fp;
      };
      add_node(left,
               mesh.node_kind[static_cast<std::size_t>(left)] == NodeKind::right_interface);
      add_node(m, mesh.node_kind[static_cast<std::size_t>(m)] == NodeKind::left_interface);
      term1 *= (1.0 / 64.0) * eps * eps * eps * eps;
    }

    // Lemma 3.3 and 3.4 shares: D2 = merged interior nodes of the element,
    // D1 additionally includes the right-end merged index.
    double fsq = 0.0, dfsq = 0.0, ddfsq = 0.0;
    for (int j = jlo + 1; j <= jhi; ++j) {
      const int jj = (j + n) % n;
      if (j <= jhi - 1) {
        const double w_avg = merged.avg[static_cast<std::size_t>(jj)];
        fsq += w_avg * fr.value(jj) * fr.value(jj);
        ddfsq += w_avg * ddfr[static_cast<std::size_t>(jj)] * ddfr[static_cast<std::size_t>(jj)];
      }
      const double w_size = merged.size[static_cast<std::size_t>(jj)];
      dfsq += w_size * dfr[static_cast<std::size_t>(jj)] * dfr[static_cast<std::size_t>(jj)];
    }

    const double h4 = h_hat * h_hat * h_hat * h_hat;
    const double n4 = n_eps * n_eps * n_eps * n_eps;
    const double sq = term1 + h_tilde * h_tilde * fsq + (1.0 / 64.0) * n4 * h4 * ddfsq + h4 * dfsq;
    er.eta_f[static_cast<std::size_t>(m)] = std::sqrt(sq);
    total_sq += sq;
  }
  er.total = std::sqrt(total_sq);
  return er;
}

DeformationBound deformation_error_bound(const StoredResidual& stored, const ExternalResidual& ext,
                                         const StabilityReport& stability) {
  DeformationBound b;
  b.stretch_ok = stability.stretch_ok;
  b.stability_ok = stability.a_star > 0.0;
  if (!b.stability_ok) {
    throw StabilityLost("deformation_error_bound: A_* <= 0, estimator invalid");
  }
  b.bound = 2.0 / stability.a_star * (stored.total + ext.total);
  return b;
}

namespace {

// Per-element trapezoid-difference shares of <f,u_h>_eps - <f,u_h>_h.
std::vector<double> external_energy_shares(const QcState& y_qc, const Field& f) {
  const Mesh& mesh = *y_qc.mesh;
  const ChainConfig& cfg = mesh.cfg;
  const int K = mesh.num_elems();
  const int N = cfg.n_atoms;
  const double eps = cfg.eps();
  const double big_f = cfg.big_f;

  auto f_at = [&](long atom) {
    long idx = (atom - 1) % N;
    if (idx < 0) idx += N;
    return f.value(static_cast<int>(idx));
  };
  auto uh_at = [&](long atom) {
    const double x = static_cast<double>(atom) * eps;
    return y_qc.y.eval(x) - big_f * x;
  };
  auto fu = [&](long atom) { return f_at(atom) * uh_at(atom); };

  std::vector<double> d(static_cast<std::size_t>(K), 0.0);
  for (int m = 0; m < K; ++m) {
    long la;     // anchor of the left node (treated at the unwrapped position)
    double tha;
    if (m == 0) {
      la = 0;
      tha = 0.0;
    } else {
      la = mesh.ell[static_cast<std::size_t>(m - 1)];
      tha = mesh.theta[static_cast<std::size_t>(m - 1)];
    }
    const long lb = mesh.ell[static_cast<std::size_t>(m)];
    const double thb = mesh.theta[static_cast<std::size_t>(m)];

    double share = 0.0;
    if (tha > 0.0) share += (1.0 - tha) * 0.5 * eps * (fu(la) + fu(la + 1));
    const long first = tha > 0.0 ? la + 1 : la;
    for (long mm = first; mm <= lb - 1; ++mm) share += 0.5 * eps * (fu(mm) + fu(mm + 1));
    if (thb > 0.0) share += thb * 0.5 * eps * (fu(lb) + fu(lb + 1));

    const double xl = mesh.elem_lo(m);
    const double xr = mesh.elem_hi(m);
    const double trap = 0.5 * (xr - xl) *
                        (f.eval(xl) * (y_qc.y.eval(xl) - big_f * xl) +
                         f.eval(xr) * (y_qc.y.eval(xr) - big_f * xr));
    d[static_cast<std::size_t>(m)] = share - trap;
  }
  return d;
}

} // namespace

EnergyBound energy_error_bound(const QcState& y_qc, const Field& f,
                               const StoredResidual& stored, const DeformationBound& def_bound,
                               const StabilityReport& stability) {
  EnergyBound eb;
  eb.eta_Ee = stored.eta_Ee;
  const std::vector<double> d = external_energy_shares(y_qc, f);
  eb.eta_Ef.resize(d.size());
  double jump_total = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    eb.eta_Ef[k] = std::abs(d[k]);
    eb.jump_sum_signed += d[k];
    jump_total += eb.eta_Ee[k] + eb.eta_Ef[k];
  }
  eb.bound = stability.c_lip_energy * def_bound.bound * def_bound.bound + jump_total;
  return eb;
}

EstimatorReport estimate(const QcState& y_qc, const Potential& p, const Field& f) {
  EstimatorReport rep;
  const StoredResidual sr = stored_energy_residual(y_qc, p);
  const MergedPartition merged = merge_partitions(y_qc.cfg(), *y_qc.mesh);
  const ExternalResidual er = external_force_residual(f, *y_qc.mesh, merged);
  const AtomisticState proj =
      make_atomistic_state(y_qc.cfg(), transfer_to_lattice(y_qc.y, y_qc.cfg()));
  rep.stability = assess_stability(proj, p);
  rep.deformation = deformation_error_bound(sr, er, rep.stability);
  const EnergyBound eb = energy_error_bound(y_qc, f, sr, rep.deformation, rep.stability);
  rep.eta_e = sr.eta_e;
  rep.eta_f = er.eta_f;
  rep.eta_Ee = eb.eta_Ee;
  rep.eta_Ef = eb.eta_Ef;
  rep.store_total = sr.total;
  rep.ext_total = er.total;
  rep.energy_bound = eb.bound;
  rep.h_tilde = er.h_tilde;
  rep.h_hat = er.h_hat;
  rep.ku = er.ku;
  rep.n_merged = er.n_merged;
  return rep;
}

void write_estimator_csv(std::ostream& os, const Mesh& mesh, const EstimatorReport& report) {
  os << std::setprecision(17);
  os << "k,case,eta_e,eta_f,eta_Ee,eta_Ef\n";
  for (int k = 0; k < mesh.num_elems(); ++k) {
    const char* kind = !mesh.is_continuum(k) ? "atomistic"
                       : (std::find(mesh.kc_prime.begin(), mesh.kc_prime.end(), k) !=
                                  mesh.kc_prime.end()
                              ? "interior"
                              : "interface");
    os << k << "," << kind << "," << report.eta_e[static_cast<std::size_t>(k)] << ","
       << report.eta_f[static_cast<std::size_t>(k)] << ","
       << report.eta_Ee[static_cast<std::size_t>(k)] << ","
       << report.eta_Ef[static_cast<std::size_t>(k)] << "\n";
  }
  os << "# E_store=" << report.store_total << " E_ext=" << report.ext_total
     << " A_star=" << report.stability.a_star << " deformation_bound=" << report.deformation.bound
     << " energy_bound=" << report.energy_bound
     << " stretch_ok=" << (report.deformation.stretch_ok ? 1 : 0)
     << " tau_assumed=" << (report.deformation.tau_assumed ? 1 : 0) << "\n";
}

void write_estimator_csv_file(const std::string& path, const Mesh& mesh,
                              const EstimatorReport& report) {
  std::ofstream os(path);
  if (!os) throw ValidationError("write_estimator_csv_file: cannot open " + path);
  write_estimator_csv(os, mesh, report);
}

} // namespace qc1d
