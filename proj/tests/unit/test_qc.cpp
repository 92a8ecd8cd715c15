#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qc1d/errors.hpp"
#include "qc1d/qc.hpp"
#include "test_support.hpp"

#include <cmath>
#include <memory>

using namespace qc1d;

namespace {

std::pair<std::shared_ptr<const Mesh>, std::shared_ptr<const BondSet>> random_geometry(
    const ChainConfig& cfg, testing::Rng& rng) {
  auto mesh = std::make_shared<const Mesh>(testing::random_mesh(cfg, rng));
  auto bonds = std::make_shared<const BondSet>(classify_bonds(cfg, *mesh));
  return {mesh, bonds};
}

} // namespace

TEST_CASE("bond difference quotient") {
  ChainConfig cfg(32, 1.4);
  const Field y = Field::homogeneous(Partition::uniform(32), 1.4);
  SUBCASE("affine field gives F for any interval") {
    CHECK(bond_difference(y, 0.2, 0.45) == doctest::Approx(1.4).epsilon(1e-12));
    CHECK(bond_difference(y, 0.9, 1.3) == doctest::Approx(1.4).epsilon(1e-12));
  }
  SUBCASE("full period gives F by periodicity of the displacement") {
    testing::Rng rng(3);
    const Field u = testing::random_zero_mean_lattice_field(cfg, rng, 0.1);
    std::vector<double> yv(32);
    for (int j = 0; j < 32; ++j) yv[static_cast<std::size_t>(j)] = 1.4 * cfg.atom_x(j + 1) + u.value(j);
    const Field yr(Partition::uniform(32), yv, FieldKind::deformation, 1.4);
    CHECK(bond_difference(yr, 0.3, 1.3) == doctest::Approx(1.4).epsilon(1e-12));
  }
  SUBCASE("empty interval is rejected") {
    CHECK_THROWS_AS(bond_difference(y, 0.5, 0.5), DomainError);
  }
  SUBCASE("two-element split is the theta convex combination") {
    testing::Rng rng(5);
    auto [mesh, bonds] = random_geometry(ChainConfig(32, 1.0), rng);
    const QcState s = testing::random_qc_state(mesh, bonds, rng);
    const std::vector<double> g = s.elem_gradients();
    // find a non-aligned interior continuum node
    for (int k = 0; k < mesh->num_elems(); ++k) {
      if (mesh->node_kind[static_cast<std::size_t>(k)] != NodeKind::interior_continuum) continue;
      const double th = mesh->theta[static_cast<std::size_t>(k)];
      if (th <= 0.0) continue;
      const long ell = mesh->ell[static_cast<std::size_t>(k)];
      const double lo = static_cast<double>(ell) * cfg.eps();
      const double hi = static_cast<double>(ell + 1) * cfg.eps();
      const double expect = (1.0 - th) * g[static_cast<std::size_t>((k + 1) % mesh->num_elems())] +
                            th * g[static_cast<std::size_t>(k)];
      CHECK(bond_difference(s.y, lo, hi) == doctest::Approx(expect).epsilon(1e-11));
    }
  }
}

TEST_CASE("QC energy collapses to the atomistic value on homogeneous states") {
  testing::Rng rng(7);
  const Potential p = morse({5.0});
  for (double big_f : {0.9, 1.0, 1.1}) {
    ChainConfig cfg(32, big_f);
    auto [mesh, bonds] = random_geometry(cfg, rng);
    const QcState s = homogeneous_qc_state(mesh, bonds);
    const Field f0 = Field::zero(Partition::uniform(32));
    CHECK(energy_qc(s, p, f0) ==
          doctest::Approx(p.phi(big_f) + p.phi(2.0 * big_f)).epsilon(1e-12));
  }
}

TEST_CASE("full-atomistic mesh: QC energy equals the atomistic energy for any state") {
  testing::Rng rng(9);
  ChainConfig cfg(16, 1.0);
  auto mesh = std::make_shared<const Mesh>(build_mesh(cfg, RegionDecomposition::full_atomistic(), {}));
  auto bonds = std::make_shared<const BondSet>(classify_bonds(cfg, *mesh));
  const Potential p = morse({5.0});
  const Field f = testing::random_zero_mean_lattice_field(cfg, rng, 0.4);
  for (int rep = 0; rep < 5; ++rep) {
    const QcState s = testing::random_qc_state(mesh, bonds, rng);
    const AtomisticState a = make_atomistic_state(
        cfg, Field(Partition::uniform(16), s.y.values(), FieldKind::deformation, 1.0));
    CHECK(energy_qc(s, p, f) == doctest::Approx(energy_a(a, p, f)).epsilon(1e-12));
  }
}

TEST_CASE("random QC stored energy matches the independent piecewise oracle") {
  testing::Rng rng(11);
  ChainConfig cfg(32, 1.0);
  const Potential p = morse({5.0});
  for (int rep = 0; rep < 8; ++rep) {
    auto [mesh, bonds] = random_geometry(cfg, rng);
    const QcState s = testing::random_qc_state(mesh, bonds, rng);
    const Field f0 = Field::zero(Partition::uniform(32));
    const double stored = energy_qc(s, p, f0); // f = 0: stored part only
    const double oracle = testing::oracle_stored_energy_qc(*mesh, p, s.y);
    CHECK(stored == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("QC gradient vanishes at homogeneous states on any valid mesh") {
  testing::Rng rng(13);
  const Potential p = morse({5.0});
  for (double big_f : {0.9, 1.0, 1.1}) {
    ChainConfig cfg(32, big_f);
    auto [mesh, bonds] = random_geometry(cfg, rng);
    const QcState s = homogeneous_qc_state(mesh, bonds);
    const Field f0 = Field::zero(Partition::uniform(32));
    const auto g = gradient_qc(s, p, f0);
    for (double v : g) CHECK(std::abs(v) < 1e-12);
  }
}

TEST_CASE("QC gradient: finite-difference directional check at O(h^2)") {
  testing::Rng rng(17);
  ChainConfig cfg(32, 1.0);
  const Potential p = morse({5.0});
  auto [mesh, bonds] = random_geometry(cfg, rng);
  const Field f = testing::random_zero_mean_lattice_field(cfg, rng, 0.4);
  const QcState s = testing::random_qc_state(mesh, bonds, rng);
  const auto g = gradient_qc(s, p, f);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(mesh->num_elems()));
  for (double& z : v) z = dist(rng);
  double gdotv = 0.0;
  for (int k = 0; k < mesh->num_elems(); ++k) gdotv += g[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(k)];
  auto energy_shift = [&](double t) {
    std::vector<double> y = s.y.values();
    for (int k = 0; k < mesh->num_elems(); ++k) y[static_cast<std::size_t>(k)] += t * v[static_cast<std::size_t>(k)];
    const QcState st = make_qc_state(mesh, bonds,
                                     Field(Partition::of_mesh(*mesh), y, FieldKind::deformation, 1.0));
    return energy_qc(st, p, f);
  };
  const double h1 = 1e-5, h2 = 0.5e-5;
  const double e1 = std::abs((energy_shift(h1) - energy_shift(-h1)) / (2.0 * h1) - gdotv);
  const double e2 = std::abs((energy_shift(h2) - energy_shift(-h2)) / (2.0 * h2) - gdotv);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.35));
}

TEST_CASE("QC gradient matches the independent per-bond variation oracle") {
  testing::Rng rng(19);
  ChainConfig cfg(32, 1.0);
  const Potential p = morse({5.0});
  auto [mesh, bonds] = random_geometry(cfg, rng);
  const QcState s = testing::random_qc_state(mesh, bonds, rng);
  const Field f0 = Field::zero(Partition::uniform(32));
  const auto g = gradient_qc(s, p, f0);
  for (int rep = 0; rep < 5; ++rep) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> w(static_cast<std::size_t>(mesh->num_elems()));
    for (double& z : w) z = dist(rng);
    const Field wf(Partition::of_mesh(*mesh), w, FieldKind::displacement);
    double gdotw = 0.0;
    for (int k = 0; k < mesh->num_elems(); ++k) gdotw += g[static_cast<std::size_t>(k)] * w[static_cast<std::size_t>(k)];
    CHECK(gdotw ==
          doctest::Approx(testing::oracle_stored_variation_qc(*mesh, p, s.y, wf)).epsilon(1e-11));
  }
}

TEST_CASE("QC hessian: symmetry and finite-difference agreement") {
  testing::Rng rng(23);
  ChainConfig cfg(32, 1.0);
  const Potential p = morse({5.0});
  auto [mesh, bonds] = random_geometry(cfg, rng);
  const QcState s = testing::random_qc_state(mesh, bonds, rng);
  const QcHessian h = hessian_qc(s, p);
  const int K = mesh->num_elems();
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(K)), w(static_cast<std::size_t>(K));
  for (double& z : v) z = dist(rng);
  for (double& z : w) z = dist(rng);
  CHECK(h.quadratic_form(v, w) == doctest::Approx(h.quadratic_form(w, v)).epsilon(1e-12));

  // H v against finite differences of the gradient in direction v: O(h)
  const Field f0 = Field::zero(Partition::uniform(32));
  const double t = 1e-6;
  std::vector<double> yp = s.y.values(), ym = s.y.values();
  for (int k = 0; k < K; ++k) {
    yp[static_cast<std::size_t>(k)] += t * v[static_cast<std::size_t>(k)];
    ym[static_cast<std::size_t>(k)] -= t * v[static_cast<std::size_t>(k)];
  }
  const auto gp = gradient_qc(
      make_qc_state(mesh, bonds, Field(Partition::of_mesh(*mesh), yp, FieldKind::deformation, 1.0)),
      p, f0);
  const auto gm = gradient_qc(
      make_qc_state(mesh, bonds, Field(Partition::of_mesh(*mesh), ym, FieldKind::deformation, 1.0)),
      p, f0);
  const auto hv = h.apply(v);
  for (int k = 0; k < K; ++k) {
    const double fd = (gp[static_cast<std::size_t>(k)] - gm[static_cast<std::size_t>(k)]) / (2.0 * t);
    CHECK(hv[static_cast<std::size_t>(k)] == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("hessians coincide with the atomistic ones on a full-atomistic mesh") {
  testing::Rng rng(29);
  ChainConfig cfg(16, 1.0);
  const Potential p = morse({5.0});
  auto mesh = std::make_shared<const Mesh>(build_mesh(cfg, RegionDecomposition::full_atomistic(), {}));
  auto bonds = std::make_shared<const BondSet>(classify_bonds(cfg, *mesh));
  const QcState s = homogeneous_qc_state(mesh, bonds);
  const QcHessian hq = hessian_qc(s, p);
  const AtomisticHessian ha = hessian_a(homogeneous_state(cfg), p);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> v(16);
    for (double& z : v) z = dist(rng);
    CHECK(hq.quadratic_form(v, v) == doctest::Approx(ha.quadratic_form_raw(v)).epsilon(1e-11));
  }
}

TEST_CASE("solve_qc: f = 0 stays at the homogeneous state") {
  testing::Rng rng(31);
  ChainConfig cfg(32, 1.0);
  const Potential p = morse({5.0});
  auto [mesh, bonds] = random_geometry(cfg, rng);
  const Field f0 = Field::zero(Partition::uniform(32));
  const auto [state, report] = solve_qc(mesh, p, f0);
  CHECK(report.success);
  CHECK(report.iterations == 0);
  for (int k = 0; k < mesh->num_elems(); ++k) {
    CHECK(state.y.value(k) ==
          doctest::Approx(mesh->x[static_cast<std::size_t>(k)]).epsilon(1e-12));
  }
}

TEST_CASE("model coincidence: full-atomistic QC solve equals the atomistic solve") {
  ChainConfig cfg(33, 1.0);
  const Potential p = morse({5.0});
  testing::Rng rng(37);
  const Field f = testing::random_zero_mean_lattice_field(cfg, rng, 2.0);
  auto mesh = std::make_shared<const Mesh>(build_mesh(cfg, RegionDecomposition::full_atomistic(), {}));
  const auto [qs, qrep] = solve_qc(mesh, p, f);
  const auto [as, arep] = solve_atomistic(cfg, p, f);
  CHECK(qrep.success);
  CHECK(arep.success);
  const Field qg = qs.y.gauged();
  const Field ag = as.y.gauged();
  for (int j = 0; j < 33; ++j) {
    CHECK(qg.value(j) == doctest::Approx(ag.value(j)).epsilon(1e-9));
  }
}

TEST_CASE("gauge invariance of the QC energy under constant shifts") {
  testing::Rng rng(41);
  ChainConfig cfg(32, 1.0);
  const Potential p = morse({5.0});
  auto [mesh, bonds] = random_geometry(cfg, rng);
  const Field f = testing::random_zero_mean_lattice_field(cfg, rng, 0.4);
  const QcState s = testing::random_qc_state(mesh, bonds, rng);
  std::vector<double> y = s.y.values();
  for (double& z : y) z += 1.7;
  const QcState shifted = make_qc_state(
      mesh, bonds, Field(Partition::of_mesh(*mesh), std::move(y), FieldKind::deformation, 1.0));
  // <f, u+c>_h = <f,u>_h + c * sum w_k f(x_k); the mesh quadrature of a
  // zero-eps-mean f is not exactly zero, so compare against that correction.
  double wf = 0.0;
  for (int k = 0; k < mesh->num_elems(); ++k) {
    wf += s.y.partition().trapezoid_weight(k) * f.eval(mesh->node(k));
  }
  CHECK(energy_qc(shifted, p, f) ==
        doctest::Approx(energy_qc(s, p, f) - 1.7 * wf).epsilon(1e-11));
}
