#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qc1d/atomistic.hpp"
#include "qc1d/errors.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace qc1d;

namespace {

AtomisticState perturbed_state(const ChainConfig& cfg, testing::Rng& rng, double amp) {
  const Field u = testing::random_zero_mean_lattice_field(cfg, rng, amp);
  std::vector<double> y(static_cast<std::size_t>(cfg.n_atoms));
  for (int j = 0; j < cfg.n_atoms; ++j) {
    y[static_cast<std::size_t>(j)] = cfg.big_f * cfg.atom_x(j + 1) + u.value(j);
  }
  return make_atomistic_state(cfg,
                              Field(Partition::uniform(cfg.n_atoms), std::move(y),
                                    FieldKind::deformation, cfg.big_f));
}

} // namespace

TEST_CASE("homogeneous energy is phi(F) + phi(2F), independent of N") {
  const Potential p = morse({5.0});
  const Field f0_16 = Field::zero(Partition::uniform(16));
  const Field f0_64 = Field::zero(Partition::uniform(64));
  for (double big_f : {0.9, 1.0, 1.1}) {
    ChainConfig c16(16, big_f), c64(64, big_f);
    const double e16 = energy_a(homogeneous_state(c16), p, f0_16);
    const double e64 = energy_a(homogeneous_state(c64), p, f0_64);
    const double expect = p.phi(big_f) + p.phi(2.0 * big_f);
    CHECK(e16 == doctest::Approx(expect).epsilon(1e-13));
    CHECK(e64 == doctest::Approx(expect).epsilon(1e-13));
  }
  ChainConfig c(16, 1.0);
  // phi(1) + phi(2) = -1 + e^{-10} - 2 e^{-5}, evaluated independently
  const double frozen = -1.0 + std::exp(-10.0) - 2.0 * std::exp(-5.0);
  CHECK(energy_a(homogeneous_state(c), morse({5.0}), f0_16) ==
        doctest::Approx(frozen).epsilon(1e-13));
}

TEST_CASE("random energy matches the brute-force bond loop") {
  testing::Rng rng(21);
  ChainConfig cfg(16, 1.0);
  const Potential p = morse({5.0});
  const Field f = testing::random_zero_mean_lattice_field(cfg, rng, 0.5);
  for (int rep = 0; rep < 5; ++rep) {
    const AtomisticState s = perturbed_state(cfg, rng, 0.005);
    const double stored = energy_a(s, p, f) + testing::oracle_inner_eps(cfg, f, s.y) -
                          testing::oracle_inner_eps(cfg, f, Field::homogeneous(
                                                                Partition::uniform(16), 1.0));
    // stored part only: E_a + <f,u> with u = y - Fx
    const double oracle = testing::oracle_stored_energy_a(cfg, p, s.y);
    CHECK(stored == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("nonpositive stretch raises a domain error naming the bond") {
  ChainConfig cfg(16, 1.0);
  const Potential p = morse({5.0});
  std::vector<double> y(16);
  for (int j = 0; j < 16; ++j) y[static_cast<std::size_t>(j)] = cfg.atom_x(j + 1);
  std::swap(y[4], y[5]); // reversed pair -> negative stretch
  const Field f0 = Field::zero(Partition::uniform(16));
  CHECK_THROWS_AS(
      energy_a(make_atomistic_state(cfg, Field(Partition::uniform(16), y, FieldKind::deformation,
                                               1.0)),
               p, f0),
      DomainError);
}

TEST_CASE("gradient vanishes at the homogeneous state (consistency)") {
  const Potential p = morse({5.0});
  for (double big_f : {0.9, 1.0, 1.1}) {
    ChainConfig cfg(32, big_f);
    const Field f0 = Field::zero(Partition::uniform(32));
    const auto g = gradient_a(homogeneous_state(cfg), p, f0);
    for (double v : g) CHECK(std::abs(v) < 1e-12);
  }
}

TEST_CASE("gradient matches finite differences of the energy at O(h^2)") {
  testing::Rng rng(31);
  ChainConfig cfg(16, 1.0);
  const Potential p = morse({5.0});
  const Field f = testing::random_zero_mean_lattice_field(cfg, rng, 0.5);
  const AtomisticState s = perturbed_state(cfg, rng, 0.003);
  const Field v = testing::random_zero_mean_lattice_field(cfg, rng, 1.0);
  const auto g = gradient_a(s, p, f);
  double gdotv = 0.0;
  for (int j = 0; j < 16; ++j) gdotv += g[static_cast<std::size_t>(j)] * v.value(j);

  auto energy_shift = [&](double t) {
    std::vector<double> y = s.y.values();
    for (int j = 0; j < 16; ++j) y[static_cast<std::size_t>(j)] += t * v.value(j);
    return energy_a(make_atomistic_state(
                        cfg, Field(Partition::uniform(16), y, FieldKind::deformation, 1.0)),
                    p, f);
  };
  const double h1 = 1e-5, h2 = 0.5e-5;
  const double e1 = std::abs((energy_shift(h1) - energy_shift(-h1)) / (2.0 * h1) - gdotv);
  const double e2 = std::abs((energy_shift(h2) - energy_shift(-h2)) / (2.0 * h2) - gdotv);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.3));
}

TEST_CASE("gradient matches the symbolic per-bond assembly oracle") {
  testing::Rng rng(41);
  ChainConfig cfg(16, 1.0);
  const Potential p = morse({5.0});
  const Field f = testing::random_zero_mean_lattice_field(cfg, rng, 0.5);
  const AtomisticState s = perturbed_state(cfg, rng, 0.004);
  const auto g = gradient_a(s, p, f);
  for (int rep = 0; rep < 10; ++rep) {
    const Field v = testing::random_zero_mean_lattice_field(cfg, rng, 1.0);
    double gdotv = 0.0;
    for (int j = 0; j < 16; ++j) gdotv += g[static_cast<std::size_t>(j)] * v.value(j);
    const double oracle = testing::oracle_stored_variation_a(cfg, p, s.y, v) -
                          testing::oracle_inner_eps(cfg, f, v);
    CHECK(gdotv == doctest::Approx(oracle).epsilon(1e-11));
  }
}

TEST_CASE("hessian: raw and rewritten quadratic forms agree exactly") {
  testing::Rng rng(51);
  ChainConfig cfg(32, 1.0);
  const Potential p = morse({5.0});
  const AtomisticState s = perturbed_state(cfg, rng, 0.004);
  const AtomisticHessian h = hessian_a(s, p);
  for (int rep = 0; rep < 20; ++rep) {
    const Field v = testing::random_zero_mean_lattice_field(cfg, rng, 1.0);
    const double raw = h.quadratic_form_raw(v.values());
    const double local = h.quadratic_form_local(v.values());
    CHECK(raw == doctest::Approx(local).epsilon(1e-12));
    // hessian apply is consistent with the quadratic form
    const auto hv = h.apply(v.values());
    double vhv = 0.0;
    for (int j = 0; j < 32; ++j) vhv += v.value(j) * hv[static_cast<std::size_t>(j)];
    CHECK(vhv == doctest::Approx(raw).epsilon(1e-11));
  }
}

TEST_CASE("homogeneous A coefficients are uniform") {
  ChainConfig cfg(16, 1.0);
  const Potential p = morse({5.0});
  const AtomisticHessian h = hessian_a(homogeneous_state(cfg), p);
  const double expect = p.d2phi(1.0) + 4.0 * p.d2phi(2.0);
  for (double a : h.A) CHECK(a == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("hessian-vector product matches finite differences of the gradient") {
  testing::Rng rng(61);
  ChainConfig cfg(16, 1.0);
  const Potential p = morse({5.0});
  const Field f0 = Field::zero(Partition::uniform(16));
  const AtomisticState s = perturbed_state(cfg, rng, 0.003);
  const AtomisticHessian h = hessian_a(s, p);
  const Field v = testing::random_zero_mean_lattice_field(cfg, rng, 1.0);
  const auto hv = h.apply(v.values());
  const double t = 1e-6;
  std::vector<double> yp = s.y.values(), ym = s.y.values();
  for (int j = 0; j < 16; ++j) {
    yp[static_cast<std::size_t>(j)] += t * v.value(j);
    ym[static_cast<std::size_t>(j)] -= t * v.value(j);
  }
  const auto gp = gradient_a(
      make_atomistic_state(cfg, Field(Partition::uniform(16), yp, FieldKind::deformation, 1.0)), p,
      f0);
  const auto gm = gradient_a(
      make_atomistic_state(cfg, Field(Partition::uniform(16), ym, FieldKind::deformation, 1.0)), p,
      f0);
  for (int j = 0; j < 16; ++j) {
    const double fd = (gp[static_cast<std::size_t>(j)] - gm[static_cast<std::size_t>(j)]) / (2.0 * t);
    CHECK(hv[static_cast<std::size_t>(j)] == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("translation gauge: energy invariant, gradient orthogonal to constants") {
  testing::Rng rng(71);
  ChainConfig cfg(16, 1.0);
  const Potential p = morse({5.0});
  const Field f = testing::random_zero_mean_lattice_field(cfg, rng, 0.5);
  const AtomisticState s = perturbed_state(cfg, rng, 0.004);
  std::vector<double> y = s.y.values();
  for (double& z : y) z += 0.37;
  const AtomisticState shifted = make_atomistic_state(
      cfg, Field(Partition::uniform(16), std::move(y), FieldKind::deformation, 1.0));
  CHECK(energy_a(shifted, p, f) == doctest::Approx(energy_a(s, p, f)).epsilon(1e-12));
  const auto g = gradient_a(s, p, f);
  double sum = 0.0;
  for (double v : g) sum += v;
  CHECK(std::abs(sum) < 1e-12);
}

TEST_CASE("solver: f = 0 converges immediately at the homogeneous state") {
  ChainConfig cfg(32, 1.0);
  const Potential p = morse({5.0});
  const Field f0 = Field::zero(Partition::uniform(32));
  const auto [state, report] = solve_atomistic(cfg, p, f0);
  CHECK(report.success);
  CHECK(report.iterations == 0);
  for (int j = 0; j < 32; ++j) {
    CHECK(state.y.value(j) == doctest::Approx(cfg.atom_x(j + 1)).epsilon(1e-12));
  }
}

TEST_CASE("solver: random perturbation returns to the homogeneous state") {
  testing::Rng rng(81);
  ChainConfig cfg(32, 1.0);
  const Potential p = morse({5.0});
  const Field f0 = Field::zero(Partition::uniform(32));
  const AtomisticState start = perturbed_state(cfg, rng, 0.01);
  const auto [state, report] = solve_atomistic(cfg, p, f0, start);
  CHECK(report.success);
  // up to gauge the minimizer is y = Fx (stable F): compare gauged values
  const Field gauged = state.y.gauged();
  const Field homog = Field::homogeneous(Partition::uniform(32), 1.0).gauged();
  for (int j = 0; j < 32; ++j) {
    CHECK(gauged.value(j) == doctest::Approx(homog.value(j)).epsilon(1e-7));
  }
  // Hessian positive at the solution on test directions
  const AtomisticHessian h = hessian_a(state, p);
  for (int rep = 0; rep < 10; ++rep) {
    const Field v = testing::random_zero_mean_lattice_field(cfg, rng, 1.0);
    CHECK(h.quadratic_form_raw(v.values()) > 0.0);
  }
}

TEST_CASE("solver: benchmark-style force at desk scale converges") {
  // The Section-6 force needs odd N; desk scale uses N = 129.
  ChainConfig cfg(129, 1.0);
  const Potential p = morse({5.0});
  // two-branch force built inline (the experiment module owns the real one)
  std::vector<double> fv(129);
  const double c = 64.0;
  for (int ell = 1; ell <= 129; ++ell) {
    const double ld = ell;
    fv[static_cast<std::size_t>(ell - 1)] =
        ell <= 64 ? -0.1 * (1.0 - (c - ld) / c) * 129.0 / std::abs(ld - c - 0.5)
                  : 0.1 * (1.0 - (ld - c - 1.0) / c) * 129.0 / std::abs(ld - c - 0.5);
  }
  double mean = 0.0;
  for (double v : fv) mean += v / 129.0;
  for (double& v : fv) v -= mean;
  const Field f(Partition::uniform(129), fv, FieldKind::displacement);
  const auto [state, report] = solve_atomistic(cfg, p, f);
  CHECK(report.success);
  CHECK(report.grad_norm <= 1e-10 * std::sqrt(129.0));
  CHECK(state.y.min_derivative() > 0.5);
  // energy decreased relative to the homogeneous start
  CHECK(energy_a(state, p, f) < energy_a(homogeneous_state(cfg), p, f));
}
