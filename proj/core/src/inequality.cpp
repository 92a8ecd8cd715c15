#include "qc1d/inequality.hpp"
#include "qc1d/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qc1d {

namespace {

void check_weights(const std::vector<double>& w, int n, const char* name) {
  if (static_cast<int>(w.size()) < n) throw DomainError(std::string(name) + ": weights too short");
  for (int i = 0; i < n; ++i) {
    if (!(w[static_cast<std::size_t>(i)] > 0.0)) {
      throw DomainError(std::string(name) + ": weights must be positive");
    }
  }
}

double norm_tail(const std::vector<double>& vals, const std::vector<double>& w, int from, int to,
                 int p) {
  // p = 0 means infinity; range [from, to] inclusive, 0-based.
  double acc = 0.0;
  for (int i = from; i <= to; ++i) {
    const double v = std::abs(vals[static_cast<std::size_t>(i)]);
    if (p == 0) {
      acc = std::max(acc, v);
    } else {
      acc += w[static_cast<std::size_t>(i)] * v;
    }
  }
  return acc;
}

} // namespace

std::vector<double> WeightedVector::first_diff() const {
  const int L = size();
  std::vector<double> d(static_cast<std::size_t>(L), 0.0);
  for (int i = 1; i < L; ++i) {
    d[static_cast<std::size_t>(i)] =
        (g[static_cast<std::size_t>(i)] - g[static_cast<std::size_t>(i - 1)]) /
        eps1[static_cast<std::size_t>(i)];
  }
  return d;
}

std::vector<double> WeightedVector::second_diff() const {
  const int L = size();
  const std::vector<double> d = first_diff();
  std::vector<double> dd(static_cast<std::size_t>(L), 0.0);
  for (int i = 1; i + 1 < L; ++i) {
    dd[static_cast<std::size_t>(i)] =
        (d[static_cast<std::size_t>(i + 1)] - d[static_cast<std::size_t>(i)]) /
        eps2[static_cast<std::size_t>(i)];
  }
  return dd;
}

BoundPair pre_poincare_bound(const WeightedVector& v, int i) {
  const int L = v.size();
  check_weights(v.eps0, L, "pre_poincare_bound eps0");
  check_weights(v.eps1, L, "pre_poincare_bound eps1");
  double h = 0.0, mean = 0.0, scale = 0.0;
  for (int j = 0; j < L; ++j) {
    h += v.eps0[static_cast<std::size_t>(j)];
    mean += v.eps0[static_cast<std::size_t>(j)] * v.g[static_cast<std::size_t>(j)];
    scale += v.eps0[static_cast<std::size_t>(j)] * std::abs(v.g[static_cast<std::size_t>(j)]);
  }
  if (std::abs(mean) > 1e-10 * std::max(1.0, scale)) {
    throw DomainError("pre_poincare_bound: weighted mean condition violated");
  }
  const std::vector<double> d = v.first_diff();
  double rhs = 0.0;
  for (int k = 1; k < L; ++k) { // paper index k = 2..L
    double phi = 0.0;
    if (k <= i) {
      for (int l = 0; l <= k - 1; ++l) phi += v.eps0[static_cast<std::size_t>(l)];
    } else {
      for (int l = k; l < L; ++l) phi += v.eps0[static_cast<std::size_t>(l)];
    }
    rhs += v.eps1[static_cast<std::size_t>(k)] * std::abs(d[static_cast<std::size_t>(k)]) * phi;
  }
  return {std::abs(v.g[static_cast<std::size_t>(i)]), rhs / h};
}

BoundPair poincare_bound(const WeightedVector& v, int p) {
  const int L = v.size();
  check_weights(v.eps0, L, "poincare_bound eps0");
  check_weights(v.eps1, L, "poincare_bound eps1");
  if (p != 1 && p != 0) throw DomainError("poincare_bound: p must be 1 or inf");
  double h = 0.0, mean = 0.0, scale = 0.0;
  for (int j = 0; j < L; ++j) {
    h += v.eps0[static_cast<std::size_t>(j)];
    mean += v.eps0[static_cast<std::size_t>(j)] * v.g[static_cast<std::size_t>(j)];
    scale += v.eps0[static_cast<std::size_t>(j)] * std::abs(v.g[static_cast<std::size_t>(j)]);
  }
  if (std::abs(mean) > 1e-10 * std::max(1.0, scale)) {
    throw DomainError("poincare_bound: weighted mean condition violated");
  }
  const std::vector<double> d = v.first_diff();
  const double lhs = norm_tail(v.g, v.eps0, 0, L - 1, p);
  double wmax = 0.0;
  for (int i = 0; i < L; ++i) wmax = std::max(wmax, v.eps0[static_cast<std::size_t>(i)]);
  for (int k = 1; k < L; ++k) wmax = std::max(wmax, v.eps1[static_cast<std::size_t>(k)]);
  const double dn = norm_tail(d, v.eps1, 1, L - 1, p);
  const double rhs = 0.5 * static_cast<double>(L) * static_cast<double>(L) * wmax * wmax / h * dn;
  return {lhs, rhs};
}

BoundPair friedrichs_bound(const WeightedVector& v, int p) {
  const int L = v.size();
  check_weights(v.eps0, L, "friedrichs_bound eps0");
  check_weights(v.eps1, L, "friedrichs_bound eps1");
  if (p != 1 && p != 0) throw DomainError("friedrichs_bound: p must be 1 or inf");
  if (v.g.front() != 0.0 || v.g.back() != 0.0) {
    throw DomainError("friedrichs_bound: requires g_1 = g_L = 0");
  }
  const std::vector<double> d = v.first_diff();
  const double lhs = norm_tail(v.g, v.eps0, 0, L - 1, p);
  const double dn = norm_tail(d, v.eps1, 1, L - 1, p);
  // Proof-faithful per-p constants: p=1 uses the eps0 maximum over interior
  // indices, p=inf the eps1 maximum over difference indices.
  double wmax = 0.0;
  if (p == 1) {
    for (int i = 1; i + 1 < L; ++i) wmax = std::max(wmax, v.eps0[static_cast<std::size_t>(i)]);
  } else {
    for (int k = 1; k < L; ++k) wmax = std::max(wmax, v.eps1[static_cast<std::size_t>(k)]);
  }
  const double rhs = 0.5 * static_cast<double>(L - 1) * wmax * dn;
  return {lhs, rhs};
}

BoundPair interpolation_error_bound(const WeightedVector& v, int p) {
  const int L = v.size();
  check_weights(v.eps0, L, "interpolation_error_bound eps0");
  check_weights(v.eps1, L, "interpolation_error_bound eps1");
  check_weights(v.eps2, L, "interpolation_error_bound eps2");
  if (p != 1 && p != 0) throw DomainError("interpolation_error_bound: p must be 1 or inf");
  double h = 0.0;
  for (int j = 1; j < L; ++j) h += v.eps0[static_cast<std::size_t>(j)];
  std::vector<double> err(static_cast<std::size_t>(L));
  double cum = 0.0;
  for (int i = 0; i < L; ++i) {
    if (i > 0) cum += v.eps0[static_cast<std::size_t>(i)];
    const double interp = v.g.front() + cum / h * (v.g.back() - v.g.front());
    err[static_cast<std::size_t>(i)] = v.g[static_cast<std::size_t>(i)] - interp;
  }
  const std::vector<double> dd = v.second_diff();
  const double lhs = norm_tail(err, v.eps0, 0, L - 1, p);
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (int i = 1; i + 1 < L; ++i) {
    m0 = std::max(m0, v.eps0[static_cast<std::size_t>(i)]);
    m1 = std::max(m1, v.eps1[static_cast<std::size_t>(i)]);
    m2 = std::max(m2, v.eps2[static_cast<std::size_t>(i)]);
  }
  const double ddn = norm_tail(dd, v.eps2, 1, L - 2, p);
  const double L3 = static_cast<double>(L) * static_cast<double>(L) * static_cast<double>(L);
  const double rhs = 0.25 * L3 * m0 * m1 * m2 / h * ddn;
  return {lhs, rhs};
}

} // namespace qc1d
