#pragma once

// Univariate complex root finding with multiplicity detection.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "stellar/poly.hpp"

namespace stellar {

struct Root {
  Complex value;
  int multiplicity = 1;
};

namespace detail {

/// Value of the k-th Taylor coefficient p^(k)(x)/k! for ascending coefficients a.
inline Complex taylor_coeff(const std::vector<Complex>& a, int k, Complex x) {
  const int n = static_cast<int>(a.size()) - 1;
  Complex acc{};
  for (int i = n; i >= k; --i) {
    double binom = 1.0;
    for (int t = 1; t <= k; ++t) binom = binom * (i - k + t) / t;
    acc = acc * x + a[i] * binom;
  }
  return acc;
}

inline std::vector<Complex> all_taylor_coeffs(const std::vector<Complex>& a, Complex x) {
  // Repeated synthetic division.
  std::vector<Complex> b = a;
  const int n = static_cast<int>(b.size()) - 1;
  for (int k = 0; k <= n; ++k)
    for (int i = n - 1; i >= k; --i) b[i] += x * b[i + 1];
  return b;
}

/// Newton on the k-th derivative; returns the polished point when it helps.
inline Complex newton_polish(const std::vector<Complex>& a, Complex x, int k, int iters = 8) {
  double best = std::abs(taylor_coeff(a, k, x));
  for (int it = 0; it < iters && best > 0; ++it) {
    const Complex f = taylor_coeff(a, k, x);
    const Complex df = taylor_coeff(a, k + 1, x) * static_cast<double>(k + 1);
    if (df == Complex{}) break;
    const Complex y = x - f / df;
    const double ny = std::abs(taylor_coeff(a, k, y));
    if (!(ny < best)) break;
    best = ny;
    x = y;
  }
  return x;
}

/// Eigenvalues of the companion matrix of a scaled copy of a (degree n >= 1,
/// nonzero leading coefficient), each Newton-polished. Roots are returned in
/// scaled units t = rho * s; `scaled` receives the monic scaled coefficients.
inline std::vector<Complex> scaled_roots(const std::vector<Complex>& a, double& rho,
                                         std::vector<Complex>& scaled) {
  const int n = static_cast<int>(a.size()) - 1;
  rho = 0;
  for (int k = 0; k < n; ++k) rho = std::max(rho, std::pow(std::abs(a[k] / a[n]), 1.0 / (n - k)));
  if (rho == 0) rho = 1;
  scaled.assign(n + 1, Complex{});
  for (int k = 0; k <= n; ++k) scaled[k] = a[k] / a[n] * std::pow(rho, k - n);
  std::vector<Complex> est(n);
  if (n == 1) {
    est[0] = -scaled[0];
  } else {
    CMatrix comp = CMatrix::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -scaled[i];
    Eigen::ComplexEigenSolver<CMatrix> es(comp, false);
    if (es.info() != Eigen::Success) throw InconclusiveError("companion eigenvalue solver failed");
    for (int i = 0; i < n; ++i) est[i] = es.eigenvalues()(i);
  }
  for (auto& x : est) x = newton_polish(scaled, x, 0);
  return est;
}

/// All n roots of a (no clustering), in the original units.
inline std::vector<Complex> raw_roots(const std::vector<Complex>& a) {
  double rho = 1;
  std::vector<Complex> s;
  auto r = scaled_roots(a, rho, s);
  for (auto& x : r) x *= rho;
  return r;
}

inline bool root_less(const Root& a, const Root& b) {
  if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
  return a.value.imag() < b.value.imag();
}

}  // namespace detail

struct RootOptions {
  double root_tol = 1e-9;          // smallest clustering radius, relative to the root scale
  double multiplicity_tol = 1e-10; // Taylor-coefficient test for a cluster being one multiple root
  double zero_tol = 1e-13;         // coefficients below this (relative) are treated as zero
};

/// All roots of sum_k a[k] t^k with multiplicities (sum = degree).
/// Eigenvalues of the scaled companion matrix, Newton polishing, then
/// clustering where a cluster is accepted as a k-fold root only if the first
/// k Taylor coefficients at its (polished) centroid are negligible.
inline std::vector<Root> univariate_roots(std::vector<Complex> a, const RootOptions& opt = {}) {
  double amax = 0;
  for (const auto& c : a) amax = std::max(amax, std::abs(c));
  if (amax == 0.0) throw ZeroStateError("root finding on the zero polynomial");
  for (auto& c : a)
    if (std::abs(c) <= opt.zero_tol * amax) c = 0.0;
  while (!a.empty() && a.back() == Complex{}) a.pop_back();
  std::vector<Root> out;
  int zeros = 0;
  while (zeros < static_cast<int>(a.size()) && a[zeros] == Complex{}) ++zeros;
  if (zeros > 0) {
    out.push_back({0.0, zeros});
    a.erase(a.begin(), a.begin() + zeros);
  }
  const int n = static_cast<int>(a.size()) - 1;
  if (n <= 0) return out;

  double rho = 1;
  std::vector<Complex> s;
  std::vector<Complex> est = detail::scaled_roots(a, rho, s);
  const double scale_tol = opt.root_tol;
  std::vector<Root> scaled;
  std::function<void(std::vector<Complex>, double)> cluster = [&](std::vector<Complex> pts, double radius) {
    // single-linkage components at this radius
    const int m = static_cast<int>(pts.size());
    std::vector<int> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (std::abs(pts[i] - pts[j]) < radius) parent[find(i)] = find(j);
    std::vector<std::vector<Complex>> groups;
    std::vector<int> gid(m, -1);
    for (int i = 0; i < m; ++i) {
      const int r = find(i);
      if (gid[r] < 0) {
        gid[r] = static_cast<int>(groups.size());
        groups.emplace_back();
      }
      groups[gid[r]].push_back(pts[i]);
    }
    for (auto& g : groups) {
      const int k = static_cast<int>(g.size());
      if (k == 1) {
        scaled.push_back({g[0], 1});
        continue;
      }
      Complex c{};
      for (auto x : g) c += x;
      c /= static_cast<double>(k);
      c = detail::newton_polish(s, c, k - 1);
      const auto b = detail::all_taylor_coeffs(s, c);
      double total = 0, low = 0;
      for (int j = 0; j <= n; ++j) total += std::abs(b[j]);
      for (int j = 0; j < k; ++j) low = std::max(low, std::abs(b[j]));
      if (low <= opt.multiplicity_tol * total) {
        scaled.push_back({c, k});
      } else if (radius / 8 >= scale_tol) {
        cluster(g, radius / 8);
      } else {
        for (auto x : g) scaled.push_back({x, 1});
      }
    }
  };
  cluster(est, 0.05);

  for (auto& r : scaled) out.push_back({r.value * rho, r.multiplicity});
  std::sort(out.begin(), out.end(), detail::root_less);
  return out;
}

/// Expands prod (t - r_i)^{m_i} (ascending coefficients, monic).
inline std::vector<Complex> poly_from_roots(const std::vector<Root>& roots) {
  std::vector<Complex> p{Complex(1.0)};
  for (const auto& r : roots)
    for (int k = 0; k < r.multiplicity; ++k) p = detail::mul_dense(p, {-r.value, Complex(1.0)});
  return p;
}

}  // namespace stellar
