#pragma once

// Essential variables of a polynomial: the catalecticant, its kernel and the
// unitary change of variables that isolates the essential part.

#include <algorithm>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "stellar/linalg.hpp"
#include "stellar/poly.hpp"

namespace stellar {

inline constexpr double kDefaultRankTol = 1e-8;

/// Column j lists the coefficients of dp/dz_j over the monomials of degree
/// <= r-1, rows in graded-lex order.
inline CMatrix catalecticant(const Poly& p) {
  if (p.is_constant()) throw DomainError("catalecticant of a constant polynomial has an empty gradient");
  const int m = p.var_count();
  const auto rows = monomials_up_to(m, p.total_degree() - 1);
  std::map<Exponents, Eigen::Index, GrlexLess> index;
  for (std::size_t i = 0; i < rows.size(); ++i) index[rows[i]] = static_cast<Eigen::Index>(i);
  CMatrix g = CMatrix::Zero(static_cast<Eigen::Index>(rows.size()), m);
  for (const auto& [e, c] : p.terms()) {
    for (int j = 0; j < m; ++j) {
      if (e[j] == 0) continue;
      Exponents f = e;
      f[j] -= 1;
      g(index.at(f), j) += c * static_cast<double>(e[j]);
    }
  }
  return g;
}

/// basis spans range(G^dagger), the complex conjugate of the gradient span;
/// complement spans ker G. Together they form a unitary.
struct EssentialSpace {
  int ambient = 0;
  int dim = 0;
  CMatrix basis;
  CMatrix complement_basis;
  double rank_tol = kDefaultRankTol;

  /// [basis | complement_basis]
  CMatrix frame() const {
    CMatrix v(ambient, ambient);
    v << basis, complement_basis;
    return v;
  }
};

inline EssentialSpace essential_space(const Poly& p, double rank_tol = kDefaultRankTol) {
  const int m = p.var_count();
  EssentialSpace es;
  es.ambient = m;
  es.rank_tol = rank_tol;
  if (p.is_constant()) {
    es.basis = CMatrix(m, 0);
    es.complement_basis = CMatrix::Identity(m, m);
    return es;
  }
  const CMatrix g = catalecticant(p);
  Eigen::BDCSVD<CMatrix> svd(g, Eigen::ComputeFullV);
  const int rank = numerical_rank(svd.singularValues(), rank_tol);
  es.dim = rank;

  std::vector<int> present;
  for (int j = 0; j < m; ++j)
    if (g.col(j).squaredNorm() > 0) present.push_back(j);
  if (static_cast<int>(present.size()) == rank) {
    // Each present variable is essential: use coordinate vectors.
    es.basis = CMatrix::Zero(m, rank);
    es.complement_basis = CMatrix::Zero(m, m - rank);
    int b = 0, c = 0;
    for (int j = 0; j < m; ++j) {
      if (b < rank && present[b] == j)
        es.basis(j, b++) = 1.0;
      else
        es.complement_basis(j, c++) = 1.0;
    }
    return es;
  }
  const CMatrix& v = svd.matrixV();
  es.basis = v.leftCols(rank);
  es.complement_basis = v.rightCols(m - rank);
  fix_column_phases(es.basis);
  fix_column_phases(es.complement_basis);
  return es;
}

struct EssentialReduction {
  /// p(V y) restricted to its first dim variables (one variable when dim = 0).
  Poly reduced;
  UnitaryMatrix v;
  int dim = 0;
  EssentialSpace space;
};

inline EssentialReduction reduce_to_essential(const Poly& p, double rank_tol = kDefaultRankTol) {
  EssentialSpace es = essential_space(p, rank_tol);
  UnitaryMatrix v(es.frame());
  const Poly full = compose_linear(p, v);
  const int keep = std::max(es.dim, 1);
  return {full.truncated(keep), v, es.dim, std::move(es)};
}

/// Largest singular value of basis(a)^dagger basis(b).
inline double essential_overlap(const EssentialSpace& a, const EssentialSpace& b) {
  if (a.ambient != b.ambient) throw DimensionError("essential spaces live in different ambients");
  if (a.dim == 0 || b.dim == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(a.basis.adjoint() * b.basis);
  return svd.singularValues()(0);
}

inline bool disjoint(const EssentialSpace& a, const EssentialSpace& b, double tol) {
  return essential_overlap(a, b) < tol;
}

inline bool disjoint(const Poly& p, const Poly& q, double tol = 1e-6, double rank_tol = kDefaultRankTol) {
  p.check_same(q);
  return disjoint(essential_space(p, rank_tol), essential_space(q, rank_tol), tol);
}

/// Max coefficient magnitude of sum_j w_j dp/dz_j over complement columns w,
/// relative to the largest coefficient of p.
inline double annihilation_residual(const Poly& p, const EssentialSpace& es) {
  if (p.is_zero()) return 0.0;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < es.complement_basis.cols(); ++k) {
    // Raw sum without cleanup so that the residual is not hidden by it.
    Poly d(p.var_count(), 0.0);
    for (const auto& [e, c] : p.terms()) {
      for (int j = 0; j < p.var_count(); ++j) {
        if (e[j] == 0) continue;
        Exponents f = e;
        f[j] -= 1;
        d.add_term(f, c * static_cast<double>(e[j]) * es.complement_basis(j, k));
      }
    }
    worst = std::max(worst, d.max_abs());
  }
  return worst / p.max_abs();
}

}  // namespace stellar
