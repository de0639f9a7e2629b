#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "stellar/poly.hpp"

namespace stellar {

using Rng = std::mt19937_64;

inline Complex complex_gaussian(Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

inline CVector random_cvector(int n, Rng& rng) {
  CVector v(n);
  for (int i = 0; i < n; ++i) v[i] = complex_gaussian(rng);
  return v;
}

inline CVector random_unit_cvector(int n, Rng& rng) {
  CVector v = random_cvector(n, rng);
  return v / v.norm();
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of R's diagonal moved into Q.
inline UnitaryMatrix random_unitary(int dim, Rng& rng) {
  if (dim < 1) throw DimensionError("unitary dimension must be positive");
  CMatrix g(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) g(i, j) = complex_gaussian(rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(dim, dim);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    if (a > 0) q.col(j) *= d / a;
  }
  return UnitaryMatrix(q);
}

inline UnitaryMatrix random_unitary(int dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_unitary(dim, rng);
}

/// Multiplies each column by a phase so that its largest-magnitude entry is
/// real and positive.
inline void fix_column_phases(CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    Eigen::Index best = 0;
    double bmag = -1;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      // ties resolved toward the first index, with slack for rounding
      const double a = std::abs(m(i, j));
      if (a > bmag * (1 + 1e-9)) {
        bmag = a;
        best = i;
      }
    }
    if (bmag > 0) m.col(j) *= std::conj(m(best, j)) / bmag;
  }
}

/// Number of singular values above tol * sigma_max.
inline int numerical_rank(const Eigen::VectorXd& sv, double tol) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * sv(0)) ++r;
  return r;
}

/// Orthonormal basis of the column span of m (numerical rank at tol).
inline CMatrix orthonormal_span(const CMatrix& m, double tol = 1e-8) {
  if (m.cols() == 0) return CMatrix(m.rows(), 0);
  Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeThinU);
  const int r = numerical_rank(svd.singularValues(), tol);
  return svd.matrixU().leftCols(r);
}

/// Orthonormal basis of the orthogonal complement of span(m) in C^n.
inline CMatrix orthonormal_complement(const CMatrix& m, int n, double tol = 1e-8) {
  if (m.cols() == 0) return CMatrix::Identity(n, n);
  Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeFullU);
  const int r = numerical_rank(svd.singularValues(), tol);
  return svd.matrixU().rightCols(n - r);
}

/// Largest principal-angle sine between the column spans of two
/// orthonormal-column matrices of equal width.
inline double subspace_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("subspace shapes differ");
  if (a.cols() == 0) return 0.0;
  const CMatrix proj = b - a * (a.adjoint() * b);
  Eigen::JacobiSVD<CMatrix> svd(proj);
  return svd.singularValues()(0);
}

/// Right null vector for the smallest singular value, with the two smallest
/// relative singular values.
struct NullVector {
  CVector vector;
  double smallest = 0;      // sigma_min / sigma_max
  double next_smallest = 0; // sigma_{n-1} / sigma_max
};

/// Rows and columns are equilibrated before the SVD; the returned vector is
/// mapped back to the original column scaling and has unit norm.
inline NullVector smallest_right_singular(CMatrix a) {
  const Eigen::Index n = a.cols();
  if (n == 0 || a.rows() < n) throw DimensionError("null-vector fit needs at least as many rows as columns");
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double rn = a.row(i).norm();
    if (rn > 0) a.row(i) /= rn;
  }
  Eigen::VectorXd scale(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double cn = a.col(j).norm();
    scale(j) = cn > 0 ? cn : 1.0;
    a.col(j) /= scale(j);
  }
  Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  NullVector out;
  const double smax = s(0) > 0 ? s(0) : 1.0;
  out.smallest = s(n - 1) / smax;
  out.next_smallest = n >= 2 ? s(n - 2) / smax : 1.0;
  CVector y = svd.matrixV().col(n - 1);
  for (Eigen::Index j = 0; j < n; ++j) y(j) /= scale(j);
  out.vector = y / y.norm();
  return out;
}

}  // namespace stellar
