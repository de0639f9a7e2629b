#pragma once

// Two-mode hyperplane analysis and the stellar-rank-2 criterion.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "stellar/atomic.hpp"
#include "stellar/essential.hpp"
#include "stellar/factorizer.hpp"
#include "stellar/poly.hpp"
#include "stellar/roots.hpp"

namespace stellar {

enum class PlaneOrientation {
  z2_of_z1,  // z2 = kappa z1 + C
  z1_of_z2,  // z1 = kappa z2 + C (inverse ansatz)
};

struct ZeroPlane {
  Complex kappa;
  Complex c;
  PlaneOrientation orientation = PlaneOrientation::z2_of_z1;
  int multiplicity = 1;
  /// max_j |f_j(kappa, C)| / ||p||
  double certificate = 0.0;

  /// Normal (n1, n2) of the plane n1 z1 + n2 z2 = const, unit length.
  Eigen::Vector2cd normal() const {
    Eigen::Vector2cd n = orientation == PlaneOrientation::z2_of_z1 ? Eigen::Vector2cd(-kappa, 1.0)
                                                                   : Eigen::Vector2cd(1.0, -kappa);
    return n / n.norm();
  }

  /// The affine form whose zero set is the plane, as a polynomial in z1, z2.
  Poly form() const {
    const std::vector<Complex> coeffs =
        orientation == PlaneOrientation::z2_of_z1 ? std::vector<Complex>{-kappa, 1.0} : std::vector<Complex>{1.0, -kappa};
    return Poly::linear(coeffs, -c).normalized();
  }
};

struct TwoModeReport {
  bool separable = false;
  std::vector<ZeroPlane> planes;
  std::optional<std::pair<std::vector<int>, std::vector<int>>> family_split;
  std::string notes;
  int degree = 0;
  int planar_degree = 0;  // sum of plane multiplicities
};

struct TwoModeConfig {
  double plane_tol = 1e-8;      // certificate bound on max_j |f_j| / ||p||
  double direction_tol = 1e-6;  // two normals are the same direction below this
  double orthogonal_tol = 1e-6; // |kappa1* kappa2 + 1| analogue on unit normals
  FactorizerConfig factorizer;
  bool cross_check = true;      // run the atomic decomposition when the planes fall short
};

namespace detail {

/// Coefficients f_j of p(z1, kappa z1 + C) (j = 0..r).
inline std::vector<Complex> plane_coeffs(const Poly& p, Complex kappa, Complex c, PlaneOrientation o) {
  CVector u(2), v(2);
  if (o == PlaneOrientation::z2_of_z1) {
    u << 0.0, c;
    v << 1.0, kappa;
  } else {
    u << c, 0.0;
    v << kappa, 1.0;
  }
  return restrict_line(p, u, v);
}

inline double binom(int n, int k) {
  double b = 1;
  for (int t = 1; t <= k; ++t) b = b * (n - k + t) / t;
  return b;
}

/// f_j(kappa; C) as a polynomial in kappa: coefficient of kappa^t is
/// sum_b c_{j-t,b} binom(b,t) C^{b-t}, with p in forward orientation.
inline std::vector<Complex> fj_in_kappa(const Poly& p, int j, Complex c) {
  std::vector<Complex> out(j + 1, Complex{});
  for (const auto& [e, v] : p.terms()) {
    const int a = e[0], b = e[1];
    const int t = j - a;
    if (t < 0 || t > b) continue;
    out[t] += v * binom(b, t) * std::pow(c, b - t);
  }
  return out;
}

inline Poly swap_vars(const Poly& p) {
  Poly q(2, p.coeff_tol());
  for (const auto& [e, v] : p.terms()) q.add_term({e[1], e[0]}, v);
  return q;
}

/// Candidate planes z2 = kappa z1 + C of p (forward ansatz).
inline std::vector<std::pair<Complex, Complex>> forward_planes(const Poly& p, const TwoModeConfig& cfg,
                                                               std::string& notes) {
  std::vector<std::pair<Complex, Complex>> out;
  const int r = p.total_degree();
  std::vector<Complex> f0(p.degree_in(1) + 1, Complex{});
  for (const auto& [e, v] : p.terms())
    if (e[0] == 0) f0[e[1]] += v;
  double f0max = 0;
  for (auto x : f0) f0max = std::max(f0max, std::abs(x));
  if (f0max <= cfg.plane_tol * p.norm()) return out;  // handled by the caller (z1 divides p)
  std::vector<Root> cs;
  bool has_root = false;
  for (std::size_t k = 1; k < f0.size(); ++k)
    if (std::abs(f0[k]) > 1e-13 * f0max) has_root = true;
  if (!has_root) return out;
  RootOptions ro;
  ro.root_tol = cfg.factorizer.root_tol;
  cs = univariate_roots(f0, ro);
  for (const auto& root : cs) {
    const Complex c = root.value;
    const double scale = p.norm() * std::pow(std::max(1.0, std::abs(c)), r);
    // lowest j whose f_j(kappa; C) is not identically zero in kappa
    for (int j = 1; j <= r; ++j) {
      auto fk = fj_in_kappa(p, j, c);
      double mx = 0;
      for (auto x : fk) mx = std::max(mx, std::abs(x));
      if (mx <= 1e-10 * scale) continue;
      int deg = static_cast<int>(fk.size()) - 1;
      while (deg > 0 && std::abs(fk[deg]) <= 1e-12 * mx) --deg;
      if (deg == 0) break;  // nonzero constant: no kappa for this C
      fk.resize(deg + 1);
      for (const auto& kr : univariate_roots(fk, ro)) out.emplace_back(kr.value, c);
      if (j > 1) notes += "f_1 trivial at C = root; escalated to f_" + std::to_string(j) + ". ";
      break;
    }
  }
  return out;
}

}  // namespace detail

inline TwoModeReport two_mode_planes(const Poly& p, const TwoModeConfig& cfg = {}) {
  if (p.var_count() != 2) throw DimensionError("two-mode analysis needs exactly two variables");
  if (p.is_zero()) throw ZeroStateError("two-mode analysis of the zero polynomial");
  TwoModeReport rep;
  rep.degree = p.total_degree();
  const Poly pn = p * (1.0 / p.norm());
  if (rep.degree == 0) {
    rep.separable = true;
    rep.notes = "constant polynomial (vacuum)";
    return rep;
  }

  std::vector<ZeroPlane> cands;
  // Divide out z1 (f_0 identically zero) before the forward ansatz.
  Poly q = pn;
  const Poly z1 = Poly::variable(2, 0);
  bool z1_divides = false;
  while (!q.is_constant()) {
    auto d = divide_exact(q, z1);
    if (!(d.residual < cfg.factorizer.verify_tol)) break;
    q = d.quotient;
    z1_divides = true;
  }
  if (z1_divides) cands.push_back({0.0, 0.0, PlaneOrientation::z1_of_z2});
  if (!q.is_constant()) {
    for (auto [k, c] : detail::forward_planes(q, cfg, rep.notes)) cands.push_back({k, c, PlaneOrientation::z2_of_z1});
    for (auto [k, c] : detail::forward_planes(detail::swap_vars(q), cfg, rep.notes))
      cands.push_back({k, c, PlaneOrientation::z1_of_z2});
  }

  // Validate, deduplicate by (normal, offset), count multiplicity.
  const double pnorm = pn.norm();
  for (auto& cand : cands) {
    const auto f = detail::plane_coeffs(pn, cand.kappa, cand.c, cand.orientation);
    double worst = 0;
    for (auto x : f) worst = std::max(worst, std::abs(x));
    cand.certificate = worst / pnorm;
    if (!(cand.certificate < cfg.plane_tol)) continue;
    const Poly form = cand.form();
    bool dup = false;
    for (const auto& kept : rep.planes)
      if (projective_distance(kept.form(), form) < cfg.direction_tol) dup = true;
    if (dup) continue;
    Poly w = pn;
    cand.multiplicity = detail::strip_factor(w, form, cfg.factorizer.verify_tol);
    if (cand.multiplicity == 0) continue;
    rep.planes.push_back(cand);
  }
  for (const auto& pl : rep.planes) rep.planar_degree += pl.multiplicity;

  // Distinct directions.
  std::vector<Eigen::Vector2cd> dirs;
  std::vector<int> family(rep.planes.size(), -1);
  for (std::size_t i = 0; i < rep.planes.size(); ++i) {
    const auto n = rep.planes[i].normal();
    int found = -1;
    for (std::size_t d = 0; d < dirs.size(); ++d)
      if (std::sqrt(std::max(0.0, 1.0 - std::norm(dirs[d].dot(n)))) < cfg.direction_tol) found = static_cast<int>(d);
    if (found < 0) {
      found = static_cast<int>(dirs.size());
      dirs.push_back(n);
    }
    family[i] = found;
  }

  if (dirs.size() > 2) {
    rep.separable = false;
    rep.notes += "more than two distinct plane directions. ";
  } else if (rep.planar_degree < rep.degree) {
    rep.separable = false;
    rep.notes += "zero set is not a union of planes (planar degree " + std::to_string(rep.planar_degree) + " < " +
                 std::to_string(rep.degree) + "). ";
  } else if (dirs.size() == 2 && std::abs(dirs[0].dot(dirs[1])) >= cfg.orthogonal_tol) {
    rep.separable = false;
    rep.notes += "two plane families that are not orthogonal. ";
  } else {
    rep.separable = true;
  }
  if (dirs.size() == 2 && rep.planar_degree == rep.degree) {
    std::pair<std::vector<int>, std::vector<int>> split;
    for (std::size_t i = 0; i < rep.planes.size(); ++i)
      (family[i] == 0 ? split.first : split.second).push_back(static_cast<int>(i));
    rep.family_split = split;
  }

  if (cfg.cross_check && rep.planar_degree < rep.degree) {
    try {
      AtomicConfig ac;
      ac.factorizer = cfg.factorizer;
      const auto dec = atomic_decomposition(p, ac);
      const bool atomic_sep = check_partition(dec, ModePartition{{1, 1}}).separable;
      rep.notes += std::string("atomic cross-check: ") + (atomic_sep ? "separable (DISAGREES)" : "not separable") + ". ";
    } catch (const InconclusiveError& e) {
      rep.notes += std::string("atomic cross-check inconclusive: ") + e.what() + ". ";
    } catch (const InconsistencyError& e) {
      rep.notes += std::string("atomic cross-check inconsistent: ") + e.what() + ". ";
    }
  }
  return rep;
}

inline bool two_mode_separable(const Poly& p, const TwoModeConfig& cfg = {}) {
  TwoModeConfig c = cfg;
  c.cross_check = false;
  return two_mode_planes(p, c).separable;
}

// ---------------------------------------------------------------------------
// Stellar rank 2

/// z^T A z + l^T z + c0 with A symmetric.
struct Rank2Form {
  CMatrix a;
  CVector l;
  Complex c0;

  Rank2Form(CMatrix a_in, CVector l_in, Complex c0_in) : a(std::move(a_in)), l(std::move(l_in)), c0(c0_in) {
    if (a.rows() != a.cols() || a.rows() != l.size()) throw DimensionError("rank-2 form has inconsistent sizes");
    a = (a + a.transpose()) / 2.0;
  }

  int modes() const { return static_cast<int>(a.rows()); }

  Poly poly() const {
    const int m = modes();
    Poly p(m);
    for (int j = 0; j < m; ++j) {
      Exponents e(m, 0);
      e[j] = 2;
      p.add_term(e, a(j, j));
      for (int k = j + 1; k < m; ++k) {
        Exponents f(m, 0);
        f[j] = f[k] = 1;
        p.add_term(f, 2.0 * a(j, k));
      }
      Exponents g(m, 0);
      g[j] = 1;
      p.add_term(g, l[j]);
    }
    p.add_term(Exponents(m, 0), c0);
    p.cleanup();
    return p;
  }
};

inline Rank2Form rank2_form(const Poly& p) {
  if (p.total_degree() != 2) throw DomainError("rank-2 form needs a polynomial of total degree 2");
  const int m = p.var_count();
  CMatrix a = CMatrix::Zero(m, m);
  CVector l = CVector::Zero(m);
  Complex c0{};
  for (const auto& [e, v] : p.terms()) {
    std::vector<int> idx;
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < e[j]; ++k) idx.push_back(j);
    if (idx.empty()) c0 = v;
    else if (idx.size() == 1) l[idx[0]] = v;
    else if (idx[0] == idx[1]) a(idx[0], idx[0]) = v;
    else a(idx[0], idx[1]) = a(idx[1], idx[0]) = v / 2.0;
  }
  return Rank2Form(a, l, c0);
}

/// A = Q diag(s) Q^T with Q unitary and s >= 0 (s descending).
struct Takagi {
  CMatrix q;
  Eigen::VectorXd s;
};

inline Takagi takagi(const CMatrix& a) {
  const Eigen::Index n = a.rows();
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const CMatrix& u = svd.matrixU();
  const CMatrix& v = svd.matrixV();
  // A = A^T forces D = U^dagger conj(V) to commute with S and be symmetric on
  // the nonzero singular blocks; on the null block it is arbitrary, so reset it.
  const auto& sv = svd.singularValues();
  const double cut = 1e-12 * (n ? sv(0) : 0.0);
  CMatrix d = u.adjoint() * v.conjugate();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (sv(i) <= cut || sv(j) <= cut) d(i, j) = i == j ? Complex(1.0) : Complex{};
  d = (d + d.transpose()) / 2.0;
  // Symmetric square root of the symmetric unitary D via X + tY with real X, Y.
  const Eigen::MatrixXd x = d.real(), y = d.imag();
  Eigen::MatrixXd w;
  for (double t : {0.37, 1.91, -0.73, 3.3}) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x + t * y);
    w = es.eigenvectors();
    const CMatrix diag = w.transpose().cast<Complex>() * d * w.cast<Complex>();
    if ((diag - CMatrix(diag.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-10) break;
  }
  const CMatrix lam = w.transpose().cast<Complex>() * d * w.cast<Complex>();
  CVector sq(n);
  for (Eigen::Index i = 0; i < n; ++i) sq(i) = std::sqrt(lam(i, i));
  const CMatrix root = w.cast<Complex>() * sq.asDiagonal() * w.transpose().cast<Complex>();
  Takagi t;
  t.q = u * root;
  t.s = svd.singularValues();
  return t;
}

struct Rank2Verdict {
  bool separable = false;
  int m1 = 0, m2 = 0;
  /// Takagi route: rank(A) plus one if l leaves range(A).
  int takagi_essential_dim = 0;
  /// essential_space route
  int catalecticant_essential_dim = 0;
  bool routes_agree = true;
  /// M = 2 only: the literal eigenvector clause, when it applies (rank A = 2).
  std::optional<bool> literal_clause;
  bool discrepancy = false;
  std::optional<TwoModeReport> two_mode;
  std::string notes;
};

inline Rank2Verdict rank2_separable(const Rank2Form& form, int m1, int m2, const TwoModeConfig& cfg = {},
                                    double rank_tol = kDefaultRankTol) {
  const int m = form.modes();
  if (m1 + m2 != m || m1 < 1 || m2 < 1) throw DimensionError("split sizes must be positive and sum to the mode count");
  if (m1 > m2) std::swap(m1, m2);
  Rank2Verdict v;
  v.m1 = m1;
  v.m2 = m2;
  const Poly p = form.poly();

  const Takagi t = takagi(form.a);
  const int rk = numerical_rank(t.s, rank_tol);
  const double scale = std::max({t.s.size() ? t.s(0) : 0.0, form.l.norm(), 1e-300});
  int dim = rk;
  if (rk == 0) {
    dim = form.l.norm() > rank_tol * scale ? 1 : 0;
  } else {
    const CMatrix qk = t.q.leftCols(rk);
    const CVector resid = form.l - qk * (qk.adjoint() * form.l);
    if (resid.norm() > rank_tol * scale) dim += 1;
  }
  v.takagi_essential_dim = dim;
  v.catalecticant_essential_dim = essential_space(p, rank_tol).dim;
  v.routes_agree = v.takagi_essential_dim == v.catalecticant_essential_dim;
  if (!v.routes_agree) v.notes += "Takagi and catalecticant essential dimensions disagree. ";

  if (m2 > 1) {
    v.separable = v.catalecticant_essential_dim <= m2;
    return v;
  }
  // M = 2, split 1|1
  v.two_mode = two_mode_planes(p, cfg);
  v.separable = v.two_mode->separable;
  if (rk == 2) {
    const bool equal_sv = std::abs(t.s(0) - t.s(1)) <= 1e-8 * t.s(0);
    const CVector al = form.a * form.l;
    const bool l_zero = form.l.norm() <= rank_tol * scale;
    bool eigen = l_zero;
    if (!l_zero) {
      const Complex lam = form.l.dot(al) / form.l.squaredNorm();
      eigen = (al - lam * form.l).norm() <= 1e-8 * al.norm() + 1e-300;
    }
    const bool c0_zero = std::abs(form.c0) <= rank_tol * scale;
    v.literal_clause = equal_sv && ((!eigen && !c0_zero) || (eigen && c0_zero));
    if (*v.literal_clause != v.separable) {
      v.discrepancy = true;
      v.notes += "literal M = 2 clause gives " + std::string(*v.literal_clause ? "separable" : "not separable") +
                 "; the hyperplane verdict is binding. ";
    }
  }
  return v;
}

}  // namespace stellar
