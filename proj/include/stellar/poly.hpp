#pragma once

// Sparse multivariate complex polynomials and the core-state <-> stellar
// polynomial bijection.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stellar/error.hpp"

namespace stellar {

using Complex = std::complex<double>;
using Exponents = std::vector<int>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kDefaultCoeffTol = 1e-12;

inline int degree_of(const Exponents& e) { return std::accumulate(e.begin(), e.end(), 0); }

/// Graded-lexicographic order: total degree first, then the exponent of z1,
/// then z2, ... The greatest monomial is the leading one.
struct GrlexLess {
  bool operator()(const Exponents& a, const Exponents& b) const {
    const int da = degree_of(a);
    const int db = degree_of(b);
    if (da != db) return da < db;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

using TermMap = std::map<Exponents, Complex, GrlexLess>;

/// All exponent vectors of total degree <= max_degree in `vars` variables,
/// ascending in graded-lex order.
inline std::vector<Exponents> monomials_up_to(int vars, int max_degree) {
  std::vector<Exponents> out;
  if (max_degree < 0) return out;
  Exponents cur(vars, 0);
  auto rec = [&](auto&& self, int pos, int budget) -> void {
    if (pos == vars) {
      out.push_back(cur);
      return;
    }
    for (int e = 0; e <= budget; ++e) {
      cur[pos] = e;
      self(self, pos + 1, budget - e);
    }
    cur[pos] = 0;
  };
  rec(rec, 0, max_degree);
  std::sort(out.begin(), out.end(), GrlexLess{});
  return out;
}

/// Number of monomials of degree <= d in n variables: binom(n + d, d).
inline std::size_t monomial_count(int vars, int max_degree) {
  if (max_degree < 0) return 0;
  double c = 1.0;
  for (int i = 1; i <= max_degree; ++i) c = c * (vars + i) / i;
  return static_cast<std::size_t>(std::llround(c));
}

/// Sparse polynomial in `var_count` complex variables. Coefficients whose
/// magnitude falls below coeff_tol times the largest magnitude are dropped
/// after every arithmetic operation.
class Poly {
 public:
  explicit Poly(int var_count = 1, double coeff_tol = kDefaultCoeffTol)
      : vars_(var_count), coeff_tol_(coeff_tol) {
    if (var_count < 1) throw DimensionError("polynomial needs at least one variable");
  }

  Poly(int var_count, TermMap terms, double coeff_tol = kDefaultCoeffTol)
      : vars_(var_count), coeff_tol_(coeff_tol), terms_(std::move(terms)) {
    if (var_count < 1) throw DimensionError("polynomial needs at least one variable");
    for (const auto& [e, c] : terms_) {
      check_exponents(e);
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw DomainError("non-finite polynomial coefficient");
    }
    cleanup();
  }

  static Poly constant(int var_count, Complex c, double coeff_tol = kDefaultCoeffTol) {
    Poly p(var_count, coeff_tol);
    p.add_term(Exponents(var_count, 0), c);
    return p;
  }

  /// The coordinate z_j (0-based j).
  static Poly variable(int var_count, int j, double coeff_tol = kDefaultCoeffTol) {
    if (j < 0 || j >= var_count) throw DimensionError("variable index out of range");
    Poly p(var_count, coeff_tol);
    Exponents e(var_count, 0);
    e[j] = 1;
    p.add_term(e, 1.0);
    return p;
  }

  /// Affine form sum_j coeffs[j] z_j + constant.
  static Poly linear(std::span<const Complex> coeffs, Complex constant = 0.0,
                     double coeff_tol = kDefaultCoeffTol) {
    Poly p(static_cast<int>(coeffs.size()), coeff_tol);
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      Exponents e(coeffs.size(), 0);
      e[j] = 1;
      p.add_term(e, coeffs[j]);
    }
    p.add_term(Exponents(coeffs.size(), 0), constant);
    p.cleanup();
    return p;
  }

  int var_count() const { return vars_; }
  double coeff_tol() const { return coeff_tol_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && degree_of(terms_.begin()->first) == 0);
  }

  /// Total degree; -1 for the zero polynomial.
  int total_degree() const { return terms_.empty() ? -1 : degree_of(terms_.rbegin()->first); }

  bool is_homogeneous() const {
    if (terms_.empty()) return true;
    const int d = total_degree();
    return std::all_of(terms_.begin(), terms_.end(),
                       [d](const auto& t) { return degree_of(t.first) == d; });
  }

  Complex coeff(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Complex{} : it->second;
  }

  const Exponents& leading_exponents() const {
    if (terms_.empty()) throw ZeroStateError("zero polynomial has no leading term");
    return terms_.rbegin()->first;
  }
  Complex leading_coeff() const {
    if (terms_.empty()) throw ZeroStateError("zero polynomial has no leading term");
    return terms_.rbegin()->second;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

  /// Euclidean norm of the coefficient vector.
  double norm() const {
    double s = 0.0;
    for (const auto& [e, c] : terms_) s += std::norm(c);
    return std::sqrt(s);
  }

  /// Highest exponent of z_j over all terms.
  int degree_in(int j) const {
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[j]);
    return d;
  }

  /// Accumulates c into the coefficient of z^e (no cleanup).
  void add_term(const Exponents& e, Complex c) {
    check_exponents(e);
    if (c == Complex{}) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == Complex{}) terms_.erase(it);
    }
  }

  /// Drops coefficients below coeff_tol relative to the largest one.
  void cleanup() {
    const double cut = coeff_tol_ * max_abs();
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (std::abs(it->second) <= cut || it->second == Complex{})
        it = terms_.erase(it);
      else
        ++it;
    }
  }

  /// Same coefficients viewed in a different number of variables. Growing pads
  /// exponents with zeros; shrinking requires the dropped variables to be absent.
  Poly with_var_count(int new_vars) const {
    Poly out(new_vars, coeff_tol_);
    for (const auto& [e, c] : terms_) {
      Exponents f(new_vars, 0);
      for (int j = 0; j < vars_; ++j) {
        if (j < new_vars)
          f[j] = e[j];
        else if (e[j] != 0)
          throw DimensionError("cannot drop a variable the polynomial depends on");
      }
      out.add_term(f, c);
    }
    return out;
  }

  /// Drops every term involving a variable with index >= keep, then shrinks.
  Poly truncated(int keep) const {
    Poly out(keep, coeff_tol_);
    for (const auto& [e, c] : terms_) {
      if (std::any_of(e.begin() + keep, e.end(), [](int x) { return x != 0; })) continue;
      out.add_term(Exponents(e.begin(), e.begin() + keep), c);
    }
    out.cleanup();
    return out;
  }

  /// Divides by the leading graded-lex coefficient.
  Poly normalized() const {
    if (terms_.empty()) return *this;
    Poly out = *this;
    const Complex lc = leading_coeff();
    for (auto& [e, c] : out.terms_) c /= lc;
    return out;
  }

  Poly& operator+=(const Poly& q) {
    check_same(q);
    for (const auto& [e, c] : q.terms_) add_term(e, c);
    cleanup();
    return *this;
  }
  Poly& operator-=(const Poly& q) {
    check_same(q);
    for (const auto& [e, c] : q.terms_) add_term(e, -c);
    cleanup();
    return *this;
  }
  Poly& operator*=(Complex s) {
    if (s == Complex{}) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend Poly operator+(Poly p, const Poly& q) { return p += q; }
  friend Poly operator-(Poly p, const Poly& q) { return p -= q; }
  friend Poly operator*(Poly p, Complex s) { return p *= s; }
  friend Poly operator*(Complex s, Poly p) { return p *= s; }
  friend Poly operator-(Poly p) { return p *= -1.0; }

  friend Poly operator*(const Poly& p, const Poly& q) {
    p.check_same(q);
    Poly out(p.vars_, std::min(p.coeff_tol_, q.coeff_tol_));
    Exponents e(p.vars_);
    for (const auto& [ep, cp] : p.terms_) {
      for (const auto& [eq, cq] : q.terms_) {
        for (int j = 0; j < p.vars_; ++j) e[j] = ep[j] + eq[j];
        out.add_term(e, cp * cq);
      }
    }
    out.cleanup();
    return out;
  }

  friend bool operator==(const Poly& a, const Poly& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }

  void check_same(const Poly& q) const {
    if (vars_ != q.vars_) throw DimensionError("variable count mismatch");
  }

 private:
  void check_exponents(const Exponents& e) const {
    if (static_cast<int>(e.size()) != vars_) throw DimensionError("monomial length != variable count");
    for (int x : e)
      if (x < 0) throw DomainError("negative exponent");
  }

  int vars_;
  double coeff_tol_;
  TermMap terms_;
};

/// p^k by repeated squaring.
inline Poly pow(const Poly& p, int k) {
  Poly result = Poly::constant(p.var_count(), 1.0, p.coeff_tol());
  Poly base = p;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

/// ||a - b||_2 over coefficient vectors.
inline double coefficient_distance(const Poly& a, const Poly& b) {
  a.check_same(b);
  double s = 0.0;
  for (const auto& [e, c] : a.terms()) s += std::norm(c - b.coeff(e));
  for (const auto& [e, c] : b.terms())
    if (!a.terms().count(e)) s += std::norm(c);
  return std::sqrt(s);
}

/// Distance between the normalized forms (leading coefficient 1) of a and b.
inline double projective_distance(const Poly& a, const Poly& b) {
  return coefficient_distance(a.normalized(), b.normalized());
}

// ---------------------------------------------------------------------------
// Evaluation and calculus

inline Complex evaluate(const Poly& p, std::span<const Complex> z) {
  const int m = p.var_count();
  if (static_cast<int>(z.size()) != m) throw DimensionError("evaluation point has wrong length");
  std::vector<std::vector<Complex>> powers(m);
  for (int j = 0; j < m; ++j) {
    const int d = p.degree_in(j);
    powers[j].resize(d + 1);
    powers[j][0] = 1.0;
    for (int k = 1; k <= d; ++k) powers[j][k] = powers[j][k - 1] * z[j];
  }
  Complex acc{};
  for (const auto& [e, c] : p.terms()) {
    Complex t = c;
    for (int j = 0; j < m; ++j) t *= powers[j][e[j]];
    acc += t;
  }
  return acc;
}

inline Complex evaluate(const Poly& p, const CVector& z) {
  return evaluate(p, std::span<const Complex>(z.data(), static_cast<std::size_t>(z.size())));
}

/// d p / d z_j (0-based j).
inline Poly partial_derivative(const Poly& p, int j) {
  if (j < 0 || j >= p.var_count()) throw DimensionError("derivative index out of range");
  Poly out(p.var_count(), p.coeff_tol());
  for (const auto& [e, c] : p.terms()) {
    if (e[j] == 0) continue;
    Exponents f = e;
    f[j] -= 1;
    out.add_term(f, c * static_cast<double>(e[j]));
  }
  out.cleanup();
  return out;
}

/// sum_j v_j dp/dz_j.
inline Poly directional_derivative(const Poly& p, const CVector& v) {
  if (v.size() != p.var_count()) throw DimensionError("direction has wrong length");
  Poly out(p.var_count(), p.coeff_tol());
  for (const auto& [e, c] : p.terms()) {
    for (int j = 0; j < p.var_count(); ++j) {
      if (e[j] == 0 || v[j] == Complex{}) continue;
      Exponents f = e;
      f[j] -= 1;
      out.add_term(f, c * static_cast<double>(e[j]) * v[j]);
    }
  }
  out.cleanup();
  return out;
}

inline CVector gradient_at(const Poly& p, const CVector& z) {
  CVector g(p.var_count());
  for (int j = 0; j < p.var_count(); ++j) g[j] = evaluate(partial_derivative(p, j), z);
  return g;
}

// ---------------------------------------------------------------------------
// Linear substitution

namespace detail {

/// Dense univariate multiply, ascending coefficients.
inline std::vector<Complex> mul_dense(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  std::vector<Complex> out(a.size() + b.size() - 1, Complex{});
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k) out[i + k] += a[i] * b[k];
  return out;
}

}  // namespace detail

/// q(y) = p(L y + shift) where L is M x K. The result has K variables.
inline Poly substitute_affine(const Poly& p, const CMatrix& L, const CVector& shift) {
  const int m = p.var_count();
  if (L.rows() != m || shift.size() != m) throw DimensionError("substitution has wrong shape");
  const int k = static_cast<int>(L.cols());
  Poly out(k, p.coeff_tol());
  if (p.is_zero()) return out;
  // powers[j][e] = (row_j(L) . y + shift_j)^e
  std::vector<std::vector<Poly>> powers(m);
  for (int j = 0; j < m; ++j) {
    std::vector<Complex> coeffs(k);
    for (int c = 0; c < k; ++c) coeffs[c] = L(j, c);
    Poly form = Poly::linear(coeffs, shift[j], 0.0);
    const int d = p.degree_in(j);
    powers[j].reserve(d + 1);
    powers[j].push_back(Poly::constant(k, 1.0, 0.0));
    for (int e = 1; e <= d; ++e) powers[j].push_back(powers[j].back() * form);
  }
  for (const auto& [e, c] : p.terms()) {
    Poly t = Poly::constant(k, c, 0.0);
    for (int j = 0; j < m; ++j)
      if (e[j] > 0) t = t * powers[j][e[j]];
    for (const auto& [f, ct] : t.terms()) out.add_term(f, ct);
  }
  out.cleanup();
  return out;
}

/// Univariate coefficients (ascending) of t -> p(u + t v).
inline std::vector<Complex> restrict_line(const Poly& p, const CVector& u, const CVector& v) {
  const int m = p.var_count();
  if (u.size() != m || v.size() != m) throw DimensionError("line has wrong dimension");
  const int r = std::max(p.total_degree(), 0);
  std::vector<Complex> out(r + 1, Complex{});
  std::vector<std::vector<std::vector<Complex>>> powers(m);
  for (int j = 0; j < m; ++j) {
    const int d = p.degree_in(j);
    powers[j].reserve(d + 1);
    powers[j].push_back({Complex(1.0)});
    const std::vector<Complex> form{u[j], v[j]};
    for (int e = 1; e <= d; ++e) powers[j].push_back(detail::mul_dense(powers[j].back(), form));
  }
  for (const auto& [e, c] : p.terms()) {
    std::vector<Complex> t{c};
    for (int j = 0; j < m; ++j)
      if (e[j] > 0) t = detail::mul_dense(t, powers[j][e[j]]);
    for (std::size_t i = 0; i < t.size(); ++i) out[i] += t[i];
  }
  return out;
}

/// q(x, y) = p(a + x u + y v).
inline Poly restrict_plane(const Poly& p, const CVector& a, const CVector& u, const CVector& v) {
  const int m = p.var_count();
  if (a.size() != m || u.size() != m || v.size() != m) throw DimensionError("plane has wrong dimension");
  CMatrix L(m, 2);
  L.col(0) = u;
  L.col(1) = v;
  Eigen::JacobiSVD<CMatrix> svd(L);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0 || s(1) <= 1e-12 * s(0)) throw DomainError("plane directions are linearly dependent");
  return substitute_affine(p, L, a);
}

// ---------------------------------------------------------------------------
// Unitary matrices and linear changes of variables

inline double unitarity_defect(const CMatrix& u) {
  const CMatrix d = u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

/// Square matrix with U^dagger U = I to within 1e-10.
class UnitaryMatrix {
 public:
  static constexpr double kTolerance = 1e-10;

  explicit UnitaryMatrix(CMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1) throw DimensionError("unitary must be square");
    if (const double d = unitarity_defect(m_); !(d < kTolerance))
      throw DomainError("matrix is not unitary (defect " + std::to_string(d) + ")");
  }

  static UnitaryMatrix identity(int dim) { return UnitaryMatrix(CMatrix::Identity(dim, dim)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }
  UnitaryMatrix adjoint() const { return UnitaryMatrix(m_.adjoint()); }
  UnitaryMatrix transpose() const { return UnitaryMatrix(m_.transpose()); }
  friend UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionError("unitary dimension mismatch");
    return UnitaryMatrix(a.m_ * b.m_);
  }

 private:
  CMatrix m_;
};

/// q(z) = p(V z).
inline Poly compose_linear(const Poly& p, const UnitaryMatrix& v) {
  if (v.dim() != p.var_count()) throw DimensionError("unitary dimension != variable count");
  return substitute_affine(p, v.matrix(), CVector::Zero(v.dim()));
}

// ---------------------------------------------------------------------------
// Division

struct DivisionResult {
  Poly quotient;
  Poly remainder;
  double residual;  // ||remainder|| / ||p||
};

/// Multivariate division by a single divisor in graded-lex order.
inline DivisionResult divide_exact(const Poly& p, const Poly& q) {
  p.check_same(q);
  if (q.is_zero()) throw ZeroStateError("division by the zero polynomial");
  const int m = p.var_count();
  Poly quotient(m, p.coeff_tol());
  Poly remainder(m, p.coeff_tol());
  if (p.is_zero()) return {quotient, remainder, 0.0};

  TermMap work = p.terms();
  const Exponents& lq = q.leading_exponents();
  const Complex lcq = q.leading_coeff();
  Exponents shift(m);
  while (!work.empty()) {
    auto top = std::prev(work.end());
    const Exponents lm = top->first;
    const Complex lc = top->second;
    work.erase(top);
    bool divisible = true;
    for (int j = 0; j < m; ++j) {
      shift[j] = lm[j] - lq[j];
      if (shift[j] < 0) divisible = false;
    }
    if (!divisible) {
      remainder.add_term(lm, lc);
      continue;
    }
    const Complex t = lc / lcq;
    quotient.add_term(shift, t);
    Exponents e(m);
    for (auto it = q.terms().begin(); it != q.terms().end(); ++it) {
      if (std::next(it) == q.terms().end()) break;  // the leading term cancels exactly
      for (int j = 0; j < m; ++j) e[j] = it->first[j] + shift[j];
      auto [w, inserted] = work.try_emplace(e, -t * it->second);
      if (!inserted) w->second -= t * it->second;
    }
  }
  const double residual = remainder.norm() / p.norm();
  quotient.cleanup();
  return {quotient, remainder, residual};
}

// ---------------------------------------------------------------------------
// Core states

/// Exact n! as a double for n <= 20.
inline double factorial(int n) {
  if (n < 0) throw DomainError("negative factorial");
  if (n > 20) throw DomainError("occupation number above 20 is not supported");
  std::uint64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
  return static_cast<double>(f);
}

inline double occupation_weight(const Exponents& n) {
  double w = 1.0;
  for (int k : n) w *= factorial(k);
  return std::sqrt(w);
}

/// Finite superposition of M-mode Fock states.
struct CoreState {
  int modes = 1;
  std::map<Exponents, Complex, GrlexLess> amplitudes;
  bool normalized = false;

  double norm() const {
    double s = 0.0;
    for (const auto& [n, c] : amplitudes) s += std::norm(c);
    return std::sqrt(s);
  }

  int stellar_rank() const {
    int r = 0;
    for (const auto& [n, c] : amplitudes) r = std::max(r, degree_of(n));
    return r;
  }

  CoreState normalized_copy() const {
    const double s = norm();
    if (s == 0.0) throw ZeroStateError("cannot normalize the zero state");
    CoreState out = *this;
    for (auto& [n, c] : out.amplitudes) c /= s;
    out.normalized = true;
    return out;
  }
};

/// Stellar polynomial: coefficient C_n / sqrt(prod_j n_j!).
inline Poly poly_from_core(const CoreState& state, double coeff_tol = kDefaultCoeffTol) {
  if (state.amplitudes.empty()) throw ZeroStateError("core state has no amplitudes");
  Poly p(state.modes, coeff_tol);
  for (const auto& [n, c] : state.amplitudes) {
    if (static_cast<int>(n.size()) != state.modes) throw DimensionError("occupation list length != modes");
    p.add_term(n, c / occupation_weight(n));
  }
  p.cleanup();
  if (p.is_zero()) throw ZeroStateError("core state is zero");
  return p;
}

/// Inverse of poly_from_core.
inline CoreState core_from_poly(const Poly& p) {
  CoreState s;
  s.modes = p.var_count();
  for (const auto& [e, c] : p.terms()) s.amplitudes[e] = c * occupation_weight(e);
  s.normalized = std::abs(s.norm() - 1.0) < 1e-10;
  return s;
}

}  // namespace stellar
