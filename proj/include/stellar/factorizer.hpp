#pragma once

// Numerical absolute factorization of multivariate polynomials.
//
// Pipeline: monomial factors, essential-variable reduction, a random unitary
// frame, then either a univariate / homogeneous-bivariate fast path or
// (linear peel) + (squarefree part, Ruppert count, monodromy grouping,
// Vandermonde fit of every group). All randomness comes from cfg.seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stellar/essential.hpp"
#include "stellar/linalg.hpp"
#include "stellar/poly.hpp"
#include "stellar/roots.hpp"

namespace stellar {

struct FactorizerConfig {
  std::uint64_t seed = 0;
  double verify_tol = 1e-8;
  double root_tol = 1e-9;
  int loop_steps = 64;
  int max_loops = 32;
  double samples_multiplier = 2.0;
  double rank_tol = kDefaultRankTol;
  double count_tol = 1e-8;  // relative singular-value threshold of the Ruppert system
};

struct IrreducibleFactor {
  Poly poly;
  int multiplicity = 1;
  int degree = 0;
};

struct Factorization {
  int var_count = 1;
  Complex scalar = 1.0;
  std::vector<IrreducibleFactor> factors;
  double residual = 0.0;
  std::vector<std::string> method_trace;

  /// scalar * prod factors^multiplicity
  Poly product() const {
    Poly out = Poly::constant(var_count, scalar);
    for (const auto& f : factors) out = out * pow(f.poly, f.multiplicity);
    return out;
  }

  int total_degree() const {
    int r = 0;
    for (const auto& f : factors) r += f.multiplicity * f.degree;
    return r;
  }
};

/// Inconclusive numerical stage, with whatever was established before it.
class FactorizationInconclusive : public InconclusiveError {
 public:
  FactorizationInconclusive(const std::string& what, Factorization partial)
      : InconclusiveError(what), partial(std::move(partial)) {}
  Factorization partial;
};

class FactorizationInconsistent : public InconsistencyError {
 public:
  FactorizationInconsistent(const std::string& what, Factorization partial)
      : InconsistencyError(what), partial(std::move(partial)) {}
  Factorization partial;
};

/// Ruppert rank decision too close to the threshold.
class AmbiguousCount : public InconclusiveError {
 public:
  AmbiguousCount(int low, int high)
      : InconclusiveError("ambiguous absolute factor count (" + std::to_string(low) + " or " +
                          std::to_string(high) + ")"),
        low(low),
        high(high) {}
  int low;
  int high;
};

namespace detail {

/// Dense bivariate coefficients c[i][j] of x^i y^j.
struct Bivariate {
  std::vector<std::vector<Complex>> c;

  explicit Bivariate(const Poly& q) {
    if (q.var_count() != 2) throw DimensionError("bivariate polynomial expected");
    const int dx = q.degree_in(0);
    const int dy = q.degree_in(1);
    c.assign(dx + 1, std::vector<Complex>(dy + 1, Complex{}));
    for (const auto& [e, v] : q.terms()) c[e[0]][e[1]] = v;
  }

  int degree_x() const { return static_cast<int>(c.size()) - 1; }

  /// Coefficients in x at fixed y.
  std::vector<Complex> at(Complex y) const {
    std::vector<Complex> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      Complex acc{};
      for (std::size_t j = c[i].size(); j-- > 0;) acc = acc * y + c[i][j];
      out[i] = acc;
    }
    return out;
  }
};

inline double min_separation(const std::vector<Complex>& r) {
  double m = 1e300;
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = i + 1; j < r.size(); ++j) m = std::min(m, std::abs(r[i] - r[j]));
  return m;
}

/// Tracks the x-roots of q(x, path(s)) for s in [0, 1], starting from `roots`
/// (the roots at path(0)). At each step all roots are recomputed and matched
/// to a linear prediction; a step is accepted only when the matching is an
/// unambiguous bijection. Returns false if the step size collapses.
inline bool track_roots(const Bivariate& q, const std::function<Complex(double)>& path,
                        std::vector<Complex>& roots, int base_steps) {
  const std::size_t d = roots.size();
  if (d == 0) return true;
  std::vector<Complex> prev = roots;
  double s = 0.0, h = 1.0 / base_steps, hprev = 0.0;
  const double hmax = 4.0 / base_steps;
  int guard = 0;
  while (s < 1.0) {
    if (++guard > 200000) return false;
    h = std::min(h, 1.0 - s);
    const auto coeffs = q.at(path(s + h));
    if (coeffs.back() == Complex{}) return false;
    const auto next = raw_roots(coeffs);
    if (next.size() != d) return false;
    std::vector<Complex> pred(d);
    for (std::size_t i = 0; i < d; ++i)
      pred[i] = hprev > 0 ? roots[i] + (roots[i] - prev[i]) * (h / hprev) : roots[i];
    const double sep = std::min(min_separation(next), min_separation(roots));
    std::vector<int> match(d, -1);
    std::vector<char> used(d, 0);
    bool ok = sep > 0;
    for (std::size_t i = 0; i < d && ok; ++i) {
      std::size_t best = 0;
      double bd = 1e300;
      for (std::size_t j = 0; j < d; ++j) {
        const double dist = std::abs(next[j] - pred[i]);
        if (dist < bd) {
          bd = dist;
          best = j;
        }
      }
      const double step = std::abs(next[best] - roots[i]);
      if (used[best] || bd > 0.25 * sep || step > 0.5 * sep) ok = false;
      else {
        used[best] = 1;
        match[i] = static_cast<int>(best);
      }
    }
    if (!ok) {
      h /= 2;
      if (h < 1e-9) return false;
      continue;
    }
    prev = roots;
    for (std::size_t i = 0; i < d; ++i) roots[i] = next[match[i]];
    s += h;
    hprev = h;
    h = std::min(h * 1.5, hmax);
  }
  return true;
}

inline Complex drop_small_parts(Complex c, double cut) {
  return {std::abs(c.real()) > cut ? c.real() : 0.0, std::abs(c.imag()) > cut ? c.imag() : 0.0};
}

inline int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

inline Poly poly_from_coeffs(int vars, const std::vector<Exponents>& mons, const CVector& coeffs) {
  Poly p(vars);
  for (std::size_t k = 0; k < mons.size(); ++k) p.add_term(mons[k], coeffs(static_cast<Eigen::Index>(k)));
  p.cleanup();
  return p.normalized();
}

inline CMatrix vandermonde(const std::vector<Exponents>& mons, const std::vector<CVector>& pts) {
  CMatrix v(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(mons.size()));
  for (std::size_t r = 0; r < pts.size(); ++r) {
    const auto& z = pts[r];
    for (std::size_t k = 0; k < mons.size(); ++k) {
      Complex t = 1.0;
      for (Eigen::Index j = 0; j < z.size(); ++j)
        for (int e = 0; e < mons[k][j]; ++e) t *= z[j];
      v(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = t;
    }
  }
  return v;
}

/// Fits the degree-d polynomial vanishing on pts as the 1-dimensional kernel
/// of the Vandermonde matrix; nullopt if the kernel is not clearly 1-dimensional.
inline std::optional<Poly> fit_hypersurface(int vars, int degree, const std::vector<CVector>& pts) {
  const auto mons = monomials_up_to(vars, degree);
  if (pts.size() < mons.size()) return std::nullopt;
  const NullVector nv = smallest_right_singular(vandermonde(mons, pts));
  if (!(nv.smallest < 1e-7 && nv.next_smallest > 1e3 * nv.smallest)) return std::nullopt;
  return poly_from_coeffs(vars, mons, nv.vector);
}

/// Repeatedly divides w by f while the division is exact to tol.
inline int strip_factor(Poly& w, const Poly& f, double tol) {
  int mult = 0;
  while (!w.is_constant() && f.total_degree() <= w.total_degree()) {
    auto d = divide_exact(w, f);
    if (!(d.residual < tol)) break;
    w = std::move(d.quotient);
    ++mult;
  }
  return mult;
}

inline bool factor_less(const IrreducibleFactor& a, const IrreducibleFactor& b) {
  if (a.degree != b.degree) return a.degree < b.degree;
  auto ia = a.poly.terms().rbegin();
  auto ib = b.poly.terms().rbegin();
  for (; ia != a.poly.terms().rend() && ib != b.poly.terms().rend(); ++ia, ++ib) {
    if (ia->first != ib->first) return GrlexLess{}(ib->first, ia->first);
    const Complex ca = ia->second, cb = ib->second;
    if (std::abs(ca - cb) > 1e-9 * (1 + std::abs(ca))) {
      if (std::abs(ca.real() - cb.real()) > 1e-9) return ca.real() < cb.real();
      return ca.imag() < cb.imag();
    }
  }
  return a.poly.size() < b.poly.size();
}

}  // namespace detail

/// Roots with multiplicities using the factorizer's clustering tolerance.
inline std::vector<Root> univariate_roots(const std::vector<Complex>& coeffs, const FactorizerConfig& cfg) {
  RootOptions opt;
  opt.root_tol = cfg.root_tol;
  return univariate_roots(coeffs, opt);
}

struct LinearPeel {
  std::vector<IrreducibleFactor> linear;
  Poly residual_poly;
};

/// Extracts every affine factor of p: for each root cluster on a random line,
/// the tangent form of the (k-1)-th directional derivative is tried as a divisor.
inline LinearPeel peel_linear_factors(const Poly& p, const FactorizerConfig& cfg) {
  if (p.is_constant()) throw DomainError("linear peel needs a non-constant polynomial");
  const int m = p.var_count();
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  LinearPeel out{{}, p};
  Poly& w = out.residual_poly;
  int clean = 0, singular = 0, lines = 0;
  while (clean < 3 && !w.is_constant()) {
    if (++lines > 8 * cfg.max_loops) throw InconclusiveError("linear peel did not settle");
    const CVector u = random_cvector(m, rng);
    const CVector v = random_unit_cvector(m, rng);
    const auto roots = univariate_roots(restrict_line(w, u, v), cfg);
    bool found = false, degenerate = false;
    for (const auto& r : roots) {
      if (w.is_constant()) break;
      const CVector z0 = u + r.value * v;
      Poly d = w;
      for (int k = 1; k < r.multiplicity; ++k) d = directional_derivative(d, v);
      const CVector g = gradient_at(d, z0);
      if (g.norm() <= 1e-10 * d.max_abs()) {
        degenerate = true;
        continue;
      }
      std::vector<Complex> coeffs(g.data(), g.data() + m);
      const Poly ell = Poly::linear(coeffs, -(g.transpose() * z0)(0)).normalized();
      const int mult = detail::strip_factor(w, ell, cfg.verify_tol);
      if (mult > 0) {
        found = true;
        out.linear.push_back({ell, mult, 1});
      }
    }
    if (found) {
      clean = 0;
    } else if (degenerate) {
      if (++singular > cfg.max_loops) throw InconclusiveError("gradient vanished at every sampled root");
    } else {
      ++clean;
    }
  }
  return out;
}

/// Number of absolutely irreducible factors of a squarefree bivariate q:
/// the kernel dimension of g_y q - g q_y - h_x q + h q_x = 0 with
/// deg g <= (m-1, n), deg h <= (m, n-1).
inline int count_absolute_factors(const Poly& q, const FactorizerConfig& cfg = {}) {
  if (q.var_count() != 2) throw DimensionError("count_absolute_factors expects a bivariate polynomial");
  if (q.is_constant()) throw DomainError("count_absolute_factors needs a non-constant polynomial");
  const int m = q.degree_in(0);
  const int n = q.degree_in(1);
  if (m == 0 || n == 0) {
    // Univariate in disguise: every root is its own factor.
    const int j = m == 0 ? 1 : 0;
    std::vector<Complex> a(q.degree_in(j) + 1, Complex{});
    for (const auto& [e, c] : q.terms()) a[e[j]] += c;
    return static_cast<int>(univariate_roots(a, cfg).size());
  }
  const Poly qx = partial_derivative(q, 0);
  const Poly qy = partial_derivative(q, 1);
  std::vector<Poly> columns;
  auto mono = [](int i, int j) {
    TermMap t;
    t[{i, j}] = 1.0;
    return Poly(2, std::move(t), 0.0);
  };
  for (int i = 0; i <= m - 1; ++i)
    for (int j = 0; j <= n; ++j) {
      Poly col = mono(i, j) * qy * -1.0;
      if (j > 0) col += mono(i, j - 1) * q * static_cast<double>(j);
      columns.push_back(col);
    }
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= n - 1; ++j) {
      Poly col = mono(i, j) * qx;
      if (i > 0) col -= mono(i - 1, j) * q * static_cast<double>(i);
      columns.push_back(col);
    }
  std::map<Exponents, Eigen::Index, GrlexLess> rows;
  for (const auto& c : columns)
    for (const auto& [e, v] : c.terms()) rows.try_emplace(e, 0);
  Eigen::Index r = 0;
  for (auto& [e, idx] : rows) idx = r++;
  CMatrix a = CMatrix::Zero(std::max<Eigen::Index>(r, 1), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k)
    for (const auto& [e, v] : columns[k].terms()) a(rows.at(e), static_cast<Eigen::Index>(k)) = v;
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    const double cn = a.col(k).norm();
    if (cn > 0) a.col(k) /= cn;
  }
  Eigen::BDCSVD<CMatrix> svd(a);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(a.cols());
  s.head(svd.singularValues().size()) = svd.singularValues();
  const double thr = cfg.count_tol * s(0);
  int kernel = 0, near = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) <= thr) ++kernel;
    if (s(i) > thr / 10 && s(i) < thr * 10) ++near;
  }
  if (near > 0) {
    int above = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) <= thr * 10) ++above;
    throw AmbiguousCount(kernel, above);
  }
  return kernel;
}

namespace detail {

struct NonlinearContext {
  const FactorizerConfig& cfg;
  Rng& rng;
  std::vector<std::string>& trace;
};

/// Distinct zero-set points of w on random lines: at least `count` points.
inline std::vector<CVector> sample_zero_set(const Poly& w, std::size_t count, const FactorizerConfig& cfg, Rng& rng) {
  const int m = w.var_count();
  std::vector<CVector> pts;
  int lines = 0;
  while (pts.size() < count) {
    if (++lines > 100000) throw InconclusiveError("zero-set sampling stalled");
    const CVector u = random_cvector(m, rng);
    const CVector v = random_unit_cvector(m, rng);
    for (const auto& r : univariate_roots(restrict_line(w, u, v), cfg)) pts.push_back(u + r.value * v);
  }
  return pts;
}

/// Splits a squarefree polynomial without linear factors into its absolutely
/// irreducible factors.
inline std::vector<Poly> split_squarefree(const Poly& s, NonlinearContext& ctx) {
  const auto& cfg = ctx.cfg;
  const int m = s.var_count();
  const int d = s.total_degree();
  // Plane a + x v + y w2: x along the line direction, y moves the line.
  // Orthonormal directions and a short offset normal to the plane keep the
  // restricted coefficients balanced; a large shift of a degree-d polynomial
  // pushes real singular values of the count system into the noise.
  CVector a, v, w2;
  Poly plane;
  int count = 0;
  for (int attempt = 0;; ++attempt) {
    const CMatrix frame = random_unitary(m, ctx.rng).matrix();
    v = frame.col(0);
    w2 = frame.col(1);
    const CVector g = random_cvector(m, ctx.rng);
    a = 0.5 * (g - v * v.dot(g) - w2 * w2.dot(g));
    plane = restrict_plane(s, a, v, w2);
    try {
      count = count_absolute_factors(plane, cfg);
      break;
    } catch (const AmbiguousCount&) {
      if (attempt == 2) throw;
    }
  }
  ctx.trace.push_back("ruppert-count");
  if (count <= 1) return {s};

  const Bivariate bq(plane);
  if (bq.degree_x() != d) throw InconclusiveError("plane restriction lost degree in x");
  const std::vector<Complex> base = raw_roots(bq.at(0.0));
  if (min_separation(base) < 1e-8) throw InconclusiveError("base slice has a repeated root");

  // Monodromy: loops in y through y0 = 0.
  std::vector<int> parent(d);
  std::iota(parent.begin(), parent.end(), 0);
  int groups = d;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  int loops = 0;
  while (groups > count && loops < cfg.max_loops) {
    ++loops;
    const double rho = std::exp(std::log(0.05) + uni(ctx.rng) * (std::log(8.0) - std::log(0.05)));
    const Complex dir = std::polar(1.0, 2 * M_PI * uni(ctx.rng));
    const Complex centre = rho * dir;
    const double sense = uni(ctx.rng) < 0.5 ? 1.0 : -1.0;
    auto path = [&](double t) { return centre - rho * dir * std::polar(1.0, sense * 2 * M_PI * t); };
    std::vector<Complex> r = base;
    if (!track_roots(bq, path, r, cfg.loop_steps)) continue;
    for (int i = 0; i < d; ++i) {
      int best = 0;
      for (int j = 1; j < d; ++j)
        if (std::abs(r[i] - base[j]) < std::abs(r[i] - base[best])) best = j;
      const int ra = find_root(parent, i), rb = find_root(parent, best);
      if (ra != rb) {
        parent[ra] = rb;
        --groups;
      }
    }
  }
  ctx.trace.push_back("monodromy");
  if (groups != count)
    throw InconsistencyError("monodromy found " + std::to_string(groups) + " groups but the Ruppert count is " +
                             std::to_string(count));

  std::vector<int> label(d, -1);
  std::vector<int> sizes;
  for (int i = 0; i < d; ++i) {
    const int root = find_root(parent, i);
    if (label[root] < 0) {
      label[root] = static_cast<int>(sizes.size());
      sizes.push_back(0);
    }
    label[i] = label[root];
    ++sizes[label[i]];
  }
  std::vector<std::size_t> needed(sizes.size());
  std::size_t lines_needed = 0;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    needed[g] = static_cast<std::size_t>(std::ceil(cfg.samples_multiplier * monomial_count(m, sizes[g])));
    lines_needed = std::max(lines_needed, (needed[g] + sizes[g] - 1) / sizes[g]);
  }

  std::vector<Poly> result;
  for (int attempt = 0; attempt < 2; ++attempt) {
    // Chain of parallel lines u_k + t v, tracked along straight segments.
    std::vector<std::vector<CVector>> pts(sizes.size());
    std::vector<Complex> r = base;
    CVector u = a;
    const std::size_t target = lines_needed * (attempt + 1);
    for (int i = 0; i < d; ++i) pts[label[i]].push_back(u + r[i] * v);
    std::size_t lines = 1, failures = 0;
    while (lines < target) {
      const CVector next = random_cvector(m, ctx.rng);
      const Bivariate seg(restrict_plane(s, u, v, next - u));
      std::vector<Complex> tracked = r;
      if (!track_roots(seg, [](double t) { return Complex(t); }, tracked, cfg.loop_steps)) {
        if (++failures > 4 * target) throw InconclusiveError("sample homotopy kept failing");
        continue;
      }
      r = tracked;
      u = next;
      for (int i = 0; i < d; ++i) pts[label[i]].push_back(u + r[i] * v);
      ++lines;
    }
    result.clear();
    bool ok = true;
    for (std::size_t g = 0; g < sizes.size() && ok; ++g) {
      auto f = fit_hypersurface(m, sizes[g], pts[g]);
      if (!f) ok = false;
      else result.push_back(*f);
    }
    if (ok) {
      ctx.trace.push_back("vandermonde-fit");
      return result;
    }
  }
  throw InconclusiveError("Vandermonde kernel of a component is not 1-dimensional");
}

}  // namespace detail

/// Absolutely irreducible factors of a squarefree polynomial that has no
/// linear factors (degree >= 2).
inline std::vector<Poly> monodromy_split(const Poly& q, const FactorizerConfig& cfg = {}) {
  if (q.total_degree() < 2) throw DomainError("monodromy_split needs degree >= 2");
  Rng rng(cfg.seed ^ 0x5851f42d4c957f2dULL);
  std::vector<std::string> trace;
  detail::NonlinearContext ctx{cfg, rng, trace};
  return detail::split_squarefree(q.normalized(), ctx);
}

namespace detail {

/// Factors of w (no linear factors) with multiplicities.
inline std::vector<IrreducibleFactor> nonlinear_factors(Poly w, NonlinearContext& ctx) {
  const auto& cfg = ctx.cfg;
  const int m = w.var_count();
  std::vector<IrreducibleFactor> out;
  if (w.is_constant()) return out;
  w = w.normalized();
  const CVector u = random_cvector(m, ctx.rng);
  const CVector v = random_unit_cvector(m, ctx.rng);
  const auto probe = univariate_roots(restrict_line(w, u, v), cfg);
  const int distinct = static_cast<int>(probe.size());
  Poly s = w;
  if (distinct < w.total_degree()) {
    const auto pts = sample_zero_set(
        w, static_cast<std::size_t>(std::ceil(cfg.samples_multiplier * monomial_count(m, distinct))), cfg, ctx.rng);
    auto fit = fit_hypersurface(m, distinct, pts);
    if (!fit) throw InconclusiveError("squarefree part could not be fitted");
    s = *fit;
    ctx.trace.push_back("squarefree-fit");
  }
  for (const Poly& f : split_squarefree(s, ctx)) {
    const int mult = strip_factor(w, f, cfg.verify_tol);
    if (mult == 0) throw InconclusiveError("fitted factor does not divide the polynomial");
    out.push_back({f, mult, f.total_degree()});
  }
  if (!w.is_constant()) throw InconclusiveError("factors do not exhaust the polynomial");
  return out;
}

}  // namespace detail

inline Factorization factor(const Poly& p, const FactorizerConfig& cfg = {}) {
  if (p.is_zero()) throw ZeroStateError("cannot factor the zero polynomial");
  const int m = p.var_count();
  Factorization out;
  out.var_count = m;
  Rng rng(cfg.seed);

  // (0) monomial factors
  Exponents alpha = p.terms().begin()->first;
  for (const auto& [e, c] : p.terms())
    for (int j = 0; j < m; ++j) alpha[j] = std::min(alpha[j], e[j]);
  Poly rest(m, p.coeff_tol());
  for (const auto& [e, c] : p.terms()) {
    Exponents f = e;
    for (int j = 0; j < m; ++j) f[j] -= alpha[j];
    rest.add_term(f, c);
  }
  for (int j = 0; j < m; ++j)
    if (alpha[j] > 0) out.factors.push_back({Poly::variable(m, j), alpha[j], 1});
  if (std::any_of(alpha.begin(), alpha.end(), [](int a) { return a > 0; })) out.method_trace.push_back("monomial");

  auto finish = [&]() {
    std::sort(out.factors.begin(), out.factors.end(), detail::factor_less);
    Poly prod = Poly::constant(m, 1.0);
    for (const auto& f : out.factors) prod = prod * pow(f.poly, f.multiplicity);
    Complex num{};
    double den = 0;
    for (const auto& [e, c] : prod.terms()) {
      num += std::conj(c) * p.coeff(e);
      den += std::norm(c);
    }
    out.scalar = num / den;
    out.scalar = detail::drop_small_parts(out.scalar, 1e-2 * cfg.verify_tol * std::abs(out.scalar));
    out.residual = coefficient_distance(prod * out.scalar, p) / p.norm();
    out.method_trace.push_back("verify");
    if (!(out.residual < cfg.verify_tol))
      throw FactorizationInconclusive("reconstruction residual " + std::to_string(out.residual) + " above tolerance",
                                      out);
    return out;
  };

  if (rest.is_constant()) return finish();

  // (1) essential reduction plus a random frame on the essential block
  auto red = reduce_to_essential(rest, cfg.rank_tol);
  out.method_trace.push_back("essential");
  const int e = red.dim;
  Poly q = red.reduced;
  CMatrix frame = red.v.matrix();
  if (e >= 2) {
    const UnitaryMatrix r = random_unitary(e, rng);
    q = compose_linear(q, r);
    CMatrix block = CMatrix::Identity(m, m);
    block.topLeftCorner(e, e) = r.matrix();
    frame = frame * block;
  }
  const UnitaryMatrix back(frame.adjoint());
  // Rotating back leaves round-off on absent monomials; drop it well below
  // verify_tol so it cannot become the leading coefficient.
  auto lift = [&](const Poly& g) {
    Poly f = compose_linear(g.with_var_count(m), back);
    Poly clean(m, f.coeff_tol());
    double cut = 1e-2 * cfg.verify_tol * f.max_abs();
    for (const auto& [ex, c] : f.terms())
      if (std::abs(c) > cut) clean.add_term(ex, c);
    clean = clean.normalized();
    Poly out(m, f.coeff_tol());
    cut = 1e-2 * cfg.verify_tol * clean.max_abs();
    for (const auto& [ex, c] : clean.terms()) out.add_term(ex, detail::drop_small_parts(c, cut));
    return out;
  };

  std::vector<IrreducibleFactor> found;
  try {
    if (e == 1) {
      // (2a) univariate
      std::vector<Complex> a(q.total_degree() + 1, Complex{});
      for (const auto& [ex, c] : q.terms()) a[ex[0]] = c;
      for (const auto& r : univariate_roots(a, cfg)) {
        const std::vector<Complex> lc{1.0};
        found.push_back({Poly::linear(lc, -r.value), r.multiplicity, 1});
      }
      out.method_trace.push_back("univariate");
    } else if (e == 2 && q.is_homogeneous()) {
      // (2b) homogeneous bivariate: dehomogenize y2 = 1
      const int d = q.total_degree();
      std::vector<Complex> a(d + 1, Complex{});
      for (const auto& [ex, c] : q.terms()) a[ex[0]] = c;
      const auto roots = univariate_roots(a, cfg);
      int covered = 0;
      for (const auto& r : roots) {
        const std::vector<Complex> lc{1.0, -r.value};
        found.push_back({Poly::linear(lc), r.multiplicity, 1});
        covered += r.multiplicity;
      }
      if (covered < d) found.push_back({Poly::variable(2, 1), d - covered, 1});
      out.method_trace.push_back("homogeneous-bivariate");
    } else {
      // (3) linear peel, (4) nonlinear remainder
      auto peel = peel_linear_factors(q, cfg);
      out.method_trace.push_back("linear-peel");
      found = peel.linear;
      if (!peel.residual_poly.is_constant()) {
        detail::NonlinearContext ctx{cfg, rng, out.method_trace};
        for (auto& f : detail::nonlinear_factors(peel.residual_poly, ctx)) found.push_back(f);
      }
    }
  } catch (const InconsistencyError& err) {
    for (const auto& f : found) out.factors.push_back({lift(f.poly), f.multiplicity, f.degree});
    throw FactorizationInconsistent(err.what(), out);
  } catch (const InconclusiveError& err) {
    for (const auto& f : found) out.factors.push_back({lift(f.poly), f.multiplicity, f.degree});
    throw FactorizationInconclusive(err.what(), out);
  }
  for (const auto& f : found) out.factors.push_back({lift(f.poly), f.multiplicity, f.degree});
  return finish();
}

}  // namespace stellar
