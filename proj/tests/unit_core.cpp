#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "stellar/io.hpp"
#include "stellar/states.hpp"
#include "stellar/stellar.hpp"

using namespace stellar;

namespace {

const Complex I(0, 1);

Poly random_poly(int vars, int degree, int terms, Rng& rng) {
  Poly p(vars);
  std::uniform_int_distribution<int> var(0, vars - 1), deg(0, degree);
  for (int t = 0; t < terms; ++t) {
    Exponents e(vars, 0);
    const int d = deg(rng);
    for (int k = 0; k < d; ++k) ++e[var(rng)];
    p.add_term(e, complex_gaussian(rng));
  }
  p.cleanup();
  return p;
}

// Rank of the span of gradients at random points: the essential dimension
// without going through the catalecticant.
int gradient_rank(const Poly& p, Rng& rng, int samples = 50) {
  const int m = p.var_count();
  CMatrix g(m, samples);
  for (int s = 0; s < samples; ++s) g.col(s) = gradient_at(p, random_cvector(m, rng));
  Eigen::JacobiSVD<CMatrix> svd(g);
  return numerical_rank(svd.singularValues(), 1e-9);
}

Poly lin(std::initializer_list<Complex> c, Complex k = 0.0) {
  const std::vector<Complex> v(c);
  return Poly::linear(v, k);
}

}  // namespace

// ---------------------------------------------------------------------------
// polycore

TEST(Poly, ArithmeticExamples) {
  const Poly z1 = Poly::variable(2, 0), z2 = Poly::variable(2, 1);
  EXPECT_EQ((z1 + z2) * (z1 - z2), z1 * z1 - z2 * z2);
  const Poly p = z1 * z2 + z1 * z1 * 3.0;
  EXPECT_TRUE((p + p * Complex(-1.0)).is_zero());
  EXPECT_EQ(z1 * Complex(2.0), Poly::linear(std::vector<Complex>{2.0, 0.0}));
}

TEST(Poly, EvaluateExamples) {
  const Poly z1 = Poly::variable(2, 0), z2 = Poly::variable(2, 1);
  const Poly hom = (z1 * z1 - z2 * z2) * Complex(0.5);
  EXPECT_EQ(evaluate(hom, CVector(CVector::Ones(2))), Complex(0.0));
  CVector pt(2);
  pt << 1.0, -1.0;
  EXPECT_EQ(evaluate(z1 * z2 + Poly::constant(2, 1.0), pt), Complex(0.0));
  EXPECT_EQ(evaluate(Poly::constant(2, 1.0), pt), Complex(1.0));
}

TEST(Poly, PartialDerivativeExamples) {
  const Poly z1 = Poly::variable(2, 0), z2 = Poly::variable(2, 1);
  EXPECT_EQ(partial_derivative(z1 * z1 * z2, 0), z1 * z2 * Complex(2.0));
  EXPECT_EQ(partial_derivative(z1 + z2, 1), Poly::constant(2, 1.0));
  EXPECT_TRUE(partial_derivative(z2 * z2 * z2, 0).is_zero());
}

TEST(Poly, LeibnizRule) {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const Poly p = random_poly(3, 3, 6, rng), q = random_poly(3, 3, 6, rng);
    for (int j = 0; j < 3; ++j) {
      const Poly lhs = partial_derivative(p * q, j);
      const Poly rhs = p * partial_derivative(q, j) + q * partial_derivative(p, j);
      EXPECT_LT(coefficient_distance(lhs, rhs), 1e-12 * std::max(1.0, lhs.norm()));
    }
  }
}

TEST(Poly, ComposeLinearMatchesPointEvaluation) {
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const Poly p = random_poly(4, 4, 10, rng);
    const UnitaryMatrix v = random_unitary(4, rng);
    const Poly pv = compose_linear(p, v);
    EXPECT_EQ(pv.total_degree(), p.total_degree());
    for (int s = 0; s < 20; ++s) {
      const CVector z = random_cvector(4, rng);
      const Complex a = evaluate(pv, z), b = evaluate(p, CVector(v.matrix() * z));
      EXPECT_LT(std::abs(a - b), 1e-10 * std::max(1.0, std::abs(b)));
    }
    EXPECT_LT(coefficient_distance(compose_linear(pv, v.adjoint()), p), 1e-10 * p.norm());
  }
}

TEST(Poly, ComposeLinearIdentityAndBalancedRotation) {
  const Poly z1 = Poly::variable(2, 0), z2 = Poly::variable(2, 1);
  const Poly p = (z1 * z1 - z2 * z2) * Complex(0.5);
  EXPECT_EQ(compose_linear(p, UnitaryMatrix::identity(2)), p);
  // z1 -> (z1 + z2)/sqrt2, z2 -> (z2 - z1)/sqrt2
  CMatrix v(2, 2);
  v << 1, 1, -1, 1;
  v /= std::sqrt(2.0);
  const Poly rotated = compose_linear(p, UnitaryMatrix(v));
  Rng rng(5);
  for (int s = 0; s < 20; ++s) {
    const CVector z = random_cvector(2, rng);
    EXPECT_LT(std::abs(evaluate(rotated, z) - z(0) * z(1)), 1e-12);
  }
}

TEST(Poly, DivideExactExamples) {
  const Poly z1 = Poly::variable(2, 0), z2 = Poly::variable(2, 1);
  auto d = divide_exact(z1 * z1 - z2 * z2, z1 + z2);
  EXPECT_EQ(d.quotient, z1 - z2);
  EXPECT_EQ(d.residual, 0.0);
  d = divide_exact(z1 * z1, z1);
  EXPECT_EQ(d.quotient, z1);
  EXPECT_EQ(d.residual, 0.0);
  d = divide_exact(z1 * z2 + Poly::constant(2, 1.0), z1);
  EXPECT_GT(d.residual, 0.1);
}

TEST(Poly, DivideExactRecoversRandomQuotients) {
  Rng rng(17);
  for (int t = 0; t < 30; ++t) {
    const Poly p = random_poly(3, 4, 8, rng), q = random_poly(3, 4, 8, rng);
    if (q.is_zero() || p.is_zero()) continue;
    const auto d = divide_exact(p * q, q);
    EXPECT_LT(d.residual, 1e-10);
    EXPECT_LT(coefficient_distance(d.quotient, p), 1e-8 * p.norm());
  }
}

TEST(Poly, RestrictLineAndPlane) {
  const Poly z1 = Poly::variable(2, 0), z2 = Poly::variable(2, 1);
  CVector u = CVector::Zero(2), v = CVector::Ones(2);
  auto a = restrict_line(z1 * z2, u, v);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[2], Complex(1.0));
  EXPECT_EQ(a[0], Complex(0.0));
  u << 1, 0;
  v << 0, 1;
  a = restrict_line(z1, u, v);
  // always total_degree + 1 coefficients, even when the top one vanishes on the line
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0], Complex(1.0));
  EXPECT_EQ(a[1], Complex(0.0));

  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    const Poly p = random_poly(3, 4, 12, rng);
    const auto r = restrict_line(p, random_cvector(3, rng), random_cvector(3, rng));
    EXPECT_EQ(static_cast<int>(r.size()) - 1, p.total_degree());
  }

  const Poly s = Poly::variable(3, 0) * Poly::variable(3, 0) + Poly::variable(3, 1) * Poly::variable(3, 1) +
                 Poly::variable(3, 2) * Poly::variable(3, 2);
  const Poly x = Poly::variable(2, 0), y = Poly::variable(2, 1);
  EXPECT_EQ(restrict_plane(s, CVector::Zero(3), CVector::Unit(3, 0), CVector::Unit(3, 1)), x * x + y * y);

  const Poly f = random_poly(3, 2, 5, rng), g = random_poly(3, 2, 5, rng);
  const CVector pa = random_cvector(3, rng), pu = random_cvector(3, rng), pv = random_cvector(3, rng);
  const Poly lhs = restrict_plane(f * g, pa, pu, pv);
  const Poly rhs = restrict_plane(f, pa, pu, pv) * restrict_plane(g, pa, pu, pv);
  EXPECT_LT(coefficient_distance(lhs, rhs), 1e-10 * lhs.norm());
  EXPECT_THROW(restrict_plane(f, pa, pu, pu * Complex(2.0)), DomainError);
}

TEST(Poly, CoreStateConversionExamples) {
  CoreState s;
  s.modes = 2;
  s.amplitudes[{1, 1}] = 1.0;
  EXPECT_EQ(poly_from_core(s), Poly::variable(2, 0) * Poly::variable(2, 1));

  const Poly noon = poly_from_core(gen_noon(2));
  const Poly z1 = Poly::variable(2, 0), z2 = Poly::variable(2, 1);
  EXPECT_LT(coefficient_distance(noon, (z1 * z1 + z2 * z2) * Complex(0.5)), 1e-15);
  const CoreState back = core_from_poly((z1 * z1 + z2 * z2) * Complex(0.5));
  EXPECT_NEAR(std::abs(back.amplitudes.at({2, 0}) - 1 / std::sqrt(2.0)), 0.0, 1e-15);

  CoreState vac;
  vac.modes = 2;
  vac.amplitudes[{0, 0}] = 1.0;
  EXPECT_EQ(poly_from_core(vac), Poly::constant(2, 1.0));
}

TEST(Poly, CoreStateRoundTrip) {
  Rng rng(9);
  for (int t = 0; t < 30; ++t) {
    const Poly p = random_poly(3, 5, 10, rng);
    if (p.is_zero()) continue;
    const CoreState s = core_from_poly(p);
    const CoreState s2 = core_from_poly(poly_from_core(s));
    ASSERT_EQ(s.amplitudes.size(), s2.amplitudes.size());
    for (const auto& [occ, a] : s.amplitudes) EXPECT_LT(std::abs(s2.amplitudes.at(occ) - a), 1e-12 * s.norm());
  }
}

TEST(Poly, UnitaryMatrixRejectsNonUnitary) {
  CMatrix m = CMatrix::Identity(2, 2);
  m(0, 1) = 1e-6;
  EXPECT_THROW(UnitaryMatrix{m}, DomainError);
}

// ---------------------------------------------------------------------------
// roots

TEST(Roots, Examples) {
  auto r = univariate_roots(std::vector<Complex>{1.0, 0.0, 1.0});
  ASSERT_EQ(r.size(), 2u);
  EXPECT_LT(std::abs(r[0].value - (-I)) + std::abs(r[1].value - I), 1e-12);

  r = univariate_roots(std::vector<Complex>{1.0, 1.0, 0.5});
  ASSERT_EQ(r.size(), 2u);
  // quadratic formula
  const Complex disc = std::sqrt(Complex(1.0 - 2.0));
  const Complex q1 = (-1.0 + disc) / 1.0, q2 = (-1.0 - disc) / 1.0;
  const double d = std::min(std::abs(r[0].value - q1) + std::abs(r[1].value - q2),
                            std::abs(r[0].value - q2) + std::abs(r[1].value - q1));
  EXPECT_LT(d, 1e-12);

  r = univariate_roots(std::vector<Complex>{4.0, -4.0, 1.0});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].multiplicity, 2);
  EXPECT_LT(std::abs(r[0].value - 2.0), 1e-9);
}

TEST(Roots, MultiplicitiesSumToDegree) {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    std::vector<Root> truth;
    const int k = 1 + t % 4;
    for (int i = 0; i < k; ++i) truth.push_back({complex_gaussian(rng), 1 + (i + t) % 3});
    const auto a = poly_from_roots(truth);
    const auto r = univariate_roots(a);
    int total = 0;
    for (const auto& x : r) total += x.multiplicity;
    EXPECT_EQ(total, static_cast<int>(a.size()) - 1);
    for (const auto& want : truth) {
      bool hit = false;
      for (const auto& x : r)
        if (x.multiplicity == want.multiplicity && std::abs(x.value - want.value) < 1e-5) hit = true;
      EXPECT_TRUE(hit);
    }
  }
}

TEST(Roots, ZeroRootsAndZeroPolynomial) {
  const auto r = univariate_roots(std::vector<Complex>{0.0, 0.0, 1.0, 1.0});
  ASSERT_EQ(r.size(), 2u);
  int zero_mult = 0;
  for (const auto& x : r)
    if (x.value == Complex{}) zero_mult = x.multiplicity;
  EXPECT_EQ(zero_mult, 2);
  EXPECT_THROW(univariate_roots(std::vector<Complex>{0.0, 0.0}), ZeroStateError);
}

// ---------------------------------------------------------------------------
// essential

TEST(Essential, CatalecticantExamples) {
  const Poly s = Poly::variable(2, 0) + Poly::variable(2, 1);
  CMatrix g = catalecticant(s);
  EXPECT_EQ(g.cols(), 2);
  EXPECT_EQ(numerical_rank(Eigen::JacobiSVD<CMatrix>(g).singularValues(), 1e-9), 1);
  auto es = essential_space(s);
  ASSERT_EQ(es.complement_basis.cols(), 1);
  EXPECT_LT(std::abs(es.complement_basis(0, 0) + es.complement_basis(1, 0)), 1e-12);

  const Poly z1 = Poly::variable(2, 0), z2 = Poly::variable(2, 1);
  es = essential_space(z1 * z1 + z1 * z2);
  EXPECT_EQ(es.dim, 2);
  EXPECT_EQ(es.complement_basis.cols(), 0);

  es = essential_space(z1);
  ASSERT_EQ(es.complement_basis.cols(), 1);
  EXPECT_LT(std::abs(std::abs(es.complement_basis(1, 0)) - 1.0), 1e-12);
  EXPECT_THROW(catalecticant(Poly::constant(2, 1.0)), DomainError);
}

TEST(Essential, DimensionExamples) {
  const Poly z1 = Poly::variable(4, 0), z2 = Poly::variable(4, 1), z3 = Poly::variable(4, 2), z4 = Poly::variable(4, 3);
  const Poly sq = (Poly::variable(2, 0) + Poly::variable(2, 1)) * (Poly::variable(2, 0) + Poly::variable(2, 1));
  const auto es = essential_space(sq);
  EXPECT_EQ(es.dim, 1);
  EXPECT_LT(subspace_distance(es.basis, CMatrix(CMatrix::Ones(2, 1) / std::sqrt(2.0))), 1e-12);

  const Poly quad = z1 * z1 + z2 * z2 + z3 * z3;
  EXPECT_EQ(essential_space(quad.truncated(3)).dim, 3);
  const Poly ex3 = quad * (z3 * z3 - z4 * z4) * Complex(std::sqrt(2.0 / 3.0));
  Rng rng(1);
  EXPECT_EQ(essential_space(ex3).dim, 4);
  EXPECT_EQ(gradient_rank(ex3, rng), 4);
}

TEST(Essential, ReductionExamples) {
  const Poly z1 = Poly::variable(2, 0), z2 = Poly::variable(2, 1);
  const auto red = reduce_to_essential((z1 + z2) * (z1 + z2) * Complex(0.5));
  EXPECT_EQ(red.dim, 1);
  ASSERT_EQ(red.reduced.var_count(), 1);
  EXPECT_LT(std::abs(std::abs(red.reduced.coeff({2})) - 1.0), 1e-12);
  EXPECT_LT(std::abs(std::abs(red.v.matrix()(0, 0)) - 1 / std::sqrt(2.0)), 1e-12);

  const Poly p = z1 * z1 * z2 + z2;
  const auto same = reduce_to_essential(p);
  EXPECT_EQ(same.dim, 2);
  EXPECT_EQ(same.reduced, p);

  const Poly w = Poly::variable(4, 0) * Poly::variable(4, 1) + Poly::variable(4, 2) * Poly::variable(4, 2);
  const auto r4 = reduce_to_essential(w);
  EXPECT_EQ(r4.dim, 3);
  EXPECT_EQ(r4.reduced.var_count(), 3);
  EXPECT_EQ(r4.space.complement_basis.cols(), 1);
}

TEST(Essential, DisjointExamples) {
  const Poly z1 = Poly::variable(4, 0), z2 = Poly::variable(4, 1), z3 = Poly::variable(4, 2), z4 = Poly::variable(4, 3);
  EXPECT_TRUE(disjoint(z1, z2));
  EXPECT_FALSE(disjoint(z1, z1 + z2));
  EXPECT_FALSE(disjoint(z3, z3 - z4));
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const Poly p = random_poly(4, 2, 3, rng), q = random_poly(4, 2, 3, rng);
    if (p.is_constant() || q.is_constant()) continue;
    EXPECT_EQ(disjoint(p, q), disjoint(q, p));
  }
}

TEST(Essential, CovarianceAndAnnihilation) {
  Rng rng(21);
  for (int t = 0; t < 20; ++t) {
    // Products of linear forms in a random subspace, so dim < M happens often.
    const int m = 4, k = 1 + t % 4;
    const CMatrix sub = random_unitary(m, rng).matrix().leftCols(k);
    Poly p = Poly::constant(m, 1.0);
    for (int f = 0; f < 3; ++f) {
      const CVector c = sub * random_cvector(k, rng);
      p = p * Poly::linear(std::vector<Complex>(c.data(), c.data() + m), complex_gaussian(rng));
    }
    const auto es = essential_space(p);
    EXPECT_EQ(es.dim + es.complement_basis.cols(), m);
    EXPECT_EQ(es.dim, gradient_rank(p, rng));
    EXPECT_LT(annihilation_residual(p, es), 1e-10);
    EXPECT_LT(unitarity_defect(es.frame()), 1e-10);
    const UnitaryMatrix v = random_unitary(m, rng);
    const auto ev = essential_space(compose_linear(p, v));
    EXPECT_EQ(ev.dim, es.dim);
    // basis stores the conjugate gradient span, which rotates by V^dagger
    EXPECT_LT(subspace_distance(ev.basis, v.adjoint().matrix() * es.basis), 1e-8);
  }
}

// ---------------------------------------------------------------------------
// states

TEST(States, GeneratorsAndScramble) {
  const Poly hom = poly_from_core(gen_hom());
  const Poly z1 = Poly::variable(2, 0), z2 = Poly::variable(2, 1);
  EXPECT_LT(coefficient_distance(hom, (z2 * z2 - z1 * z1) * Complex(0.5)), 1e-15);
  const CoreState me = gen_maxent(3);
  EXPECT_EQ(me.stellar_rank(), 6);
  EXPECT_NEAR(me.norm(), 1.0, 1e-15);

  Rng rng(6);
  for (int t = 0; t < 20; ++t) {
    std::vector<LinearForm> forms;
    for (int f = 0; f < 3; ++f) {
      const CVector c = random_cvector(3, rng);
      forms.push_back({std::vector<Complex>(c.data(), c.data() + 3)});
    }
    const CoreState s = gen_photon_added(forms, 3);
    EXPECT_NEAR(s.norm(), 1.0, 1e-12);
    const CoreState sv = scramble(s, random_unitary(3, rng));
    EXPECT_NEAR(sv.norm(), s.norm(), 1e-10);
    for (const auto& [occ, a] : sv.amplitudes) EXPECT_EQ(degree_of(occ), 3);
    EXPECT_EQ(sv.stellar_rank(), s.stellar_rank());
  }
}

TEST(States, TwoSubtractedMatchesDisplayedPolynomial) {
  // sinh^2 terms: cosh r1 sinh r1 cos t1 cos t2 + sinh^2 r1 cos cos z1^2 + ...
  SubtractionParams q{0.4, 0.9, 0.3, 1.1, 0.0, 0.0};
  const Poly p = poly_from_core(gen_two_subtracted(q));
  const double ch1 = std::cosh(q.r1), sh1 = std::sinh(q.r1), ch2 = std::cosh(q.r2), sh2 = std::sinh(q.r2);
  const double c1 = std::cos(q.theta1), s1 = std::sin(q.theta1), c2 = std::cos(q.theta2), s2 = std::sin(q.theta2);
  Poly want(2);
  want.add_term({0, 0}, ch1 * sh1 * c1 * c2 + s1 * ch2 * s2 * sh2);
  want.add_term({1, 1}, sh1 * sh2 * (s1 * c2 + s2 * c1));
  want.add_term({2, 0}, sh1 * sh1 * c1 * c2);
  want.add_term({0, 2}, sh2 * sh2 * s1 * s2);
  EXPECT_LT(projective_distance(p, want), 1e-12);
}

TEST(States, BeamSplitterConvention) {
  const UnitaryMatrix b = beamsplitter(2, 0, 1, M_PI / 4);
  const Poly hom = poly_from_core(gen_hom());
  const Poly out = compose_linear(hom, b);
  EXPECT_LT(projective_distance(out, Poly::variable(2, 0) * Poly::variable(2, 1)), 1e-10);
  EXPECT_THROW(beamsplitter(2, 0, 0, 0.1), DimensionError);
}

// ---------------------------------------------------------------------------
// text and documents

TEST(Io, ParseExamples) {
  const Poly p = parse_poly("0.5*z1^2*z3 - z2*z4 + 3");
  EXPECT_EQ(p.var_count(), 4);
  EXPECT_EQ(p.terms().size(), 3u);
  EXPECT_EQ(p.coeff({2, 0, 1, 0}), Complex(0.5));
  EXPECT_EQ(p.coeff({0, 1, 0, 1}), Complex(-1.0));
  EXPECT_EQ(p.coeff({0, 0, 0, 0}), Complex(3.0));

  const Poly q = parse_poly("(0+1i)*z1 + z2");
  EXPECT_EQ(q, lin({I, 1.0}));
  EXPECT_EQ(parse_poly("2i z1 + i*z2 - (1-2i)"), lin({2.0 * I, I}, Complex(-1, 2)));
  EXPECT_EQ(parse_poly("z1", 3).var_count(), 3);
  EXPECT_EQ(parse_poly(" z1 z2 + 1e-3 z2^0 ").coeff({0, 0}), Complex(1e-3));
}

TEST(Io, ParseErrors) {
  EXPECT_THROW(parse_poly("z1^-1"), SyntaxError);
  EXPECT_THROW(parse_poly("(1+2)*z1"), SyntaxError);
  EXPECT_THROW(parse_poly("z0"), SyntaxError);
  EXPECT_THROW(parse_poly(""), SyntaxError);
  EXPECT_THROW(parse_poly("z1 z2 +"), SyntaxError);
  EXPECT_THROW(parse_poly("z3", 2), SyntaxError);
  try {
    parse_poly("z1 +\n  z2 $");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line, 2);
    EXPECT_EQ(e.column, 6);
  }
}

TEST(Io, EmitParseRoundTrip) {
  Rng rng(1234);
  for (int t = 0; t < 500; ++t) {
    Poly p = random_poly(1 + t % 5, 4, 1 + t % 7, rng);
    if (t % 3 == 0) {
      // real and unit coefficients exercise the short forms
      Poly r(p.var_count());
      for (const auto& [e, c] : p.terms()) r.add_term(e, t % 2 ? Complex(std::round(c.real())) : Complex(c.real()));
      r.cleanup();
      p = r;
    }
    const std::string text = emit_poly(p);
    const Poly back = parse_poly(text, p.var_count());
    EXPECT_EQ(back, p) << text;
    EXPECT_EQ(emit_poly(back), text);
  }
  EXPECT_EQ(emit_poly(Poly(2)), "0");
  EXPECT_EQ(emit_poly(parse_poly("z1^2 - z2 + 1")), "z1^2 - z2 + 1");
}

TEST(Io, DocumentsRoundTrip) {
  CoreState s;
  s.modes = 2;
  s.amplitudes[{1, 1}] = 1.0;
  const std::string doc = dump_canonical(state_to_json(s));
  const CoreState back = state_from_json(Json::parse(doc));
  EXPECT_EQ(back.modes, 2);
  ASSERT_EQ(back.amplitudes.size(), 1u);
  EXPECT_EQ(back.amplitudes.begin()->first, (Exponents{1, 1}));
  EXPECT_EQ(dump_canonical(state_to_json(back)), doc);

  Rng rng(77);
  for (int t = 0; t < 20; ++t) {
    const Poly p = random_poly(3, 3, 6, rng);
    const std::string d = dump_canonical(poly_to_json(p));
    const Poly q = poly_from_json(Json::parse(d));
    EXPECT_EQ(q, p);
    EXPECT_EQ(dump_canonical(poly_to_json(q)), d);
    const UnitaryMatrix u = random_unitary(3, rng);
    const std::string du = dump_canonical(unitary_to_json(u.matrix()));
    EXPECT_EQ(unitary_from_json(Json::parse(du)).matrix(), u.matrix());
  }
}

TEST(Io, SchemaErrorsCarryPaths) {
  auto path_of = [](const char* text, auto reader) {
    try {
      reader(Json::parse(text));
    } catch (const SchemaError& e) {
      return e.path;
    }
    return std::string("<none>");
  };
  EXPECT_EQ(path_of(R"({"modes":2,"terms":[{"occ":[1],"re":1,"im":0}]})", state_from_json), "terms[0].occ");
  EXPECT_EQ(path_of(R"({"modes":2,"terms":[{"occ":[1,0],"re":"x","im":0}]})", state_from_json), "terms[0].re");
  EXPECT_EQ(path_of(R"({"terms":[]})", state_from_json), "modes");
  EXPECT_EQ(path_of(R"({"vars":1,"terms":[{"exp":[-1],"re":1,"im":0}]})", poly_from_json), "terms[0].exp[0]");
  const char* bad_unitary = R"({"dim":2,"rows":[[{"re":1,"im":0},{"re":0.001,"im":0}],[{"re":0,"im":0},{"re":1,"im":0}]]})";
  EXPECT_EQ(path_of(bad_unitary, unitary_from_json), "rows");
}

TEST(Io, CanonicalFloatFormatting) {
  Json j;
  j["x"] = 0.1;
  j["y"] = -0.0;
  j["n"] = 3;
  EXPECT_EQ(dump_canonical(j, 0), "{\"x\":1.0000000000000001e-01,\"y\":0.0000000000000000e+00,\"n\":3}\n");
}
