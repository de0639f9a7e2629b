#pragma once

// Generators for benchmark core states and passive scrambling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "stellar/linalg.hpp"
#include "stellar/poly.hpp"

namespace stellar {

/// coeffs . a^dagger (constant 0 for creation-operator forms).
struct LinearForm {
  std::vector<Complex> coeffs;
  Complex constant = 0.0;
};

inline CoreState normalized_core(const Poly& p) { return core_from_poly(p).normalized_copy(); }

/// prod_i (form_i . a^dagger) |0>, normalized.
inline CoreState gen_photon_added(const std::vector<LinearForm>& forms, int modes) {
  Poly p = Poly::constant(modes, 1.0);
  for (const auto& f : forms) {
    if (static_cast<int>(f.coeffs.size()) != modes) throw DimensionError("linear form length != modes");
    if (f.constant != Complex{}) throw DomainError("creation-operator forms have no constant term");
    const Poly l = Poly::linear(f.coeffs);
    if (l.is_zero()) throw ZeroStateError("zero linear form");
    p = p * l;
  }
  return normalized_core(p);
}

/// (|N,0> + |0,N>) / sqrt 2
inline CoreState gen_noon(int n) {
  if (n < 1) throw DomainError("NOON state needs N >= 1");
  CoreState s;
  s.modes = 2;
  s.amplitudes[{n, 0}] = 1 / std::sqrt(2.0);
  s.amplitudes[{0, n}] = 1 / std::sqrt(2.0);
  s.normalized = true;
  return s;
}

/// (|0,2> - |2,0>) / sqrt 2
inline CoreState gen_hom() {
  CoreState s;
  s.modes = 2;
  s.amplitudes[{0, 2}] = 1 / std::sqrt(2.0);
  s.amplitudes[{2, 0}] = -1 / std::sqrt(2.0);
  s.normalized = true;
  return s;
}

/// sum_{n=0}^N |n,n> / sqrt(N+1)
inline CoreState gen_maxent(int n) {
  if (n < 1) throw DomainError("maximally entangled state needs N >= 1");
  CoreState s;
  s.modes = 2;
  for (int k = 0; k <= n; ++k) s.amplitudes[{k, k}] = 1 / std::sqrt(n + 1.0);
  s.normalized = true;
  return s;
}

struct SubtractionParams {
  double r1 = 0, r2 = 0;
  double theta1 = 0, theta2 = 0;
  double phi1 = 0, phi2 = 0;
};

/// Core state of A2 A1 S1 S2 |00> with A_k = cos(theta_k) a1 + e^{i phi_k} sin(theta_k) a2.
/// The |20>, |02> amplitudes carry sqrt 2 (a^dagger^2 |0> = sqrt 2 |2>).
inline CoreState gen_two_subtracted(const SubtractionParams& q) {
  const double ch1 = std::cosh(q.r1), sh1 = std::sinh(q.r1), ch2 = std::cosh(q.r2), sh2 = std::sinh(q.r2);
  const double c1 = std::cos(q.theta1), s1 = std::sin(q.theta1), c2 = std::cos(q.theta2), s2 = std::sin(q.theta2);
  const Complex e1 = std::polar(1.0, q.phi1), e2 = std::polar(1.0, q.phi2), e12 = std::polar(1.0, q.phi1 + q.phi2);
  CoreState s;
  s.modes = 2;
  const Complex a00 = ch1 * sh1 * c1 * c2 + e12 * s1 * ch2 * s2 * sh2;
  const Complex a11 = sh1 * sh2 * (e1 * s1 * c2 + e2 * s2 * c1);
  const Complex a20 = std::sqrt(2.0) * sh1 * sh1 * c1 * c2;
  const Complex a02 = std::sqrt(2.0) * sh2 * sh2 * e12 * s1 * s2;
  const double mx = std::max({std::abs(a00), std::abs(a11), std::abs(a20), std::abs(a02)});
  if (mx == 0.0) throw ZeroStateError("two-photon-subtracted amplitudes all vanish");
  const double cut = 1e-14 * mx;
  if (std::abs(a00) > cut) s.amplitudes[{0, 0}] = a00;
  if (std::abs(a11) > cut) s.amplitudes[{1, 1}] = a11;
  if (std::abs(a20) > cut) s.amplitudes[{2, 0}] = a20;
  if (std::abs(a02) > cut) s.amplitudes[{0, 2}] = a02;
  return s.normalized_copy();
}

/// Identity except z_i' = cos z_i + sin z_j, z_j' = cos z_j - sin z_i (0-based i, j).
inline UnitaryMatrix beamsplitter(int modes, int i, int j, double theta) {
  if (i == j || i < 0 || j < 0 || i >= modes || j >= modes) throw DimensionError("beam splitter indices invalid");
  CMatrix b = CMatrix::Identity(modes, modes);
  const double c = std::cos(theta), s = std::sin(theta);
  b(i, i) = c;
  b(i, j) = s;
  b(j, i) = -s;
  b(j, j) = c;
  return UnitaryMatrix(b);
}

/// core_from_poly(p(V z)); the normalized flag is carried over.
inline CoreState scramble(const CoreState& state, const UnitaryMatrix& v) {
  if (v.dim() != state.modes) throw DimensionError("unitary dimension != modes");
  CoreState out = core_from_poly(compose_linear(poly_from_core(state), v));
  out.normalized = state.normalized;
  return out;
}

}  // namespace stellar
