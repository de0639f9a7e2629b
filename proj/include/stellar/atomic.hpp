#pragma once

// Structural graph, atomic decomposition and partition queries.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stellar/essential.hpp"
#include "stellar/factorizer.hpp"
#include "stellar/linalg.hpp"
#include "stellar/poly.hpp"

namespace stellar {

inline constexpr double kDefaultDisjointTol = 1e-6;

struct StructuralGraph {
  std::vector<IrreducibleFactor> node_factors;
  std::vector<EssentialSpace> node_spaces;
  /// adjacency[j][k] = essential spaces of j and k overlap (kept for debugging,
  /// never exported).
  std::vector<std::vector<bool>> adjacency;
  /// Connected components, each sorted, ordered by smallest member.
  std::vector<std::vector<int>> components;
  /// Number of essential-space computations performed while building the graph.
  int essential_space_evaluations = 0;
};

inline StructuralGraph structural_graph(const std::vector<IrreducibleFactor>& factors,
                                        double tol = kDefaultDisjointTol, double rank_tol = kDefaultRankTol) {
  StructuralGraph g;
  g.node_factors = factors;
  const int f = static_cast<int>(factors.size());
  for (const auto& fac : factors) {
    g.node_spaces.push_back(essential_space(fac.poly, rank_tol));
    ++g.essential_space_evaluations;
  }
  g.adjacency.assign(f, std::vector<bool>(f, false));
  std::vector<int> parent(f);
  std::iota(parent.begin(), parent.end(), 0);
  for (int j = 0; j < f; ++j)
    for (int k = j + 1; k < f; ++k)
      if (!disjoint(g.node_spaces[j], g.node_spaces[k], tol)) {
        g.adjacency[j][k] = g.adjacency[k][j] = true;
        const int a = detail::find_root(parent, j), b = detail::find_root(parent, k);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  std::map<int, int> index;
  for (int j = 0; j < f; ++j) {
    const int r = detail::find_root(parent, j);
    auto [it, inserted] = index.try_emplace(r, static_cast<int>(g.components.size()));
    if (inserted) g.components.emplace_back();
    g.components[it->second].push_back(j);
  }
  return g;
}

struct AtomicFactor {
  Poly poly;
  int essential_dim = 0;
  std::vector<int> member_nodes;
  bool contains_nonlinear = false;
  /// Orthonormal basis of the factor's essential space (same convention as EssentialSpace::basis).
  CMatrix basis;
};

struct AtomicDecomposition {
  int modes = 1;
  Factorization factorization;
  std::vector<AtomicFactor> atomic_factors;
  int vacuum_modes = 0;
  /// I^at sorted in decreasing order.
  std::vector<int> partition;
  StructuralGraph graph;
  CMatrix basis_change;  // separating unitary
  std::vector<std::string> warnings;
};

namespace detail {

/// Coordinate axes when the span is exactly the span of the axes it touches,
/// otherwise an SVD basis.
inline CMatrix block_basis(const CMatrix& stacked, int dim) {
  const Eigen::Index m = stacked.rows();
  std::vector<int> axes;
  for (Eigen::Index i = 0; i < m; ++i)
    if (stacked.cols() > 0 && stacked.row(i).cwiseAbs().maxCoeff() > 1e-12) axes.push_back(static_cast<int>(i));
  if (static_cast<int>(axes.size()) == dim) {
    CMatrix b = CMatrix::Zero(m, dim);
    for (int k = 0; k < dim; ++k) b(axes[k], k) = 1.0;
    return b;
  }
  Eigen::BDCSVD<CMatrix> svd(stacked, Eigen::ComputeThinU);
  CMatrix b = svd.matrixU().leftCols(dim);
  fix_column_phases(b);
  return b;
}

}  // namespace detail

/// Columns: atomic-factor bases in order, then the vacuum complement. Throws
/// InconsistencyError if distinct blocks overlap by more than tol.
inline UnitaryMatrix separating_unitary(const AtomicDecomposition& dec, double tol = kDefaultDisjointTol) {
  const int m = dec.modes;
  int used = 0;
  for (const auto& a : dec.atomic_factors) used += a.essential_dim;
  if (used > m) throw InconsistencyError("atomic essential dimensions exceed the mode count");
  CMatrix v(m, m);
  int col = 0;
  for (const auto& a : dec.atomic_factors) {
    v.middleCols(col, a.essential_dim) = a.basis;
    col += a.essential_dim;
  }
  for (std::size_t i = 0; i < dec.atomic_factors.size(); ++i)
    for (std::size_t j = i + 1; j < dec.atomic_factors.size(); ++j) {
      const auto& a = dec.atomic_factors[i].basis;
      const auto& b = dec.atomic_factors[j].basis;
      if (a.cols() == 0 || b.cols() == 0) continue;
      Eigen::JacobiSVD<CMatrix> svd(a.adjoint() * b);
      if (svd.singularValues()(0) > tol)
        throw InconsistencyError("atomic essential spaces are not orthogonal");
    }
  const CMatrix head = v.leftCols(col);
  CMatrix vac = orthonormal_complement(head, m, 1e-8);
  if (vac.cols() != m - col) throw InconsistencyError("vacuum complement has the wrong dimension");
  // Coordinate axes for the vacuum block when the atomic blocks do not touch them.
  std::vector<int> axes;
  for (int i = 0; i < m; ++i)
    if (col == 0 || head.row(i).cwiseAbs().maxCoeff() <= 1e-12) axes.push_back(i);
  if (static_cast<int>(axes.size()) == m - col) {
    vac.setZero();
    for (int k = 0; k < m - col; ++k) vac(axes[k], k) = 1.0;
  } else {
    fix_column_phases(vac);
  }
  v.rightCols(m - col) = vac;
  // Remove the residual non-orthogonality (order-preserving, so each block keeps its span).
  if (unitarity_defect(v) >= 1e-12) {
    Eigen::HouseholderQR<CMatrix> qr(v);
    CMatrix q = qr.householderQ() * CMatrix::Identity(m, m);
    const CMatrix r = qr.matrixQR();
    for (int k = 0; k < m; ++k) {
      const Complex d = r(k, k);
      if (std::abs(d) > 0) q.col(k) *= d / std::abs(d);
    }
    v = q;
  }
  return UnitaryMatrix(v);
}

struct AtomicConfig {
  FactorizerConfig factorizer;
  double disjoint_tol = kDefaultDisjointTol;
};

inline AtomicDecomposition atomic_decomposition(const Poly& p, const AtomicConfig& cfg = {}) {
  if (p.is_zero()) throw ZeroStateError("atomic decomposition of the zero polynomial");
  AtomicDecomposition dec;
  dec.modes = p.var_count();
  const double rank_tol = cfg.factorizer.rank_tol;
  // Step 1 happens inside factor(); it is repeated here for the consistency check below.
  const int essential_dim = p.is_constant() ? 0 : essential_space(p, rank_tol).dim;
  dec.factorization = factor(p, cfg.factorizer);
  dec.graph = structural_graph(dec.factorization.factors, cfg.disjoint_tol, rank_tol);
  int used = 0;
  for (const auto& comp : dec.graph.components) {
    AtomicFactor a;
    a.poly = Poly::constant(dec.modes, 1.0);
    CMatrix stacked(dec.modes, 0);
    for (int node : comp) {
      const auto& f = dec.graph.node_factors[node];
      a.poly = a.poly * pow(f.poly, f.multiplicity);
      a.member_nodes.push_back(node);
      a.contains_nonlinear = a.contains_nonlinear || f.degree >= 2;
      const auto& b = dec.graph.node_spaces[node].basis;
      CMatrix grown(dec.modes, stacked.cols() + b.cols());
      grown << stacked, b;
      stacked = grown;
    }
    Eigen::BDCSVD<CMatrix> svd(stacked);
    a.essential_dim = numerical_rank(svd.singularValues(), rank_tol);
    a.basis = detail::block_basis(stacked, a.essential_dim);
    used += a.essential_dim;
    dec.atomic_factors.push_back(std::move(a));
  }
  dec.vacuum_modes = dec.modes - used;
  if (used != essential_dim)
    dec.warnings.push_back("sum of atomic essential dimensions (" + std::to_string(used) +
                           ") differs from the essential dimension (" + std::to_string(essential_dim) + ")");
  for (const auto& a : dec.atomic_factors) dec.partition.push_back(a.essential_dim);
  for (int k = 0; k < dec.vacuum_modes; ++k) dec.partition.push_back(1);
  std::sort(dec.partition.rbegin(), dec.partition.rend());
  dec.basis_change = separating_unitary(dec, cfg.disjoint_tol).matrix();
  return dec;
}

// ---------------------------------------------------------------------------
// Partition queries

struct ModePartition {
  std::vector<int> parts;
  int total() const { return std::accumulate(parts.begin(), parts.end(), 0); }
};

/// One element of I^at: an atomic factor or a vacuum mode.
struct PartElement {
  bool vacuum = false;
  int index = 0;  // atomic factor index, or vacuum ordinal
  int size = 0;
};

struct PartitionVerdict {
  bool separable = false;
  /// grouping[k] = elements assigned to target part k (target order preserved).
  std::optional<std::vector<std::vector<PartElement>>> grouping;
};

/// Can the multiset `elements` (by size) be grouped so that group sums equal
/// the target parts? Backtracking over elements in decreasing size, with
/// memoized infeasible (position, remaining capacities) states.
inline PartitionVerdict check_partition(const std::vector<PartElement>& elements, const ModePartition& target) {
  int have = 0;
  for (const auto& e : elements) have += e.size;
  if (have != target.total()) throw DimensionError("target partition total differs from the mode count");
  for (int p : target.parts)
    if (p <= 0) throw DomainError("partition parts must be positive");
  std::vector<int> order(elements.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return elements[a].size > elements[b].size; });
  const std::size_t k = target.parts.size();
  std::vector<int> cap = target.parts;
  std::vector<int> assign(elements.size(), -1);
  std::set<std::pair<std::size_t, std::vector<int>>> dead;

  std::function<bool(std::size_t)> go = [&](std::size_t pos) -> bool {
    if (pos == order.size()) return true;
    std::vector<int> key = cap;
    std::sort(key.begin(), key.end());
    if (dead.count({pos, key})) return false;
    const int sz = elements[order[pos]].size;
    std::set<int> tried;  // bins with equal remaining capacity are interchangeable
    for (std::size_t b = 0; b < k; ++b) {
      if (cap[b] < sz || tried.count(cap[b])) continue;
      tried.insert(cap[b]);
      cap[b] -= sz;
      assign[order[pos]] = static_cast<int>(b);
      if (go(pos + 1)) return true;
      cap[b] += sz;
    }
    dead.insert({pos, key});
    return false;
  };

  PartitionVerdict v;
  v.separable = go(0);
  if (v.separable) {
    std::vector<std::vector<PartElement>> groups(k);
    for (std::size_t i = 0; i < elements.size(); ++i) groups[assign[i]].push_back(elements[i]);
    v.grouping = std::move(groups);
  }
  return v;
}

inline std::vector<PartElement> partition_elements(const AtomicDecomposition& dec) {
  std::vector<PartElement> out;
  for (std::size_t i = 0; i < dec.atomic_factors.size(); ++i)
    out.push_back({false, static_cast<int>(i), dec.atomic_factors[i].essential_dim});
  for (int i = 0; i < dec.vacuum_modes; ++i) out.push_back({true, i, 1});
  return out;
}

inline PartitionVerdict check_partition(const AtomicDecomposition& dec, const ModePartition& target) {
  return check_partition(partition_elements(dec), target);
}

/// Convenience: partition query on a bare I^at multiset.
inline PartitionVerdict check_partition(const std::vector<int>& atomic_partition, const ModePartition& target) {
  std::vector<PartElement> el;
  for (std::size_t i = 0; i < atomic_partition.size(); ++i) el.push_back({false, static_cast<int>(i), atomic_partition[i]});
  return check_partition(el, target);
}

}  // namespace stellar
