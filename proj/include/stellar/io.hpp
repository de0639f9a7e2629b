#pragma once

// Text and document formats: polynomial grammar, JSON documents for states,
// polynomials, unitaries and reports, and the structural-graph export.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "stellar/atomic.hpp"
#include "stellar/poly.hpp"

namespace stellar {

using Json = nlohmann::ordered_json;

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& msg, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line(line), column(column) {}
  int line;
  int column;
};

class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& msg) : Error(path + ": " + msg), path(path) {}
  std::string path;
};

// ---------------------------------------------------------------------------
// Polynomial text

namespace detail {

class PolyParser {
 public:
  explicit PolyParser(const std::string& src) : s_(src) {}

  Poly parse(int modes_override) {
    TermList terms;
    skip_ws();
    if (at_end()) fail("empty polynomial");
    bool first = true;
    while (true) {
      skip_ws();
      if (at_end()) {
        if (first) fail("expected a term");
        break;
      }
      double sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = get() == '-' ? -1 : 1;
        skip_ws();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      parse_term(sign, terms);
      first = false;
    }
    int m = std::max(max_index_, 1);
    if (modes_override > 0) {
      if (modes_override < max_index_)
        throw SyntaxError("variable z" + std::to_string(max_index_) + " exceeds --modes " +
                              std::to_string(modes_override),
                          1, 1);
      m = modes_override;
    }
    Poly p(m);
    for (auto& [idx, c] : terms) {
      Exponents e(m, 0);
      for (auto [k, pw] : idx) e[k - 1] += pw;
      p.add_term(e, c);
    }
    p.cleanup();
    return p;
  }

  Complex parse_complex_only() {
    skip_ws();
    Complex c = parse_coefficient_literal();
    skip_ws();
    if (!at_end()) fail("trailing characters after complex literal");
    return c;
  }

 private:
  using Factors = std::vector<std::pair<int, int>>;
  using TermList = std::vector<std::pair<Factors, Complex>>;

  [[noreturn]] void fail(const std::string& msg) const {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SyntaxError(msg, line, col);
  }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  char get() { return s_[pos_++]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  bool number_start() const {
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
  }

  double parse_number() {
    const std::size_t start = pos_;
    bool digits = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      ++pos_;
      digits = true;
    }
    if (peek() == '.') {
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        ++pos_;
        digits = true;
      }
    }
    if (!digits) fail("malformed number");
    if (peek() == 'e' || peek() == 'E') {
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("malformed exponent");
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    const double v = std::stod(s_.substr(start, pos_ - start));
    if (!std::isfinite(v)) fail("non-finite number");
    return v;
  }

  int parse_int() {
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected a non-negative integer");
    long v = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (get() - '0');
      if (v > 1000000) fail("integer too large");
    }
    return static_cast<int>(v);
  }

  // decimal [i] | i | '(' [sign] decimal [i] [(+|-) decimal i] ')'
  Complex parse_coefficient_literal() {
    if (peek() == '(') {
      ++pos_;
      skip_ws();
      double s1 = 1;
      if (peek() == '+' || peek() == '-') s1 = get() == '-' ? -1 : 1;
      skip_ws();
      Complex c;
      if (peek() == 'i') {
        ++pos_;
        c = Complex(0, s1);
      } else {
        const double a = s1 * parse_number();
        if (peek() == 'i') {
          ++pos_;
          c = Complex(0, a);
        } else {
          c = Complex(a, 0);
          skip_ws();
          if (peek() == '+' || peek() == '-') {
            const double s2 = get() == '-' ? -1 : 1;
            skip_ws();
            double b = 1;
            if (peek() != 'i') b = parse_number();
            if (peek() != 'i') fail("malformed complex literal: expected 'i'");
            ++pos_;
            c = Complex(a, s2 * b);
          }
        }
      }
      skip_ws();
      if (peek() != ')') fail("malformed complex literal: expected ')'");
      ++pos_;
      return c;
    }
    if (peek() == 'i') {
      ++pos_;
      return Complex(0, 1);
    }
    if (number_start()) {
      const double a = parse_number();
      if (peek() == 'i') {
        ++pos_;
        return Complex(0, a);
      }
      return Complex(a, 0);
    }
    fail("expected a coefficient");
  }

  void parse_factor(Factors& f) {
    if (peek() != 'z') fail("expected a variable zK");
    ++pos_;
    const int k = parse_int();
    if (k < 1) fail("variable index must be >= 1");
    int e = 1;
    skip_ws();
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      if (peek() == '-') fail("negative exponent");
      e = parse_int();
    }
    max_index_ = std::max(max_index_, k);
    f.emplace_back(k, e);
  }

  void parse_term(double sign, TermList& out) {
    Complex c = 1.0;
    Factors f;
    if (peek() != 'z') {
      c = parse_coefficient_literal();
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        skip_ws();
        if (peek() != 'z') fail("expected a variable after '*'");
      }
    }
    while (peek() == 'z') {
      parse_factor(f);
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        skip_ws();
        if (peek() != 'z') fail("expected a variable after '*'");
      }
    }
    out.emplace_back(std::move(f), sign * c);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int max_index_ = 0;
};

inline std::string fmt_real(double v) {
  if (v == 0.0) v = 0.0;  // no negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Grammar: terms separated by + / -; term = [coefficient][*]monomial or a
/// bare coefficient; coefficient = decimal, decimal i, i, or (a+bi);
/// monomial = zK[^E] factors joined by '*'. modes_override > 0 fixes M.
inline Poly parse_poly(const std::string& text, int modes_override = 0) {
  return detail::PolyParser(text).parse(modes_override);
}

inline Complex parse_complex(const std::string& text) { return detail::PolyParser(text).parse_complex_only(); }

inline std::string format_complex(Complex c) {
  if (c.imag() == 0.0) return detail::fmt_real(c.real());
  const double b = c.imag();
  return "(" + detail::fmt_real(c.real()) + (b < 0 ? "-" : "+") + detail::fmt_real(std::abs(b)) + "i)";
}

inline std::string format_monomial(const Exponents& e) {
  std::string out;
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (e[j] == 0) continue;
    if (!out.empty()) out += "*";
    out += "z" + std::to_string(j + 1);
    if (e[j] > 1) out += "^" + std::to_string(e[j]);
  }
  return out;
}

/// Terms in decreasing graded-lex order; parse_poly(emit_poly(p)) == p.
inline std::string emit_poly(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    const std::string mono = format_monomial(e);
    std::string coef;
    bool negative = false;
    if (c.imag() == 0.0) {
      negative = c.real() < 0;
      const double a = std::abs(c.real());
      if (!(a == 1.0 && !mono.empty())) coef = detail::fmt_real(a);
    } else {
      coef = format_complex(c);
    }
    if (first)
      out += negative ? "-" : "";
    else
      out += negative ? " - " : " + ";
    out += coef;
    if (!coef.empty() && !mono.empty()) out += "*";
    out += mono;
    first = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Canonical JSON

namespace detail {

inline void dump_json(const Json& j, std::string& out, int indent, int level) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * level), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + Json(it.key()).dump() + (indent > 0 ? ": " : ":");
        dump_json(it.value(), out, indent, level + 1);
      }
      out += nl + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& x : j)
        if (x.is_structured()) flat = false;
      out += "[";
      if (!flat) out += nl;
      bool first = true;
      for (const auto& x : j) {
        if (!first) out += flat ? ", " : std::string(",") + nl;
        first = false;
        if (!flat) out += pad;
        dump_json(x, out, indent, level + 1);
      }
      if (!flat) out += nl + close;
      out += "]";
      return;
    }
    case Json::value_t::number_float: {
      double v = j.get<double>();
      if (v == 0.0) v = 0.0;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.16e", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// Floats as %.16e (17 significant digits), keys in insertion order.
inline std::string dump_canonical(const Json& j, int indent = 2) {
  std::string out;
  detail::dump_json(j, out, indent, 0);
  out += "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Documents

namespace detail {

inline double get_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(path, "non-finite number");
  return v;
}

inline int get_int(const Json& j, const std::string& path, int min_value) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < min_value || v > 1000000) throw SchemaError(path, "integer out of range");
  return static_cast<int>(v);
}

inline const Json& field(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path.empty() ? "$" : path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

inline Complex get_complex(const Json& obj, const std::string& path) {
  return {get_number(field(obj, "re", path), path + ".re"), get_number(field(obj, "im", path), path + ".im")};
}

inline Exponents get_exponents(const Json& j, const std::string& path, int length) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  if (static_cast<int>(j.size()) != length)
    throw SchemaError(path, "expected " + std::to_string(length) + " entries");
  Exponents e;
  for (std::size_t k = 0; k < j.size(); ++k) e.push_back(get_int(j[k], path + "[" + std::to_string(k) + "]", 0));
  return e;
}

inline Json complex_json(Complex c) {
  Json j;
  j["re"] = c.real();
  j["im"] = c.imag();
  return j;
}

/// Terms map -> [{key: [...], re, im}] with the given key name, graded-lex ascending.
template <class Map>
Json terms_json(const Map& terms, const char* key) {
  Json arr = Json::array();
  for (const auto& [e, c] : terms) {
    Json t;
    t[key] = e;
    t["re"] = c.real();
    t["im"] = c.imag();
    arr.push_back(t);
  }
  return arr;
}

}  // namespace detail

inline Json state_to_json(const CoreState& s) {
  Json j;
  j["modes"] = s.modes;
  j["terms"] = detail::terms_json(s.amplitudes, "occ");
  return j;
}

inline CoreState state_from_json(const Json& j) {
  CoreState s;
  s.modes = detail::get_int(detail::field(j, "modes", ""), "modes", 1);
  const Json& terms = detail::field(j, "terms", "");
  if (!terms.is_array()) throw SchemaError("terms", "expected an array");
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const std::string path = "terms[" + std::to_string(k) + "]";
    const Exponents occ = detail::get_exponents(detail::field(terms[k], "occ", path), path + ".occ", s.modes);
    const Complex c = detail::get_complex(terms[k], path);
    if (s.amplitudes.count(occ)) throw SchemaError(path + ".occ", "duplicate occupation");
    s.amplitudes[occ] = c;
  }
  s.normalized = !s.amplitudes.empty() && std::abs(s.norm() - 1.0) < 1e-10;
  return s;
}

inline Json poly_to_json(const Poly& p) {
  Json j;
  j["vars"] = p.var_count();
  j["terms"] = detail::terms_json(p.terms(), "exp");
  return j;
}

inline Poly poly_from_json(const Json& j) {
  const int m = detail::get_int(detail::field(j, "vars", ""), "vars", 1);
  const Json& terms = detail::field(j, "terms", "");
  if (!terms.is_array()) throw SchemaError("terms", "expected an array");
  Poly p(m);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const std::string path = "terms[" + std::to_string(k) + "]";
    const Exponents e = detail::get_exponents(detail::field(terms[k], "exp", path), path + ".exp", m);
    if (p.terms().count(e)) throw SchemaError(path + ".exp", "duplicate monomial");
    p.add_term(e, detail::get_complex(terms[k], path));
  }
  p.cleanup();
  return p;
}

inline Json unitary_to_json(const CMatrix& u) {
  Json j;
  j["dim"] = u.rows();
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < u.cols(); ++k) row.push_back(detail::complex_json(u(i, k)));
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j;
}

inline UnitaryMatrix unitary_from_json(const Json& j) {
  const int n = detail::get_int(detail::field(j, "dim", ""), "dim", 1);
  const Json& rows = detail::field(j, "rows", "");
  if (!rows.is_array() || static_cast<int>(rows.size()) != n) throw SchemaError("rows", "expected dim rows");
  CMatrix u(n, n);
  for (int i = 0; i < n; ++i) {
    const std::string rp = "rows[" + std::to_string(i) + "]";
    if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != n) throw SchemaError(rp, "expected dim entries");
    for (int k = 0; k < n; ++k) u(i, k) = detail::get_complex(rows[i][k], rp + "[" + std::to_string(k) + "]");
  }
  const double defect = unitarity_defect(u);
  if (!(defect < UnitaryMatrix::kTolerance))
    throw SchemaError("rows", "matrix is not unitary (defect " + std::to_string(defect) + ")");
  return UnitaryMatrix(u);
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path, e.what());
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

/// Loads a polynomial from a state document, a polynomial document or polynomial text.
inline Poly load_poly(const std::string& path, int modes_override = 0) {
  const std::string text = read_text_file(path);
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(path, e.what());
    }
    if (j.contains("modes")) return poly_from_core(state_from_json(j));
    if (j.contains("vars")) return poly_from_json(j);
    throw SchemaError(path, "document is neither a state (modes) nor a polynomial (vars)");
  }
  return parse_poly(text, modes_override);
}

// ---------------------------------------------------------------------------
// Structural graph export (DOT)

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

/// One node per irreducible factor, one cluster per atomic factor. Edges
/// inside a component are not exported: only the grouping is basis independent.
inline std::string emit_graph(const AtomicDecomposition& dec) {
  std::ostringstream os;
  os << "graph structural {\n";
  os << "  node [shape=box];\n";
  for (std::size_t a = 0; a < dec.atomic_factors.size(); ++a) {
    const auto& af = dec.atomic_factors[a];
    os << "  subgraph cluster_" << a << " {\n";
    os << "    label=\"atomic factor " << a + 1 << " (dim " << af.essential_dim << ")\";\n";
    for (int node : af.member_nodes) {
      const auto& f = dec.graph.node_factors[node];
      os << "    n" << node << " [label=\"" << detail::dot_escape(emit_poly(f.poly)) << "\\ndeg " << f.degree
         << ", mult " << f.multiplicity << "\"];\n";
    }
    os << "  }\n";
  }
  if (dec.vacuum_modes > 0) os << "  // vacuum modes: " << dec.vacuum_modes << "\n";
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Reports

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string digest(const Poly& p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(dump_canonical(poly_to_json(p)))));
  return buf;
}

inline std::string format_partition(const std::vector<int>& parts) {
  std::string s = "{";
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + std::to_string(parts[i]);
  return s + "}";
}

struct PartitionQuery {
  ModePartition target;
  PartitionVerdict verdict;
};

struct AnalysisReport {
  std::string source;
  Poly poly;
  int stellar_rank = 0;
  int essential_dim = 0;
  AtomicDecomposition decomposition;
  std::vector<PartitionQuery> queries;
  std::uint64_t seed = 0;
  double verify_tol = 0, rank_tol = 0, disjoint_tol = 0;
  std::vector<std::string> warnings;
};

inline std::string describe_element(const PartElement& e) {
  return e.vacuum ? "vacuum" + std::to_string(e.index + 1) : "A" + std::to_string(e.index + 1);
}

inline Json report_to_json(const AnalysisReport& r) {
  Json j;
  j["source"] = r.source;
  j["digest"] = digest(r.poly);
  j["modes"] = r.poly.var_count();
  j["stellar_rank"] = r.stellar_rank;
  j["essential_dim"] = r.essential_dim;
  j["vacuum_modes"] = r.decomposition.vacuum_modes;
  const auto& fz = r.decomposition.factorization;
  j["scalar"] = detail::complex_json(fz.scalar);
  j["residual"] = fz.residual;
  Json factors = Json::array();
  for (const auto& f : fz.factors) {
    Json x;
    x["degree"] = f.degree;
    x["multiplicity"] = f.multiplicity;
    x["text"] = emit_poly(f.poly);
    x["poly"] = poly_to_json(f.poly);
    factors.push_back(x);
  }
  j["factors"] = factors;
  Json atoms = Json::array();
  for (const auto& a : r.decomposition.atomic_factors) {
    Json x;
    x["essential_dim"] = a.essential_dim;
    x["factor_indices"] = a.member_nodes;
    x["contains_nonlinear"] = a.contains_nonlinear;
    atoms.push_back(x);
  }
  j["atomic_factors"] = atoms;
  j["atomic_partition"] = r.decomposition.partition;
  Json qs = Json::array();
  for (const auto& q : r.queries) {
    Json x;
    x["target"] = q.target.parts;
    x["separable"] = q.verdict.separable;
    if (q.verdict.grouping) {
      Json g = Json::array();
      for (const auto& group : *q.verdict.grouping) {
        Json names = Json::array();
        for (const auto& e : group) names.push_back(describe_element(e));
        g.push_back(names);
      }
      x["witness"] = g;
    }
    qs.push_back(x);
  }
  j["partition_queries"] = qs;
  j["separating_unitary"] = unitary_to_json(r.decomposition.basis_change);
  j["seed"] = r.seed;
  j["tolerances"] = {{"verify", r.verify_tol}, {"rank", r.rank_tol}, {"disjoint", r.disjoint_tol}};
  Json w = Json::array();
  for (const auto& s : r.warnings) w.push_back(s);
  for (const auto& s : r.decomposition.warnings) w.push_back(s);
  j["warnings"] = w;
  return j;
}

inline std::string report_to_text(const AnalysisReport& r) {
  std::ostringstream os;
  const auto& dec = r.decomposition;
  const auto& fz = dec.factorization;
  char buf[128];
  os << "input: " << r.source << " (digest " << digest(r.poly) << ")\n";
  os << "modes: " << r.poly.var_count() << "  stellar rank: " << r.stellar_rank << "  essential dim: "
     << r.essential_dim << "  vacuum modes: " << dec.vacuum_modes << "\n";
  std::snprintf(buf, sizeof buf, "%.3e", fz.residual);
  os << "factors (" << fz.factors.size() << ", scalar " << format_complex(fz.scalar) << ", residual " << buf << "):\n";
  for (std::size_t k = 0; k < fz.factors.size(); ++k) {
    const auto& f = fz.factors[k];
    os << "  [" << k + 1 << "] deg " << f.degree << " mult " << f.multiplicity << ": " << emit_poly(f.poly) << "\n";
  }
  os << "atomic factors:\n";
  for (std::size_t a = 0; a < dec.atomic_factors.size(); ++a) {
    const auto& af = dec.atomic_factors[a];
    os << "  A" << a + 1 << ": dim " << af.essential_dim << ", factors {";
    for (std::size_t i = 0; i < af.member_nodes.size(); ++i) os << (i ? "," : "") << af.member_nodes[i] + 1;
    os << "}" << (af.contains_nonlinear ? ", contains nonlinear factor" : "") << "\n";
  }
  os << "atomic partition: " << format_partition(dec.partition) << "\n";
  for (const auto& q : r.queries) {
    os << "partition " << format_partition(q.target.parts) << ": "
       << (q.verdict.separable ? "separable" : "not separable");
    if (q.verdict.grouping) {
      os << "  witness:";
      for (std::size_t k = 0; k < q.verdict.grouping->size(); ++k) {
        os << " " << q.target.parts[k] << "=[";
        const auto& g = (*q.verdict.grouping)[k];
        for (std::size_t i = 0; i < g.size(); ++i) os << (i ? " " : "") << describe_element(g[i]);
        os << "]";
      }
    }
    os << "\n";
  }
  os << "separating unitary (columns = new modes):\n";
  for (Eigen::Index i = 0; i < dec.basis_change.rows(); ++i) {
    os << " ";
    for (Eigen::Index k = 0; k < dec.basis_change.cols(); ++k) {
      const Complex c = dec.basis_change(i, k);
      std::snprintf(buf, sizeof buf, " %+.6f%+.6fi", c.real() == 0 ? 0.0 : c.real(), c.imag() == 0 ? 0.0 : c.imag());
      os << buf;
    }
    os << "\n";
  }
  std::snprintf(buf, sizeof buf, "seed %llu, verify_tol %.1e, rank_tol %.1e, disjoint_tol %.1e",
                static_cast<unsigned long long>(r.seed), r.verify_tol, r.rank_tol, r.disjoint_tol);
  os << buf << "\n";
  for (const auto& s : r.warnings) os << "warning: " << s << "\n";
  for (const auto& s : dec.warnings) os << "warning: " << s << "\n";
  return os.str();
}

}  // namespace stellar
