#pragma once

// Command-line front end. run_cli returns the process exit code:
// 0 ok, 1 usage/IO, 2 not separable under --expect-separable, 3 inconclusive.

#include <cstdlib>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "stellar/atomic.hpp"
#include "stellar/essential.hpp"
#include "stellar/factorizer.hpp"
#include "stellar/io.hpp"
#include "stellar/special_cases.hpp"
#include "stellar/states.hpp"

namespace stellar {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNotSeparable = 2, kExitInconclusive = 3 };

namespace detail {

inline std::uint64_t default_seed() {
  if (const char* s = std::getenv("STELLAR_SEED")) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(s, &used);
      if (used == std::string(s).size()) return v;
    } catch (const std::exception&) {
    }
  }
  return 0;
}

inline std::vector<int> parse_int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw CLI::ValidationError(std::string(what), "expected comma-separated integers, got '" + s + "'");
    }
  }
  if (out.empty()) throw CLI::ValidationError(std::string(what), "empty list");
  return out;
}

struct CommonOptions {
  double tol = 1e-8;
  double rank_tol = kDefaultRankTol;
  std::uint64_t seed = 0;
  int modes = 0;
  std::string format = "text";
  bool expect_separable = false;

  FactorizerConfig factorizer() const {
    FactorizerConfig c;
    c.seed = seed;
    c.verify_tol = tol;
    c.rank_tol = rank_tol;
    return c;
  }
};

inline void add_common(CLI::App* cmd, CommonOptions& o, bool with_format = true) {
  cmd->add_option("--tol", o.tol, "factorization verification tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--rank-tol", o.rank_tol, "relative singular-value rank tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "seed for randomized stages (default 0 or STELLAR_SEED)");
  cmd->add_option("--modes", o.modes, "number of modes for polynomial text input")->check(CLI::PositiveNumber);
  if (with_format)
    cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"text", "doc", "graph"}));
}

inline std::string fmt_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline Json factorization_json(const Factorization& f) {
  Json j;
  j["scalar"] = complex_json(f.scalar);
  j["residual"] = f.residual;
  Json arr = Json::array();
  for (const auto& x : f.factors) {
    Json e;
    e["degree"] = x.degree;
    e["multiplicity"] = x.multiplicity;
    e["text"] = emit_poly(x.poly);
    e["poly"] = poly_to_json(x.poly);
    arr.push_back(e);
  }
  j["factors"] = arr;
  j["method_trace"] = f.method_trace;
  return j;
}

inline Json two_mode_json(const TwoModeReport& r) {
  Json j;
  j["separable"] = r.separable;
  j["degree"] = r.degree;
  j["planar_degree"] = r.planar_degree;
  Json arr = Json::array();
  for (const auto& pl : r.planes) {
    Json e;
    e["orientation"] = pl.orientation == PlaneOrientation::z2_of_z1 ? "z2 = kappa z1 + C" : "z1 = kappa z2 + C";
    e["kappa"] = complex_json(pl.kappa);
    e["C"] = complex_json(pl.c);
    e["multiplicity"] = pl.multiplicity;
    e["certificate"] = pl.certificate;
    arr.push_back(e);
  }
  j["planes"] = arr;
  if (r.family_split) j["family_split"] = {r.family_split->first, r.family_split->second};
  j["notes"] = r.notes;
  return j;
}

inline std::string two_mode_text(const TwoModeReport& r) {
  std::ostringstream os;
  os << (r.separable ? "separable" : "not separable") << "\n";
  os << "degree " << r.degree << ", planar degree " << r.planar_degree << "\n";
  for (const auto& pl : r.planes)
    os << "  plane " << (pl.orientation == PlaneOrientation::z2_of_z1 ? "z2 = " : "z1 = ") << format_complex(pl.kappa)
       << (pl.orientation == PlaneOrientation::z2_of_z1 ? "*z1 + " : "*z2 + ") << format_complex(pl.c) << "  mult "
       << pl.multiplicity << "  certificate " << fmt_sci(pl.certificate) << "\n";
  if (!r.notes.empty()) os << "notes: " << r.notes << "\n";
  return os.str();
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int analyze(const std::vector<std::string>& inputs, const std::vector<std::string>& partitions,
              const CommonOptions& o) {
    std::vector<ModePartition> targets;
    for (const auto& s : partitions) targets.push_back({parse_int_list(s, "--partition")});
    int code = kExitOk;
    Json docs = Json::array();
    for (const auto& path : inputs) {
      const Poly p = load_poly(path, o.modes);
      if (p.is_zero()) throw ZeroStateError(path + ": zero state");
      AnalysisReport rep;
      rep.source = path;
      rep.poly = p;
      rep.stellar_rank = p.total_degree();
      rep.essential_dim = p.is_constant() ? 0 : essential_space(p, o.rank_tol).dim;
      AtomicConfig ac;
      ac.factorizer = o.factorizer();
      rep.decomposition = atomic_decomposition(p, ac);
      rep.seed = o.seed;
      rep.verify_tol = o.tol;
      rep.rank_tol = o.rank_tol;
      rep.disjoint_tol = ac.disjoint_tol;
      for (const auto& t : targets) {
        if (t.total() != p.var_count())
          throw DimensionError("partition " + format_partition(t.parts) + " does not sum to " +
                               std::to_string(p.var_count()) + " modes");
        rep.queries.push_back({t, check_partition(rep.decomposition, t)});
        if (o.expect_separable && !rep.queries.back().verdict.separable) code = kExitNotSeparable;
      }
      if (o.format == "graph")
        out_ << emit_graph(rep.decomposition);
      else if (o.format == "doc")
        docs.push_back(report_to_json(rep));
      else
        out_ << report_to_text(rep);
    }
    if (o.format == "doc") out_ << dump_canonical(docs.size() == 1 ? docs[0] : docs);
    return code;
  }

  int factor_cmd(const std::string& path, const CommonOptions& o) {
    const Poly p = load_poly(path, o.modes);
    const Factorization f = factor(p, o.factorizer());
    if (o.format == "doc") {
      out_ << dump_canonical(factorization_json(f));
      return kExitOk;
    }
    out_ << "scalar " << format_complex(f.scalar) << ", residual " << fmt_sci(f.residual) << "\n";
    for (const auto& x : f.factors)
      out_ << "deg " << x.degree << " mult " << x.multiplicity << ": " << emit_poly(x.poly) << "\n";
    out_ << "trace:";
    for (const auto& t : f.method_trace) out_ << " " << t;
    out_ << "\n";
    return kExitOk;
  }

  int essential_cmd(const std::string& path, const CommonOptions& o) {
    const Poly p = load_poly(path, o.modes);
    const EssentialSpace es = essential_space(p, o.rank_tol);
    const double cert = annihilation_residual(p, es);
    if (o.format == "doc") {
      Json j;
      j["modes"] = es.ambient;
      j["essential_dim"] = es.dim;
      j["vacuum_modes"] = es.ambient - es.dim;
      j["frame"] = unitary_to_json(es.frame());
      j["annihilation_residual"] = cert;
      out_ << dump_canonical(j);
      return kExitOk;
    }
    out_ << "modes " << es.ambient << ", essential dim " << es.dim << ", vacuum modes " << es.ambient - es.dim << "\n";
    out_ << "annihilation residual " << fmt_sci(cert) << "\n";
    return kExitOk;
  }

  int two_mode_cmd(const std::string& path, const CommonOptions& o) {
    const Poly p = load_poly(path, o.modes);
    TwoModeConfig cfg;
    cfg.factorizer = o.factorizer();
    const TwoModeReport r = two_mode_planes(p, cfg);
    if (o.format == "doc")
      out_ << dump_canonical(two_mode_json(r));
    else
      out_ << two_mode_text(r);
    return o.expect_separable && !r.separable ? kExitNotSeparable : kExitOk;
  }

  int rank2_cmd(const std::string& path, const std::string& split, const CommonOptions& o) {
    const auto s = parse_int_list(split, "--split");
    if (s.size() != 2) throw CLI::ValidationError("--split", "expected M1,M2");
    const Poly p = load_poly(path, o.modes);
    TwoModeConfig cfg;
    cfg.factorizer = o.factorizer();
    const Rank2Verdict v = rank2_separable(rank2_form(p), s[0], s[1], cfg, o.rank_tol);
    if (o.format == "doc") {
      Json j;
      j["split"] = {v.m1, v.m2};
      j["separable"] = v.separable;
      j["takagi_essential_dim"] = v.takagi_essential_dim;
      j["catalecticant_essential_dim"] = v.catalecticant_essential_dim;
      j["routes_agree"] = v.routes_agree;
      if (v.literal_clause) j["literal_clause"] = *v.literal_clause;
      j["discrepancy"] = v.discrepancy;
      if (v.two_mode) j["two_mode"] = two_mode_json(*v.two_mode);
      j["notes"] = v.notes;
      out_ << dump_canonical(j);
    } else {
      out_ << "split {" << v.m1 << "," << v.m2 << "}: " << (v.separable ? "separable" : "not separable") << "\n";
      out_ << "essential dim: Takagi " << v.takagi_essential_dim << ", catalecticant "
           << v.catalecticant_essential_dim << "\n";
      if (v.literal_clause) out_ << "literal clause: " << (*v.literal_clause ? "separable" : "not separable") << "\n";
      if (v.discrepancy) err_ << "warning: " << v.notes << "\n";
      if (v.two_mode) out_ << two_mode_text(*v.two_mode);
    }
    return o.expect_separable && !v.separable ? kExitNotSeparable : kExitOk;
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
};

struct GenOptions {
  std::string kind;
  int n = 2;
  int modes = 0;
  std::vector<std::string> forms;
  SubtractionParams sub;
  std::string input;
  std::string unitary;
  std::vector<std::string> beamsplitters;
  bool random_unitary = false;
  std::uint64_t seed = 0;
  std::string output;
};

inline CoreState generate(const GenOptions& g) {
  if (g.kind == "noon") return gen_noon(g.n);
  if (g.kind == "hom") return gen_hom();
  if (g.kind == "maxent") return gen_maxent(g.n);
  if (g.kind == "two-subtracted") return gen_two_subtracted(g.sub);
  if (g.kind == "photon-added") {
    if (g.forms.empty()) throw CLI::ValidationError("--form", "photon-added needs at least one --form");
    std::vector<Poly> polys;
    int m = g.modes;
    for (const auto& f : g.forms) {
      polys.push_back(parse_poly(f));
      m = std::max(m, polys.back().var_count());
    }
    std::vector<LinearForm> forms;
    for (const auto& p : polys) {
      const Poly q = p.with_var_count(m);
      if (q.total_degree() != 1 || !q.is_homogeneous())
        throw DomainError("photon-added forms must be homogeneous linear: " + emit_poly(p));
      LinearForm lf;
      lf.coeffs.assign(m, 0.0);
      for (int j = 0; j < m; ++j) {
        Exponents e(m, 0);
        e[j] = 1;
        lf.coeffs[j] = q.coeff(e);
      }
      forms.push_back(lf);
    }
    return gen_photon_added(forms, m);
  }
  // scramble
  if (g.input.empty()) throw CLI::ValidationError("--in", "scramble needs --in");
  const Poly p = load_poly(g.input, g.modes);
  const int m = p.var_count();
  CMatrix v = CMatrix::Identity(m, m);
  int sources = 0;
  if (!g.unitary.empty()) {
    v = unitary_from_json(read_json_file(g.unitary)).matrix();
    if (v.rows() != m) throw DimensionError("unitary dimension does not match the mode count");
    ++sources;
  }
  if (!g.beamsplitters.empty()) {
    for (const auto& spec : g.beamsplitters) {
      std::stringstream ss(spec);
      std::string a, b, t;
      if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, t, ','))
        throw CLI::ValidationError("--bs", "expected i,j,theta");
      v = v * beamsplitter(m, std::stoi(a) - 1, std::stoi(b) - 1, std::stod(t)).matrix();
    }
    ++sources;
  }
  if (g.random_unitary) {
    v = random_unitary(m, g.seed).matrix();
    ++sources;
  }
  if (sources != 1) throw CLI::ValidationError("scramble", "give exactly one of --unitary, --bs, --random");
  return scramble(core_from_poly(p), UnitaryMatrix(v));
}

}  // namespace detail

/// args excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"passive separability of multimode bosonic core states", "stellar"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  detail::CommonOptions common;
  common.seed = detail::default_seed();
  std::vector<std::string> inputs;
  std::string input;
  std::vector<std::string> partitions;
  std::string split;

  auto* analyze = app.add_subcommand("analyze", "atomic decomposition and partition queries");
  analyze->add_option("inputs", inputs, "state/poly documents or polynomial text files")->required()->check(CLI::ExistingFile);
  analyze->add_option("--partition", partitions, "target partition a,b,... (repeatable)");
  analyze->add_flag("--expect-separable", common.expect_separable, "exit 2 if any queried partition is not separable");
  detail::add_common(analyze, common);

  auto* fac = app.add_subcommand("factor", "absolute factorization");
  fac->add_option("input", input)->required()->check(CLI::ExistingFile);
  detail::add_common(fac, common);

  auto* ess = app.add_subcommand("essential", "essential variables");
  ess->add_option("input", input)->required()->check(CLI::ExistingFile);
  detail::add_common(ess, common);

  auto* two = app.add_subcommand("two-mode", "zero-plane test for two-mode states");
  two->add_option("input", input)->required()->check(CLI::ExistingFile);
  two->add_flag("--expect-separable", common.expect_separable);
  detail::add_common(two, common);

  auto* r2 = app.add_subcommand("rank2", "stellar-rank-2 criterion for a bipartition");
  r2->add_option("input", input)->required()->check(CLI::ExistingFile);
  r2->add_option("--split", split, "M1,M2")->required();
  r2->add_flag("--expect-separable", common.expect_separable);
  detail::add_common(r2, common);

  detail::GenOptions gen;
  auto* g = app.add_subcommand("gen", "generate a state document");
  g->add_option("kind", gen.kind)
      ->required()
      ->check(CLI::IsMember({"noon", "hom", "maxent", "photon-added", "two-subtracted", "scramble"}));
  g->add_option("-n,--n", gen.n, "photon number for noon / maxent");
  g->add_option("--modes", gen.modes, "mode count (photon-added, polynomial text for scramble)");
  g->add_option("--form", gen.forms, "linear form such as 'z1 + (0+1i)*z2' (photon-added, repeatable)");
  g->add_option("--r1", gen.sub.r1);
  g->add_option("--r2", gen.sub.r2);
  g->add_option("--theta1", gen.sub.theta1);
  g->add_option("--theta2", gen.sub.theta2);
  g->add_option("--phi1", gen.sub.phi1);
  g->add_option("--phi2", gen.sub.phi2);
  g->add_option("--in", gen.input, "input state for scramble")->check(CLI::ExistingFile);
  g->add_option("--unitary", gen.unitary, "unitary document for scramble")->check(CLI::ExistingFile);
  g->add_option("--bs", gen.beamsplitters, "beam splitter i,j,theta (1-based; product in the given order)");
  g->add_flag("--random", gen.random_unitary, "Haar-random unitary for scramble (uses --seed)");
  g->add_option("--seed", gen.seed);
  g->add_option("-o,--output", gen.output, "output file (stdout if omitted)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    detail::Runner run(out, err);
    if (*analyze) return run.analyze(inputs, partitions, common);
    if (*fac) return run.factor_cmd(input, common);
    if (*ess) return run.essential_cmd(input, common);
    if (*two) return run.two_mode_cmd(input, common);
    if (*r2) return run.rank2_cmd(input, split, common);
    if (*g) {
      if (g->count("--seed") == 0) gen.seed = detail::default_seed();
      const std::string doc = dump_canonical(state_to_json(detail::generate(gen)));
      if (gen.output.empty())
        out << doc;
      else
        write_text_file(gen.output, doc);
      return kExitOk;
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InconclusiveError& e) {
    err << "inconclusive: " << e.what() << "\n";
    return kExitInconclusive;
  } catch (const InconsistencyError& e) {
    err << "inconsistent: " << e.what() << "\n";
    return kExitInconclusive;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace stellar
