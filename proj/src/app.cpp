#include "chevrep/app.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "chevrep/chevalley.hpp"
#include "chevrep/error.hpp"
#include "chevrep/modrep.hpp"
#include "chevrep/paperchk.hpp"
#include "chevrep/pbw.hpp"

namespace chevrep::app {

namespace {

using paperchk::Case;
using paperchk::Table;

[[noreturn]] void config_error(const std::string& what) { fail(ErrorCode::Config, what); }

const std::set<std::string> kCommands = {"table", "u-calc", "verma", "chop", "paper", "probe"};
const std::set<std::string> kCommon = {"command", "seed", "jobs", "output", "format", "dry_run", "timing"};

std::set<std::string> allowed_fields(const std::string& cmd) {
  std::set<std::string> s = kCommon;
  auto add = [&](std::initializer_list<const char*> xs) {
    for (auto x : xs) s.insert(x);
  };
  if (cmd == "table") add({"type", "rank", "p", "checks"});
  if (cmd == "u-calc") add({"type", "rank", "p", "expression", "chi_root"});
  if (cmd == "verma") add({"type", "rank", "p", "chi_root", "lambda", "chop", "max_dim", "validate", "save"});
  if (cmd == "chop") add({"input"});
  if (cmd == "paper")
    add({"case", "table", "rank", "p", "tasks", "cap", "independence_mode", "exact_limit", "lambda", "max_dim"});
  if (cmd == "probe") add({"p", "lambda", "max_dim"});
  return s;
}

std::uint64_t get_uint(const json& c, const char* key, std::uint64_t def, std::uint64_t lo, std::uint64_t hi) {
  if (!c.contains(key)) return def;
  const json& v = c.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    config_error(std::string("field '") + key + "' must be a nonnegative integer");
  const auto x = v.get<std::uint64_t>();
  if (x < lo || x > hi)
    config_error(std::string("field '") + key + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                 "]");
  return x;
}

bool get_bool(const json& c, const char* key, bool def) {
  if (!c.contains(key)) return def;
  if (!c.at(key).is_boolean()) config_error(std::string("field '") + key + "' must be a boolean");
  return c.at(key).get<bool>();
}

std::string get_string(const json& c, const char* key, const std::string& def, const std::set<std::string>& choices = {}) {
  if (!c.contains(key)) return def;
  if (!c.at(key).is_string()) config_error(std::string("field '") + key + "' must be a string");
  const auto s = c.at(key).get<std::string>();
  if (!choices.empty() && !choices.count(s)) {
    std::string list;
    for (const auto& x : choices) list += (list.empty() ? "" : ", ") + x;
    config_error(std::string("field '") + key + "' must be one of: " + list);
  }
  return s;
}

std::vector<std::string> get_subset(const json& c, const char* key, const std::vector<std::string>& def,
                                    const std::set<std::string>& choices) {
  if (!c.contains(key)) return def;
  const json& v = c.at(key);
  if (!v.is_array()) config_error(std::string("field '") + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& x : v) {
    if (!x.is_string() || !choices.count(x.get<std::string>()))
      config_error(std::string("field '") + key + "' has an unknown entry " + x.dump());
    if (std::find(out.begin(), out.end(), x.get<std::string>()) == out.end()) out.push_back(x.get<std::string>());
  }
  return out;
}

RootSystem system_for(int rank) { return RootSystem::build(rank == 1 ? RootType::A1 : RootType::C, rank); }

// "0" for the zero character, "a"/"-a" for the first simple root and its
// negative, otherwise a root name such as "e1-e2" or "-2e1".
Root resolve_root(const RootSystem& rs, const std::string& sel) {
  if (sel == "0") return {};
  if (sel == "a") return rs.simple_root(0);
  if (sel == "-a") return negate(rs.simple_root(0));
  for (const auto& r : rs.roots())
    if (root_name(r) == sel) return r;
  config_error("'" + sel + "' is not a root selector for rank " + std::to_string(rs.rank()));
}

json normalize_lambda(const json& c, int rank, u32 p) {
  if (!c.contains("lambda")) return "all";
  const json& v = c.at("lambda");
  if (v.is_string()) {
    if (v.get<std::string>() != "all") config_error("field 'lambda' must be \"all\" or a list of weights");
    return v;
  }
  if (!v.is_array() || v.empty()) config_error("field 'lambda' must be \"all\" or a nonempty list of weights");
  for (const auto& w : v) {
    if (!w.is_array() || static_cast<int>(w.size()) != rank)
      config_error("every weight in 'lambda' needs " + std::to_string(rank) + " entries");
    for (const auto& x : w)
      if (!x.is_number_integer() || x.get<std::int64_t>() < 0 || x.get<std::int64_t>() >= static_cast<std::int64_t>(p))
        config_error("weight entries must lie in [0, p)");
  }
  return v;
}

std::vector<std::vector<u32>> lambda_list(const json& v) {
  std::vector<std::vector<u32>> out;
  if (v.is_string()) return out;
  for (const auto& w : v) out.push_back(w.get<std::vector<u32>>());
  return out;
}

void check_prime(u32 p, bool allow_zero) {
  if (allow_zero && p == 0) return;
  if (!ff::is_prime(p)) config_error("p must be a prime" + std::string(allow_zero ? " or 0" : ""));
}

int normalize_rank_and_type(const json& c, json& out, int def_rank) {
  const int rank = static_cast<int>(get_uint(c, "rank", def_rank, 1, 8));
  const std::string want = rank == 1 ? "A1" : "C";
  const std::string type = get_string(c, "type", want, {"A1", "C"});
  if (type != want) config_error("type " + type + " does not match rank " + std::to_string(rank));
  out["type"] = type;
  out["rank"] = rank;
  return rank;
}

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// ---------------------------------------------------------------- json views

json root_json(const Root& r) { return root_name(r); }

json lie_json(const StructureTable& t, const LieElt& x) {
  json o = json::object();
  for (const auto& [b, c] : x.terms())
    if (c) o[t.basis_name(b)] = c;
  return o;
}

json dim_report_json(const paperchk::DimReport& d) {
  json results = json::array();
  for (const auto& lr : d.results) {
    json factors = json::array();
    for (const auto& f : lr.factors)
      factors.push_back({{"dim", f.dim}, {"endo_degree", f.endo_degree}, {"multiplicity", f.multiplicity}});
    results.push_back({{"lambda", lr.lambda},
                       {"total", lr.total},
                       {"factors", factors},
                       {"closure_dims", lr.closure_dims},
                       {"module_checks_ok", lr.module_checks_ok},
                       {"certificates_replayed", lr.certificates_replayed},
                       {"witness_dims", lr.witness_dims},
                       {"witness_checks_ok", lr.witness_checks_ok}});
  }
  json chi = json::object();
  for (const auto& [name, v] : d.chi_standard) chi[name] = v;
  return {{"rank", d.rank},
          {"p", d.p},
          {"chi_root", d.chi_root},
          {"kind", d.kind},
          {"weyl_word", d.weyl_word},
          {"chi_standard", chi},
          {"p_m", d.p_m},
          {"results", results},
          {"all_factors_equal_p_m", d.all_factors_equal_p_m},
          {"found_p3_factor", d.found_p3_factor},
          {"all_sums_ok", d.all_sums_ok},
          {"all_certificates_replayed", d.all_certificates_replayed},
          {"verdict", d.verdict}};
}

json dim_report_certs(const paperchk::DimReport& d) {
  json out = json::array();
  for (const auto& lr : d.results) {
    json certs = json::array();
    for (const auto& c : lr.certs)
      certs.push_back({{"dim", c.dim},
                       {"block", c.block},
                       {"layers", c.layers},
                       {"factor", c.factor},
                       {"nullity", c.nullity},
                       {"exhaustive", c.exhaustive},
                       {"attempts", c.attempts},
                       {"replayed", c.replayed}});
    out.push_back({{"lambda", lr.lambda}, {"seed", lr.seed}, {"splits", lr.splits}, {"irreducibility", certs}});
  }
  return out;
}

json dim_report_timing(const paperchk::DimReport& d) {
  json out = json::array();
  for (const auto& lr : d.results) out.push_back({{"lambda", lr.lambda}, {"seconds", lr.seconds}});
  return out;
}

json formula_search_json(const paperchk::FormulaSearch& fs) {
  const auto& f = fs.formula;
  json outcomes = json::array();
  for (const auto& o : fs.outcomes)
    outcomes.push_back({{"signs", o.signs}, {"commutes", o.commutes}, {"reverified", o.reverified}});
  json sat = json::array();
  for (const auto& s : fs.satisfying) sat.push_back({{"signs", s}, {"element", paperchk::render(f, s)}});
  return {{"label", f.label},
          {"target", root_json(f.target)},
          {"template", paperchk::render_template(f)},
          {"status", f.status},
          {"note", f.note},
          {"slots", f.slots},
          {"fallback", f.fallback},
          {"outcomes", outcomes},
          {"satisfying", sat},
          {"all_reverified", fs.all_reverified}};
}

json sign_report_json(const paperchk::SignSearchReport& r) {
  json formulas = json::array(), fallbacks = json::array(), choices = json::array();
  for (const auto& f : r.formulas) formulas.push_back(formula_search_json(f));
  for (const auto& f : r.fallbacks) fallbacks.push_back(formula_search_json(f));
  for (const auto& c : r.choices)
    choices.push_back({{"root", root_json(c.root)},
                       {"source", c.source},
                       {"label", c.label},
                       {"signs", c.signs},
                       {"commutes", c.commutes}});
  bool all = true;
  for (const auto& f : r.formulas) all = all && f.all_reverified;
  for (const auto& f : r.fallbacks) all = all && f.all_reverified;
  return {{"case", paperchk::case_name(r.kase)},
          {"table", paperchk::table_name(r.table)},
          {"rank", r.rank},
          {"p", r.p},
          {"formulas", formulas},
          {"fallbacks", fallbacks},
          {"skipped", r.skipped},
          {"failing", r.failing},
          {"choices", choices},
          {"all_reverified", all}};
}

json bfamily_json(const pbw::Enveloping& u, const paperchk::BFamily& f) {
  json order = json::array();
  for (const auto& r : f.order) order.push_back(root_json(r));
  json gens = json::array();
  for (const auto& g : f.generators) gens.push_back(u.format(g));
  return {{"order", order},
          {"coeffs", f.coeffs},
          {"labels", f.labels},
          {"generators", gens},
          {"general_position", f.general_position},
          {"pairwise_independent", f.pairwise_independent},
          {"alpha_nonzero", f.alpha_nonzero},
          {"literal_condition_satisfiable", f.literal_condition_satisfiable},
          {"note", f.note}};
}

json independence_json(const paperchk::IndependenceResult& r) {
  json o = {{"mode", r.mode},
            {"generators", r.generators},
            {"cap", r.cap},
            {"products", r.products},
            {"decided", r.decided},
            {"independent", r.independent},
            {"scope", "exponents capped at " + std::to_string(r.cap) +
                          "; the full family with exponents up to p-1 is out of reach and not claimed"}};
  o["rank"] = r.decided ? json(r.rank) : json(nullptr);
  o["deficit"] = r.decided ? json(r.deficit) : json(nullptr);
  if (r.mode == "exact") o["columns"] = r.columns;
  return o;
}

json independence_cert(const paperchk::IndependenceResult& r) {
  return {{"jacobian_rank", r.jacobian_rank},
          {"point", r.point},
          {"weights", r.weights},
          {"points_tried", r.points_tried},
          {"weightings_tried", r.weightings_tried}};
}

// ---------------------------------------------------------------- commands

struct Outcome {
  json payload;
  json certificates = json::object();
  json timing = json::object();
};

Outcome run_table(const json& c) {
  const int rank = c.at("rank").get<int>();
  const u32 p = c.at("p").get<u32>();
  const RootSystem rs = system_for(rank);
  const StructureTable t = StructureTable::build(rs);
  json basis = json::array();
  for (int b = 0; b < t.dim(); ++b) basis.push_back(t.basis_name(b));
  json brackets = json::array();
  for (int i = 0; i < t.dim(); ++i)
    for (int j = i + 1; j < t.dim(); ++j) {
      const LieElt v = p ? t.bracket_basis(i, j).reduced(p) : t.bracket_basis(i, j);
      if (!v.is_zero()) brackets.push_back({{"x", t.basis_name(i)}, {"y", t.basis_name(j)}, {"bracket", lie_json(t, v)}});
    }
  json checks = json::object();
  for (const auto& k : c.at("checks")) {
    const std::string name = k.get<std::string>();
    if (name == "jacobi") {
      const auto jr = jacobi_check(t, p);
      json viol = nullptr;
      if (!jr.ok) viol = {t.basis_name(jr.violating[0]), t.basis_name(jr.violating[1]), t.basis_name(jr.violating[2])};
      checks["jacobi"] = {{"ok", jr.ok}, {"triples_checked", jr.triples_checked}, {"violating", viol}};
    } else if (name == "realization") {
      const auto rc = compare_with_realization(t, matrix_realization(t));
      json first = nullptr;
      if (!rc.ok) first = {t.basis_name(rc.first_i), t.basis_name(rc.first_j)};
      checks["realization"] = {{"ok", rc.ok}, {"pairs_checked", rc.pairs_checked}, {"first_mismatch", first}};
    } else if (name == "pmap") {
      checks["pmap"] = {{"ok", check_p_map_adjoint(t, p)}};
    }
  }
  Outcome o;
  o.payload = {{"type", c.at("type")}, {"rank", rank}, {"p", p}, {"dim", t.dim()},
               {"basis", basis},       {"brackets", brackets}, {"checks", checks}};
  return o;
}

Outcome run_ucalc(const json& c) {
  const int rank = c.at("rank").get<int>();
  const u32 p = c.at("p").get<u32>();
  const RootSystem rs = system_for(rank);
  const StructureTable t = StructureTable::build(rs);
  const bool reduced = c.contains("chi_root");
  const std::string sel = reduced ? c.at("chi_root").get<std::string>() : "0";
  const Root r = resolve_root(rs, sel);
  std::optional<pbw::Enveloping> u;
  if (!reduced)
    u.emplace(t, p);
  else if (r.empty())
    u.emplace(t, p, std::vector<u32>(t.dim(), 0));
  else
    u.emplace(t, p, modrep::root_character(t, rs.index_of(r)));
  const pbw::UElt x = u->parse(c.at("expression").get<std::string>());
  Outcome o;
  o.payload = {{"expression", c.at("expression")},
               {"rank", rank},
               {"p", p},
               {"algebra", reduced ? "U_chi(L)" : "U(L)"},
               {"chi_root", reduced ? json(sel) : json(nullptr)},
               {"normal_form", u->format(x)},
               {"terms", x.terms().size()},
               {"degree", x.is_zero() ? -1 : x.degree()}};
  return o;
}

paperchk::ExperimentOptions experiment_options(const json& c) {
  paperchk::ExperimentOptions opt;
  opt.seed = c.at("seed").get<std::uint64_t>();
  opt.jobs = c.at("jobs").get<int>();
  opt.max_dim = c.at("max_dim").get<std::size_t>();
  return opt;
}

Outcome run_verma(const json& c) {
  const int rank = c.at("rank").get<int>();
  const u32 p = c.at("p").get<u32>();
  const RootSystem rs = system_for(rank);
  const Root alpha = resolve_root(rs, c.at("chi_root").get<std::string>());
  auto opt = experiment_options(c);
  opt.run_chop = c.at("chop").get<bool>();
  opt.validate_modules = c.at("validate").get<bool>();
  const auto d = paperchk::dimension_experiment(rank, p, alpha, lambda_list(c.at("lambda")), opt);
  Outcome o;
  o.payload = dim_report_json(d);
  o.certificates = {{"modules", dim_report_certs(d)}};
  o.timing = {{"modules", dim_report_timing(d)}};
  if (c.contains("save")) {
    const StructureTable t = StructureTable::build(rs);
    const auto st = modrep::standardize_character(
        t, p, alpha.empty() ? std::vector<u32>(t.dim(), 0) : modrep::root_character(t, rs.index_of(alpha)));
    json files = json::array();
    for (std::size_t i = 0; i < d.results.size(); ++i) {
      const auto z = modrep::baby_verma(t, p, st.chi, d.results[i].lambda, opt.max_dim);
      const std::string path = c.at("save").get<std::string>() + "-" + std::to_string(i) + ".chvr";
      std::ofstream os(path, std::ios::binary);
      if (!os) fail(ErrorCode::Io, "cannot write " + path);
      modrep::write_binary(z, os);
      if (!os) fail(ErrorCode::Io, "write failed for " + path);
      files.push_back(path);
    }
    o.payload["saved"] = files;
  }
  return o;
}

modrep::ActionRep load_module(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::Io, "cannot open module file " + path);
  char magic[4] = {0, 0, 0, 0};
  is.read(magic, 4);
  is.clear();
  is.seekg(0);
  if (std::string(magic, 4) == "CHVR") return modrep::read_binary(is);
  std::stringstream ss;
  ss << is.rdbuf();
  return modrep::from_json(ss.str());
}

Outcome run_chop(const json& c) {
  const modrep::ActionRep rep = load_module(c.at("input").get<std::string>());
  const auto t0 = std::chrono::steady_clock::now();
  const auto cr = modrep::chop(rep, c.at("seed").get<std::uint64_t>());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json factors = json::array();
  for (const auto& e : cr.multiset())
    factors.push_back({{"dim", e.dim}, {"endo_degree", e.endo_degree}, {"multiplicity", e.multiplicity}});
  json certs = json::array();
  for (const auto& f : cr.factors)
    certs.push_back({{"dim", f.dim},
                     {"block", f.cert.theta.block},
                     {"layers", f.cert.theta.layers.size()},
                     {"factor", f.cert.factor.coeffs()},
                     {"nullity", f.cert.nullity},
                     {"exhaustive", f.cert.exhaustive},
                     {"attempts", f.cert.attempts},
                     {"replayed", f.replayed}});
  Outcome o;
  o.payload = {{"label", rep.label},
               {"p", rep.p},
               {"dim", rep.dim()},
               {"blocks", rep.blocks.size()},
               {"factors", factors},
               {"closure_dims", cr.closure_dims()},
               {"certificates_replayed", cr.certificates_replayed}};
  o.certificates = {{"splits", cr.splits}, {"irreducibility", certs}};
  o.timing = {{"chop_seconds", secs}};
  return o;
}

Outcome run_paper(const json& c) {
  const Case kase = c.at("case") == "short" ? Case::Short : Case::Long;
  const Table table = c.at("table") == "printed" ? Table::Printed : Table::Corrected;
  const int rank = c.at("rank").get<int>();
  const u32 p = c.at("p").get<u32>();
  std::set<std::string> tasks;
  for (const auto& x : c.at("tasks")) tasks.insert(x.get<std::string>());
  Outcome o;
  o.payload = {{"case", paperchk::case_name(kase)}, {"table", paperchk::table_name(table)}, {"rank", rank}, {"p", p}};
  auto clock = [] { return std::chrono::steady_clock::now(); };
  auto since = [](auto t0) { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

  std::optional<paperchk::SignSearchReport> signs;
  if (tasks.count("signsearch") || tasks.count("bfamily") || tasks.count("independence") || tasks.count("surrogate")) {
    const auto t0 = clock();
    signs = paperchk::search_commuting_signs(kase, rank, p, table);
    o.timing["signsearch_seconds"] = since(t0);
    if (tasks.count("signsearch")) o.payload["signsearch"] = sign_report_json(*signs);
  }
  if (tasks.count("bfamily") || tasks.count("independence")) {
    const RootSystem rs = system_for(rank);
    const StructureTable t = StructureTable::build(rs);
    const pbw::Enveloping u(t, p);
    const auto fam = paperchk::build_B_family(u, kase, *signs);
    if (tasks.count("bfamily")) o.payload["bfamily"] = bfamily_json(u, fam);
    if (tasks.count("independence")) {
      paperchk::IndependenceOptions io;
      io.mode = c.at("independence_mode").get<std::string>();
      io.exact_limit = c.at("exact_limit").get<std::uint64_t>();
      const auto t0 = clock();
      const auto ir = paperchk::truncated_B_independence(u, fam.generators, c.at("cap").get<int>(),
                                                          paperchk::derive_seed(c.at("seed").get<std::uint64_t>(), 0x1d),
                                                          io);
      o.timing["independence_seconds"] = since(t0);
      o.payload["independence"] = independence_json(ir);
      o.certificates["independence"] = independence_cert(ir);
    }
  }
  if (tasks.count("dimensions")) {
    const RootSystem rs = system_for(rank);
    Root a = rs.simple_root(0);
    if (kase == Case::Long) {
      a.assign(rank, 0);
      a[0] = 2;
    }
    const auto d = paperchk::dimension_experiment(rank, p, a, lambda_list(c.at("lambda")), experiment_options(c));
    o.payload["dimensions"] = dim_report_json(d);
    o.certificates["dimensions"] = dim_report_certs(d);
    o.timing["dimensions"] = dim_report_timing(d);
  }
  if (tasks.count("surrogate")) {
    auto lambdas = lambda_list(c.at("lambda"));
    if (lambdas.empty()) lambdas.push_back(std::vector<u32>(rank, 0));
    json out = json::array();
    for (const auto& lam : lambdas) {
      json rows = json::array();
      for (const auto& e : paperchk::surrogate_action(*signs, lam, c.at("max_dim").get<std::size_t>()))
        rows.push_back({{"root", root_json(e.root)},
                        {"label", e.label},
                        {"nonzero", e.nonzero},
                        {"invertible", e.invertible ? json(*e.invertible) : json(nullptr)}});
      out.push_back({{"lambda", lam}, {"entries", rows}});
    }
    o.payload["surrogate"] = out;
  }
  return o;
}

Outcome run_probe(const json& c) {
  const auto pr = paperchk::character_probe(c.at("p").get<u32>(), lambda_list(c.at("lambda")), experiment_options(c));
  Outcome o;
  o.payload = {{"p", pr.p},
               {"short_root", dim_report_json(pr.short_root)},
               {"long_root", dim_report_json(pr.long_root)},
               {"chops", pr.chops},
               {"p3_found", pr.p3_found},
               {"witnesses_verified", pr.witnesses_verified},
               {"verdict", pr.verdict}};
  o.certificates = {{"short_root", dim_report_certs(pr.short_root)}, {"long_root", dim_report_certs(pr.long_root)}};
  o.timing = {{"short_root", dim_report_timing(pr.short_root)}, {"long_root", dim_report_timing(pr.long_root)}};
  return o;
}

std::size_t weight_count(const json& lambda, int rank, u32 p) {
  if (lambda.is_array()) return lambda.size();
  return static_cast<std::size_t>(ipow(p, rank));
}

// ---------------------------------------------------------------- tables

std::string join(const json& arr, const std::string& sep = " ") {
  std::string s;
  for (const auto& x : arr) s += (s.empty() ? "" : sep) + (x.is_string() ? x.get<std::string>() : x.dump());
  return s;
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

void render_dim_report(std::ostream& os, const json& d) {
  os << "chi root " << d["chi_root"].get<std::string>() << " (" << d["kind"].get<std::string>() << "), rank "
     << d["rank"] << ", p " << d["p"] << ", p^m " << d["p_m"] << "\n";
  os << pad("lambda", 14) << pad("dim", 8) << pad("factors (dim x mult, endo)", 44) << "replayed\n";
  for (const auto& r : d["results"]) {
    std::string f;
    for (const auto& x : r["factors"]) {
      f += (f.empty() ? "" : " ") + x["dim"].dump() + "x" + x["multiplicity"].dump();
      if (x["endo_degree"] != 1) f += "(e" + x["endo_degree"].dump() + ")";
    }
    if (f.empty()) f = "-";
    os << pad("(" + join(r["lambda"], ",") + ")", 14) << pad(r["total"].dump(), 8) << pad(f, 44)
       << (r["certificates_replayed"].get<bool>() ? "yes" : "NO") << "\n";
  }
  os << "verdict: " << d["verdict"].get<std::string>() << "\n";
}

void render_signs(std::ostream& os, const json& s) {
  os << "sign search: case " << s["case"].get<std::string>() << ", " << s["table"].get<std::string>() << " table, rank "
     << s["rank"] << ", p " << s["p"] << "\n";
  for (const auto& f : s["formulas"]) {
    os << "  " << pad(f["status"].get<std::string>(), 11) << f["template"].get<std::string>() << "\n";
    if (f["status"] == "ok") {
      os << "      " << f["satisfying"].size() << "/" << f["outcomes"].size() << " sign choices commute with x_a";
      os << (f["all_reverified"].get<bool>() ? "" : " (REVERIFICATION MISMATCH)") << "\n";
      for (const auto& x : f["satisfying"]) os << "      " << x["element"].get<std::string>() << "\n";
    } else if (!f["note"].get<std::string>().empty()) {
      os << "      " << f["note"].get<std::string>() << "\n";
    }
  }
  os << "  no commuting signs: " << (s["failing"].empty() ? "none" : join(s["failing"], ", ")) << "\n";
  os << "  chosen elements:\n";
  for (const auto& ch : s["choices"])
    os << "    " << pad(ch["root"].get<std::string>(), 10) << pad(ch["source"].get<std::string>(), 10)
       << pad(ch["commutes"].get<bool>() ? "commutes" : "NO", 10) << ch["label"].get<std::string>() << "\n";
}

}  // namespace

// ---------------------------------------------------------------- public

json normalize_config(const json& raw) {
  if (!raw.is_object()) config_error("config must be a JSON object");
  if (!raw.contains("command") || !raw.at("command").is_string()) config_error("config needs a string 'command'");
  const std::string cmd = raw.at("command").get<std::string>();
  if (!kCommands.count(cmd)) config_error("unknown command '" + cmd + "'");
  const auto allowed = allowed_fields(cmd);
  for (const auto& [k, v] : raw.items())
    if (!allowed.count(k)) config_error("unknown field '" + k + "' for command " + cmd);

  json c = json::object();
  c["command"] = cmd;
  c["seed"] = get_uint(raw, "seed", 1, 0, UINT64_MAX);
  c["jobs"] = get_uint(raw, "jobs", 1, 1, 256);
  c["format"] = get_string(raw, "format", "json", {"json", "table"});
  c["dry_run"] = get_bool(raw, "dry_run", false);
  c["timing"] = get_bool(raw, "timing", false);
  if (raw.contains("output")) c["output"] = get_string(raw, "output", "");

  if (cmd == "table") {
    normalize_rank_and_type(raw, c, 2);
    const u32 p = static_cast<u32>(get_uint(raw, "p", 7, 0, 46337));
    check_prime(p, true);
    c["p"] = p;
    c["checks"] = get_subset(raw, "checks", {"jacobi", "realization", "pmap"}, {"jacobi", "realization", "pmap"});
    for (const auto& k : c["checks"])
      if (k == "pmap" && p == 0) config_error("the pmap check needs a prime p");
  } else if (cmd == "u-calc") {
    const int rank = normalize_rank_and_type(raw, c, 1);
    const u32 p = static_cast<u32>(get_uint(raw, "p", 7, 0, 46337));
    check_prime(p, true);
    c["p"] = p;
    if (!raw.contains("expression")) config_error("u-calc needs 'expression'");
    c["expression"] = get_string(raw, "expression", "");
    if (raw.contains("chi_root")) {
      c["chi_root"] = get_string(raw, "chi_root", "0");
      if (p == 0) config_error("a reduced enveloping algebra needs a prime p");
      resolve_root(system_for(rank), c["chi_root"].get<std::string>());
    }
  } else if (cmd == "verma") {
    const int rank = normalize_rank_and_type(raw, c, 1);
    const u32 p = static_cast<u32>(get_uint(raw, "p", 7, 2, 46337));
    check_prime(p, false);
    c["p"] = p;
    c["chi_root"] = get_string(raw, "chi_root", "0");
    resolve_root(system_for(rank), c["chi_root"].get<std::string>());
    c["lambda"] = normalize_lambda(raw, rank, p);
    c["chop"] = get_bool(raw, "chop", false);
    c["validate"] = get_bool(raw, "validate", true);
    c["max_dim"] = get_uint(raw, "max_dim", 20000, 1, 1u << 20);
    if (raw.contains("save")) c["save"] = get_string(raw, "save", "");
  } else if (cmd == "chop") {
    if (!raw.contains("input")) config_error("chop needs 'input'");
    c["input"] = get_string(raw, "input", "");
  } else if (cmd == "paper") {
    c["case"] = get_string(raw, "case", "short", {"short", "long"});
    c["table"] = get_string(raw, "table", "printed", {"printed", "corrected"});
    const int rank = static_cast<int>(get_uint(raw, "rank", 3, 2, 8));
    c["rank"] = rank;
    const u32 p = static_cast<u32>(get_uint(raw, "p", 7, 2, 46337));
    check_prime(p, false);
    c["p"] = p;
    c["tasks"] = get_subset(raw, "tasks", {"signsearch"},
                            {"signsearch", "bfamily", "independence", "dimensions", "surrogate"});
    c["cap"] = get_uint(raw, "cap", 1, 0, 6);
    c["independence_mode"] = get_string(raw, "independence_mode", "auto", {"auto", "exact", "symbol"});
    c["exact_limit"] = get_uint(raw, "exact_limit", 4096, 1, 1u << 20);
    c["lambda"] = normalize_lambda(raw, rank, p);
    c["max_dim"] = get_uint(raw, "max_dim", 20000, 1, 1u << 20);
  } else if (cmd == "probe") {
    const u32 p = static_cast<u32>(get_uint(raw, "p", 7, 2, 46337));
    check_prime(p, false);
    c["p"] = p;
    c["lambda"] = normalize_lambda(raw, 2, p);
    c["max_dim"] = get_uint(raw, "max_dim", 20000, 1, 1u << 20);
  }
  return c;
}

json plan(const json& c) {
  const std::string cmd = c.at("command").get<std::string>();
  json steps = json::array();
  if (cmd == "table") {
    const RootSystem rs = system_for(c.at("rank").get<int>());
    const std::size_t n = rs.num_roots() + rs.rank();
    steps.push_back({{"step", "build structure table"}, {"dim", n}});
    for (const auto& k : c.at("checks")) {
      json s = {{"step", "check " + k.get<std::string>()}};
      if (k == "jacobi") s["triples"] = n * (n - 1) * (n - 2) / 6;
      steps.push_back(s);
    }
  } else if (cmd == "u-calc") {
    steps.push_back({{"step", "normal form"}, {"expression", c.at("expression")}});
  } else if (cmd == "verma") {
    const int rank = c.at("rank").get<int>();
    const u32 p = c.at("p").get<u32>();
    const auto dim = ipow(p, static_cast<int>(system_for(rank).num_positive()));
    steps.push_back({{"step", c.at("chop").get<bool>() ? "build, check and chop baby Verma modules" : "build and check baby Verma modules"},
                     {"modules", weight_count(c.at("lambda"), rank, p)},
                     {"module_dim", dim},
                     {"within_budget", dim <= c.at("max_dim").get<std::uint64_t>()}});
  } else if (cmd == "chop") {
    const std::string path = c.at("input").get<std::string>();
    steps.push_back({{"step", "chop stored module"}, {"input", path}, {"exists", std::filesystem::exists(path)}});
  } else if (cmd == "paper") {
    const int rank = c.at("rank").get<int>();
    const u32 p = c.at("p").get<u32>();
    for (const auto& k : c.at("tasks")) {
      json s = {{"step", k}};
      if (k == "independence") {
        const RootSystem rs = system_for(rank);
        s["products"] = ipow(c.at("cap").get<std::uint64_t>() + 1, static_cast<int>(rs.num_roots()));
      }
      if (k == "dimensions") {
        s["modules"] = weight_count(c.at("lambda"), rank, p);
        s["module_dim"] = ipow(p, static_cast<int>(system_for(rank).num_positive()));
      }
      steps.push_back(s);
    }
  } else if (cmd == "probe") {
    const u32 p = c.at("p").get<u32>();
    steps.push_back({{"step", "chop baby Verma modules for a short-root and a long-root character"},
                     {"modules", 2 * weight_count(c.at("lambda"), 2, p)},
                     {"module_dim", ipow(p, 4)}});
  }
  return {{"schema_version", kSchemaVersion},
          {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
          {"command", cmd},
          {"config", c},
          {"dry_run", true},
          {"plan", steps}};
}

json run(const json& c) {
  const std::string cmd = c.at("command").get<std::string>();
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  if (cmd == "table") o = run_table(c);
  else if (cmd == "u-calc") o = run_ucalc(c);
  else if (cmd == "verma") o = run_verma(c);
  else if (cmd == "chop") o = run_chop(c);
  else if (cmd == "paper") o = run_paper(c);
  else if (cmd == "probe") o = run_probe(c);
  else fail(ErrorCode::Config, "unknown command '" + cmd + "'");
  json runinfo = {{"certificates", o.certificates}};
  if (c.at("timing").get<bool>()) {
    o.timing["total_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    runinfo["timing"] = o.timing;
  }
  return {{"schema_version", kSchemaVersion},
          {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
          {"command", cmd},
          {"config", c},
          {"seed", c.at("seed")},
          {"payload", o.payload},
          {"run", runinfo}};
}

std::string render(const json& env, const std::string& format) {
  if (format == "json") return env.dump(2) + "\n";
  require(format == "table", ErrorCode::InvalidArgument, "format must be json or table");
  std::ostringstream os;
  os << env.value("command", std::string("?")) << " (" << kToolName << " " << kToolVersion << ")\n";
  if (env.value("dry_run", false)) {
    for (const auto& s : env["plan"]) {
      os << "  " << s["step"].get<std::string>();
      for (const auto& [k, v] : s.items())
        if (k != "step") os << "  " << k << "=" << (v.is_string() ? v.get<std::string>() : v.dump());
      os << "\n";
    }
    return os.str();
  }
  const json& p = env["payload"];
  const std::string cmd = env["command"].get<std::string>();
  if (cmd == "table") {
    os << "type " << p["type"].get<std::string>() << ", rank " << p["rank"] << ", p " << p["p"] << ", dim "
       << p["dim"] << "\n";
    os << "basis: " << join(p["basis"]) << "\n";
    os << "nonzero brackets: " << p["brackets"].size() << "\n";
    for (const auto& [k, v] : p["checks"].items()) os << "check " << pad(k, 12) << (v["ok"].get<bool>() ? "pass" : "FAIL") << "\n";
  } else if (cmd == "u-calc") {
    os << p["algebra"].get<std::string>() << ": " << p["expression"].get<std::string>() << "\n  = "
       << p["normal_form"].get<std::string>() << "\n";
  } else if (cmd == "verma") {
    render_dim_report(os, p);
  } else if (cmd == "chop") {
    os << "module " << p["label"].get<std::string>() << ", dim " << p["dim"] << "\n";
    for (const auto& f : p["factors"])
      os << "  factor dim " << pad(f["dim"].dump(), 8) << "x" << f["multiplicity"] << "  endo degree " << f["endo_degree"]
         << "\n";
    os << "certificates replayed: " << (p["certificates_replayed"].get<bool>() ? "yes" : "NO") << "\n";
  } else if (cmd == "paper") {
    if (p.contains("signsearch")) render_signs(os, p["signsearch"]);
    if (p.contains("bfamily")) {
      const auto& b = p["bfamily"];
      os << "B family: " << b["labels"].size() << " generators, general position "
         << (b["general_position"].get<bool>() ? "yes" : "no") << ", pairwise independent "
         << (b["pairwise_independent"].get<bool>() ? "yes" : "no") << "\n";
      if (!b["note"].get<std::string>().empty()) os << "  " << b["note"].get<std::string>() << "\n";
    }
    if (p.contains("independence")) {
      const auto& r = p["independence"];
      os << "truncated independence (" << r["mode"].get<std::string>() << ", cap " << r["cap"] << "): " << r["products"]
         << " products, ";
      if (r["decided"].get<bool>())
        os << "rank " << r["rank"] << ", deficit " << r["deficit"] << (r["independent"].get<bool>() ? " (independent)" : "")
           << "\n";
      else
        os << "undecided\n";
    }
    if (p.contains("dimensions")) render_dim_report(os, p["dimensions"]);
    if (p.contains("surrogate"))
      for (const auto& s : p["surrogate"]) {
        os << "surrogate action on lambda (" << join(s["lambda"], ",") << "):\n";
        for (const auto& e : s["entries"])
          os << "  " << pad(e["root"].get<std::string>(), 10) << pad(e["nonzero"].get<bool>() ? "nonzero" : "zero", 9)
             << (e["invertible"].is_null() ? "" : e["invertible"].get<bool>() ? "invertible" : "singular") << "\n";
      }
  } else if (cmd == "probe") {
    render_dim_report(os, p["short_root"]);
    render_dim_report(os, p["long_root"]);
    os << "probe verdict: " << p["verdict"].get<std::string>() << "\n";
  }
  return os.str();
}

}  // namespace chevrep::app
