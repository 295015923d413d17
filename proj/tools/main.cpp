#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chevrep/chevrep.h"
#include "json.hpp"

using json = nlohmann::json;

namespace {

// Exit codes: operational health only, never the mathematical outcome.
constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;

int exit_code(chevrep_status s) {
  switch (s) {
    case CHEVREP_OK: return kExitOk;
    case CHEVREP_CONFIG: return kExitConfig;
    case CHEVREP_BUDGET: return kExitBudget;
    default: return kExitFailure;
  }
}

int report_error(chevrep_status s) {
  std::cerr << "chevrep: " << chevrep_status_name(s) << ": " << chevrep_last_error() << "\n";
  return exit_code(s);
}

// "all", "0,1;2,3" or a JSON array of weights.
json parse_lambda(const std::string& text) {
  if (text == "all") return "all";
  if (!text.empty() && text[0] == '[') return json::parse(text);
  json out = json::array();
  std::stringstream ws(text);
  std::string w;
  while (std::getline(ws, w, ';')) {
    json v = json::array();
    std::stringstream cs(w);
    std::string x;
    while (std::getline(cs, x, ',')) v.push_back(std::stoll(x));
    out.push_back(v);
  }
  return out;
}

// Root selectors such as "-a" or "-e1-e2" look like options; glue them to
// the flag that takes them.
std::vector<std::string> glue_negative_values(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--chi-root" && i + 1 < args.size() && !args[i + 1].empty() && args[i + 1][0] == '-' &&
        args[i + 1].rfind("--", 0) != 0) {
      out.push_back(args[i] + "=" + args[i + 1]);
      ++i;
    } else {
      out.push_back(args[i]);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chevalley bases, enveloping algebras and modular representations of sp_2l"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(chevrep_version()));

  std::string config_path, output, format;
  std::uint64_t seed = 0;
  int jobs = 0;
  bool dry_run = false, timing = false;
  app.add_option("--config", config_path, "JSON config file; flags override its fields");
  app.add_option("--seed", seed, "base seed");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--output", output, "write the report to this file");
  app.add_option("--format", format, "json or table")->check(CLI::IsMember({"json", "table"}));
  app.add_flag("--dry-run", dry_run, "validate and print the planned work");
  app.add_flag("--timing", timing, "include wall-clock timings");

  json cfg = json::object();
  std::string type, chi_root, lambda, expression, input, kase, table_kind, mode, save;
  std::vector<std::string> checks, tasks;
  int rank = 0, cap = 0;
  std::uint32_t p = 0;
  std::uint64_t max_dim = 0, exact_limit = 0;
  bool chop = false, no_validate = false;
  bool t_sign = false, t_b = false, t_ind = false, t_dim = false, t_sur = false;

  auto add_algebra = [&](CLI::App* s, bool with_type) {
    if (with_type) s->add_option("--type", type, "A1 or C");
    s->add_option("--rank", rank, "rank l");
    s->add_option("--p", p, "prime (0 = integers where allowed)");
  };

  auto* sc_table = app.add_subcommand("table", "structure table and its checks");
  add_algebra(sc_table, true);
  sc_table->add_option("--check", checks, "jacobi, realization, pmap (repeatable)");

  auto* sc_ucalc = app.add_subcommand("u-calc", "normal form of an expression in U(L) or U_chi(L)");
  add_algebra(sc_ucalc, true);
  sc_ucalc->add_option("--chi-root", chi_root, "reduce modulo the character that is 1 on this root vector");
  sc_ucalc->add_option("expression", expression, "expression, e.g. \"e*f - f*e\"");

  auto* sc_verma = app.add_subcommand("verma", "baby Verma modules, optionally chopped");
  add_algebra(sc_verma, true);
  sc_verma->add_option("--chi-root", chi_root, "0, a, -a or a root name");
  sc_verma->add_option("--lambda", lambda, "all, \"0,1;2,3\" or a JSON list");
  sc_verma->add_flag("--chop", chop, "compute composition factors");
  sc_verma->add_option("--max-dim", max_dim, "largest module to build");
  sc_verma->add_flag("--no-validate", no_validate, "skip module identity checks");
  sc_verma->add_option("--save", save, "write each module to <prefix>-<i>.chvr");

  auto* sc_chop = app.add_subcommand("chop", "composition factors of a stored module");
  sc_chop->add_option("input", input, "module file (.chvr binary or JSON)");

  auto* sc_paper = app.add_subcommand("paper", "A_beta sign search, B family and dimension experiments");
  sc_paper->add_option("--case", kase, "short or long")->check(CLI::IsMember({"short", "long"}));
  sc_paper->add_option("--table", table_kind, "printed or corrected")->check(CLI::IsMember({"printed", "corrected"}));
  sc_paper->add_option("--rank", rank, "rank l");
  sc_paper->add_option("--p", p, "prime");
  sc_paper->add_flag("--signsearch", t_sign, "search commuting signs");
  sc_paper->add_flag("--bfamily", t_b, "build the B family");
  sc_paper->add_flag("--independence", t_ind, "truncated independence of the B products");
  sc_paper->add_flag("--dimensions", t_dim, "chop baby Verma modules for the case's character");
  sc_paper->add_flag("--surrogate", t_sur, "action of each A_beta on a baby Verma module");
  sc_paper->add_option("--cap", cap, "exponent cap for the independence check");
  sc_paper->add_option("--independence-mode", mode, "auto, exact or symbol");
  sc_paper->add_option("--exact-limit", exact_limit, "largest product count expanded exactly");
  sc_paper->add_option("--lambda", lambda, "all, \"0,1;2,3\" or a JSON list");
  sc_paper->add_option("--max-dim", max_dim, "largest module to build");

  auto* sc_probe = app.add_subcommand("probe", "short-root and long-root character sweep for sp_4");
  sc_probe->add_option("--p", p, "prime");
  sc_probe->add_option("--lambda", lambda, "all, \"0,1;2,3\" or a JSON list");
  sc_probe->add_option("--max-dim", max_dim, "largest module to build");

  const auto args = glue_negative_values(argc, argv);
  std::vector<const char*> cargs;
  for (const auto& a : args) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) {
        std::cerr << "chevrep: cannot read config " << config_path << "\n";
        return kExitConfig;
      }
      cfg = json::parse(is);
      if (!cfg.is_object()) {
        std::cerr << "chevrep: config must be a JSON object\n";
        return kExitConfig;
      }
      if (cfg.contains("command") && cfg["command"] != command) {
        std::cerr << "chevrep: config is for command " << cfg["command"].dump() << ", not " << command << "\n";
        return kExitConfig;
      }
    }
    cfg["command"] = command;
    auto given = [&](const char* name, CLI::App* s = nullptr) {
      CLI::App* where = s ? s : &app;
      auto* opt = where->get_option_no_throw(name);
      return opt && opt->count() > 0;
    };
    if (given("--seed")) cfg["seed"] = seed;
    if (given("--jobs")) cfg["jobs"] = jobs;
    if (given("--output")) cfg["output"] = output;
    if (given("--format")) cfg["format"] = format;
    if (dry_run) cfg["dry_run"] = true;
    if (timing) cfg["timing"] = true;
    if (given("--type", sub)) cfg["type"] = type;
    if (given("--rank", sub)) cfg["rank"] = rank;
    if (given("--p", sub)) cfg["p"] = p;
    if (given("--check", sub)) cfg["checks"] = checks;
    if (given("--chi-root", sub)) cfg["chi_root"] = chi_root;
    if (given("expression", sub)) cfg["expression"] = expression;
    if (given("--lambda", sub)) cfg["lambda"] = parse_lambda(lambda);
    if (chop) cfg["chop"] = true;
    if (given("--max-dim", sub)) cfg["max_dim"] = max_dim;
    if (no_validate) cfg["validate"] = false;
    if (given("--save", sub)) cfg["save"] = save;
    if (given("input", sub)) cfg["input"] = input;
    if (given("--case", sub)) cfg["case"] = kase;
    if (given("--table", sub)) cfg["table"] = table_kind;
    if (given("--cap", sub)) cfg["cap"] = cap;
    if (given("--independence-mode", sub)) cfg["independence_mode"] = mode;
    if (given("--exact-limit", sub)) cfg["exact_limit"] = exact_limit;
    if (t_sign || t_b || t_ind || t_dim || t_sur) {
      json t = json::array();
      if (t_sign) t.push_back("signsearch");
      if (t_b) t.push_back("bfamily");
      if (t_ind) t.push_back("independence");
      if (t_dim) t.push_back("dimensions");
      if (t_sur) t.push_back("surrogate");
      cfg["tasks"] = t;
    }
  } catch (const std::exception& e) {
    std::cerr << "chevrep: " << e.what() << "\n";
    return kExitConfig;
  }

  chevrep_config* c = nullptr;
  chevrep_status s = chevrep_config_parse(cfg.dump().c_str(), &c);
  if (s != CHEVREP_OK) return report_error(s);

  chevrep_report* rep = nullptr;
  s = chevrep_config_dry_run(c) ? chevrep_plan(c, &rep) : chevrep_run(c, &rep);
  if (s != CHEVREP_OK) {
    chevrep_config_free(c);
    return report_error(s);
  }
  char* normalized = nullptr;
  s = chevrep_config_json(c, &normalized);
  chevrep_config_free(c);
  if (s != CHEVREP_OK) {
    chevrep_report_free(rep);
    return report_error(s);
  }
  const json ncfg = json::parse(normalized);
  chevrep_string_free(normalized);

  char* text = nullptr;
  s = chevrep_report_render(rep, ncfg["format"] == "table" ? CHEVREP_FORMAT_TABLE : CHEVREP_FORMAT_JSON, &text);
  chevrep_report_free(rep);
  if (s != CHEVREP_OK) return report_error(s);

  int rc = kExitOk;
  if (ncfg.contains("output")) {
    std::ofstream os(ncfg["output"].get<std::string>(), std::ios::binary);
    os << text;
    if (!os) {
      std::cerr << "chevrep: cannot write " << ncfg["output"].get<std::string>() << "\n";
      rc = kExitFailure;
    }
  } else {
    std::fwrite(text, 1, std::strlen(text), stdout);
  }
  chevrep_string_free(text);
  return rc;
}
