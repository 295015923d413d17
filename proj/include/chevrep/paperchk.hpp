#pragma once

// Checks of the A_beta elements, the basis family B and the dimension
// experiments for a single-root character chi(x_alpha) = 1.
//
// Formula tables are transcribed symbolically: a formula is a prefactor
// (product of root-vector powers) times an optional parenthesis
// c + sum of signed coefficient * monomial terms. Each printed "+-" in front
// of a coefficient is a free sign slot; a "+-" inside a subscript selects
// which member of a formula pair is meant and is expanded into two formulas.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chevrep/chevalley.hpp"
#include "chevrep/modrep.hpp"
#include "chevrep/pbw.hpp"

namespace chevrep::paperchk {

enum class Case { Short, Long };  // alpha = e1-e2 or 2e1
enum class Table { Printed, Corrected };

const char* case_name(Case c);
const char* table_name(Table t);

// One factor of a term: x_root^power, or (h_root + 1)^power when shifted_coroot.
struct Letter {
  Root root;
  int power = 1;
  bool shifted_coroot = false;
};

struct Term {
  i64 coeff = 1;
  int slot = -1;  // index of the free sign, -1 for a fixed sign
  std::vector<Letter> letters;
};

struct Formula {
  std::string label;  // "A[e2+e3]"
  Root target;
  std::vector<Letter> prefix;
  bool has_paren = false;
  std::string constant;  // name of the central constant, empty if none
  std::vector<Term> paren;
  int slots = 0;
  // "ok", "needs_rank" (refers to e_k beyond the rank) or "malformed".
  std::string status = "ok";
  std::string note;
  bool fallback = false;
};

// Formulas for every root, in root order. Roots without a usable formula get
// fallback candidates (x^2, x^3, then x^k times the parenthesis of A_{-beta}).
struct FormulaTable {
  Case kase;
  Table table;
  int rank;
  Root alpha;
  std::vector<Formula> formulas;        // transcribed, including skipped ones
  std::vector<std::vector<Formula>> fallback;  // per root index: candidates
};

FormulaTable formula_table(const RootSystem& rs, Case c, Table table);

// "+-" template rendering, and the rendering under a sign binding / constant.
std::string render_template(const Formula& f);
std::string render(const Formula& f, const std::vector<int>& signs, bool show_constant = true);

// The element of U(L) for a formula under a sign binding; the central
// constant takes the value c.
pbw::UElt build_element(const pbw::Enveloping& u, const Formula& f, const std::vector<int>& signs, i64 c = 0);
// The same element, with every letter written in terms of the engine's
// generators but multiplied by naive word rewriting.
pbw::Terms build_element_naive(const StructureTable& t, u32 p, const Formula& f, const std::vector<int>& signs,
                               i64 c = 0);

struct SignOutcome {
  std::vector<int> signs;
  bool commutes = false;
  bool reverified = false;  // independent path agrees
};

struct FormulaSearch {
  Formula formula;
  std::vector<SignOutcome> outcomes;  // every assignment, in binary order
  std::vector<std::vector<int>> satisfying;
  bool all_reverified = true;
};

struct RootChoice {
  Root root;
  std::string source;  // "formula", "fallback" or "none"
  std::string label;   // formula used
  std::vector<int> signs;
  bool commutes = false;
};

struct SignSearchReport {
  Case kase;
  Table table;
  int rank;
  u32 p;
  std::vector<FormulaSearch> formulas;  // the transcribed table
  std::vector<FormulaSearch> fallbacks;
  std::vector<std::string> skipped;     // labels with status != ok
  std::vector<std::string> failing;     // ok formulas with no satisfying signs
  std::vector<RootChoice> choices;      // one A per root, root order
};

SignSearchReport search_commuting_signs(Case c, int rank, u32 p, Table table);

// ---------------------------------------------------------------- B family

struct BFamily {
  Case kase;
  int rank;
  u32 p;
  std::vector<Root> order;                  // beta_1 .. beta_2m
  std::vector<std::vector<u32>> coeffs;     // b_i in the simple coroots
  std::vector<pbw::UElt> generators;        // B_i + A_{beta_i}
  std::vector<std::string> labels;
  bool general_position = false;            // any rank-many rows independent
  bool pairwise_independent = false;
  bool alpha_nonzero = true;                // alpha(B_i) != 0 for all i
  bool literal_condition_satisfiable = false;
  std::string note;
};

// B order, B coefficients (deterministic greedy choice) and generators built
// from the sign-search choices.
BFamily build_B_family(const pbw::Enveloping& u, Case c, const SignSearchReport& signs);
std::vector<Root> B_order(const RootSystem& rs, Case c);
std::vector<std::vector<u32>> choose_B_coefficients(const RootSystem& rs, u32 p, const Root& alpha, std::size_t count,
                                                    bool* general_position, bool* pairwise);

struct IndependenceResult {
  std::string mode;  // "exact" or "symbol"
  std::size_t generators = 0;
  int cap = 0;
  std::uint64_t products = 0;
  std::uint64_t rank = 0;
  bool decided = false;
  bool independent = false;
  std::uint64_t deficit = 0;
  // symbol mode
  std::size_t jacobian_rank = 0;
  std::vector<u32> point;
  int points_tried = 0;
  std::vector<long> weights;  // filtration weight per table basis element
  int weightings_tried = 0;
  std::size_t columns = 0;  // exact mode: number of PBW monomials
};

struct IndependenceOptions {
  std::string mode = "auto";  // auto | exact | symbol
  std::uint64_t exact_limit = 4096;
  int max_points = 16;
  int max_weightings = 20000;
};

IndependenceResult truncated_B_independence(const pbw::Enveloping& u, const std::vector<pbw::UElt>& gens, int cap,
                                            std::uint64_t seed, const IndependenceOptions& opt = {});

// ---------------------------------------------------------------- modules

struct FactorSummary {
  std::size_t dim;
  int endo_degree;
  int multiplicity;
};

struct CertSummary {
  std::size_t dim = 0;
  int block = 0;
  std::size_t layers = 0;
  std::vector<u32> factor;  // coefficients, lowest first
  std::size_t nullity = 0;
  bool exhaustive = false;
  int attempts = 0;
  bool replayed = false;
};

struct LambdaResult {
  std::vector<u32> lambda;
  std::size_t total = 0;
  std::vector<FactorSummary> factors;
  std::vector<std::size_t> closure_dims;
  bool module_checks_ok = false;
  bool certificates_replayed = false;
  std::size_t splits = 0;
  // Run-dependent data (kept out of the reproducible payload).
  std::uint64_t seed = 0;
  double seconds = 0;
  std::vector<CertSummary> certs;
  // Factors that satisfied the witness predicate, with their own checks.
  std::vector<std::size_t> witness_dims;
  bool witness_checks_ok = true;
};

struct DimReport {
  int rank = 0;
  u32 p = 0;
  std::string chi_root;
  std::string kind;  // "short", "long", "rank-one" or "zero"
  std::vector<int> weyl_word;
  std::vector<std::pair<std::string, u32>> chi_standard;  // nonzero values
  std::uint64_t p_m = 0;
  std::vector<LambdaResult> results;
  bool all_factors_equal_p_m = false;
  bool found_p3_factor = false;
  bool all_sums_ok = false;
  bool all_certificates_replayed = false;
  std::string verdict;
};

struct ExperimentOptions {
  std::uint64_t seed = 1;
  int jobs = 1;
  std::size_t max_dim = 20000;
  bool validate_modules = true;
  bool run_chop = true;
  modrep::ChopOptions chop;
};

// lambdas empty means all compatible weights; alpha empty means chi = 0.
DimReport dimension_experiment(int rank, u32 p, const Root& alpha, const std::vector<std::vector<u32>>& lambdas,
                               const ExperimentOptions& opt);

struct ProbeReport {
  u32 p = 0;
  DimReport short_root;
  DimReport long_root;
  std::size_t chops = 0;
  bool p3_found = false;
  bool witnesses_verified = true;
  std::string verdict;
};

ProbeReport character_probe(u32 p, const std::vector<std::vector<u32>>& lambdas, const ExperimentOptions& opt);

// Per-root A_beta acting on Z_chi'(lambda) through the Weyl twist: nonzero /
// invertible (weight-zero elements only).
struct SurrogateEntry {
  Root root;
  std::string label;
  bool nonzero = false;
  std::optional<bool> invertible;
};
std::vector<SurrogateEntry> surrogate_action(const SignSearchReport& signs, const std::vector<u32>& lambda,
                                             std::size_t max_dim = 20000);

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace chevrep::paperchk
