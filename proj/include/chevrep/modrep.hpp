#pragma once

// Modules over U_chi(L) given by action matrices, baby Verma modules, and a
// MeatAxe (Norton test plus recursive chop) for composition factors.
//
// Modules are stored graded by torus weight: the basis is split into blocks
// on which every coroot acts by a scalar, and each root vector maps a block
// to a single block. A module built without a torus grading has one block.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "chevrep/chevalley.hpp"
#include "chevrep/ff.hpp"
#include "chevrep/pbw.hpp"

namespace chevrep::modrep {

using ff::Matrix;
using ff::u64;

// ---------------------------------------------------------------- characters

struct Standardized {
  std::vector<u32> chi;  // values on the table basis
  std::vector<int> word;  // simple reflections in application order
  Matrix sigma;           // automorphism of L taking chi' back to chi
};

// chi: values on the table basis. Supported shapes: zero, supported on one
// root vector, or already vanishing on positive root vectors and coroots.
Standardized standardize_character(const StructureTable& t, u32 p, const std::vector<u32>& chi);
// exp(ad x) for nilpotent ad x, in the table basis.
Matrix exp_ad(const StructureTable& t, u32 p, const LieElt& x);
// Lie algebra automorphism n_i = exp(ad e_i) exp(ad -f_i) exp(ad e_i).
Matrix weyl_automorphism(const StructureTable& t, u32 p, int i);
std::vector<std::vector<u32>> compatible_weights(const StructureTable& t, u32 p, const std::vector<u32>& chi);
// Character that is 1 on x_a and 0 elsewhere.
std::vector<u32> root_character(const StructureTable& t, int root_idx);

// ---------------------------------------------------------------- modules

struct Block {
  std::vector<u32> weight;  // coroot eigenvalues; empty for ungraded modules
  std::size_t dim = 0;
  std::size_t offset = 0;
};

struct BlockMap {
  int dst = -1;  // -1: the zero map
  Matrix m;      // dim(dst) x dim(src)
};

class ActionRep {
 public:
  u32 p = 0;
  std::vector<Block> blocks;
  // ops[k][src]: action of operator k on block src.
  std::vector<std::vector<BlockMap>> ops;
  // Table basis index represented by each operator, or -1.
  std::vector<int> op_basis;
  // Operators that generate the acting algebra (used for spinning).
  std::vector<int> generators;
  std::vector<u32> chi;
  std::string label;
  bool weight_graded = false;

  std::size_t dim() const;
  int op_of_basis(int b) const;  // -1 if absent
  // Full vector image of a full vector.
  std::vector<u32> apply(int op, const std::vector<u32>& v) const;
  // Dense matrix of one operator (small modules only).
  Matrix dense(int op) const;
  // Transposed (dual-side) operators on the same blocks.
  ActionRep transposed() const;
};

// Single-block module from dense matrices.
ActionRep from_dense(u32 p, const std::vector<Matrix>& mats, const std::vector<int>& op_basis,
                     std::vector<int> generators = {});
ActionRep direct_sum(const ActionRep& a, const ActionRep& b);

// Baby Verma module Z_chi(lambda) for standardized chi. Budget error when
// p^(#positive roots) exceeds max_dim.
ActionRep baby_verma(const StructureTable& t, u32 p, const std::vector<u32>& chi, const std::vector<u32>& lambda,
                     std::size_t max_dim = 20000);
// The same module with each action column computed by PBW normal forms in
// U_chi(L); independent construction used to cross-check baby_verma.
ActionRep baby_verma_via_pbw(const StructureTable& t, u32 p, const std::vector<u32>& chi,
                             const std::vector<u32>& lambda);

struct RepCheck {
  bool ok = true;
  int first_a = -1, first_b = -1;
  std::string detail;
};
// [M_a, M_b] = M_[a,b] for all operator pairs with table indices.
RepCheck check_brackets(const ActionRep& rep, const StructureTable& t);
// M_x^p - M_{x^[p]} = chi(x)^p Id for every operator with a table index.
RepCheck check_p_character(const ActionRep& rep, const StructureTable& t);

// Matrix of a U element on each block (weight-homogeneous elements only give
// block maps; general elements are applied to full vectors).
std::vector<u32> apply_uelt(const ActionRep& rep, const pbw::UElt& u, const std::vector<u32>& v);
// True if u acts invertibly; u must have weight zero on a graded module.
bool acts_invertibly(const ActionRep& rep, const pbw::UElt& u);
bool acts_nonzero(const ActionRep& rep, const pbw::UElt& u);

// ---------------------------------------------------------------- subspaces

// Subspace as a reduced echelon basis per block.
struct Subspace {
  std::vector<Matrix> blocks;  // rows span the block part
  std::size_t dim() const;
};

struct SpinStep {
  int block;
  std::vector<u32> raw;  // vector in block coordinates
  int parent;            // index of the vector it came from, -1 for seeds
  int op;
};

struct SpinResult {
  Subspace space;
  std::vector<SpinStep> steps;  // standard basis in discovery order
};

// Smallest submodule containing the homogeneous vector v in block b.
SpinResult spin(const ActionRep& rep, int block, const std::vector<u32>& v);
// General start vector (full coordinates); splits into homogeneous parts.
Subspace spin_full(const ActionRep& rep, const std::vector<u32>& v);
Subspace annihilator(const ActionRep& rep, const Subspace& dual);
bool is_invariant(const ActionRep& rep, const Subspace& s);
ActionRep submodule(const ActionRep& rep, const Subspace& s);
ActionRep quotient(const ActionRep& rep, const Subspace& s);

// ---------------------------------------------------------------- MeatAxe

struct ThetaRecipe {
  int block = -1;
  // Each layer: one coefficient per generator, then one per coroot (graded
  // modules only).
  std::vector<std::vector<u32>> layers;
  u32 shift = 0;
};

struct IrreducibleCert {
  ThetaRecipe theta;
  ff::Poly factor;
  std::size_t nullity = 0;
  std::vector<u32> v;  // kernel vector in block coordinates
  std::vector<u32> w;  // kernel vector of the transpose
  bool exhaustive = false;  // every line of the kernel was spun
  std::size_t lines = 0;
  int attempts = 0;
};

struct ReducibleCert {
  Subspace sub;
  bool from_dual = false;
};

struct NortonResult {
  bool irreducible = false;
  IrreducibleCert irr;
  ReducibleCert red;
};

struct NortonOptions {
  int random_budget = 50;
  int sweep_budget = 200;
  std::size_t max_lines = 400;
};

NortonResult norton_test(const ActionRep& rep, std::mt19937_64& rng, const NortonOptions& opt = {});
NortonResult norton_test(const ActionRep& rep, u64 seed, const NortonOptions& opt = {});

// theta on its block, built from the recipe.
Matrix theta_block(const ActionRep& rep, const ThetaRecipe& r);
// Same, by applying the recipe to full vectors one column at a time.
Matrix theta_block_dense(const ActionRep& rep, const ThetaRecipe& r);

bool replay_irreducible(const ActionRep& rep, const IrreducibleCert& c);
bool replay_reducible(const ActionRep& rep, const ReducibleCert& c);

// Degree over F_p of End(V) for an irreducible V with certificate c.
int endomorphism_degree(const ActionRep& rep, const IrreducibleCert& c);

struct FactorRecord {
  std::size_t dim = 0;
  int endo_degree = 1;
  IrreducibleCert cert;
  bool replayed = false;
  std::shared_ptr<const ActionRep> rep;  // kept only on request
};

struct CompositionReport {
  std::size_t total = 0;
  u64 seed = 0;
  std::vector<FactorRecord> factors;  // sorted by (dim, endo_degree)
  std::size_t splits = 0;
  bool certificates_replayed = true;
  // (dim, endo_degree, multiplicity)
  struct Entry {
    std::size_t dim;
    int endo_degree;
    int multiplicity;
  };
  std::vector<Entry> multiset() const;
  // Dimensions over the algebraic closure: each F_p-factor of degree e
  // contributes e factors of dim/e.
  std::vector<std::size_t> closure_dims() const;
};

struct ChopOptions {
  NortonOptions norton;
  bool replay = true;
  bool keep_factor_reps = false;
};

CompositionReport chop(const ActionRep& rep, u64 seed, const ChopOptions& opt = {});

// ---------------------------------------------------------------- storage

// Binary layout (little endian):
//   "CHVR" u32 version=1 u32 p u32 nblocks u32 l
//   per block: l x u32 weight, u32 dim
//   u32 nops; per op: i32 basis, then per source block: i32 dst and, if
//   dst >= 0, dim(dst) x dim(src) u32 entries row-major
//   u32 ngens, ngens x i32; u32 nchi, nchi x u32
void write_binary(const ActionRep& rep, std::ostream& os);
ActionRep read_binary(std::istream& is);
std::string to_json(const ActionRep& rep);
ActionRep from_json(const std::string& text);

}  // namespace chevrep::modrep
