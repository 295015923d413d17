#pragma once

// Chevalley basis of sp_{2l} (and sl_2) with integer structure constants,
// the restricted p-map and a symplectic matrix realization used as an
// independent check of the table.
//
// Basis layout (also the PBW order): negative root vectors in root order,
// then the simple coroots h_1..h_l, then positive root vectors in root order.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chevrep/ff.hpp"
#include "chevrep/rootsys.hpp"

namespace chevrep {

using i64 = std::int64_t;
using u32 = std::uint32_t;

struct BasisIndex {
  enum class Kind { RootVector, Coroot };
  Kind kind;
  int index;  // root index in RootSystem::roots() or simple coroot number
  bool operator==(const BasisIndex&) const = default;
};

// Sparse element of L. Modulus 0 means integer (characteristic zero) mode.
class LieElt {
 public:
  explicit LieElt(u32 modulus = 0) : p_(modulus) {}
  static LieElt basis(int b, u32 modulus = 0, i64 coeff = 1);

  u32 modulus() const { return p_; }
  const std::map<int, i64>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  i64 coeff(int b) const;
  void add_term(int b, i64 c);
  LieElt operator+(const LieElt& o) const;
  LieElt operator-(const LieElt& o) const;
  LieElt scaled(i64 c) const;
  // Reduces an integer element mod p; identity on elements already mod p.
  LieElt reduced(u32 p) const;
  bool operator==(const LieElt& o) const = default;

 private:
  void same_mode(const LieElt& o) const;
  u32 p_;
  std::map<int, i64> t_;
};

class StructureTable {
 public:
  static StructureTable build(const RootSystem& rs);

  const RootSystem& roots() const { return rs_; }
  int dim() const { return n_; }
  int rank() const { return rs_.rank(); }
  int num_positive() const { return static_cast<int>(rs_.num_positive()); }

  BasisIndex index(int b) const;
  int basis_of(const BasisIndex& bi) const;
  int basis_of_root(int root_idx) const { return root_to_basis_[root_idx]; }
  int basis_of_coroot(int i) const { return num_positive() + i; }
  bool is_root_vector(int b) const { return b < num_positive() || b >= num_positive() + rank(); }
  bool is_coroot(int b) const { return !is_root_vector(b); }
  bool is_negative(int b) const { return b < num_positive(); }
  bool is_positive(int b) const { return b >= num_positive() + rank(); }
  int root_of(int b) const { return basis_to_root_[b]; }
  int coroot_of(int b) const { return b - num_positive(); }
  // Negative root vector basis indices in PBW order.
  std::vector<int> negative_basis() const;
  std::vector<int> positive_basis() const;

  // N_{a,b} for root indices with a + b a root; 0 otherwise.
  i64 structure_constant(int a, int b) const;
  // h_beta expressed in the simple coroots.
  LieElt coroot_element(int root_idx, u32 modulus = 0) const;
  // Eigenvalue of h_i on x_beta: <beta, alpha_i^vee>.
  int weight_of(int root_idx, int i) const;

  // Integer bracket of two basis elements.
  const LieElt& bracket_basis(int i, int j) const { return br_[i * n_ + j]; }
  LieElt bracket(const LieElt& a, const LieElt& b) const;
  // Overwrites [b_i, b_j] (and [b_j, b_i] with the opposite sign). Used to
  // build deliberately corrupted tables in tests.
  void set_bracket(int i, int j, const LieElt& v);

  // Restricted structure: x_beta^[p] = 0, h_i^[p] = h_i.
  LieElt p_map(int b, u32 p) const;
  // Extension to the Cartan subalgebra: sum c_i h_i -> sum c_i^p h_i.
  LieElt p_map(const LieElt& h, u32 p) const;

  std::string basis_name(int b) const;

 private:
  RootSystem rs_;
  int n_ = 0;
  std::vector<int> basis_to_root_;
  std::vector<int> root_to_basis_;
  std::map<std::pair<int, int>, i64> n_const_;
  std::vector<LieElt> br_;
};

struct JacobiReport {
  bool ok = true;
  std::size_t triples_checked = 0;
  std::array<int, 3> violating{-1, -1, -1};
  LieElt residual;
};
// Exhaustive check over all basis triples i < j < k. p = 0 checks over Z.
JacobiReport jacobi_check(const StructureTable& t, u32 p = 0);

// ad(x) on L in the table basis: column j holds [x, b_j].
ff::Matrix adjoint_matrix(const StructureTable& t, const LieElt& x, u32 p);
// Checks ad(x^[p]) = ad(x)^p for every basis element.
bool check_p_map_adjoint(const StructureTable& t, u32 p);

struct MatrixRealization {
  int size = 0;                            // 2l
  std::vector<std::vector<i64>> images;    // row-major size x size, per basis index
  std::vector<int> signs;                  // image = sign * standard root matrix
  std::vector<i64> form;                   // the symplectic form J
  std::vector<ff::Matrix> reduced(u32 p) const;
};
MatrixRealization matrix_realization(const StructureTable& t);
bool is_symplectic(const MatrixRealization& m, int b);

struct RealizationCheck {
  bool ok = true;
  int first_i = -1, first_j = -1;
  std::size_t pairs_checked = 0;
};
// Compares every table bracket with the matrix commutator of the images.
RealizationCheck compare_with_realization(const StructureTable& t, const MatrixRealization& m);

}  // namespace chevrep
