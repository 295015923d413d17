#pragma once

// Root systems of type C_l (l >= 2) and A_1 in epsilon coordinates.
//
// A_1 is realised as C_1 = sp_2, so its roots are +-2e_1. Roots are ordered
// by (height, coordinates lexicographically descending); this order is part of
// the public contract because the PBW ordering depends on it.

#include <map>
#include <string>
#include <vector>

namespace chevrep {

enum class RootType { A1, C };

using Root = std::vector<int>;

int inner(const Root& a, const Root& b);
// <beta, alpha^vee> = 2 (beta, alpha) / (alpha, alpha).
int cartan_integer(const Root& beta, const Root& alpha);
// beta - <beta, alpha^vee> alpha.
Root reflect(const Root& beta, const Root& alpha);
Root negate(const Root& r);
Root add(const Root& a, const Root& b);
// Human-readable name such as "e1-e2", "2e3", "-e1-e2".
std::string root_name(const Root& r);

class RootSystem {
 public:
  static RootSystem build(RootType type, int rank);

  RootType type() const { return type_; }
  int rank() const { return rank_; }
  const std::vector<Root>& roots() const { return roots_; }
  std::size_t num_roots() const { return roots_.size(); }
  std::size_t num_positive() const { return roots_.size() / 2; }
  // Indices into roots(); simple()[i] is the i-th simple root
  // e1-e2, ..., e_{l-1}-e_l, 2e_l.
  const std::vector<int>& positive() const { return positive_; }
  const std::vector<int>& negative() const { return negative_; }
  const std::vector<int>& simple() const { return simple_; }
  const Root& simple_root(int i) const { return roots_[simple_[i]]; }
  const std::vector<std::vector<int>>& cartan_matrix() const { return cartan_; }

  // -1 when r is not a root.
  int index_of(const Root& r) const;
  bool is_root(const Root& r) const { return index_of(r) >= 0; }
  bool is_positive(int idx) const { return height_[idx] > 0; }
  int height(int idx) const { return height_[idx]; }
  int negative_of(int idx) const { return neg_[idx]; }
  // Coefficients of r in the simple roots.
  std::vector<int> simple_coords(const Root& r) const;
  // Coefficients of the coroot r^vee in the simple coroots.
  std::vector<int> coroot_coords(const Root& r) const;
  bool is_long(int idx) const;

 private:
  RootType type_ = RootType::C;
  int rank_ = 0;
  std::vector<Root> roots_;
  std::vector<int> height_;
  std::vector<int> neg_;
  std::vector<int> positive_, negative_, simple_;
  std::vector<std::vector<int>> cartan_;
  std::map<Root, int> index_;
};

// Simple-reflection indices (0-based) w = s_{i_k} ... s_{i_1}, listed in
// application order, mapping alpha to a negative root. Greedy descent along
// simple roots with positive pairing, smallest index first.
std::vector<int> weyl_word_to_negative(const RootSystem& rs, const Root& alpha);
Root apply_word(const RootSystem& rs, const std::vector<int>& word, Root r);

}  // namespace chevrep
