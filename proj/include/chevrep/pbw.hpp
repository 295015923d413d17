#pragma once

// Enveloping algebra U(L) and its reductions U_chi(L) in PBW normal form.
//
// A monomial is an exponent vector over the table basis in PBW order
// (negative root vectors, coroots, positive root vectors). Coefficients live
// in F_p, or in Z when the engine is built with modulus 0 (generic mode only).

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "chevrep/chevalley.hpp"

namespace chevrep::pbw {

using Monomial = std::vector<std::uint16_t>;
using Terms = std::map<Monomial, i64>;

// A generator with a power, as used in words.
struct Letter {
  int basis;
  int exponent = 1;
};
using Word = std::vector<Letter>;

class Enveloping;

class UElt {
 public:
  UElt() = default;
  const Terms& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  std::size_t size() const { return t_.size(); }
  const Enveloping* owner() const { return env_; }
  i64 coeff(const Monomial& m) const;
  // Largest total degree of a monomial; -1 for zero.
  int degree() const;
  bool operator==(const UElt& o) const { return env_ == o.env_ && t_ == o.t_; }

 private:
  friend class Enveloping;
  const Enveloping* env_ = nullptr;
  Terms t_;
};

class Enveloping {
 public:
  // Generic mode: U(L) with coefficients mod p (p = 0 for integers).
  Enveloping(const StructureTable& t, u32 p);
  // Reduced mode: U_chi(L), chi given by its values on the table basis.
  Enveloping(const StructureTable& t, u32 p, std::vector<u32> chi);

  const StructureTable& table() const { return t_; }
  u32 modulus() const { return p_; }
  bool reduced() const { return chi_.has_value(); }
  const std::vector<u32>& chi() const;
  int dim() const { return t_.dim(); }

  UElt zero() const;
  UElt scalar(i64 c) const;
  UElt generator(int b, i64 c = 1) const;
  UElt from_lie(const LieElt& x) const;
  UElt from_monomial(const Monomial& m, i64 c = 1) const;
  Monomial unit() const { return Monomial(t_.dim(), 0); }

  UElt add(const UElt& a, const UElt& b) const;
  UElt sub(const UElt& a, const UElt& b) const;
  UElt scale(const UElt& a, i64 c) const;
  UElt multiply(const UElt& a, const UElt& b) const;
  UElt commutator(const UElt& a, const UElt& b) const;
  UElt power(const UElt& a, unsigned e) const;
  UElt normal_form(const Word& w) const;
  // Re-expresses an element of another engine over the same table and
  // modulus in this engine (e.g. generic -> reduced).
  UElt import(const UElt& u) const;

  // Homogeneous top-degree component.
  UElt top_symbol(const UElt& u) const;
  bool commutes_with(const UElt& u, const std::vector<LieElt>& gens) const;

  // (h_a + 1)^2 + 4 x_{-a} x_a for the root a.
  UElt sl2_casimir_w(int root_idx) const;

  // Number of cached generator-monomial products.
  std::size_t cache_size() const;

  i64 norm(i64 c) const;
  i64 mul(i64 a, i64 b) const;

  std::string format(const UElt& u) const;
  std::string format_monomial(const Monomial& m) const;
  UElt parse(const std::string& text) const;

 private:
  void same(const UElt& a) const;
  void add_into(Terms& acc, const Terms& src, i64 c) const;
  void add_term(Terms& acc, const Monomial& m, i64 c) const;
  // x_g * m in normal form.
  const Terms& left_mul(int g, const Monomial& m) const;
  Terms left_mul_uncached(int g, const Monomial& m) const;
  Terms left_mul_terms(int g, const Terms& src) const;
  UElt wrap(Terms t) const;

  struct MonoHash {
    std::size_t operator()(const std::pair<int, Monomial>& k) const;
  };

  StructureTable t_;
  u32 p_;
  std::optional<std::vector<u32>> chi_;
  std::vector<i64> chi_pow_;  // chi(b)^p
  mutable std::mutex mu_;
  mutable std::unordered_map<std::pair<int, Monomial>, std::unique_ptr<Terms>, MonoHash> cache_;
};

// Independent normal form by adjacent-swap rewriting of words; no caching and
// no shared code with Enveloping's straightening.
Terms naive_normal_form(const StructureTable& t, u32 p, const std::optional<std::vector<u32>>& chi,
                        const std::vector<std::pair<std::vector<int>, i64>>& words);
// Words (letters in order) of an element.
std::vector<std::pair<std::vector<int>, i64>> to_words(const UElt& u);
// [x, u] by the Leibniz rule on words, normalised by naive_normal_form.
Terms naive_commutator(const StructureTable& t, u32 p, const LieElt& x, const UElt& u);

// Number of reduced PBW monomials, p^n; throws Budget on overflow.
std::uint64_t reduced_monomial_count(u32 p, int n);

}  // namespace chevrep::pbw
