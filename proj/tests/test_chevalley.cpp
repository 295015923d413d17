#include "chevrep/chevalley.hpp"
#include "doctest.h"

using namespace chevrep;

namespace {

StructureTable table(int l) {
  return StructureTable::build(RootSystem::build(l == 1 ? RootType::A1 : RootType::C, l));
}

}  // namespace

TEST_SUITE("chevalley") {
  TEST_CASE("basis layout") {
    const auto t = table(2);
    CHECK(t.dim() == 10);
    CHECK(t.num_positive() == 4);
    for (int b = 0; b < 4; ++b) CHECK(t.is_negative(b));
    CHECK(t.is_coroot(4));
    CHECK(t.is_coroot(5));
    for (int b = 6; b < 10; ++b) CHECK(t.is_positive(b));
    CHECK(t.basis_name(4) == "h1");
    CHECK(t.basis_name(6) == "x[e1-e2]");
  }

  TEST_CASE("Jacobi identity over Z, F_7 and F_11") {
    for (int l : {1, 2, 3})
      for (u32 p : {0u, 7u, 11u}) {
        const auto r = jacobi_check(table(l), p);
        CHECK(r.ok);
        const int n = table(l).dim();
        CHECK(r.triples_checked == static_cast<std::size_t>(n * (n - 1) * (n - 2) / 6));
      }
  }

  TEST_CASE("brackets agree with the symplectic matrices") {
    for (int l : {1, 2, 3}) {
      const auto t = table(l);
      const auto m = matrix_realization(t);
      CHECK(m.size == 2 * l);
      for (int b = 0; b < t.dim(); ++b) CHECK(is_symplectic(m, b));
      const auto rc = compare_with_realization(t, m);
      CHECK(rc.ok);
      CHECK(rc.pairs_checked == static_cast<std::size_t>(t.dim() * t.dim()));
    }
  }

  TEST_CASE("corrupted table is detected") {
    auto t = table(2);
    const int e = t.basis_of_root(t.roots().index_of(Root{1, -1}));
    const int f = t.basis_of_root(t.roots().index_of(Root{-1, 1}));
    LieElt wrong = t.bracket_basis(e, f).scaled(2);
    t.set_bracket(e, f, wrong);
    const bool jac = jacobi_check(t, 0).ok;
    const bool real = compare_with_realization(t, matrix_realization(table(2))).ok;
    CHECK_FALSE((jac && real));
    CHECK_FALSE(real);
  }

  TEST_CASE("structure constants are small and antisymmetric") {
    const auto t = table(3);
    const auto& rs = t.roots();
    for (std::size_t a = 0; a < rs.num_roots(); ++a)
      for (std::size_t b = 0; b < rs.num_roots(); ++b) {
        const i64 n = t.structure_constant(static_cast<int>(a), static_cast<int>(b));
        CHECK(std::abs(n) <= 2);
        CHECK(n == -t.structure_constant(static_cast<int>(b), static_cast<int>(a)));
        if (rs.index_of(add(rs.roots()[a], rs.roots()[b])) >= 0) CHECK(n != 0);
      }
  }

  TEST_CASE("h_i acts on x_beta by the Cartan integer") {
    const auto t = table(3);
    const auto& rs = t.roots();
    for (std::size_t r = 0; r < rs.num_roots(); ++r)
      for (int i = 0; i < 3; ++i) {
        const LieElt br = t.bracket_basis(t.basis_of_coroot(i), t.basis_of_root(static_cast<int>(r)));
        CHECK(br.coeff(t.basis_of_root(static_cast<int>(r))) == cartan_integer(rs.roots()[r], rs.simple_root(i)));
        CHECK(br.coeff(t.basis_of_root(static_cast<int>(r))) == t.weight_of(static_cast<int>(r), i));
      }
  }

  TEST_CASE("restricted structure") {
    for (int l : {1, 2, 3})
      for (u32 p : {7u, 11u}) CHECK(check_p_map_adjoint(table(l), p));
    const auto t = table(2);
    CHECK(t.p_map(0, 7).is_zero());
    CHECK(t.p_map(4, 7) == LieElt::basis(4, 7));
  }
}
