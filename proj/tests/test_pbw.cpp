#include <random>

#include "chevrep/pbw.hpp"
#include "doctest.h"

using namespace chevrep;
using namespace chevrep::pbw;

namespace {

StructureTable table(int l) {
  return StructureTable::build(RootSystem::build(l == 1 ? RootType::A1 : RootType::C, l));
}

std::vector<std::pair<std::vector<int>, i64>> random_words(int n, std::mt19937_64& rng, int count, int len) {
  std::vector<std::pair<std::vector<int>, i64>> ws;
  for (int k = 0; k < count; ++k) {
    std::vector<int> w(1 + rng() % len);
    for (auto& x : w) x = static_cast<int>(rng() % n);
    ws.emplace_back(w, 1 + static_cast<i64>(rng() % 5));
  }
  return ws;
}

UElt from_words(const Enveloping& u, const std::vector<std::pair<std::vector<int>, i64>>& ws) {
  UElt acc = u.zero();
  for (const auto& [w, c] : ws) {
    Word word;
    for (int b : w) word.push_back({b, 1});
    acc = u.add(acc, u.scale(u.normal_form(word), c));
  }
  return acc;
}

}  // namespace

TEST_SUITE("pbw") {
  TEST_CASE("sl2 relations") {
    const auto t = table(1);
    const Enveloping u(t, 0);
    CHECK(u.format(u.parse("e*f - f*e")) == "h");
    CHECK(u.parse("h*e - e*h") == u.scale(u.parse("e"), 2));
    CHECK(u.parse("h*f - f*h") == u.scale(u.parse("f"), -2));
    CHECK(u.parse("e*f") == u.add(u.parse("f*e"), u.parse("h")));
  }

  TEST_CASE("Casimir element is central in U(sl2) over Z") {
    const auto t = table(1);
    const Enveloping u(t, 0);
    const UElt w = u.parse("(h+1)^2 + 4*f*e");
    for (const char* g : {"e", "f", "h"}) CHECK(u.commutator(w, u.parse(g)).is_zero());
    CHECK(w == u.sl2_casimir_w(t.roots().positive()[0]));
    // The two orderings of the same expression differ: w uses f*e.
    CHECK_FALSE(u.commutator(u.parse("(h+1)^2 + 4*e*f"), u.parse("e")).is_zero());
  }

  TEST_CASE("ordered monomials are normal forms") {
    const auto t = table(2);
    const Enveloping u(t, 7);
    std::mt19937_64 rng(1);
    for (int it = 0; it < 50; ++it) {
      Monomial m(t.dim(), 0);
      Word w;
      for (int b = 0; b < t.dim(); ++b) {
        m[b] = static_cast<std::uint16_t>(rng() % 3);
        if (m[b]) w.push_back({b, m[b]});
      }
      const UElt x = u.normal_form(w);
      CHECK(x.size() == 1);
      CHECK(x.coeff(m) == 1);
    }
  }

  TEST_CASE("straightening agrees with naive rewriting") {
    for (int l : {1, 2}) {
      const auto t = table(l);
      std::mt19937_64 rng(7 + l);
      for (u32 p : {0u, 7u}) {
        const Enveloping u(t, p);
        for (int it = 0; it < 20; ++it) {
          const auto ws = random_words(t.dim(), rng, 3, 5);
          CHECK(from_words(u, ws).terms() == naive_normal_form(t, p, std::nullopt, ws));
        }
      }
    }
  }

  TEST_CASE("associativity") {
    const auto t = table(2);
    const Enveloping u(t, 7);
    std::mt19937_64 rng(3);
    for (int it = 0; it < 10; ++it) {
      const UElt a = from_words(u, random_words(t.dim(), rng, 2, 3));
      const UElt b = from_words(u, random_words(t.dim(), rng, 2, 3));
      const UElt c = from_words(u, random_words(t.dim(), rng, 2, 3));
      CHECK(u.multiply(u.multiply(a, b), c) == u.multiply(a, u.multiply(b, c)));
    }
  }

  TEST_CASE("reduction law in U_chi for random characters") {
    const u32 p = 7;
    std::mt19937_64 rng(42);
    for (int l : {1, 2}) {
      const auto t = table(l);
      for (int it = 0; it < 50; ++it) {
        std::vector<u32> chi(t.dim());
        for (auto& x : chi) x = static_cast<u32>(rng() % p);
        const Enveloping u(t, p, chi);
        for (int b = 0; b < t.dim(); ++b) {
          const UElt xp = u.normal_form(Word{{b, static_cast<int>(p)}});
          const i64 cp = ff::pow(chi[b], p, p);
          if (t.is_coroot(b))
            CHECK(xp == u.add(u.generator(b), u.scalar(cp)));
          else
            CHECK(xp == u.scalar(cp));
        }
      }
    }
  }

  TEST_CASE("reduced straightening agrees with naive rewriting") {
    const auto t = table(2);
    std::mt19937_64 rng(5);
    std::vector<u32> chi(t.dim(), 0);
    chi[0] = 1;
    chi[4] = 3;
    const Enveloping u(t, 7, chi);
    for (int it = 0; it < 15; ++it) {
      const auto ws = random_words(t.dim(), rng, 2, 9);
      CHECK(from_words(u, ws).terms() == naive_normal_form(t, 7, chi, ws));
    }
  }

  TEST_CASE("format and parse round trip") {
    const auto t = table(2);
    const Enveloping u(t, 7);
    const UElt x = u.parse("3*x[e1-e2]*x[-2e1]^2 + h[2e1] - 2*e[e1+e2].f[e1+e2] + 5");
    CHECK(u.parse(u.format(x)) == x);
    CHECK_THROWS_AS(u.parse("x[e1]"), Error);
    CHECK_THROWS_AS(u.parse("e[e1-e2"), Error);
    CHECK_THROWS_AS(u.parse("f[-e1+e2]"), Error);
  }

  TEST_CASE("commutator matches the naive Leibniz path") {
    const auto t = table(2);
    const Enveloping u(t, 7);
    std::mt19937_64 rng(8);
    for (int it = 0; it < 10; ++it) {
      const UElt a = from_words(u, random_words(t.dim(), rng, 2, 4));
      const int b = static_cast<int>(rng() % t.dim());
      CHECK(u.commutator(u.generator(b), a).terms() == naive_commutator(t, 7, LieElt::basis(b, 7), a));
    }
  }
}
