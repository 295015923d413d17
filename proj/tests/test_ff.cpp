#include <random>

#include "chevrep/ff.hpp"
#include "doctest.h"

using namespace chevrep;
using namespace chevrep::ff;

namespace {

Matrix random_matrix(u32 p, std::size_t r, std::size_t c, std::mt19937_64& rng) {
  Matrix m(p, r, c);
  for (auto& x : m.data()) x = static_cast<u32>(rng() % p);
  return m;
}

// Kernel size by brute force over all vectors; rank = n - log_p(#kernel).
std::size_t brute_rank(const Matrix& m) {
  const u32 p = m.modulus();
  const std::size_t n = m.cols();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= p;
  std::size_t kernel = 0;
  std::vector<u32> v(n, 0);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t t = k;
    for (std::size_t i = 0; i < n; ++i, t /= p) v[i] = static_cast<u32>(t % p);
    const auto w = m.apply(v);
    bool zero = true;
    for (auto x : w) zero = zero && x == 0;
    kernel += zero;
  }
  std::size_t nullity = 0;
  while (kernel > 1) kernel /= p, ++nullity;
  return n - nullity;
}

int mobius(int n) {
  int r = 1;
  for (int q = 2; q * q <= n; ++q)
    if (n % q == 0) {
      n /= q;
      if (n % q == 0) return 0;
      r = -r;
    }
  return n > 1 ? -r : r;
}

}  // namespace

TEST_SUITE("ff") {
  TEST_CASE("modulus validation") {
    CHECK(is_prime(7));
    CHECK_FALSE(is_prime(1));
    CHECK_FALSE(is_prime(49));
    CHECK_NOTHROW(check_modulus(46337));
    CHECK_THROWS_AS(check_modulus(4), Error);
    CHECK_THROWS_AS(check_modulus(46349), Error);
  }

  TEST_CASE("scalar arithmetic") {
    for (u32 p : {2u, 3u, 7u, 11u, 46337u})
      for (u32 a = 1; a < std::min<u32>(p, 200); ++a) {
        CHECK(mul(a, inv(a, p), p) == 1);
        CHECK(pow(a, p - 1, p) == 1);
      }
    CHECK(reduce(-1, 7) == 6);
    Fp a(3, 7), b(5, 7);
    CHECK((a * b).value() == 1);
    CHECK((a / b * b) == a);
    CHECK_THROWS_AS(a + Fp(1, 11), Error);
  }

  TEST_CASE("rank against brute-force kernel count") {
    std::mt19937_64 rng(11);
    for (int it = 0; it < 40; ++it) {
      const u32 p = it % 2 ? 3 : 2;
      const std::size_t r = 1 + rng() % 5, c = 1 + rng() % 6;
      Matrix m = random_matrix(p, r, c, rng);
      if (it % 5 == 0 && r > 1) {
        for (std::size_t j = 0; j < c; ++j) m.at(r - 1, j) = add(m.at(0, j), m.at(1 % r, j), p);
      }
      CHECK(rank(m) == brute_rank(m));
    }
  }

  TEST_CASE("nullspace and inverse") {
    std::mt19937_64 rng(3);
    for (int it = 0; it < 30; ++it) {
      const Matrix m = random_matrix(7, 4 + it % 3, 6, rng);
      const auto ns = nullspace(m);
      CHECK(ns.size() + rank(m) == m.cols());
      for (const auto& v : ns)
        for (auto x : m.apply(v)) CHECK(x == 0);
      const Matrix s = random_matrix(7, 5, 5, rng);
      if (rank(s) == 5) CHECK(s * inverse(s) == Matrix::identity(7, 5));
      else CHECK_THROWS_AS(inverse(s), Error);
    }
  }

  TEST_CASE("echelon basis") {
    EchelonBasis b(5, 4);
    CHECK(b.insert({1, 2, 0, 0}));
    CHECK(b.insert({0, 1, 1, 0}));
    CHECK_FALSE(b.insert({2, 0, 1, 0}));
    CHECK(b.contains(std::vector<u32>{1, 3, 1, 0}));
    CHECK_FALSE(b.contains(std::vector<u32>{0, 0, 0, 1}));
    CHECK(b.dim() == 2);
    CHECK(b.to_rref().rows() == 2);
  }

  TEST_CASE("charpoly satisfies Cayley-Hamilton; companion matrices") {
    std::mt19937_64 rng(5);
    for (int it = 0; it < 20; ++it) {
      const Matrix m = random_matrix(11, 5, 5, rng);
      const Poly f = charpoly(m);
      CHECK(f.degree() == 5);
      CHECK(f.is_monic());
      CHECK(eval(f, m).is_zero());
    }
    const Poly g(7, {3, 0, 1, 1});  // x^3 + x^2 + 3
    Matrix comp(7, 3, 3);
    comp.at(1, 0) = 1;
    comp.at(2, 1) = 1;
    for (int i = 0; i < 3; ++i) comp.at(i, 2) = neg(g.coeff(i), 7);
    CHECK(charpoly(comp) == g);
  }

  TEST_CASE("irreducible counts match the necklace formula") {
    for (u32 p : {2u, 3u})
      for (int n = 1; n <= 4; ++n) {
        std::size_t count = 0, total = 1;
        for (int i = 0; i < n; ++i) total *= p;
        for (std::size_t k = 0; k < total; ++k) {
          std::vector<u32> c(n + 1, 1);
          std::size_t t = k;
          for (int i = 0; i < n; ++i, t /= p) c[i] = static_cast<u32>(t % p);
          count += is_irreducible(Poly(p, c));
        }
        long expect = 0;
        for (int d = 1; d <= n; ++d)
          if (n % d == 0) {
            long pw = 1;
            for (int i = 0; i < n / d; ++i) pw *= p;
            expect += mobius(d) * pw;
          }
        CHECK(static_cast<long>(count) == expect / n);
      }
  }

  TEST_CASE("factorization multiplies back and does not depend on the seed") {
    std::mt19937_64 rng(9);
    for (int it = 0; it < 25; ++it) {
      const u32 p = it % 2 ? 7 : 3;
      std::vector<u32> c(2 + rng() % 9);
      for (auto& x : c) x = static_cast<u32>(rng() % p);
      c.back() = 1;
      const Poly f(p, c);
      const auto fs = factor_poly(f, 1);
      Poly prod(p, {1});
      for (const auto& fac : fs) {
        CHECK(is_irreducible(fac.poly));
        for (int k = 0; k < fac.multiplicity; ++k) prod = prod * fac.poly;
      }
      CHECK(prod == f);
      const auto fs2 = factor_poly(f, 12345);
      REQUIRE(fs2.size() == fs.size());
      for (std::size_t i = 0; i < fs.size(); ++i) CHECK(fs[i].poly == fs2[i].poly);
    }
  }

  TEST_CASE("polynomial division") {
    const Poly a(7, {1, 2, 3, 4}), b(7, {1, 1});
    const auto [q, r] = divmod(a, b);
    CHECK(q * b + r == a);
    CHECK(r.degree() < b.degree());
    CHECK(gcd(a * b, b * b) == b.monic());
  }
}
