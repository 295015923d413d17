#pragma once

// Exact arithmetic over prime fields F_p: scalars, dense matrices, echelon
// forms, characteristic polynomials and univariate factorization.
//
// The modulus is a runtime value carried by every structure. Mixing moduli is
// an error (ErrorCode::InvalidArgument).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chevrep/error.hpp"

namespace chevrep::ff {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

// Largest supported modulus; products of two residues plus one fit in u32.
inline constexpr u32 kMaxModulus = 46337;

bool is_prime(u32 n);

// Throws unless p is a prime in [2, kMaxModulus].
void check_modulus(u32 p);

inline u32 reduce(i64 v, u32 p) {
  i64 r = v % static_cast<i64>(p);
  return static_cast<u32>(r < 0 ? r + p : r);
}
inline u32 add(u32 a, u32 b, u32 p) {
  u32 s = a + b;
  return s >= p ? s - p : s;
}
inline u32 sub(u32 a, u32 b, u32 p) { return a >= b ? a - b : a + p - b; }
inline u32 neg(u32 a, u32 p) { return a == 0 ? 0 : p - a; }
inline u32 mul(u32 a, u32 b, u32 p) { return (a * b) % p; }
u32 pow(u32 a, u64 e, u32 p);
u32 inv(u32 a, u32 p);

// An element of F_p that remembers its modulus.
class Fp {
 public:
  Fp(i64 value, u32 p);
  u32 value() const { return v_; }
  u32 modulus() const { return p_; }

  Fp operator+(const Fp& o) const;
  Fp operator-(const Fp& o) const;
  Fp operator*(const Fp& o) const;
  Fp operator/(const Fp& o) const;
  Fp operator-() const { return Fp(neg(v_, p_), p_); }
  Fp pow(u64 e) const { return Fp(ff::pow(v_, e, p_), p_); }
  Fp inverse() const;
  bool operator==(const Fp& o) const { return v_ == o.v_ && p_ == o.p_; }

 private:
  void same_field(const Fp& o) const;
  u32 v_;
  u32 p_;
};

// Dense row-major matrix over F_p.
class Matrix {
 public:
  Matrix() = default;
  Matrix(u32 p, std::size_t rows, std::size_t cols);
  static Matrix identity(u32 p, std::size_t n);
  static Matrix from_rows(u32 p, const std::vector<std::vector<i64>>& rows);

  u32 modulus() const { return p_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  u32& at(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  u32 at(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }
  std::span<u32> row(std::size_t r) { return {a_.data() + r * cols_, cols_}; }
  std::span<const u32> row(std::size_t r) const { return {a_.data() + r * cols_, cols_}; }
  const std::vector<u32>& data() const { return a_; }
  std::vector<u32>& data() { return a_; }

  Matrix operator*(const Matrix& o) const;
  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Matrix scaled(u32 c) const;
  Matrix transposed() const;
  // Adds c * o into this matrix.
  void add_scaled(const Matrix& o, u32 c);
  std::vector<u32> apply(std::span<const u32> v) const;  // M v
  bool is_zero() const;
  bool operator==(const Matrix& o) const = default;

 private:
  u32 p_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<u32> a_;
};

// Multiply-accumulate: out += a * b (all same modulus, shapes checked).
void gemm_acc(const Matrix& a, const Matrix& b, Matrix& out);

struct RrefResult {
  std::size_t rank = 0;
  Matrix reduced;
  std::vector<std::size_t> pivots;
};

RrefResult rref(const Matrix& m);
std::size_t rank(const Matrix& m);
// Basis of the right kernel {v : m v = 0}, one vector per free column.
std::vector<std::vector<u32>> nullspace(const Matrix& m);
// Inverse of a square matrix; throws Precondition when singular.
Matrix inverse(const Matrix& m);

// Incrementally built semi-echelon basis of a subspace of F_p^n.
// Each stored row has a normalised pivot and zeros at the pivots of all
// earlier rows.
class EchelonBasis {
 public:
  EchelonBasis(u32 p, std::size_t n) : p_(p), n_(n) {}
  std::size_t dim() const { return pivots_.size(); }
  std::size_t ambient() const { return n_; }
  u32 modulus() const { return p_; }
  // Reduces v in place against the basis; returns true if a nonzero
  // residual remains.
  bool reduce(std::span<u32> v) const;
  // Reduces and, if independent, inserts; returns true if inserted.
  bool insert(std::vector<u32> v);
  bool contains(std::span<const u32> v) const;
  const std::vector<std::vector<u32>>& rows() const { return rows_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }
  // Full RREF of the span.
  Matrix to_rref() const;

 private:
  u32 p_;
  std::size_t n_;
  std::vector<std::vector<u32>> rows_;
  std::vector<std::size_t> pivots_;
};

// Univariate polynomial, lowest degree first, no trailing zeros.
class Poly {
 public:
  Poly() = default;
  explicit Poly(u32 p) : p_(p) {}
  Poly(u32 p, std::vector<u32> coeffs);
  static Poly monomial(u32 p, std::size_t deg, u32 c = 1);
  static Poly x_minus(u32 p, u32 a);

  u32 modulus() const { return p_; }
  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  u32 lead() const { return c_.empty() ? 0 : c_.back(); }
  u32 coeff(std::size_t i) const { return i < c_.size() ? c_[i] : 0; }
  const std::vector<u32>& coeffs() const { return c_; }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly scaled(u32 c) const;
  Poly monic() const;
  Poly derivative() const;
  u32 eval(u32 x) const;
  bool operator==(const Poly& o) const { return p_ == o.p_ && c_ == o.c_; }
  std::string to_string() const;

 private:
  void trim();
  void same_field(const Poly& o) const;
  u32 p_ = 0;
  std::vector<u32> c_;
};

std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b);
Poly gcd(const Poly& a, const Poly& b);  // monic
Poly powmod(const Poly& base, u64 e, const Poly& mod);
// f(m) for a square matrix m.
Matrix eval(const Poly& f, const Matrix& m);

Poly charpoly(const Matrix& m);
bool is_irreducible(const Poly& f);

struct Factor {
  Poly poly;  // monic irreducible
  int multiplicity = 0;
};
// Complete factorization of a nonzero polynomial into monic irreducibles,
// sorted by (degree, coefficients). The seed only steers the equal-degree
// splitting; the result does not depend on it.
std::vector<Factor> factor_poly(const Poly& f, u64 seed = 0x5eed);

}  // namespace chevrep::ff
