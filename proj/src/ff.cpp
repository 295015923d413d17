#include "chevrep/ff.hpp"

#include <algorithm>

namespace chevrep::ff {

bool is_prime(u32 n) {
  if (n < 2) return false;
  for (u32 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

void check_modulus(u32 p) {
  require(p <= kMaxModulus && is_prime(p), ErrorCode::InvalidArgument,
          "modulus " + std::to_string(p) + " is not a supported prime");
}

u32 pow(u32 a, u64 e, u32 p) {
  u64 r = 1 % p, b = a % p;
  while (e) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return static_cast<u32>(r);
}

u32 inv(u32 a, u32 p) {
  require(a % p != 0, ErrorCode::Precondition, "division by zero in F_" + std::to_string(p));
  return pow(a, p - 2, p);
}

// ---------------------------------------------------------------- Fp

Fp::Fp(i64 value, u32 p) : v_(0), p_(p) {
  check_modulus(p);
  v_ = reduce(value, p);
}

void Fp::same_field(const Fp& o) const {
  require(p_ == o.p_, ErrorCode::InvalidArgument,
          "mixed moduli " + std::to_string(p_) + " and " + std::to_string(o.p_));
}

Fp Fp::operator+(const Fp& o) const {
  same_field(o);
  return Fp(add(v_, o.v_, p_), p_);
}
Fp Fp::operator-(const Fp& o) const {
  same_field(o);
  return Fp(sub(v_, o.v_, p_), p_);
}
Fp Fp::operator*(const Fp& o) const {
  same_field(o);
  return Fp(mul(v_, o.v_, p_), p_);
}
Fp Fp::operator/(const Fp& o) const {
  same_field(o);
  return Fp(mul(v_, inv(o.v_, p_), p_), p_);
}
Fp Fp::inverse() const { return Fp(inv(v_, p_), p_); }

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(u32 p, std::size_t rows, std::size_t cols)
    : p_(p), rows_(rows), cols_(cols), a_(rows * cols, 0) {
  check_modulus(p);
}

Matrix Matrix::identity(u32 p, std::size_t n) {
  Matrix m(p, n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1 % p;
  return m;
}

Matrix Matrix::from_rows(u32 p, const std::vector<std::vector<i64>>& rows) {
  std::size_t c = rows.empty() ? 0 : rows[0].size();
  Matrix m(p, rows.size(), c);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == c, ErrorCode::InvalidArgument, "ragged matrix rows");
    for (std::size_t j = 0; j < c; ++j) m.at(i, j) = reduce(rows[i][j], p);
  }
  return m;
}

void gemm_acc(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.modulus() == b.modulus() && a.modulus() == out.modulus(), ErrorCode::InvalidArgument,
          "mixed moduli in matrix product");
  require(a.cols() == b.rows() && out.rows() == a.rows() && out.cols() == b.cols(),
          ErrorCode::InvalidArgument, "matrix shape mismatch");
  const u32 p = a.modulus();
  const std::size_t n = b.cols(), k = a.cols();
  if (n == 0 || k == 0) return;
  std::vector<u64> acc(n);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto orow = out.row(i);
    for (std::size_t j = 0; j < n; ++j) acc[j] = orow[j];
    auto arow = a.row(i);
    for (std::size_t t = 0; t < k; ++t) {
      const u64 x = arow[t];
      if (x == 0) continue;
      const u32* brow = b.row(t).data();
      for (std::size_t j = 0; j < n; ++j) acc[j] += x * brow[j];
    }
    for (std::size_t j = 0; j < n; ++j) orow[j] = static_cast<u32>(acc[j] % p);
  }
}

Matrix Matrix::operator*(const Matrix& o) const {
  require(cols_ == o.rows_, ErrorCode::InvalidArgument, "matrix shape mismatch");
  Matrix out(p_, rows_, o.cols_);
  gemm_acc(*this, o, out);
  return out;
}

Matrix Matrix::operator+(const Matrix& o) const {
  Matrix r = *this;
  r.add_scaled(o, 1);
  return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
  Matrix r = *this;
  r.add_scaled(o, p_ - 1);
  return r;
}

void Matrix::add_scaled(const Matrix& o, u32 c) {
  require(p_ == o.p_, ErrorCode::InvalidArgument, "mixed moduli in matrix sum");
  require(rows_ == o.rows_ && cols_ == o.cols_, ErrorCode::InvalidArgument, "matrix shape mismatch");
  c %= p_;
  if (c == 0) return;
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] = (a_[i] + c * o.a_[i]) % p_;
}

Matrix Matrix::scaled(u32 c) const {
  Matrix r = *this;
  c %= p_;
  for (auto& x : r.a_) x = mul(x, c, p_);
  return r;
}

Matrix Matrix::transposed() const {
  Matrix t(p_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
  return t;
}

std::vector<u32> Matrix::apply(std::span<const u32> v) const {
  require(v.size() == cols_, ErrorCode::InvalidArgument, "vector length mismatch");
  std::vector<u32> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    u64 s = 0;
    auto r = row(i);
    for (std::size_t j = 0; j < cols_; ++j) s += static_cast<u64>(r[j]) * v[j];
    out[i] = static_cast<u32>(s % p_);
  }
  return out;
}

bool Matrix::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](u32 x) { return x == 0; });
}

// ---------------------------------------------------------------- echelon

namespace {

// row_dst -= c * row_src over the column range [from, n).
inline void axpy_neg(u32* dst, const u32* src, u32 c, std::size_t from, std::size_t n, u32 p) {
  const u32 nc = p - c;
  for (std::size_t j = from; j < n; ++j)
    if (src[j]) dst[j] = (dst[j] + nc * src[j]) % p;
}

}  // namespace

RrefResult rref(const Matrix& m) {
  RrefResult res;
  res.reduced = m;
  Matrix& a = res.reduced;
  const u32 p = m.modulus();
  const std::size_t rows = a.rows(), cols = a.cols();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = rows;
    for (std::size_t i = r; i < rows; ++i)
      if (a.at(i, c)) {
        piv = i;
        break;
      }
    if (piv == rows) continue;
    if (piv != r)
      for (std::size_t j = 0; j < cols; ++j) std::swap(a.at(piv, j), a.at(r, j));
    const u32 s = inv(a.at(r, c), p);
    for (std::size_t j = c; j < cols; ++j) a.at(r, j) = mul(a.at(r, j), s, p);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r) continue;
      const u32 f = a.at(i, c);
      if (f) axpy_neg(a.row(i).data(), a.row(r).data(), f, c, cols, p);
    }
    res.pivots.push_back(c);
    ++r;
  }
  res.rank = r;
  return res;
}

std::size_t rank(const Matrix& m) { return rref(m).rank; }

std::vector<std::vector<u32>> nullspace(const Matrix& m) {
  const auto rr = rref(m);
  const u32 p = m.modulus();
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : rr.pivots) is_pivot[c] = true;
  std::vector<std::vector<u32>> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    std::vector<u32> v(m.cols(), 0);
    v[f] = 1;
    for (std::size_t i = 0; i < rr.rank; ++i) v[rr.pivots[i]] = neg(rr.reduced.at(i, f), p);
    basis.push_back(std::move(v));
  }
  return basis;
}

Matrix inverse(const Matrix& m) {
  require(m.square(), ErrorCode::InvalidArgument, "inverse of a non-square matrix");
  const std::size_t n = m.rows();
  Matrix aug(m.modulus(), n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, n + i) = 1;
  }
  auto rr = rref(aug);
  require(rr.rank >= n && rr.pivots[n - 1] == n - 1, ErrorCode::Precondition, "singular matrix");
  Matrix out(m.modulus(), n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.at(i, j) = rr.reduced.at(i, n + j);
  return out;
}

bool EchelonBasis::reduce(std::span<u32> v) const {
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    const u32 c = v[pivots_[k]];
    if (c) axpy_neg(v.data(), rows_[k].data(), c, 0, n_, p_);
  }
  return std::any_of(v.begin(), v.end(), [](u32 x) { return x != 0; });
}

bool EchelonBasis::insert(std::vector<u32> v) {
  require(v.size() == n_, ErrorCode::InvalidArgument, "vector length mismatch");
  if (!reduce(v)) return false;
  std::size_t piv = 0;
  while (v[piv] == 0) ++piv;
  const u32 s = inv(v[piv], p_);
  for (auto& x : v) x = mul(x, s, p_);
  rows_.push_back(std::move(v));
  pivots_.push_back(piv);
  return true;
}

bool EchelonBasis::contains(std::span<const u32> v) const {
  std::vector<u32> w(v.begin(), v.end());
  return !reduce(w);
}

Matrix EchelonBasis::to_rref() const {
  Matrix m(p_, rows_.size(), n_);
  for (std::size_t i = 0; i < rows_.size(); ++i)
    std::copy(rows_[i].begin(), rows_[i].end(), m.row(i).begin());
  return rref(m).reduced;
}

}  // namespace chevrep::ff
