#include <algorithm>
#include <random>
#include <sstream>

#include "chevrep/ff.hpp"

namespace chevrep::ff {

Poly::Poly(u32 p, std::vector<u32> coeffs) : p_(p), c_(std::move(coeffs)) {
  for (auto& x : c_) x %= p_;
  trim();
}

Poly Poly::monomial(u32 p, std::size_t deg, u32 c) {
  std::vector<u32> v(deg + 1, 0);
  v[deg] = c % p;
  return Poly(p, std::move(v));
}

Poly Poly::x_minus(u32 p, u32 a) { return Poly(p, {neg(a % p, p), 1}); }

void Poly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

void Poly::same_field(const Poly& o) const {
  require(p_ == o.p_, ErrorCode::InvalidArgument, "mixed moduli in polynomial arithmetic");
}

Poly Poly::operator+(const Poly& o) const {
  same_field(o);
  std::vector<u32> r(std::max(c_.size(), o.c_.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = add(coeff(i), o.coeff(i), p_);
  return Poly(p_, std::move(r));
}

Poly Poly::operator-(const Poly& o) const {
  same_field(o);
  std::vector<u32> r(std::max(c_.size(), o.c_.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = sub(coeff(i), o.coeff(i), p_);
  return Poly(p_, std::move(r));
}

Poly Poly::operator*(const Poly& o) const {
  same_field(o);
  if (is_zero() || o.is_zero()) return Poly(p_);
  std::vector<u64> acc(c_.size() + o.c_.size() - 1, 0);
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < o.c_.size(); ++j) acc[i + j] += static_cast<u64>(c_[i]) * o.c_[j];
  std::vector<u32> r(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) r[i] = static_cast<u32>(acc[i] % p_);
  return Poly(p_, std::move(r));
}

Poly Poly::scaled(u32 c) const {
  std::vector<u32> r = c_;
  for (auto& x : r) x = mul(x, c % p_, p_);
  return Poly(p_, std::move(r));
}

Poly Poly::monic() const {
  if (is_zero()) return *this;
  return scaled(inv(lead(), p_));
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly(p_);
  std::vector<u32> r(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = mul(c_[i], static_cast<u32>(i % p_), p_);
  return Poly(p_, std::move(r));
}

u32 Poly::eval(u32 x) const {
  u64 r = 0;
  for (std::size_t i = c_.size(); i-- > 0;) r = (r * x + c_[i]) % p_;
  return static_cast<u32>(r);
}

std::string Poly::to_string() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = c_.size(); i-- > 0;) {
    if (c_[i] == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (i == 0 || c_[i] != 1) os << c_[i];
    if (i > 0) os << (c_[i] != 1 ? "*" : "") << "x" << (i > 1 ? "^" + std::to_string(i) : "");
  }
  return os.str();
}

std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
  require(a.modulus() == b.modulus(), ErrorCode::InvalidArgument, "mixed moduli in polynomial division");
  require(!b.is_zero(), ErrorCode::Precondition, "polynomial division by zero");
  const u32 p = a.modulus();
  if (a.degree() < b.degree()) return {Poly(p), a};
  std::vector<u32> r = a.coeffs();
  const auto& bc = b.coeffs();
  const std::size_t db = bc.size() - 1;
  std::vector<u32> q(r.size() - db, 0);
  const u32 il = inv(b.lead(), p);
  for (std::size_t i = r.size(); i-- > db;) {
    const u32 c = mul(r[i], il, p);
    q[i - db] = c;
    if (c == 0) continue;
    const u32 nc = p - c;
    for (std::size_t j = 0; j <= db; ++j) r[i - db + j] = (r[i - db + j] + nc * bc[j]) % p;
  }
  r.resize(db);
  return {Poly(p, std::move(q)), Poly(p, std::move(r))};
}

Poly gcd(const Poly& a, const Poly& b) {
  Poly x = a, y = b;
  while (!y.is_zero()) {
    Poly r = divmod(x, y).second;
    x = std::move(y);
    y = std::move(r);
  }
  return x.monic();
}

Poly powmod(const Poly& base, u64 e, const Poly& mod) {
  const u32 p = base.modulus();
  Poly r = divmod(Poly(p, {1}), mod).second;
  Poly b = divmod(base, mod).second;
  while (e) {
    if (e & 1) r = divmod(r * b, mod).second;
    e >>= 1;
    if (e) b = divmod(b * b, mod).second;
  }
  return r;
}

Matrix eval(const Poly& f, const Matrix& m) {
  require(m.square(), ErrorCode::InvalidArgument, "polynomial evaluated at a non-square matrix");
  require(f.modulus() == m.modulus(), ErrorCode::InvalidArgument, "mixed moduli");
  const std::size_t n = m.rows();
  Matrix r(m.modulus(), n, n);
  for (std::size_t i = f.coeffs().size(); i-- > 0;) {
    r = r * m;
    for (std::size_t k = 0; k < n; ++k) r.at(k, k) = add(r.at(k, k), f.coeffs()[i], m.modulus());
  }
  return r;
}

// Hessenberg reduction followed by the standard three-term recurrence.
Poly charpoly(const Matrix& m) {
  require(m.square(), ErrorCode::InvalidArgument, "characteristic polynomial of a non-square matrix");
  const u32 p = m.modulus();
  const std::size_t n = m.rows();
  Matrix h = m;
  for (std::size_t j = 0; j + 2 < n; ++j) {
    std::size_t piv = n;
    for (std::size_t i = j + 1; i < n; ++i)
      if (h.at(i, j)) {
        piv = i;
        break;
      }
    if (piv == n) continue;
    if (piv != j + 1) {
      for (std::size_t k = 0; k < n; ++k) std::swap(h.at(piv, k), h.at(j + 1, k));
      for (std::size_t k = 0; k < n; ++k) std::swap(h.at(k, piv), h.at(k, j + 1));
    }
    const u32 ip = inv(h.at(j + 1, j), p);
    for (std::size_t k = j + 2; k < n; ++k) {
      const u32 u = mul(h.at(k, j), ip, p);
      if (!u) continue;
      const u32 nu = p - u;
      for (std::size_t c = 0; c < n; ++c) h.at(k, c) = (h.at(k, c) + nu * h.at(j + 1, c)) % p;
      for (std::size_t r = 0; r < n; ++r) h.at(r, j + 1) = (h.at(r, j + 1) + u * h.at(r, k)) % p;
    }
  }
  std::vector<Poly> pm;
  pm.reserve(n + 1);
  pm.emplace_back(p, std::vector<u32>{1});
  for (std::size_t k = 0; k < n; ++k) {
    Poly next = Poly::x_minus(p, h.at(k, k)) * pm[k];
    u32 t = 1;
    for (std::size_t i = 1; i <= k; ++i) {
      t = mul(t, h.at(k - i + 1, k - i), p);
      const u32 c = mul(t, h.at(k - i, k), p);
      if (c) next = next - pm[k - i].scaled(c);
    }
    pm.push_back(std::move(next));
  }
  return pm[n];
}

namespace {

Poly x_poly(u32 p) { return Poly(p, {0, 1}); }

// x^(p^k) mod f for k = 0..kmax, built by repeated Frobenius.
Poly frobenius(const Poly& a, const Poly& f) { return powmod(a, a.modulus(), f); }

std::vector<std::pair<Poly, int>> squarefree(const Poly& f) {
  const u32 p = f.modulus();
  std::vector<std::pair<Poly, int>> out;
  const Poly one(p, {1});
  Poly c = gcd(f, f.derivative());
  Poly w = divmod(f, c).first;
  int i = 1;
  while (w.degree() > 0) {
    Poly y = gcd(w, c);
    Poly fac = divmod(w, y).first;
    if (fac.degree() > 0) out.emplace_back(fac.monic(), i);
    w = y;
    c = divmod(c, y).first;
    ++i;
  }
  if (c.degree() > 0) {
    // c is a p-th power: take the p-th root coefficientwise (Frobenius is
    // the identity on F_p).
    std::vector<u32> root;
    for (std::size_t k = 0; k < c.coeffs().size(); k += p) root.push_back(c.coeffs()[k]);
    for (auto& [g, m] : squarefree(Poly(p, root))) out.emplace_back(g, m * static_cast<int>(p));
  }
  return out;
}

void equal_degree(const Poly& g, int d, std::mt19937_64& rng, std::vector<Poly>& out) {
  const u32 p = g.modulus();
  if (g.degree() == d) {
    out.push_back(g.monic());
    return;
  }
  std::uniform_int_distribution<u32> coef(0, p - 1);
  while (true) {
    std::vector<u32> a(static_cast<std::size_t>(g.degree()));
    for (auto& x : a) x = coef(rng);
    Poly ap(p, a);
    if (ap.degree() < 1) continue;
    // t = a^(1 + p + ... + p^(d-1)) is the norm to F_p; t^((p-1)/2) - 1
    // splits g with probability about 1/2.
    Poly t = ap, fr = ap;
    for (int k = 1; k < d; ++k) {
      fr = frobenius(fr, g);
      t = divmod(t * fr, g).second;
    }
    Poly b = powmod(t, (p - 1) / 2, g) - Poly(p, {1});
    Poly h = gcd(g, b);
    if (h.degree() > 0 && h.degree() < g.degree()) {
      equal_degree(h, d, rng, out);
      equal_degree(divmod(g, h).first, d, rng, out);
      return;
    }
  }
}

bool factor_less(const Factor& a, const Factor& b) {
  if (a.poly.degree() != b.poly.degree()) return a.poly.degree() < b.poly.degree();
  const auto& x = a.poly.coeffs();
  const auto& y = b.poly.coeffs();
  return std::lexicographical_compare(x.rbegin(), x.rend(), y.rbegin(), y.rend());
}

}  // namespace

bool is_irreducible(const Poly& f) {
  if (f.degree() < 1) return false;
  const u32 p = f.modulus();
  const Poly g = f.monic();
  const int d = g.degree();
  const Poly x = x_poly(p);
  // Rabin: x^(p^d) = x mod g and gcd(x^(p^(d/q)) - x, g) = 1 for primes q | d.
  std::vector<Poly> pw{divmod(x, g).second};
  for (int k = 1; k <= d; ++k) pw.push_back(frobenius(pw.back(), g));
  if (!(pw[d] - divmod(x, g).second).is_zero()) return false;
  for (int q = 2; q <= d; ++q) {
    if (d % q != 0 || !is_prime(static_cast<u32>(q))) continue;
    if (gcd(pw[d / q] - x, g).degree() != 0) return false;
  }
  return true;
}

std::vector<Factor> factor_poly(const Poly& f, u64 seed) {
  require(!f.is_zero(), ErrorCode::Precondition, "cannot factor the zero polynomial");
  const u32 p = f.modulus();
  require(p != 2, ErrorCode::InvalidArgument, "factorization requires an odd prime");
  std::mt19937_64 rng(seed);
  std::vector<Factor> out;
  for (auto& [sq, mult] : squarefree(f.monic())) {
    Poly g = sq;
    Poly h = divmod(x_poly(p), g).second;
    for (int d = 1; g.degree() >= 2 * d; ++d) {
      h = frobenius(h, g);
      Poly gd = gcd(g, h - x_poly(p));
      if (gd.degree() > 0) {
        std::vector<Poly> parts;
        equal_degree(gd, d, rng, parts);
        for (auto& q : parts) out.push_back({q, mult});
        g = divmod(g, gd).first;
        h = divmod(h, g).second;
      }
    }
    if (g.degree() > 0) out.push_back({g.monic(), mult});
  }
  std::sort(out.begin(), out.end(), factor_less);
  // Merge equal irreducibles coming from different squarefree layers.
  std::vector<Factor> merged;
  for (auto& fct : out) {
    if (!merged.empty() && merged.back().poly == fct.poly)
      merged.back().multiplicity += fct.multiplicity;
    else
      merged.push_back(fct);
  }
  return merged;
}

}  // namespace chevrep::ff
