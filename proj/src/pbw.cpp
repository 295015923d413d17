#include "chevrep/pbw.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "chevrep/error.hpp"

namespace chevrep::pbw {

i64 UElt::coeff(const Monomial& m) const {
  auto it = t_.find(m);
  return it == t_.end() ? 0 : it->second;
}

int UElt::degree() const {
  int d = -1;
  for (const auto& [m, c] : t_) {
    int s = 0;
    for (auto e : m) s += e;
    d = std::max(d, s);
  }
  return d;
}

std::size_t Enveloping::MonoHash::operator()(const std::pair<int, Monomial>& k) const {
  std::size_t h = std::hash<int>()(k.first);
  for (auto e : k.second) h = h * 1000003u ^ e;
  return h;
}

Enveloping::Enveloping(const StructureTable& t, u32 p) : t_(t), p_(p) {
  if (p) ff::check_modulus(p);
}

Enveloping::Enveloping(const StructureTable& t, u32 p, std::vector<u32> chi) : t_(t), p_(p) {
  require(p != 0, ErrorCode::InvalidArgument, "reduced enveloping algebra needs a prime modulus");
  ff::check_modulus(p);
  require(static_cast<int>(chi.size()) == t.dim(), ErrorCode::InvalidArgument, "character has wrong length");
  for (auto& v : chi) v %= p;
  chi_pow_.resize(chi.size());
  for (std::size_t i = 0; i < chi.size(); ++i) chi_pow_[i] = ff::pow(chi[i], p, p);
  chi_ = std::move(chi);
}

const std::vector<u32>& Enveloping::chi() const {
  require(chi_.has_value(), ErrorCode::Precondition, "generic enveloping algebra has no character");
  return *chi_;
}

i64 Enveloping::norm(i64 c) const { return p_ ? static_cast<i64>(ff::reduce(c, p_)) : c; }

i64 Enveloping::mul(i64 a, i64 b) const {
  if (!p_) return a * b;
  return static_cast<i64>(ff::mul(ff::reduce(a, p_), ff::reduce(b, p_), p_));
}

void Enveloping::same(const UElt& a) const {
  require(a.env_ == this, ErrorCode::InvalidArgument, "element belongs to a different enveloping algebra");
}

UElt Enveloping::wrap(Terms t) const {
  UElt u;
  u.env_ = this;
  u.t_ = std::move(t);
  return u;
}

void Enveloping::add_term(Terms& acc, const Monomial& m, i64 c) const {
  c = norm(c);
  if (c == 0) return;
  auto [it, fresh] = acc.emplace(m, c);
  if (!fresh) {
    it->second = norm(it->second + c);
    if (it->second == 0) acc.erase(it);
  }
}

void Enveloping::add_into(Terms& acc, const Terms& src, i64 c) const {
  for (const auto& [m, v] : src) add_term(acc, m, mul(v, c));
}

UElt Enveloping::zero() const { return wrap({}); }

UElt Enveloping::scalar(i64 c) const {
  Terms t;
  add_term(t, unit(), c);
  return wrap(std::move(t));
}

UElt Enveloping::generator(int b, i64 c) const {
  require(b >= 0 && b < dim(), ErrorCode::InvalidArgument, "generator index out of range");
  Monomial m = unit();
  m[b] = 1;
  return from_monomial(m, c);
}

UElt Enveloping::from_monomial(const Monomial& m, i64 c) const {
  require(static_cast<int>(m.size()) == dim(), ErrorCode::InvalidArgument, "monomial has wrong length");
  if (chi_)
    for (auto e : m) require(e < p_, ErrorCode::InvalidArgument, "exponent not reduced");
  Terms t;
  add_term(t, m, c);
  return wrap(std::move(t));
}

UElt Enveloping::from_lie(const LieElt& x) const {
  Terms t;
  for (auto [b, c] : x.terms()) {
    Monomial m = unit();
    m[b] = 1;
    add_term(t, m, c);
  }
  return wrap(std::move(t));
}

UElt Enveloping::add(const UElt& a, const UElt& b) const {
  same(a);
  same(b);
  Terms t = a.t_;
  add_into(t, b.t_, 1);
  return wrap(std::move(t));
}

UElt Enveloping::sub(const UElt& a, const UElt& b) const {
  same(a);
  same(b);
  Terms t = a.t_;
  add_into(t, b.t_, -1);
  return wrap(std::move(t));
}

UElt Enveloping::scale(const UElt& a, i64 c) const {
  same(a);
  Terms t;
  add_into(t, a.t_, c);
  return wrap(std::move(t));
}

Terms Enveloping::left_mul_uncached(int g, const Monomial& m) const {
  int j = 0;
  while (j < dim() && m[j] == 0) ++j;
  Terms out;
  if (j == dim() || g <= j) {
    Monomial r = m;
    ++r[g];
    if (chi_ && r[g] == p_) {
      r[g] = 0;
      add_term(out, r, chi_pow_[g]);
      if (t_.is_coroot(g)) {
        r[g] = 1;
        add_term(out, r, 1);
      }
    } else {
      add_term(out, r, 1);
    }
    return out;
  }
  Monomial rest = m;
  --rest[j];
  out = left_mul_terms(j, left_mul(g, rest));
  for (auto [k, c] : t_.bracket_basis(g, j).terms()) add_into(out, left_mul(k, rest), c);
  return out;
}

Terms Enveloping::left_mul_terms(int g, const Terms& src) const {
  Terms out;
  for (const auto& [m, c] : src) add_into(out, left_mul(g, m), c);
  return out;
}

const Terms& Enveloping::left_mul(int g, const Monomial& m) const {
  std::pair<int, Monomial> key{g, m};
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;
  }
  auto value = std::make_unique<Terms>(left_mul_uncached(g, m));
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, fresh] = cache_.emplace(std::move(key), std::move(value));
  return *it->second;
}

std::size_t Enveloping::cache_size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.size();
}

UElt Enveloping::multiply(const UElt& a, const UElt& b) const {
  same(a);
  same(b);
  Terms out;
  for (const auto& [ma, ca] : a.t_) {
    Terms cur = b.t_;
    for (int g = dim() - 1; g >= 0; --g)
      for (int k = 0; k < ma[g]; ++k) cur = left_mul_terms(g, cur);
    add_into(out, cur, ca);
  }
  return wrap(std::move(out));
}

UElt Enveloping::commutator(const UElt& a, const UElt& b) const { return sub(multiply(a, b), multiply(b, a)); }

UElt Enveloping::power(const UElt& a, unsigned e) const {
  UElt r = scalar(1);
  for (unsigned i = 0; i < e; ++i) r = multiply(r, a);
  return r;
}

UElt Enveloping::normal_form(const Word& w) const {
  Terms cur;
  add_term(cur, unit(), 1);
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    require(it->basis >= 0 && it->basis < dim(), ErrorCode::InvalidArgument, "letter out of range");
    require(it->exponent >= 0, ErrorCode::InvalidArgument, "negative exponent");
    for (int k = 0; k < it->exponent; ++k) cur = left_mul_terms(it->basis, cur);
  }
  return wrap(std::move(cur));
}

UElt Enveloping::import(const UElt& u) const {
  require(u.env_ && u.env_->dim() == dim(), ErrorCode::InvalidArgument, "import from an incompatible algebra");
  Terms out;
  for (const auto& [m, c] : u.t_) {
    Word w;
    for (int b = 0; b < dim(); ++b)
      if (m[b]) w.push_back({b, m[b]});
    add_into(out, normal_form(w).t_, c);
  }
  return wrap(std::move(out));
}

UElt Enveloping::top_symbol(const UElt& u) const {
  same(u);
  const int d = u.degree();
  Terms t;
  for (const auto& [m, c] : u.t_) {
    int s = 0;
    for (auto e : m) s += e;
    if (s == d) t.emplace(m, c);
  }
  return wrap(std::move(t));
}

bool Enveloping::commutes_with(const UElt& u, const std::vector<LieElt>& gens) const {
  for (const auto& g : gens) {
    const LieElt x = p_ ? g.reduced(p_) : g;
    if (!commutator(u, from_lie(x)).is_zero()) return false;
  }
  return true;
}

UElt Enveloping::sl2_casimir_w(int root_idx) const {
  const LieElt h = t_.coroot_element(root_idx);
  const UElt h1 = add(from_lie(p_ ? h.reduced(p_) : h), scalar(1));
  const int xa = t_.basis_of_root(root_idx);
  const int xm = t_.basis_of_root(t_.roots().negative_of(root_idx));
  return add(multiply(h1, h1), scale(multiply(generator(xm), generator(xa)), 4));
}

// ---------------------------------------------------------------- text

std::string Enveloping::format_monomial(const Monomial& m) const {
  std::string s;
  const bool rank_one = t_.roots().type() == RootType::A1;
  for (int b = 0; b < dim(); ++b) {
    if (!m[b]) continue;
    if (!s.empty()) s += ".";
    if (t_.is_coroot(b)) {
      s += rank_one ? "h" : "h" + std::to_string(t_.coroot_of(b) + 1);
    } else {
      const int r = t_.root_of(b);
      const bool pos = t_.roots().is_positive(r);
      if (rank_one) {
        s += pos ? "e" : "f";
      } else {
        const Root& rt = t_.roots().roots()[pos ? r : t_.roots().negative_of(r)];
        s += (pos ? "e[" : "f[") + root_name(rt) + "]";
      }
    }
    if (m[b] > 1) s += "^" + std::to_string(m[b]);
  }
  return s;
}

std::string Enveloping::format(const UElt& u) const {
  same(u);
  if (u.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : u.t_) {
    i64 v = c;
    bool neg = false;
    if (!p_ && v < 0) {
      neg = true;
      v = -v;
    }
    if (first)
      out += neg ? "-" : "";
    else
      out += neg ? " - " : " + ";
    first = false;
    const std::string mono = format_monomial(m);
    if (mono.empty())
      out += std::to_string(v);
    else if (v == 1)
      out += mono;
    else
      out += std::to_string(v) + "*" + mono;
  }
  return out;
}

namespace {

class Parser {
 public:
  Parser(const Enveloping& env, const std::string& s) : env_(env), s_(s) {}

  UElt run() {
    UElt u = expr();
    skip();
    if (i_ != s_.size()) error("unexpected character");
    return u;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::InvalidArgument, "parse error at offset " + std::to_string(i_) + ": " + what);
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(const std::string& tok) {
    skip();
    if (s_.compare(i_, tok.size(), tok) == 0) {
      i_ += tok.size();
      return true;
    }
    return false;
  }
  bool peek_digit() {
    skip();
    return i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]));
  }
  i64 number() {
    skip();
    if (!peek_digit()) error("expected a number");
    i64 v = 0;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
      v = v * 10 + (s_[i_] - '0');
      if (v > (i64(1) << 40)) error("number too large");
      ++i_;
    }
    return v;
  }

  UElt expr() {
    bool neg = eat("-");
    if (!neg) eat("+");
    UElt acc = term();
    if (neg) acc = env_.scale(acc, -1);
    while (true) {
      if (eat("+"))
        acc = env_.add(acc, term());
      else if (eat("-"))
        acc = env_.sub(acc, term());
      else
        return acc;
    }
  }

  UElt term() {
    UElt acc = atom();
    while (eat("*") || eat(".")) acc = env_.multiply(acc, atom());
    return acc;
  }

  UElt atom() {
    UElt base;
    if (eat("(")) {
      base = expr();
      if (!eat(")")) error("expected ')'");
    } else if (peek_digit()) {
      base = env_.scalar(number());
    } else {
      base = generator();
    }
    if (eat("^")) base = env_.power(base, static_cast<unsigned>(number()));
    return base;
  }

  Root root() {
    const int l = env_.table().rank();
    Root r(l, 0);
    bool any = false;
    while (true) {
      int sign = 1;
      if (eat("-"))
        sign = -1;
      else if (!eat("+") && any)
        break;
      const i64 c = peek_digit() ? number() : 1;
      if (!(eat("eps") || eat("\xCE\xB5") || eat("e"))) error("expected e<i> in root");
      const i64 k = number();
      if (k < 1 || k > l) error("root coordinate index out of range");
      r[k - 1] += static_cast<int>(sign * c);
      any = true;
    }
    return r;
  }

  int root_basis(const Root& r, bool must_be_positive) {
    const auto& rs = env_.table().roots();
    const int idx = rs.index_of(r);
    if (idx < 0) error("not a root: " + root_name(r));
    if (must_be_positive && !rs.is_positive(idx)) error("e[...] and f[...] take a positive root");
    return env_.table().basis_of_root(idx);
  }

  UElt generator() {
    const auto& t = env_.table();
    const auto& rs = t.roots();
    const bool rank_one = rs.type() == RootType::A1;
    skip();
    if (i_ >= s_.size()) error("unexpected end of input");
    const char c = s_[i_];
    if (c != 'e' && c != 'f' && c != 'x' && c != 'h') error("expected a generator");
    ++i_;
    if (c == 'h') {
      if (eat("[")) {
        Root r = root();
        if (!eat("]")) error("expected ']'");
        const int idx = rs.index_of(r);
        if (idx < 0) error("not a root: " + root_name(r));
        return env_.from_lie(env_.modulus() ? t.coroot_element(idx).reduced(env_.modulus()) : t.coroot_element(idx));
      }
      if (peek_digit()) {
        const i64 i = number();
        if (i < 1 || i > t.rank()) error("coroot index out of range");
        return env_.generator(t.basis_of_coroot(static_cast<int>(i - 1)));
      }
      if (!rank_one) error("bare h is only allowed at rank 1");
      return env_.generator(t.basis_of_coroot(0));
    }
    if (eat("[")) {
      Root r = root();
      if (!eat("]")) error("expected ']'");
      if (c == 'x') return env_.generator(root_basis(r, false));
      const int b = root_basis(r, true);
      if (c == 'e') return env_.generator(b);
      return env_.generator(t.basis_of_root(rs.negative_of(t.root_of(b))));
    }
    if (!rank_one || c == 'x') error("generator needs a root in brackets");
    const int pos = rs.positive()[0];
    return env_.generator(t.basis_of_root(c == 'e' ? pos : rs.negative_of(pos)));
  }

  const Enveloping& env_;
  const std::string& s_;
  std::size_t i_ = 0;
};

}  // namespace

UElt Enveloping::parse(const std::string& text) const { return Parser(*this, text).run(); }

// ---------------------------------------------------------------- oracle

Terms naive_normal_form(const StructureTable& t, u32 p, const std::optional<std::vector<u32>>& chi,
                        const std::vector<std::pair<std::vector<int>, i64>>& words) {
  auto norm = [p](i64 c) { return p ? static_cast<i64>(ff::reduce(c, p)) : c; };
  std::map<std::vector<int>, i64> pending;
  auto push = [&](const std::vector<int>& w, i64 c) {
    c = norm(c);
    if (!c) return;
    i64& slot = pending[w];
    slot = norm(slot + c);
    if (!slot) pending.erase(w);
  };
  for (const auto& [w, c] : words) push(w, c);
  Terms out;
  while (!pending.empty()) {
    auto node = pending.extract(pending.begin());
    const std::vector<int> w = node.key();
    const i64 c = node.mapped();
    std::size_t i = 0;
    while (i + 1 < w.size() && w[i] <= w[i + 1]) ++i;
    if (i + 1 < w.size()) {
      std::vector<int> sw = w;
      std::swap(sw[i], sw[i + 1]);
      push(sw, c);
      for (auto [k, v] : t.bracket_basis(w[i], w[i + 1]).terms()) {
        std::vector<int> r(w.begin(), w.begin() + i);
        r.push_back(k);
        r.insert(r.end(), w.begin() + i + 2, w.end());
        push(r, c * norm(v));
      }
      continue;
    }
    // Sorted word: eliminate p-th powers in reduced mode.
    bool rewrote = false;
    if (chi) {
      for (std::size_t a = 0; a < w.size() && !rewrote; ++a) {
        std::size_t b = a;
        while (b < w.size() && w[b] == w[a]) ++b;
        if (b - a >= p) {
          const int g = w[a];
          std::vector<int> rest(w.begin(), w.begin() + a);
          rest.insert(rest.end(), w.begin() + a + p, w.end());
          push(rest, c * ff::pow((*chi)[g] % p, p, p));
          if (t.is_coroot(g)) {
            std::vector<int> keep(w.begin(), w.begin() + a + 1);
            keep.insert(keep.end(), w.begin() + a + p, w.end());
            push(keep, c);
          }
          rewrote = true;
        }
        a = b - 1;
      }
    }
    if (rewrote) continue;
    Monomial m(t.dim(), 0);
    for (int g : w) ++m[g];
    i64& slot = out[m];
    slot = norm(slot + c);
    if (!slot) out.erase(m);
  }
  return out;
}

std::vector<std::pair<std::vector<int>, i64>> to_words(const UElt& u) {
  std::vector<std::pair<std::vector<int>, i64>> out;
  for (const auto& [m, c] : u.terms()) {
    std::vector<int> w;
    for (std::size_t b = 0; b < m.size(); ++b)
      for (int k = 0; k < m[b]; ++k) w.push_back(static_cast<int>(b));
    out.emplace_back(std::move(w), c);
  }
  return out;
}

Terms naive_commutator(const StructureTable& t, u32 p, const LieElt& x, const UElt& u) {
  std::vector<std::pair<std::vector<int>, i64>> words;
  const LieElt xr = p ? x.reduced(p) : x;
  for (const auto& [w, c] : to_words(u))
    for (std::size_t i = 0; i < w.size(); ++i) {
      const LieElt br = t.bracket(xr, p ? LieElt::basis(w[i], p) : LieElt::basis(w[i]));
      for (auto [k, v] : br.terms()) {
        std::vector<int> r = w;
        r[i] = k;
        words.emplace_back(std::move(r), p ? static_cast<i64>(ff::mul(ff::reduce(c, p), ff::reduce(v, p), p)) : c * v);
      }
    }
  return naive_normal_form(t, p, std::nullopt, words);
}

std::uint64_t reduced_monomial_count(u32 p, int n) {
  std::uint64_t r = 1;
  for (int i = 0; i < n; ++i) {
    require(r <= UINT64_MAX / p, ErrorCode::Budget, "p^n overflows 64 bits");
    r *= p;
  }
  return r;
}

}  // namespace chevrep::pbw
