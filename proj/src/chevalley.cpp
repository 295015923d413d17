#include "chevrep/chevalley.hpp"

#include <algorithm>

#include "chevrep/error.hpp"

namespace chevrep {

// ---------------------------------------------------------------- LieElt

LieElt LieElt::basis(int b, u32 modulus, i64 coeff) {
  LieElt e(modulus);
  e.add_term(b, coeff);
  return e;
}

i64 LieElt::coeff(int b) const {
  auto it = t_.find(b);
  return it == t_.end() ? 0 : it->second;
}

void LieElt::add_term(int b, i64 c) {
  i64 v = coeff(b) + c;
  if (p_) v = ff::reduce(v, p_);
  if (v == 0)
    t_.erase(b);
  else
    t_[b] = v;
}

void LieElt::same_mode(const LieElt& o) const {
  require(p_ == o.p_, ErrorCode::InvalidArgument, "Lie elements over different moduli");
}

LieElt LieElt::operator+(const LieElt& o) const {
  same_mode(o);
  LieElt r = *this;
  for (auto [b, c] : o.t_) r.add_term(b, c);
  return r;
}

LieElt LieElt::operator-(const LieElt& o) const { return *this + o.scaled(-1); }

LieElt LieElt::scaled(i64 c) const {
  LieElt r(p_);
  for (auto [b, v] : t_) r.add_term(b, p_ ? static_cast<i64>(ff::reduce(v, p_)) * ff::reduce(c, p_) : v * c);
  return r;
}

LieElt LieElt::reduced(u32 p) const {
  if (p_ == p) return *this;
  require(p_ == 0, ErrorCode::InvalidArgument, "cannot re-reduce an element already taken mod p");
  LieElt r(p);
  for (auto [b, c] : t_) r.add_term(b, c);
  return r;
}

// ---------------------------------------------------------------- table

namespace {

// Largest q with b - q a a root.
int string_down(const RootSystem& rs, const Root& a, const Root& b) {
  int q = 0;
  Root cur = b;
  while (true) {
    for (std::size_t i = 0; i < cur.size(); ++i) cur[i] -= a[i];
    if (!rs.is_root(cur)) return q;
    ++q;
  }
}

class ConstantSolver {
 public:
  explicit ConstantSolver(const RootSystem& rs) : rs_(rs) {}

  std::map<std::pair<int, int>, i64> solve() {
    std::vector<int> pos = rs_.positive();  // already in root order (height first)
    for (int xi : pos) {
      const Root& r = rs_.roots()[xi];
      // Extraspecial pair: the first positive alpha' with xi - alpha' positive.
      int a1 = -1, b1 = -1;
      for (int a : pos) {
        Root d = sub(r, rs_.roots()[a]);
        int bi = rs_.index_of(d);
        if (bi >= 0 && rs_.is_positive(bi)) {
          a1 = a;
          b1 = bi;
          break;
        }
      }
      if (a1 < 0) continue;  // simple root
      const i64 n1 = string_down(rs_, rs_.roots()[a1], rs_.roots()[b1]) + 1;
      set(a1, b1, n1);
      for (int a : pos) {
        if (a == a1 || a == b1) continue;
        Root d = sub(r, rs_.roots()[a]);
        int b = rs_.index_of(d);
        if (b < 0 || !rs_.is_positive(b) || a > b) continue;
        const Root& ra = rs_.roots()[a];
        const Root& rb = rs_.roots()[b];
        const Root& ra1 = rs_.roots()[a1];
        const Root& rb1 = rs_.roots()[b1];
        // Quadruple identity for (alpha', beta', -alpha, -beta).
        i64 num = 0, den = 1;
        auto add_term = [&](i64 n, i64 d) {
          num = num * d + n * den;
          den *= d;
        };
        Root g1 = sub(rb1, ra);
        if (rs_.is_root(g1)) {
          i64 t = get(b1, rs_.negative_of(a)) * get(a1, rs_.negative_of(b));
          add_term(t, inner(g1, g1));
        }
        Root g2 = sub(ra1, ra);
        if (rs_.is_root(g2)) {
          i64 t = get(rs_.negative_of(a), a1) * get(b1, rs_.negative_of(b));
          add_term(t, inner(g2, g2));
        }
        const i64 top = inner(r, r) * num;
        const i64 bottom = n1 * den;
        require(top % bottom == 0, ErrorCode::Internal, "non-integral structure constant");
        const i64 nab = top / bottom;
        const i64 expect = string_down(rs_, ra, rb) + 1;
        require(nab == expect || nab == -expect, ErrorCode::Internal, "structure constant of wrong magnitude");
        set(a, b, nab);
      }
    }
    return table_;
  }

  // N_{a,b} for arbitrary roots with a + b a root.
  i64 get(int a, int b) const {
    const bool pa = rs_.is_positive(a), pb = rs_.is_positive(b);
    if (pa && pb) return table_.at({a, b});
    if (!pa && !pb) return -get(rs_.negative_of(a), rs_.negative_of(b));
    if (!pa) return -get(b, a);
    const Root& ra = rs_.roots()[a];
    const Root& rb = rs_.roots()[b];
    Root s = add(ra, rb);
    const int si = rs_.index_of(s);
    require(si >= 0, ErrorCode::Internal, "get: sum is not a root");
    const int c = rs_.negative_of(si);  // a + b + c = 0
    const Root& rc = rs_.roots()[c];
    i64 v;
    i64 scale_num, scale_den;
    if (rs_.is_positive(si)) {
      // N_{a,b} = (c,c)/(a,a) N_{b,c}, with b, c negative.
      v = -get(rs_.negative_of(b), rs_.negative_of(c));
      scale_num = inner(rc, rc);
      scale_den = inner(ra, ra);
    } else {
      // N_{a,b} = (c,c)/(b,b) N_{c,a}, with c, a positive.
      v = get(c, a);
      scale_num = inner(rc, rc);
      scale_den = inner(rb, rb);
    }
    require((v * scale_num) % scale_den == 0, ErrorCode::Internal, "non-integral structure constant");
    return v * scale_num / scale_den;
  }

 private:
  static Root sub(const Root& a, const Root& b) {
    Root r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
  }
  void set(int a, int b, i64 v) {
    table_[{a, b}] = v;
    table_[{b, a}] = -v;
  }

  const RootSystem& rs_;
  std::map<std::pair<int, int>, i64> table_;

};

}  // namespace

StructureTable StructureTable::build(const RootSystem& rs) {
  StructureTable t;
  t.rs_ = rs;
  const int np = static_cast<int>(rs.num_positive());
  const int l = rs.rank();
  t.n_ = 2 * np + l;
  t.basis_to_root_.assign(t.n_, -1);
  t.root_to_basis_.assign(rs.num_roots(), -1);
  int b = 0;
  for (int r : rs.negative()) {
    t.basis_to_root_[b] = r;
    t.root_to_basis_[r] = b++;
  }
  b += l;
  for (int r : rs.positive()) {
    t.basis_to_root_[b] = r;
    t.root_to_basis_[r] = b++;
  }

  // Positive pairs come from the extraspecial-pair recursion; every other
  // pair is derived from them by the symmetry identities.
  ConstantSolver solver(rs);
  auto pos_table = solver.solve();
  for (std::size_t a = 0; a < rs.num_roots(); ++a)
    for (std::size_t c = 0; c < rs.num_roots(); ++c) {
      Root s = add(rs.roots()[a], rs.roots()[c]);
      if (rs.is_root(s)) t.n_const_[{static_cast<int>(a), static_cast<int>(c)}] =
          solver.get(static_cast<int>(a), static_cast<int>(c));
    }

  t.br_.assign(static_cast<std::size_t>(t.n_) * t.n_, LieElt());
  for (int i = 0; i < t.n_; ++i)
    for (int j = 0; j < t.n_; ++j) {
      LieElt v;
      if (t.is_coroot(i) && t.is_coroot(j)) {
        // abelian Cartan
      } else if (t.is_coroot(i)) {
        const int r = t.root_of(j);
        v.add_term(j, t.weight_of(r, t.coroot_of(i)));
      } else if (t.is_coroot(j)) {
        const int r = t.root_of(i);
        v.add_term(i, -t.weight_of(r, t.coroot_of(j)));
      } else {
        const int ri = t.root_of(i), rj = t.root_of(j);
        if (rs.negative_of(ri) == rj) {
          v = t.coroot_element(ri);
        } else {
          const int s = rs.index_of(add(rs.roots()[ri], rs.roots()[rj]));
          if (s >= 0) v.add_term(t.root_to_basis_[s], t.n_const_.at({ri, rj}));
        }
      }
      t.br_[i * t.n_ + j] = v;
    }
  return t;
}

BasisIndex StructureTable::index(int b) const {
  if (is_coroot(b)) return {BasisIndex::Kind::Coroot, coroot_of(b)};
  return {BasisIndex::Kind::RootVector, root_of(b)};
}

int StructureTable::basis_of(const BasisIndex& bi) const {
  return bi.kind == BasisIndex::Kind::Coroot ? basis_of_coroot(bi.index) : basis_of_root(bi.index);
}

std::vector<int> StructureTable::negative_basis() const {
  std::vector<int> v(num_positive());
  for (int i = 0; i < num_positive(); ++i) v[i] = i;
  return v;
}

std::vector<int> StructureTable::positive_basis() const {
  std::vector<int> v;
  for (int b = num_positive() + rank(); b < n_; ++b) v.push_back(b);
  return v;
}

i64 StructureTable::structure_constant(int a, int b) const {
  auto it = n_const_.find({a, b});
  return it == n_const_.end() ? 0 : it->second;
}

LieElt StructureTable::coroot_element(int root_idx, u32 modulus) const {
  const auto c = rs_.coroot_coords(rs_.roots()[root_idx]);
  LieElt h(modulus);
  for (int i = 0; i < rank(); ++i)
    if (c[i]) h.add_term(basis_of_coroot(i), c[i]);
  return h;
}

int StructureTable::weight_of(int root_idx, int i) const {
  return cartan_integer(rs_.roots()[root_idx], rs_.simple_root(i));
}

LieElt StructureTable::bracket(const LieElt& a, const LieElt& b) const {
  require(a.modulus() == b.modulus(), ErrorCode::InvalidArgument, "bracket of elements over different moduli");
  LieElt out(a.modulus());
  for (auto [i, ci] : a.terms())
    for (auto [j, cj] : b.terms()) {
      const i64 c = a.modulus() ? static_cast<i64>(ff::mul(static_cast<u32>(ci), static_cast<u32>(cj), a.modulus()))
                                : ci * cj;
      for (auto [k, ck] : bracket_basis(i, j).terms()) out.add_term(k, a.modulus() ? c * ff::reduce(ck, a.modulus()) : c * ck);
    }
  return out;
}

void StructureTable::set_bracket(int i, int j, const LieElt& v) {
  require(v.modulus() == 0, ErrorCode::InvalidArgument, "table entries are integral");
  br_[i * n_ + j] = v;
  br_[j * n_ + i] = v.scaled(-1);
}

LieElt StructureTable::p_map(int b, u32 p) const {
  if (is_root_vector(b)) return LieElt(p);
  return LieElt::basis(b, p);
}

LieElt StructureTable::p_map(const LieElt& h, u32 p) const {
  LieElt in = h.reduced(p);
  LieElt out(p);
  for (auto [b, c] : in.terms()) {
    require(is_coroot(b), ErrorCode::Precondition, "p_map extension applies only to Cartan elements");
    out.add_term(b, ff::pow(static_cast<u32>(c), p, p));
  }
  return out;
}

std::string StructureTable::basis_name(int b) const {
  if (is_coroot(b)) return "h" + std::to_string(coroot_of(b) + 1);
  return "x[" + root_name(rs_.roots()[root_of(b)]) + "]";
}

// ---------------------------------------------------------------- checks

JacobiReport jacobi_check(const StructureTable& t, u32 p) {
  JacobiReport rep;
  rep.residual = LieElt(p);
  const int n = t.dim();
  auto br = [&](int i, int j) { return p ? t.bracket_basis(i, j).reduced(p) : t.bracket_basis(i, j); };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        ++rep.triples_checked;
        LieElt s = t.bracket(br(i, j), LieElt::basis(k, p)) + t.bracket(br(j, k), LieElt::basis(i, p)) +
                   t.bracket(br(k, i), LieElt::basis(j, p));
        if (!s.is_zero()) {
          rep.ok = false;
          rep.violating = {i, j, k};
          rep.residual = s;
          return rep;
        }
      }
  return rep;
}

ff::Matrix adjoint_matrix(const StructureTable& t, const LieElt& x, u32 p) {
  const int n = t.dim();
  ff::Matrix m(p, n, n);
  const LieElt xr = x.reduced(p);
  for (int j = 0; j < n; ++j) {
    const LieElt col = t.bracket(xr, LieElt::basis(j, p));
    for (auto [k, c] : col.terms()) m.at(k, j) = static_cast<u32>(c);
  }
  return m;
}

bool check_p_map_adjoint(const StructureTable& t, u32 p) {
  for (int b = 0; b < t.dim(); ++b) {
    const ff::Matrix ad = adjoint_matrix(t, LieElt::basis(b, p), p);
    ff::Matrix pw = ad;
    for (u32 k = 1; k < p; ++k) pw = pw * ad;
    if (!(pw == adjoint_matrix(t, t.p_map(b, p), p))) return false;
  }
  return true;
}

// ---------------------------------------------------------------- matrices

namespace {

using IntMat = std::vector<i64>;

IntMat mat_mul(const IntMat& a, const IntMat& b, int n) {
  IntMat c(n * n, 0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (a[i * n + k])
        for (int j = 0; j < n; ++j) c[i * n + j] += a[i * n + k] * b[k * n + j];
  return c;
}

IntMat commutator(const IntMat& a, const IntMat& b, int n) {
  IntMat x = mat_mul(a, b, n), y = mat_mul(b, a, n);
  for (int i = 0; i < n * n; ++i) x[i] -= y[i];
  return x;
}

// Standard root matrix of sp_{2l} for J = [[0, I], [-I, 0]].
IntMat standard_root_matrix(const Root& r, int l) {
  const int n = 2 * l;
  IntMat m(n * n, 0);
  auto set = [&](int i, int j, i64 v) { m[i * n + j] += v; };
  std::vector<int> nz;
  for (int i = 0; i < l; ++i)
    if (r[i]) nz.push_back(i);
  if (nz.size() == 1) {
    const int i = nz[0];
    if (r[i] > 0)
      set(i, l + i, 1);
    else
      set(l + i, i, 1);
  } else {
    const int i = nz[0], j = nz[1];
    const int si = r[i], sj = r[j];
    if (si > 0 && sj < 0) {  // e_i - e_j
      set(i, j, 1);
      set(l + j, l + i, -1);
    } else if (si < 0 && sj > 0) {  // e_j - e_i
      set(j, i, 1);
      set(l + i, l + j, -1);
    } else if (si > 0) {  // e_i + e_j
      set(i, l + j, 1);
      set(j, l + i, 1);
    } else {  // -(e_i + e_j)
      set(l + i, j, 1);
      set(l + j, i, 1);
    }
  }
  return m;
}

IntMat coroot_matrix(const RootSystem& rs, int i) {
  const int l = rs.rank(), n = 2 * l;
  IntMat m(n * n, 0);
  const Root& a = rs.simple_root(i);
  const int aa = inner(a, a);
  for (int k = 0; k < l; ++k) {
    const i64 t = 2 * a[k] / aa;
    m[k * n + k] = t;
    m[(l + k) * n + l + k] = -t;
  }
  return m;
}

}  // namespace

MatrixRealization matrix_realization(const StructureTable& t) {
  const RootSystem& rs = t.roots();
  const int l = rs.rank(), n = 2 * l;
  MatrixRealization m;
  m.size = n;
  m.images.assign(t.dim(), IntMat(n * n, 0));
  m.signs.assign(t.dim(), 1);
  m.form.assign(n * n, 0);
  for (int i = 0; i < l; ++i) {
    m.form[i * n + l + i] = 1;
    m.form[(l + i) * n + i] = -1;
  }
  for (int i = 0; i < l; ++i) m.images[t.basis_of_coroot(i)] = coroot_matrix(rs, i);
  for (int i = 0; i < l; ++i) {
    const int s = rs.simple()[i];
    m.images[t.basis_of_root(s)] = standard_root_matrix(rs.roots()[s], l);
    m.images[t.basis_of_root(rs.negative_of(s))] = standard_root_matrix(rs.roots()[rs.negative_of(s)], l);
  }
  // Non-simple root vectors are defined through the table from the simple
  // ones, then compared against the standard matrices up to sign.
  for (int xi : rs.positive()) {
    if (std::find(rs.simple().begin(), rs.simple().end(), xi) != rs.simple().end()) continue;
    for (int a : rs.simple()) {
      Root d = rs.roots()[xi];
      for (int k = 0; k < l; ++k) d[k] -= rs.roots()[a][k];
      const int b = rs.index_of(d);
      if (b < 0 || !rs.is_positive(b)) continue;
      for (int sgn : {1, -1}) {
        const int ra = sgn > 0 ? a : rs.negative_of(a);
        const int rb = sgn > 0 ? b : rs.negative_of(b);
        const int target = sgn > 0 ? xi : rs.negative_of(xi);
        const i64 nab = t.structure_constant(ra, rb);
        IntMat c = commutator(m.images[t.basis_of_root(ra)], m.images[t.basis_of_root(rb)], n);
        for (auto& x : c) {
          require(x % nab == 0, ErrorCode::Internal, "realization: non-integral root matrix");
          x /= nab;
        }
        m.images[t.basis_of_root(target)] = c;
      }
      break;
    }
  }
  for (int r = 0; r < static_cast<int>(rs.num_roots()); ++r) {
    const int b = t.basis_of_root(r);
    const IntMat std_m = standard_root_matrix(rs.roots()[r], l);
    if (m.images[b] == std_m) {
      m.signs[b] = 1;
    } else {
      IntMat neg = std_m;
      for (auto& x : neg) x = -x;
      require(m.images[b] == neg, ErrorCode::Internal, "realization: image is not a signed root matrix");
      m.signs[b] = -1;
    }
  }
  return m;
}

std::vector<ff::Matrix> MatrixRealization::reduced(u32 p) const {
  std::vector<ff::Matrix> out;
  for (const auto& im : images) {
    ff::Matrix mm(p, size, size);
    for (int i = 0; i < size * size; ++i) mm.data()[i] = ff::reduce(im[i], p);
    out.push_back(std::move(mm));
  }
  return out;
}

bool is_symplectic(const MatrixRealization& m, int b) {
  const int n = m.size;
  const IntMat& x = m.images[b];
  IntMat xt(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) xt[i * n + j] = x[j * n + i];
  IntMat a = mat_mul(xt, m.form, n), c = mat_mul(m.form, x, n);
  for (int i = 0; i < n * n; ++i)
    if (a[i] + c[i] != 0) return false;
  return true;
}

RealizationCheck compare_with_realization(const StructureTable& t, const MatrixRealization& m) {
  RealizationCheck rc;
  const int n = m.size;
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j) {
      ++rc.pairs_checked;
      IntMat lhs = commutator(m.images[i], m.images[j], n);
      IntMat rhs(n * n, 0);
      for (auto [k, c] : t.bracket_basis(i, j).terms())
        for (int e = 0; e < n * n; ++e) rhs[e] += c * m.images[k][e];
      if (lhs != rhs) {
        rc.ok = false;
        rc.first_i = i;
        rc.first_j = j;
        return rc;
      }
    }
  return rc;
}

}  // namespace chevrep
