#include "chevrep/modrep.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>

#include "json.hpp"

#include "chevrep/error.hpp"

namespace chevrep::modrep {

// ---------------------------------------------------------------- characters

Matrix exp_ad(const StructureTable& t, u32 p, const LieElt& x) {
  const Matrix a = adjoint_matrix(t, x, p);
  const std::size_t n = a.rows();
  Matrix sum = Matrix::identity(p, n);
  Matrix term = Matrix::identity(p, n);
  for (u32 k = 1;; ++k) {
    term = term * a;
    if (term.is_zero()) break;
    require(k < p, ErrorCode::Precondition, "exp_ad: ad x is not nilpotent below p");
    term = term.scaled(ff::inv(k, p));
    sum.add_scaled(term, 1);
  }
  return sum;
}

Matrix weyl_automorphism(const StructureTable& t, u32 p, int i) {
  const auto& rs = t.roots();
  const int s = rs.simple()[i];
  const LieElt e = LieElt::basis(t.basis_of_root(s), p);
  const LieElt f = LieElt::basis(t.basis_of_root(rs.negative_of(s)), p, -1);
  const Matrix ee = exp_ad(t, p, e);
  return ee * exp_ad(t, p, f) * ee;
}

std::vector<u32> root_character(const StructureTable& t, int root_idx) {
  std::vector<u32> chi(t.dim(), 0);
  chi[t.basis_of_root(root_idx)] = 1;
  return chi;
}

namespace {

bool is_standard(const StructureTable& t, const std::vector<u32>& chi) {
  for (int b = 0; b < t.dim(); ++b)
    if (chi[b] && !t.is_negative(b)) return false;
  return true;
}

}  // namespace

Standardized standardize_character(const StructureTable& t, u32 p, const std::vector<u32>& chi_in) {
  require(static_cast<int>(chi_in.size()) == t.dim(), ErrorCode::InvalidArgument, "character has wrong length");
  std::vector<u32> chi(chi_in.size());
  for (std::size_t i = 0; i < chi.size(); ++i) chi[i] = chi_in[i] % p;
  Standardized out;
  out.sigma = Matrix::identity(p, t.dim());
  if (is_standard(t, chi)) {
    out.chi = chi;
    return out;
  }
  int support = -1, count = 0;
  for (int b = 0; b < t.dim(); ++b)
    if (chi[b]) {
      support = b;
      ++count;
    }
  require(count == 1 && t.is_root_vector(support), ErrorCode::InvalidArgument,
          "unsupported character shape: expected support on a single root vector");
  const auto& rs = t.roots();
  out.word = weyl_word_to_negative(rs, rs.roots()[t.root_of(support)]);
  for (int i : out.word) out.sigma = weyl_automorphism(t, p, i) * out.sigma;
  // chi' = chi o sigma^-1 as a row vector.
  const Matrix inv = ff::inverse(out.sigma);
  out.chi.assign(t.dim(), 0);
  for (int j = 0; j < t.dim(); ++j) {
    u64 s = 0;
    for (int i = 0; i < t.dim(); ++i) s += static_cast<u64>(chi[i]) * inv.at(i, j);
    out.chi[j] = static_cast<u32>(s % p);
  }
  require(is_standard(t, out.chi), ErrorCode::Internal, "Weyl twist did not standardize the character");
  return out;
}

std::vector<std::vector<u32>> compatible_weights(const StructureTable& t, u32 p, const std::vector<u32>& chi) {
  for (int i = 0; i < t.rank(); ++i)
    require(chi[t.basis_of_coroot(i)] % p == 0, ErrorCode::Precondition,
            "nonzero Cartan character requires splitting field");
  std::vector<std::vector<u32>> out;
  std::vector<u32> cur(t.rank(), 0);
  while (true) {
    out.push_back(cur);
    int i = t.rank() - 1;
    while (i >= 0 && ++cur[i] == p) cur[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

// ---------------------------------------------------------------- ActionRep

std::size_t ActionRep::dim() const {
  std::size_t d = 0;
  for (const auto& b : blocks) d += b.dim;
  return d;
}

int ActionRep::op_of_basis(int b) const {
  for (std::size_t k = 0; k < op_basis.size(); ++k)
    if (op_basis[k] == b) return static_cast<int>(k);
  return -1;
}

std::vector<u32> ActionRep::apply(int op, const std::vector<u32>& v) const {
  require(v.size() == dim(), ErrorCode::InvalidArgument, "vector length mismatch");
  std::vector<u32> out(v.size(), 0);
  for (std::size_t s = 0; s < blocks.size(); ++s) {
    const BlockMap& bm = ops[op][s];
    if (bm.dst < 0) continue;
    const Block& src = blocks[s];
    const Block& dst = blocks[bm.dst];
    auto y = bm.m.apply(std::span<const u32>(v.data() + src.offset, src.dim));
    for (std::size_t i = 0; i < dst.dim; ++i) out[dst.offset + i] = ff::add(out[dst.offset + i], y[i], p);
  }
  return out;
}

Matrix ActionRep::dense(int op) const {
  Matrix m(p, dim(), dim());
  for (std::size_t s = 0; s < blocks.size(); ++s) {
    const BlockMap& bm = ops[op][s];
    if (bm.dst < 0) continue;
    const Block& src = blocks[s];
    const Block& dst = blocks[bm.dst];
    for (std::size_t i = 0; i < dst.dim; ++i)
      for (std::size_t j = 0; j < src.dim; ++j) m.at(dst.offset + i, src.offset + j) = bm.m.at(i, j);
  }
  return m;
}

ActionRep ActionRep::transposed() const {
  ActionRep t = *this;
  for (std::size_t k = 0; k < ops.size(); ++k) {
    std::vector<BlockMap> maps(blocks.size());
    for (std::size_t s = 0; s < blocks.size(); ++s) {
      const BlockMap& bm = ops[k][s];
      if (bm.dst < 0) continue;
      require(maps[bm.dst].dst < 0, ErrorCode::Internal, "operator is not block-homogeneous");
      maps[bm.dst].dst = static_cast<int>(s);
      maps[bm.dst].m = bm.m.transposed();
    }
    t.ops[k] = std::move(maps);
  }
  t.label = label + "^T";
  return t;
}

ActionRep from_dense(u32 p, const std::vector<Matrix>& mats, const std::vector<int>& op_basis,
                     std::vector<int> generators) {
  require(!mats.empty(), ErrorCode::InvalidArgument, "module needs at least one operator");
  require(mats.size() == op_basis.size(), ErrorCode::InvalidArgument, "operator labels do not match");
  ActionRep r;
  r.p = p;
  const std::size_t n = mats[0].rows();
  r.blocks.push_back(Block{{}, n, 0});
  for (const auto& m : mats) {
    require(m.rows() == n && m.cols() == n && m.modulus() == p, ErrorCode::InvalidArgument,
            "operators must be square of equal size over the same field");
    r.ops.push_back({BlockMap{0, m}});
  }
  r.op_basis = op_basis;
  if (generators.empty())
    for (std::size_t k = 0; k < mats.size(); ++k) generators.push_back(static_cast<int>(k));
  r.generators = std::move(generators);
  r.label = "dense";
  return r;
}

ActionRep direct_sum(const ActionRep& a, const ActionRep& b) {
  require(a.p == b.p && a.op_basis == b.op_basis, ErrorCode::InvalidArgument, "direct sum of incompatible modules");
  const std::size_t da = a.dim(), db = b.dim();
  std::vector<Matrix> mats;
  for (std::size_t k = 0; k < a.ops.size(); ++k) {
    Matrix m(a.p, da + db, da + db);
    const Matrix ma = a.dense(static_cast<int>(k)), mb = b.dense(static_cast<int>(k));
    for (std::size_t i = 0; i < da; ++i)
      for (std::size_t j = 0; j < da; ++j) m.at(i, j) = ma.at(i, j);
    for (std::size_t i = 0; i < db; ++i)
      for (std::size_t j = 0; j < db; ++j) m.at(da + i, da + j) = mb.at(i, j);
    mats.push_back(std::move(m));
  }
  ActionRep r = from_dense(a.p, mats, a.op_basis, a.generators);
  r.chi = a.chi;
  r.label = a.label + "+" + b.label;
  return r;
}

// ---------------------------------------------------------------- baby Verma

namespace {

using SVec = std::vector<std::pair<u32, u32>>;

// Basis and grading shared by both constructions: monomials in the negative
// root vectors with exponents < p, indexed in mixed radix.
struct VermaLayout {
  u32 p;
  int np;
  std::size_t dim;
  std::vector<u64> radix;
  std::vector<std::vector<u32>> weight;  // per index
  std::vector<Block> blocks;
  std::vector<int> block_of;
  std::vector<u32> pos;

  VermaLayout(const StructureTable& t, u32 p_, const std::vector<u32>& lambda, std::size_t max_dim) : p(p_) {
    np = t.num_positive();
    u64 d = 1;
    for (int b = 0; b < np; ++b) {
      radix.push_back(d);
      require(d <= max_dim / p, ErrorCode::Budget,
              "baby Verma module of dimension " + std::to_string(p) + "^" + std::to_string(np) +
                  " exceeds the dimension budget " + std::to_string(max_dim));
      d *= p;
    }
    dim = d;
    const int l = t.rank();
    require(static_cast<int>(lambda.size()) == l, ErrorCode::InvalidArgument, "weight has wrong length");
    weight.assign(dim, std::vector<u32>(l));
    for (std::size_t idx = 0; idx < dim; ++idx)
      for (int i = 0; i < l; ++i) {
        i64 w = lambda[i];
        for (int b = 0; b < np; ++b) w += static_cast<i64>(digit(idx, b)) * t.weight_of(t.root_of(b), i);
        weight[idx][i] = ff::reduce(w, p);
      }
    std::map<std::vector<u32>, std::vector<u32>> groups;
    for (std::size_t idx = 0; idx < dim; ++idx) groups[weight[idx]].push_back(static_cast<u32>(idx));
    block_of.assign(dim, -1);
    pos.assign(dim, 0);
    std::size_t off = 0;
    for (auto& [w, members] : groups) {
      const int bi = static_cast<int>(blocks.size());
      blocks.push_back(Block{w, members.size(), off});
      for (std::size_t k = 0; k < members.size(); ++k) {
        block_of[members[k]] = bi;
        pos[members[k]] = static_cast<u32>(k);
      }
      off += members.size();
    }
  }

  u32 digit(std::size_t idx, int b) const { return static_cast<u32>((idx / radix[b]) % p); }

  int find_block(const std::vector<u32>& w) const {
    auto it = std::lower_bound(blocks.begin(), blocks.end(), w,
                               [](const Block& b, const std::vector<u32>& x) { return b.weight < x; });
    return (it != blocks.end() && it->weight == w) ? static_cast<int>(it - blocks.begin()) : -1;
  }

  // Assembles an ActionRep from a column oracle col(g, idx).
  template <class Col>
  ActionRep assemble(const StructureTable& t, const std::vector<u32>& chi, Col&& col) const {
    ActionRep rep;
    rep.p = p;
    rep.blocks = blocks;
    rep.weight_graded = true;
    rep.chi = chi;
    const int l = t.rank();
    for (int g = 0; g < t.dim(); ++g) {
      std::vector<BlockMap> maps(blocks.size());
      std::vector<int> shift(l, 0);
      if (t.is_root_vector(g))
        for (int i = 0; i < l; ++i) shift[i] = t.weight_of(t.root_of(g), i);
      for (std::size_t s = 0; s < blocks.size(); ++s) {
        std::vector<u32> w(l);
        for (int i = 0; i < l; ++i) w[i] = ff::reduce(static_cast<i64>(blocks[s].weight[i]) + shift[i], p);
        const int d = find_block(w);
        maps[s].dst = d;
        if (d >= 0) maps[s].m = Matrix(p, blocks[d].dim, blocks[s].dim);
      }
      for (std::size_t idx = 0; idx < dim; ++idx) {
        const int s = block_of[idx];
        const SVec v = col(g, idx);
        for (auto [m, c] : v) {
          require(maps[s].dst >= 0 && block_of[m] == maps[s].dst, ErrorCode::Internal,
                  "baby Verma action is not weight-homogeneous");
          maps[s].m.at(pos[m], pos[idx]) = c;
        }
      }
      // Drop maps that are identically zero so spinning skips them.
      for (auto& bm : maps)
        if (bm.dst >= 0 && bm.m.is_zero()) bm = BlockMap{};
      rep.ops.push_back(std::move(maps));
      rep.op_basis.push_back(g);
    }
    for (int i = 0; i < l; ++i) rep.generators.push_back(t.basis_of_root(t.roots().simple()[i]));
    for (int i = 0; i < l; ++i)
      rep.generators.push_back(t.basis_of_root(t.roots().negative_of(t.roots().simple()[i])));
    return rep;
  }
};

class VermaAction {
 public:
  VermaAction(const StructureTable& t, const VermaLayout& lay, const std::vector<u32>& chi,
              const std::vector<u32>& lambda)
      : t_(t), lay_(lay), lambda_(lambda), memo_(static_cast<std::size_t>(t.dim()) * lay.dim), done_(memo_.size(), 0) {
    const u32 p = lay.p;
    for (int b = 0; b < t.dim(); ++b) chi_pow_.push_back(ff::pow(chi[b] % p, p, p));
  }

  const SVec& act(int g, std::size_t idx) {
    const std::size_t key = static_cast<std::size_t>(g) * lay_.dim + idx;
    if (!done_[key]) {
      SVec v = compute(g, idx);
      memo_[key] = std::move(v);
      done_[key] = 1;
    }
    return memo_[key];
  }

 private:
  SVec compute(int g, std::size_t idx) {
    const u32 p = lay_.p;
    if (t_.is_coroot(g)) {
      const u32 w = lay_.weight[idx][t_.coroot_of(g)];
      return w ? SVec{{static_cast<u32>(idx), w}} : SVec{};
    }
    int j = 0;
    while (j < lay_.np && lay_.digit(idx, j) == 0) ++j;
    if (j == lay_.np && !t_.is_negative(g)) return {};
    if (t_.is_negative(g) && g <= j) {
      const u32 d = lay_.digit(idx, g);
      if (d + 1 < p) return {{static_cast<u32>(idx + lay_.radix[g]), 1}};
      const u32 c = chi_pow_[g];
      if (!c) return {};
      return {{static_cast<u32>(idx - static_cast<std::size_t>(d) * lay_.radix[g]), c}};
    }
    const std::size_t rest = idx - lay_.radix[j];
    std::map<u32, u32> acc;
    auto add = [&](const SVec& v, u32 c) {
      for (auto [m, x] : v) {
        u32& slot = acc[m];
        slot = ff::add(slot, ff::mul(x, c, p), p);
      }
    };
    const SVec first = act(g, rest);
    for (auto [m, c] : first) add(act(j, m), c);
    for (auto [k, c] : t_.bracket_basis(g, j).terms()) add(act(k, rest), ff::reduce(c, p));
    SVec out;
    for (auto [m, c] : acc)
      if (c) out.emplace_back(m, c);
    return out;
  }

  const StructureTable& t_;
  const VermaLayout& lay_;
  std::vector<u32> lambda_;
  std::vector<u32> chi_pow_;
  std::vector<SVec> memo_;
  std::vector<char> done_;
};

void check_verma_inputs(const StructureTable& t, u32 p, const std::vector<u32>& chi, const std::vector<u32>& lambda) {
  ff::check_modulus(p);
  require(static_cast<int>(chi.size()) == t.dim(), ErrorCode::InvalidArgument, "character has wrong length");
  for (int b = 0; b < t.dim(); ++b)
    require(t.is_negative(b) || chi[b] % p == 0, ErrorCode::Precondition,
            "baby Verma construction needs chi to vanish on positive root vectors and coroots");
  require(static_cast<int>(lambda.size()) == t.rank(), ErrorCode::InvalidArgument, "weight has wrong length");
  for (auto x : lambda) require(x < p, ErrorCode::InvalidArgument, "weight value out of range");
}

std::string verma_label(const std::vector<u32>& lambda) {
  std::string s = "Z(";
  for (std::size_t i = 0; i < lambda.size(); ++i) s += (i ? "," : "") + std::to_string(lambda[i]);
  return s + ")";
}

}  // namespace

ActionRep baby_verma(const StructureTable& t, u32 p, const std::vector<u32>& chi, const std::vector<u32>& lambda,
                     std::size_t max_dim) {
  check_verma_inputs(t, p, chi, lambda);
  const VermaLayout lay(t, p, lambda, max_dim);
  VermaAction act(t, lay, chi, lambda);
  ActionRep rep = lay.assemble(t, chi, [&](int g, std::size_t idx) { return act.act(g, idx); });
  rep.label = verma_label(lambda);
  return rep;
}

ActionRep baby_verma_via_pbw(const StructureTable& t, u32 p, const std::vector<u32>& chi,
                             const std::vector<u32>& lambda) {
  check_verma_inputs(t, p, chi, lambda);
  const VermaLayout lay(t, p, lambda, 20000);
  pbw::Enveloping u(t, p, chi);
  const int np = t.num_positive();
  auto col = [&](int g, std::size_t idx) {
    pbw::Monomial m = u.unit();
    for (int b = 0; b < np; ++b) m[b] = static_cast<std::uint16_t>(lay.digit(idx, b));
    const pbw::UElt r = u.multiply(u.generator(g), u.from_monomial(m));
    std::map<u32, u32> acc;
    for (const auto& [mono, c] : r.terms()) {
      bool kills = false;
      for (int b = np + t.rank(); b < t.dim(); ++b) kills = kills || mono[b] != 0;
      if (kills) continue;
      u32 coef = static_cast<u32>(c);
      for (int i = 0; i < t.rank(); ++i) coef = ff::mul(coef, ff::pow(lambda[i], mono[np + i], p), p);
      std::size_t target = 0;
      for (int b = 0; b < np; ++b) target += mono[b] * lay.radix[b];
      u32& slot = acc[static_cast<u32>(target)];
      slot = ff::add(slot, coef, p);
    }
    SVec out;
    for (auto [k, c] : acc)
      if (c) out.emplace_back(k, c);
    return out;
  };
  ActionRep rep = lay.assemble(t, chi, col);
  rep.label = verma_label(lambda) + "/pbw";
  return rep;
}

// ---------------------------------------------------------------- checks

namespace {

// Block map of op a after op b, starting in block s. dst = -1 for zero.
BlockMap compose(const ActionRep& rep, int a, int b, std::size_t s) {
  const BlockMap& mb = rep.ops[b][s];
  if (mb.dst < 0) return {};
  const BlockMap& ma = rep.ops[a][mb.dst];
  if (ma.dst < 0) return {};
  return BlockMap{ma.dst, ma.m * mb.m};
}

bool same_map(const ActionRep& rep, std::size_t s, const BlockMap& x, const BlockMap& y) {
  if (x.dst < 0 && y.dst < 0) return true;
  if (x.dst < 0) return y.m.is_zero();
  if (y.dst < 0) return x.m.is_zero();
  if (x.dst != y.dst) return x.m.is_zero() && y.m.is_zero();
  (void)rep;
  (void)s;
  return x.m == y.m;
}

void accumulate(BlockMap& acc, const BlockMap& x, u32 c, u32 p) {
  if (x.dst < 0 || c == 0) return;
  if (acc.dst < 0) {
    acc.dst = x.dst;
    acc.m = x.m.scaled(c);
    return;
  }
  if (acc.dst != x.dst) {
    require(x.m.is_zero(), ErrorCode::Internal, "non-homogeneous combination");
    return;
  }
  acc.m.add_scaled(x.m, c);
  (void)p;
}

}  // namespace

RepCheck check_brackets(const ActionRep& rep, const StructureTable& t) {
  RepCheck rc;
  const int nops = static_cast<int>(rep.ops.size());
  for (int a = 0; a < nops; ++a)
    for (int b = a + 1; b < nops; ++b) {
      const int ba = rep.op_basis[a], bb = rep.op_basis[b];
      if (ba < 0 || bb < 0) continue;
      const LieElt br = t.bracket_basis(ba, bb);
      bool covered = true;
      for (auto [k, c] : br.terms()) covered = covered && rep.op_of_basis(k) >= 0;
      if (!covered) continue;
      for (std::size_t s = 0; s < rep.blocks.size(); ++s) {
        BlockMap lhs = compose(rep, a, b, s);
        accumulate(lhs, compose(rep, b, a, s), rep.p - 1, rep.p);
        BlockMap rhs;
        for (auto [k, c] : br.terms()) accumulate(rhs, rep.ops[rep.op_of_basis(k)][s], ff::reduce(c, rep.p), rep.p);
        if (!same_map(rep, s, lhs, rhs)) {
          rc.ok = false;
          rc.first_a = ba;
          rc.first_b = bb;
          rc.detail = "bracket relation fails on block " + std::to_string(s);
          return rc;
        }
      }
    }
  return rc;
}

RepCheck check_p_character(const ActionRep& rep, const StructureTable& t) {
  RepCheck rc;
  const u32 p = rep.p;
  for (std::size_t k = 0; k < rep.ops.size(); ++k) {
    const int b = rep.op_basis[k];
    if (b < 0) continue;
    const u32 chip = rep.chi.empty() ? 0 : ff::pow(rep.chi[b] % p, p, p);
    for (std::size_t s = 0; s < rep.blocks.size(); ++s) {
      BlockMap cur{static_cast<int>(s), Matrix::identity(p, rep.blocks[s].dim)};
      for (u32 i = 0; i < p && cur.dst >= 0; ++i) {
        const BlockMap& m = rep.ops[k][cur.dst];
        if (m.dst < 0) {
          cur = BlockMap{};
          break;
        }
        cur = BlockMap{m.dst, m.m * cur.m};
      }
      BlockMap rhs;
      if (t.is_coroot(b)) accumulate(rhs, rep.ops[k][s], 1, p);
      if (chip) accumulate(rhs, BlockMap{static_cast<int>(s), Matrix::identity(p, rep.blocks[s].dim)}, chip, p);
      if (!same_map(rep, s, cur, rhs)) {
        rc.ok = false;
        rc.first_a = b;
        rc.detail = "p-character identity fails on block " + std::to_string(s);
        return rc;
      }
    }
  }
  return rc;
}

// ---------------------------------------------------------------- U action

namespace {

struct HomVec {
  int block;
  std::vector<u32> v;
};

HomVec apply_hom(const ActionRep& rep, int op, const HomVec& x) {
  if (x.block < 0) return x;
  const BlockMap& bm = rep.ops[op][x.block];
  if (bm.dst < 0) return {-1, {}};
  return {bm.dst, bm.m.apply(x.v)};
}

// Applies a monomial (PBW order, rightmost factor first) to a homogeneous vector.
HomVec apply_monomial(const ActionRep& rep, const pbw::Monomial& m, HomVec x) {
  for (int b = static_cast<int>(m.size()) - 1; b >= 0 && x.block >= 0; --b)
    for (int k = 0; k < m[b] && x.block >= 0; ++k) {
      const int op = rep.op_of_basis(b);
      require(op >= 0, ErrorCode::InvalidArgument, "module lacks an operator used by the element");
      x = apply_hom(rep, op, x);
    }
  return x;
}

}  // namespace

std::vector<u32> apply_uelt(const ActionRep& rep, const pbw::UElt& u, const std::vector<u32>& v) {
  require(v.size() == rep.dim(), ErrorCode::InvalidArgument, "vector length mismatch");
  std::vector<u32> out(v.size(), 0);
  for (std::size_t s = 0; s < rep.blocks.size(); ++s) {
    const Block& blk = rep.blocks[s];
    HomVec x{static_cast<int>(s), std::vector<u32>(v.begin() + blk.offset, v.begin() + blk.offset + blk.dim)};
    for (const auto& [m, c] : u.terms()) {
      HomVec y = apply_monomial(rep, m, x);
      if (y.block < 0) continue;
      const Block& dst = rep.blocks[y.block];
      const u32 cc = ff::reduce(c, rep.p);
      for (std::size_t i = 0; i < dst.dim; ++i)
        out[dst.offset + i] = ff::add(out[dst.offset + i], ff::mul(y.v[i], cc, rep.p), rep.p);
    }
  }
  return out;
}

namespace {

// Matrix of u from block s to block s (u must preserve blocks).
Matrix diagonal_block(const ActionRep& rep, const pbw::UElt& u, std::size_t s) {
  const std::size_t d = rep.blocks[s].dim;
  Matrix m(rep.p, d, d);
  for (std::size_t j = 0; j < d; ++j) {
    HomVec x{static_cast<int>(s), std::vector<u32>(d, 0)};
    x.v[j] = 1;
    for (const auto& [mono, c] : u.terms()) {
      HomVec y = apply_monomial(rep, mono, x);
      if (y.block < 0) continue;
      require(y.block == static_cast<int>(s), ErrorCode::Precondition, "element does not have weight zero");
      const u32 cc = ff::reduce(c, rep.p);
      for (std::size_t i = 0; i < d; ++i) m.at(i, j) = ff::add(m.at(i, j), ff::mul(y.v[i], cc, rep.p), rep.p);
    }
  }
  return m;
}

}  // namespace

bool acts_invertibly(const ActionRep& rep, const pbw::UElt& u) {
  for (std::size_t s = 0; s < rep.blocks.size(); ++s) {
    const Matrix m = diagonal_block(rep, u, s);
    if (ff::rank(m) != m.rows()) return false;
  }
  return true;
}

bool acts_nonzero(const ActionRep& rep, const pbw::UElt& u) {
  for (std::size_t s = 0; s < rep.blocks.size(); ++s)
    for (std::size_t j = 0; j < rep.blocks[s].dim; ++j) {
      std::vector<u32> v(rep.dim(), 0);
      v[rep.blocks[s].offset + j] = 1;
      const auto y = apply_uelt(rep, u, v);
      if (std::any_of(y.begin(), y.end(), [](u32 x) { return x != 0; })) return true;
    }
  return false;
}

// ---------------------------------------------------------------- subspaces

std::size_t Subspace::dim() const {
  std::size_t d = 0;
  for (const auto& b : blocks) d += b.rows();
  return d;
}

SpinResult spin(const ActionRep& rep, int block, const std::vector<u32>& v) {
  SpinResult res;
  const std::size_t total = rep.dim();
  std::vector<ff::EchelonBasis> eb;
  for (const auto& b : rep.blocks) eb.emplace_back(rep.p, b.dim);
  std::size_t have = 0;
  auto offer = [&](int b, std::vector<u32> raw, int parent, int op) {
    if (eb[b].insert(raw)) {
      res.steps.push_back(SpinStep{b, std::move(raw), parent, op});
      ++have;
    }
  };
  require(v.size() == rep.blocks[block].dim, ErrorCode::InvalidArgument, "spin: vector length mismatch");
  offer(block, v, -1, -1);
  for (std::size_t i = 0; i < res.steps.size() && have < total; ++i)
    for (int op : rep.generators) {
      const BlockMap& bm = rep.ops[op][res.steps[i].block];
      if (bm.dst < 0) continue;
      std::vector<u32> y = bm.m.apply(res.steps[i].raw);
      if (std::any_of(y.begin(), y.end(), [](u32 x) { return x != 0; }))
        offer(bm.dst, std::move(y), static_cast<int>(i), op);
      if (have == total) break;
    }
  for (std::size_t b = 0; b < eb.size(); ++b) {
    if (eb[b].dim() == 0)
      res.space.blocks.emplace_back(rep.p, 0, rep.blocks[b].dim);
    else
      res.space.blocks.push_back(eb[b].to_rref());
  }
  return res;
}

Subspace spin_full(const ActionRep& rep, const std::vector<u32>& v) {
  require(v.size() == rep.dim(), ErrorCode::InvalidArgument, "spin: vector length mismatch");
  require(rep.weight_graded || rep.blocks.size() == 1, ErrorCode::Precondition,
          "spinning a general vector needs a weight grading");
  std::vector<ff::EchelonBasis> eb;
  for (const auto& b : rep.blocks) eb.emplace_back(rep.p, b.dim);
  for (std::size_t s = 0; s < rep.blocks.size(); ++s) {
    const Block& blk = rep.blocks[s];
    std::vector<u32> part(v.begin() + blk.offset, v.begin() + blk.offset + blk.dim);
    if (std::none_of(part.begin(), part.end(), [](u32 x) { return x != 0; })) continue;
    const SpinResult r = spin(rep, static_cast<int>(s), part);
    for (std::size_t b = 0; b < rep.blocks.size(); ++b)
      for (std::size_t i = 0; i < r.space.blocks[b].rows(); ++i) {
        auto row = r.space.blocks[b].row(i);
        eb[b].insert(std::vector<u32>(row.begin(), row.end()));
      }
  }
  Subspace out;
  for (std::size_t b = 0; b < eb.size(); ++b)
    out.blocks.push_back(eb[b].dim() ? eb[b].to_rref() : Matrix(rep.p, 0, rep.blocks[b].dim));
  return out;
}

Subspace annihilator(const ActionRep& rep, const Subspace& dual) {
  Subspace out;
  for (std::size_t b = 0; b < rep.blocks.size(); ++b) {
    const std::size_t d = rep.blocks[b].dim;
    const Matrix& u = dual.blocks[b];
    std::vector<std::vector<u32>> ker;
    if (u.rows() == 0) {
      for (std::size_t j = 0; j < d; ++j) {
        std::vector<u32> e(d, 0);
        e[j] = 1;
        ker.push_back(std::move(e));
      }
    } else {
      ker = ff::nullspace(u);
    }
    Matrix m(rep.p, ker.size(), d);
    for (std::size_t i = 0; i < ker.size(); ++i) std::copy(ker[i].begin(), ker[i].end(), m.row(i).begin());
    out.blocks.push_back(ker.empty() ? m : ff::rref(m).reduced);
  }
  return out;
}

namespace {

std::vector<std::size_t> pivots_of(const Matrix& rref_rows) {
  std::vector<std::size_t> piv;
  for (std::size_t i = 0; i < rref_rows.rows(); ++i) {
    std::size_t c = 0;
    while (c < rref_rows.cols() && rref_rows.at(i, c) == 0) ++c;
    require(c < rref_rows.cols(), ErrorCode::Internal, "zero row in echelon basis");
    piv.push_back(c);
  }
  return piv;
}

// v minus its projection along the reduced echelon rows.
std::vector<u32> reduce_mod(const Matrix& rows, const std::vector<std::size_t>& piv, std::vector<u32> v, u32 p) {
  for (std::size_t i = 0; i < piv.size(); ++i) {
    const u32 c = v[piv[i]];
    if (!c) continue;
    const u32 nc = p - c;
    auto r = rows.row(i);
    for (std::size_t j = 0; j < v.size(); ++j)
      if (r[j]) v[j] = (v[j] + nc * r[j]) % p;
  }
  return v;
}

}  // namespace

bool is_invariant(const ActionRep& rep, const Subspace& s) {
  for (std::size_t k = 0; k < rep.ops.size(); ++k)
    for (std::size_t b = 0; b < rep.blocks.size(); ++b) {
      const BlockMap& bm = rep.ops[k][b];
      if (bm.dst < 0) continue;
      const Matrix& src = s.blocks[b];
      const Matrix& dst = s.blocks[bm.dst];
      const auto piv = pivots_of(dst);
      for (std::size_t i = 0; i < src.rows(); ++i) {
        auto row = src.row(i);
        auto y = bm.m.apply(std::span<const u32>(row.data(), row.size()));
        y = reduce_mod(dst, piv, std::move(y), rep.p);
        if (std::any_of(y.begin(), y.end(), [](u32 x) { return x != 0; })) return false;
      }
    }
  return true;
}

ActionRep submodule(const ActionRep& rep, const Subspace& s) {
  ActionRep out;
  out.p = rep.p;
  out.op_basis = rep.op_basis;
  out.generators = rep.generators;
  out.chi = rep.chi;
  out.weight_graded = rep.weight_graded;
  out.label = "sub(" + rep.label + ")";
  std::vector<int> remap(rep.blocks.size(), -1);
  std::size_t off = 0;
  for (std::size_t b = 0; b < rep.blocks.size(); ++b) {
    const std::size_t d = s.blocks[b].rows();
    if (!d) continue;
    remap[b] = static_cast<int>(out.blocks.size());
    out.blocks.push_back(Block{rep.blocks[b].weight, d, off});
    off += d;
  }
  std::vector<std::vector<std::size_t>> piv(rep.blocks.size());
  for (std::size_t b = 0; b < rep.blocks.size(); ++b) piv[b] = pivots_of(s.blocks[b]);
  for (std::size_t k = 0; k < rep.ops.size(); ++k) {
    std::vector<BlockMap> maps(out.blocks.size());
    for (std::size_t b = 0; b < rep.blocks.size(); ++b) {
      if (remap[b] < 0) continue;
      const BlockMap& bm = rep.ops[k][b];
      if (bm.dst < 0 || remap[bm.dst] < 0) continue;
      const Matrix& src = s.blocks[b];
      Matrix m(rep.p, s.blocks[bm.dst].rows(), src.rows());
      for (std::size_t j = 0; j < src.rows(); ++j) {
        auto row = src.row(j);
        const auto y = bm.m.apply(std::span<const u32>(row.data(), row.size()));
        for (std::size_t i = 0; i < piv[bm.dst].size(); ++i) m.at(i, j) = y[piv[bm.dst][i]];
      }
      if (!m.is_zero()) maps[remap[b]] = BlockMap{remap[bm.dst], std::move(m)};
    }
    out.ops.push_back(std::move(maps));
  }
  return out;
}

ActionRep quotient(const ActionRep& rep, const Subspace& s) {
  ActionRep out;
  out.p = rep.p;
  out.op_basis = rep.op_basis;
  out.generators = rep.generators;
  out.chi = rep.chi;
  out.weight_graded = rep.weight_graded;
  out.label = "quo(" + rep.label + ")";
  std::vector<int> remap(rep.blocks.size(), -1);
  std::vector<std::vector<std::size_t>> piv(rep.blocks.size()), free(rep.blocks.size());
  std::size_t off = 0;
  for (std::size_t b = 0; b < rep.blocks.size(); ++b) {
    piv[b] = pivots_of(s.blocks[b]);
    std::vector<bool> is_piv(rep.blocks[b].dim, false);
    for (auto c : piv[b]) is_piv[c] = true;
    for (std::size_t c = 0; c < rep.blocks[b].dim; ++c)
      if (!is_piv[c]) free[b].push_back(c);
    if (free[b].empty()) continue;
    remap[b] = static_cast<int>(out.blocks.size());
    out.blocks.push_back(Block{rep.blocks[b].weight, free[b].size(), off});
    off += free[b].size();
  }
  for (std::size_t k = 0; k < rep.ops.size(); ++k) {
    std::vector<BlockMap> maps(out.blocks.size());
    for (std::size_t b = 0; b < rep.blocks.size(); ++b) {
      if (remap[b] < 0) continue;
      const BlockMap& bm = rep.ops[k][b];
      if (bm.dst < 0 || remap[bm.dst] < 0) continue;
      const std::size_t dd = rep.blocks[bm.dst].dim;
      Matrix m(rep.p, free[bm.dst].size(), free[b].size());
      for (std::size_t j = 0; j < free[b].size(); ++j) {
        std::vector<u32> y(dd);
        for (std::size_t i = 0; i < dd; ++i) y[i] = bm.m.at(i, free[b][j]);
        y = reduce_mod(s.blocks[bm.dst], piv[bm.dst], std::move(y), rep.p);
        for (std::size_t i = 0; i < free[bm.dst].size(); ++i) m.at(i, j) = y[free[bm.dst][i]];
      }
      if (!m.is_zero()) maps[remap[b]] = BlockMap{remap[bm.dst], std::move(m)};
    }
    out.ops.push_back(std::move(maps));
  }
  return out;
}

// ---------------------------------------------------------------- storage

namespace {

void put_u32(std::ostream& os, std::uint32_t x) {
  unsigned char b[4] = {static_cast<unsigned char>(x), static_cast<unsigned char>(x >> 8),
                        static_cast<unsigned char>(x >> 16), static_cast<unsigned char>(x >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  require(static_cast<bool>(is), ErrorCode::Io, "truncated module file");
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_binary(const ActionRep& rep, std::ostream& os) {
  os.write("CHVR", 4);
  put_u32(os, 1);
  put_u32(os, rep.p);
  put_u32(os, static_cast<std::uint32_t>(rep.blocks.size()));
  const std::size_t l = rep.blocks.empty() ? 0 : rep.blocks[0].weight.size();
  put_u32(os, static_cast<std::uint32_t>(l));
  for (const auto& b : rep.blocks) {
    for (auto w : b.weight) put_u32(os, w);
    put_u32(os, static_cast<std::uint32_t>(b.dim));
  }
  put_u32(os, static_cast<std::uint32_t>(rep.ops.size()));
  for (std::size_t k = 0; k < rep.ops.size(); ++k) {
    put_u32(os, static_cast<std::uint32_t>(rep.op_basis[k]));
    for (const auto& bm : rep.ops[k]) {
      put_u32(os, static_cast<std::uint32_t>(bm.dst));
      if (bm.dst >= 0)
        for (auto x : bm.m.data()) put_u32(os, x);
    }
  }
  put_u32(os, static_cast<std::uint32_t>(rep.generators.size()));
  for (int g : rep.generators) put_u32(os, static_cast<std::uint32_t>(g));
  put_u32(os, static_cast<std::uint32_t>(rep.chi.size()));
  for (auto c : rep.chi) put_u32(os, c);
  require(static_cast<bool>(os), ErrorCode::Io, "failed to write module");
}

ActionRep read_binary(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  require(is && std::memcmp(magic, "CHVR", 4) == 0, ErrorCode::Io, "not a module file");
  require(get_u32(is) == 1, ErrorCode::Io, "unsupported module file version");
  ActionRep rep;
  rep.p = get_u32(is);
  ff::check_modulus(rep.p);
  const std::uint32_t nb = get_u32(is), l = get_u32(is);
  std::size_t off = 0;
  for (std::uint32_t b = 0; b < nb; ++b) {
    Block blk;
    for (std::uint32_t i = 0; i < l; ++i) blk.weight.push_back(get_u32(is));
    blk.dim = get_u32(is);
    blk.offset = off;
    off += blk.dim;
    rep.blocks.push_back(blk);
  }
  rep.weight_graded = l > 0;
  const std::uint32_t nops = get_u32(is);
  for (std::uint32_t k = 0; k < nops; ++k) {
    rep.op_basis.push_back(static_cast<int>(get_u32(is)));
    std::vector<BlockMap> maps(nb);
    for (std::uint32_t s = 0; s < nb; ++s) {
      const int dst = static_cast<int>(get_u32(is));
      if (dst < 0) continue;
      require(dst < static_cast<int>(nb), ErrorCode::Io, "bad block index in module file");
      maps[s].dst = dst;
      maps[s].m = Matrix(rep.p, rep.blocks[dst].dim, rep.blocks[s].dim);
      for (auto& x : maps[s].m.data()) {
        x = get_u32(is);
        require(x < rep.p, ErrorCode::Io, "entry out of range in module file");
      }
    }
    rep.ops.push_back(std::move(maps));
  }
  const std::uint32_t ng = get_u32(is);
  for (std::uint32_t i = 0; i < ng; ++i) rep.generators.push_back(static_cast<int>(get_u32(is)));
  const std::uint32_t nc = get_u32(is);
  for (std::uint32_t i = 0; i < nc; ++i) rep.chi.push_back(get_u32(is));
  rep.label = "loaded";
  return rep;
}

std::string to_json(const ActionRep& rep) {
  nlohmann::json j;
  j["format"] = "chevrep.module";
  j["version"] = 1;
  j["p"] = rep.p;
  j["dim"] = rep.dim();
  j["label"] = rep.label;
  j["weight_graded"] = rep.weight_graded;
  j["chi"] = rep.chi;
  j["generators"] = rep.generators;
  auto& blocks = j["blocks"] = nlohmann::json::array();
  for (const auto& b : rep.blocks) blocks.push_back({{"weight", b.weight}, {"dim", b.dim}});
  auto& ops = j["operators"] = nlohmann::json::array();
  for (std::size_t k = 0; k < rep.ops.size(); ++k) {
    nlohmann::json o;
    o["basis"] = rep.op_basis[k];
    auto& maps = o["maps"] = nlohmann::json::array();
    for (std::size_t s = 0; s < rep.ops[k].size(); ++s) {
      const BlockMap& bm = rep.ops[k][s];
      if (bm.dst < 0) continue;
      maps.push_back({{"src", s}, {"dst", bm.dst}, {"entries", bm.m.data()}});
    }
    ops.push_back(std::move(o));
  }
  return j.dump();
}

ActionRep from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Io, std::string("invalid module JSON: ") + e.what());
  }
  try {
    require(j.at("format") == "chevrep.module", ErrorCode::Io, "not a module document");
    ActionRep rep;
    rep.p = j.at("p").get<u32>();
    ff::check_modulus(rep.p);
    rep.label = j.value("label", std::string("loaded"));
    rep.weight_graded = j.value("weight_graded", false);
    rep.chi = j.value("chi", std::vector<u32>{});
    rep.generators = j.at("generators").get<std::vector<int>>();
    std::size_t off = 0;
    for (const auto& b : j.at("blocks")) {
      Block blk{b.at("weight").get<std::vector<u32>>(), b.at("dim").get<std::size_t>(), off};
      off += blk.dim;
      rep.blocks.push_back(std::move(blk));
    }
    for (const auto& o : j.at("operators")) {
      rep.op_basis.push_back(o.at("basis").get<int>());
      std::vector<BlockMap> maps(rep.blocks.size());
      for (const auto& m : o.at("maps")) {
        const auto s = m.at("src").get<std::size_t>();
        const auto d = m.at("dst").get<int>();
        require(s < rep.blocks.size() && d >= 0 && d < static_cast<int>(rep.blocks.size()), ErrorCode::Io,
                "bad block index in module JSON");
        maps[s].dst = d;
        maps[s].m = Matrix(rep.p, rep.blocks[d].dim, rep.blocks[s].dim);
        const auto entries = m.at("entries").get<std::vector<u32>>();
        require(entries.size() == maps[s].m.data().size(), ErrorCode::Io, "bad block size in module JSON");
        maps[s].m.data() = entries;
      }
      rep.ops.push_back(std::move(maps));
    }
    return rep;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Io, std::string("malformed module JSON: ") + e.what());
  }
}

}  // namespace chevrep::modrep
