#include <algorithm>
#include <map>

#include "chevrep/error.hpp"
#include "chevrep/modrep.hpp"

namespace chevrep::modrep {

namespace {

bool nonzero(const std::vector<u32>& v) {
  return std::any_of(v.begin(), v.end(), [](u32 x) { return x != 0; });
}

u32 draw(std::mt19937_64& rng, u32 p) { return static_cast<u32>(rng() % p); }

// Scalar by which sum_i c_i h_i acts on a block.
u32 coroot_scalar(const ActionRep& rep, const std::vector<u32>& layer, std::size_t block) {
  const std::size_t ng = rep.generators.size();
  const auto& w = rep.blocks[block].weight;
  u64 s = 0;
  for (std::size_t i = 0; i < w.size() && ng + i < layer.size(); ++i) s += static_cast<u64>(layer[ng + i]) * w[i];
  return static_cast<u32>(s % rep.p);
}

int smallest_block(const ActionRep& rep) {
  int best = -1;
  for (std::size_t b = 0; b < rep.blocks.size(); ++b)
    if (rep.blocks[b].dim && (best < 0 || rep.blocks[b].dim < rep.blocks[best].dim)) best = static_cast<int>(b);
  require(best >= 0, ErrorCode::InvalidArgument, "module is zero");
  return best;
}

ThetaRecipe random_recipe(const ActionRep& rep, int block, std::mt19937_64& rng) {
  ThetaRecipe r;
  r.block = block;
  const int k = 2 + static_cast<int>(rng() % 5);
  const std::size_t width = rep.generators.size() + (rep.weight_graded ? rep.blocks[0].weight.size() : 0);
  for (int i = 0; i < k; ++i) {
    std::vector<u32> layer(width);
    for (auto& c : layer) c = draw(rng, rep.p);
    r.layers.push_back(std::move(layer));
  }
  r.shift = draw(rng, rep.p);
  return r;
}

std::size_t pow_count(u32 q, std::size_t k, std::size_t cap) {
  // (q^k - 1) / (q - 1), saturating at cap + 1.
  std::size_t total = 0, term = 1;
  for (std::size_t i = 0; i < k; ++i) {
    total += term;
    if (total > cap) return cap + 1;
    term *= q;
    if (term > cap) term = cap + 1;
  }
  return total;
}

// Calls fn on one representative of every F_p-line of span(basis) until fn
// returns false. Returns the number of lines visited.
template <class Fn>
std::size_t for_each_line(const std::vector<std::vector<u32>>& basis, u32 p, Fn&& fn) {
  const std::size_t k = basis.size();
  const std::size_t n = k ? basis[0].size() : 0;
  std::size_t visited = 0;
  // Normalised coordinate vectors: leading coordinate 1.
  for (std::size_t lead = 0; lead < k; ++lead) {
    std::vector<u32> coords(k - lead - 1, 0);
    while (true) {
      std::vector<u32> v(basis[lead]);
      for (std::size_t i = 0; i < coords.size(); ++i)
        if (coords[i])
          for (std::size_t j = 0; j < n; ++j) v[j] = ff::add(v[j], ff::mul(coords[i], basis[lead + 1 + i][j], p), p);
      ++visited;
      if (!fn(v)) return visited;
      std::size_t i = 0;
      while (i < coords.size() && ++coords[i] == p) coords[i++] = 0;
      if (i == coords.size()) break;
    }
  }
  return visited;
}

bool spins_full(const ActionRep& rep, int block, const std::vector<u32>& v, Subspace* proper) {
  SpinResult r = spin(rep, block, v);
  if (r.space.dim() == rep.dim()) return true;
  if (proper) *proper = std::move(r.space);
  return false;
}

// Tries one theta; returns true if it decided the question.
bool try_theta(const ActionRep& rep, const ActionRep& dual, const ThetaRecipe& recipe, const NortonOptions& opt,
               u64 factor_seed, NortonResult& out) {
  const Matrix theta = theta_block(rep, recipe);
  const auto factors = ff::factor_poly(ff::charpoly(theta), factor_seed);
  std::vector<const ff::Factor*> order;
  for (const auto& f : factors) order.push_back(&f);
  std::stable_sort(order.begin(), order.end(),
                   [](const ff::Factor* a, const ff::Factor* b) { return a->poly.degree() < b->poly.degree(); });

  for (int pass = 0; pass < 2; ++pass) {
    for (const ff::Factor* f : order) {
      const std::size_t d = static_cast<std::size_t>(f->poly.degree());
      const Matrix ft = ff::eval(f->poly, theta);
      const auto kernel = ff::nullspace(ft);
      const std::size_t nullity = kernel.size();
      const bool exact = nullity == d;
      if (pass == 0 && !exact) continue;
      if (pass == 1 && (exact || d != 1 || pow_count(rep.p, nullity, opt.max_lines) > opt.max_lines)) continue;

      Subspace proper;
      std::size_t lines = 1;
      if (exact) {
        if (!spins_full(rep, recipe.block, kernel[0], &proper)) {
          out.irreducible = false;
          out.red.sub = std::move(proper);
          out.red.from_dual = false;
          return true;
        }
      } else {
        bool found = false;
        lines = for_each_line(kernel, rep.p, [&](const std::vector<u32>& v) {
          found = !spins_full(rep, recipe.block, v, &proper);
          return !found;
        });
        if (found) {
          out.irreducible = false;
          out.red.sub = std::move(proper);
          out.red.from_dual = false;
          return true;
        }
      }
      const auto dual_kernel = ff::nullspace(ft.transposed());
      require(!dual_kernel.empty(), ErrorCode::Internal, "transposed kernel is empty");
      if (!spins_full(dual, recipe.block, dual_kernel[0], &proper)) {
        out.irreducible = false;
        out.red.sub = annihilator(rep, proper);
        out.red.from_dual = true;
        return true;
      }
      out.irreducible = true;
      out.irr.theta = recipe;
      out.irr.factor = f->poly;
      out.irr.nullity = nullity;
      out.irr.v = exact ? kernel[0] : kernel.front();
      out.irr.w = dual_kernel[0];
      out.irr.exhaustive = !exact;
      out.irr.lines = lines;
      return true;
    }
  }
  return false;
}

}  // namespace

Matrix theta_block(const ActionRep& rep, const ThetaRecipe& r) {
  const u32 p = rep.p;
  const std::size_t d0 = rep.blocks[r.block].dim;
  std::map<int, Matrix> state;
  state.emplace(r.block, Matrix::identity(p, d0));
  for (const auto& layer : r.layers) {
    std::map<int, Matrix> next;
    auto slot = [&](int b) -> Matrix& {
      auto it = next.find(b);
      if (it == next.end()) it = next.emplace(b, Matrix(p, rep.blocks[b].dim, d0)).first;
      return it->second;
    };
    for (const auto& [b, m] : state) {
      for (std::size_t g = 0; g < rep.generators.size(); ++g) {
        if (!layer[g]) continue;
        const BlockMap& bm = rep.ops[rep.generators[g]][b];
        if (bm.dst < 0) continue;
        Matrix& acc = slot(bm.dst);
        if (layer[g] == 1) {
          ff::gemm_acc(bm.m, m, acc);
        } else {
          ff::gemm_acc(bm.m.scaled(layer[g]), m, acc);
        }
      }
      if (rep.weight_graded) {
        const u32 c = coroot_scalar(rep, layer, b);
        if (c) slot(b).add_scaled(m, c);
      }
    }
    state = std::move(next);
  }
  Matrix theta = Matrix::identity(p, d0).scaled(r.shift);
  if (auto it = state.find(r.block); it != state.end()) theta.add_scaled(it->second, 1);
  return theta;
}

Matrix theta_block_dense(const ActionRep& rep, const ThetaRecipe& r) {
  const u32 p = rep.p;
  const Block& blk = rep.blocks[r.block];
  const std::size_t n = rep.dim();
  Matrix theta(p, blk.dim, blk.dim);
  for (std::size_t j = 0; j < blk.dim; ++j) {
    std::vector<u32> v(n, 0);
    v[blk.offset + j] = 1;
    for (const auto& layer : r.layers) {
      std::vector<u32> next(n, 0);
      for (std::size_t g = 0; g < rep.generators.size(); ++g) {
        if (!layer[g]) continue;
        const auto y = rep.apply(rep.generators[g], v);
        for (std::size_t i = 0; i < n; ++i) next[i] = ff::add(next[i], ff::mul(y[i], layer[g], p), p);
      }
      if (rep.weight_graded)
        for (std::size_t b = 0; b < rep.blocks.size(); ++b) {
          const u32 c = coroot_scalar(rep, layer, b);
          for (std::size_t i = 0; i < rep.blocks[b].dim; ++i) {
            const std::size_t k = rep.blocks[b].offset + i;
            next[k] = ff::add(next[k], ff::mul(v[k], c, p), p);
          }
        }
      v = std::move(next);
    }
    for (std::size_t i = 0; i < blk.dim; ++i)
      theta.at(i, j) = ff::add(v[blk.offset + i], i == j ? r.shift : 0, p);
  }
  return theta;
}

NortonResult norton_test(const ActionRep& rep, std::mt19937_64& rng, const NortonOptions& opt) {
  const int block = smallest_block(rep);
  const ActionRep dual = rep.transposed();
  NortonResult out;
  for (int a = 0; a < opt.random_budget; ++a) {
    const ThetaRecipe recipe = random_recipe(rep, block, rng);
    if (try_theta(rep, dual, recipe, opt, rng(), out)) {
      if (out.irreducible) out.irr.attempts = a + 1;
      return out;
    }
  }
  std::mt19937_64 sweep(0x6d65617461786531ULL);
  for (int a = 0; a < opt.sweep_budget; ++a) {
    const ThetaRecipe recipe = random_recipe(rep, block, sweep);
    if (try_theta(rep, dual, recipe, opt, sweep(), out)) {
      if (out.irreducible) out.irr.attempts = opt.random_budget + a + 1;
      return out;
    }
  }
  fail(ErrorCode::Budget, "irreducibility test undecided after " +
                              std::to_string(opt.random_budget + opt.sweep_budget) + " attempts on a module of dimension " +
                              std::to_string(rep.dim()));
}

NortonResult norton_test(const ActionRep& rep, u64 seed, const NortonOptions& opt) {
  std::mt19937_64 rng(seed);
  return norton_test(rep, rng, opt);
}

namespace {

// Spin by repeated closure over all blocks until stable; shares nothing with
// the standard-basis spin beyond the echelon routine.
std::size_t closure_dim(const ActionRep& rep, int block, const std::vector<u32>& v) {
  std::vector<Matrix> basis(rep.blocks.size());
  for (std::size_t b = 0; b < rep.blocks.size(); ++b) basis[b] = Matrix(rep.p, 0, rep.blocks[b].dim);
  Matrix seed(rep.p, 1, v.size());
  std::copy(v.begin(), v.end(), seed.row(0).begin());
  basis[block] = ff::rref(seed).reduced;
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t b = 0; b < rep.blocks.size(); ++b) {
      if (!basis[b].rows()) continue;
      for (int g : rep.generators) {
        const BlockMap& bm = rep.ops[g][b];
        if (bm.dst < 0) continue;
        const Matrix img = bm.m * basis[b].transposed();
        const Matrix& old = basis[bm.dst];
        Matrix stacked(rep.p, old.rows() + img.cols(), old.cols());
        for (std::size_t i = 0; i < old.rows(); ++i)
          std::copy(old.row(i).begin(), old.row(i).end(), stacked.row(i).begin());
        for (std::size_t j = 0; j < img.cols(); ++j)
          for (std::size_t i = 0; i < img.rows(); ++i) stacked.at(old.rows() + j, i) = img.at(i, j);
        auto rr = ff::rref(stacked);
        if (rr.rank > old.rows()) {
          Matrix nb(rep.p, rr.rank, old.cols());
          for (std::size_t i = 0; i < rr.rank; ++i)
            std::copy(rr.reduced.row(i).begin(), rr.reduced.row(i).end(), nb.row(i).begin());
          basis[bm.dst] = std::move(nb);
          grew = true;
        }
      }
    }
  }
  std::size_t d = 0;
  for (const auto& m : basis) d += m.rows();
  return d;
}

}  // namespace

bool replay_irreducible(const ActionRep& rep, const IrreducibleCert& c) {
  if (c.theta.block < 0 || c.theta.block >= static_cast<int>(rep.blocks.size())) return false;
  if (c.factor.is_zero() || !ff::is_irreducible(c.factor)) return false;
  const Matrix theta = theta_block_dense(rep, c.theta);
  const Matrix ft = ff::eval(c.factor, theta);
  const auto kernel = ff::nullspace(ft);
  if (kernel.size() != c.nullity || kernel.empty()) return false;
  if (!nonzero(c.v) || nonzero(ft.apply(c.v))) return false;
  if (!nonzero(c.w) || nonzero(ft.transposed().apply(c.w))) return false;
  const std::size_t n = rep.dim();
  const ActionRep dual = rep.transposed();
  if (closure_dim(dual, c.theta.block, c.w) != n) return false;
  if (!c.exhaustive) {
    if (c.nullity != static_cast<std::size_t>(c.factor.degree())) return false;
    return closure_dim(rep, c.theta.block, c.v) == n;
  }
  if (c.factor.degree() != 1) return false;
  bool ok = true;
  for_each_line(kernel, rep.p, [&](const std::vector<u32>& v) {
    ok = closure_dim(rep, c.theta.block, v) == n;
    return ok;
  });
  return ok;
}

bool replay_reducible(const ActionRep& rep, const ReducibleCert& c) {
  if (c.sub.blocks.size() != rep.blocks.size()) return false;
  const std::size_t d = c.sub.dim();
  if (d == 0 || d >= rep.dim()) return false;
  for (std::size_t b = 0; b < rep.blocks.size(); ++b)
    if (ff::rank(c.sub.blocks[b]) != c.sub.blocks[b].rows()) return false;
  return is_invariant(rep, c.sub);
}

int endomorphism_degree(const ActionRep& rep, const IrreducibleCert& c) {
  const std::size_t deg = static_cast<std::size_t>(c.factor.degree());
  if (deg == 1 && c.nullity == 1) return 1;
  const u32 p = rep.p;
  const Matrix theta = theta_block(rep, c.theta);
  const auto kernel = ff::nullspace(ff::eval(c.factor, theta));
  const SpinResult tree = spin(rep, c.theta.block, c.v);
  require(tree.space.dim() == rep.dim(), ErrorCode::Internal, "certificate vector does not generate the module");

  const std::size_t nb = rep.blocks.size();
  // S_b: columns are the standard basis vectors found in block b.
  std::vector<std::vector<int>> members(nb);
  for (std::size_t i = 0; i < tree.steps.size(); ++i) members[tree.steps[i].block].push_back(static_cast<int>(i));
  std::vector<Matrix> s_inv(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t d = rep.blocks[b].dim;
    if (!d) continue;
    Matrix s(p, d, d);
    for (std::size_t j = 0; j < members[b].size(); ++j)
      for (std::size_t i = 0; i < d; ++i) s.at(i, j) = tree.steps[members[b][j]].raw[i];
    s_inv[b] = ff::inverse(s);
  }

  std::vector<std::vector<u32>> columns;
  for (const auto& u : kernel) {
    // Image of each standard basis vector under the map sending v to u.
    std::vector<std::vector<u32>> img(tree.steps.size());
    for (std::size_t i = 0; i < tree.steps.size(); ++i) {
      const SpinStep& st = tree.steps[i];
      if (st.parent < 0) {
        img[i] = u;
      } else {
        const BlockMap& bm = rep.ops[st.op][tree.steps[st.parent].block];
        img[i] = bm.m.apply(img[st.parent]);
      }
    }
    std::vector<Matrix> phi(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      const std::size_t d = rep.blocks[b].dim;
      if (!d) continue;
      Matrix cb(p, d, d);
      for (std::size_t j = 0; j < members[b].size(); ++j)
        for (std::size_t i = 0; i < d; ++i) cb.at(i, j) = img[members[b][j]][i];
      phi[b] = cb * s_inv[b];
    }
    std::vector<u32> col;
    for (int g : rep.generators)
      for (std::size_t b = 0; b < nb; ++b) {
        const BlockMap& bm = rep.ops[g][b];
        if (bm.dst < 0 || !rep.blocks[b].dim) continue;
        const Matrix diff = bm.m * phi[b] - phi[bm.dst] * bm.m;
        col.insert(col.end(), diff.data().begin(), diff.data().end());
      }
    columns.push_back(std::move(col));
  }
  if (columns.empty() || columns[0].empty()) return static_cast<int>(kernel.size());
  Matrix sys(p, columns[0].size(), columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (std::size_t i = 0; i < columns[j].size(); ++i) sys.at(i, j) = columns[j][i];
  return static_cast<int>(kernel.size() - ff::rank(sys));
}

std::vector<CompositionReport::Entry> CompositionReport::multiset() const {
  std::map<std::pair<std::size_t, int>, int> m;
  for (const auto& f : factors) ++m[{f.dim, f.endo_degree}];
  std::vector<Entry> out;
  for (const auto& [k, c] : m) out.push_back(Entry{k.first, k.second, c});
  return out;
}

std::vector<std::size_t> CompositionReport::closure_dims() const {
  std::vector<std::size_t> out;
  for (const auto& f : factors)
    for (int i = 0; i < f.endo_degree; ++i) out.push_back(f.dim / static_cast<std::size_t>(f.endo_degree));
  std::sort(out.begin(), out.end());
  return out;
}

CompositionReport chop(const ActionRep& rep, u64 seed, const ChopOptions& opt) {
  CompositionReport report;
  report.total = rep.dim();
  report.seed = seed;
  std::mt19937_64 rng(seed);
  std::vector<ActionRep> work;
  if (rep.dim()) work.push_back(rep);
  while (!work.empty()) {
    ActionRep cur = std::move(work.back());
    work.pop_back();
    NortonResult nr = norton_test(cur, rng, opt.norton);
    if (!nr.irreducible) {
      if (opt.replay)
        require(replay_reducible(cur, nr.red), ErrorCode::Internal, "submodule certificate failed to replay");
      ++report.splits;
      ActionRep q = quotient(cur, nr.red.sub);
      ActionRep s = submodule(cur, nr.red.sub);
      work.push_back(std::move(q));
      work.push_back(std::move(s));
      continue;
    }
    FactorRecord fr;
    fr.dim = cur.dim();
    fr.endo_degree = endomorphism_degree(cur, nr.irr);
    fr.cert = nr.irr;
    if (opt.replay) {
      fr.replayed = replay_irreducible(cur, nr.irr);
      report.certificates_replayed = report.certificates_replayed && fr.replayed;
    } else {
      report.certificates_replayed = false;
    }
    if (opt.keep_factor_reps) fr.rep = std::make_shared<const ActionRep>(std::move(cur));
    report.factors.push_back(std::move(fr));
  }
  std::stable_sort(report.factors.begin(), report.factors.end(), [](const FactorRecord& a, const FactorRecord& b) {
    return std::pair(a.dim, a.endo_degree) < std::pair(b.dim, b.endo_degree);
  });
  return report;
}

}  // namespace chevrep::modrep
