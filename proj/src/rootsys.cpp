#include "chevrep/rootsys.hpp"

#include <cstdlib>
#include <algorithm>
#include <numeric>

#include "chevrep/error.hpp"

namespace chevrep {

int inner(const Root& a, const Root& b) {
  require(a.size() == b.size(), ErrorCode::InvalidArgument, "roots of different rank");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0);
}

int cartan_integer(const Root& beta, const Root& alpha) {
  const int aa = inner(alpha, alpha);
  require(aa != 0, ErrorCode::InvalidArgument, "cartan_integer: alpha is zero");
  const int num = 2 * inner(beta, alpha);
  require(num % aa == 0, ErrorCode::InvalidArgument, "cartan_integer: non-integral pairing");
  return num / aa;
}

Root reflect(const Root& beta, const Root& alpha) {
  const int c = cartan_integer(beta, alpha);
  Root r = beta;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= c * alpha[i];
  return r;
}

Root negate(const Root& r) {
  Root out = r;
  for (auto& x : out) x = -x;
  return out;
}

Root add(const Root& a, const Root& b) {
  Root out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

std::string root_name(const Root& r) {
  std::string s;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const int c = r[i];
    if (c == 0) continue;
    if (c < 0)
      s += "-";
    else if (!s.empty())
      s += "+";
    if (std::abs(c) != 1) s += std::to_string(std::abs(c));
    s += "e" + std::to_string(i + 1);
  }
  return s.empty() ? "0" : s;
}

RootSystem RootSystem::build(RootType type, int rank) {
  require(rank >= 1, ErrorCode::InvalidArgument, "root system rank must be at least 1");
  if (type == RootType::C)
    require(rank >= 2, ErrorCode::InvalidArgument, "type C requires rank >= 2 (use A1 for rank 1)");
  else
    require(rank == 1, ErrorCode::InvalidArgument, "type A1 has rank 1");
  RootSystem rs;
  rs.type_ = type;
  rs.rank_ = rank;
  const int l = rank;
  std::vector<Root> all;
  for (int i = 0; i < l; ++i)
    for (int s : {1, -1}) {
      Root r(l, 0);
      r[i] = 2 * s;
      all.push_back(r);
    }
  for (int i = 0; i < l; ++i)
    for (int j = i + 1; j < l; ++j)
      for (int si : {1, -1})
        for (int sj : {1, -1}) {
          Root r(l, 0);
          r[i] = si;
          r[j] = sj;
          all.push_back(r);
        }
  rs.simple_.assign(l, -1);

  auto height_of = [&](const Root& r) {
    int h = 0, run = 0;
    for (int i = 0; i < l; ++i) {
      run += r[i];
      if (i + 1 < l) h += run;
    }
    return h + run / 2;
  };
  std::sort(all.begin(), all.end(), [&](const Root& a, const Root& b) {
    const int ha = height_of(a), hb = height_of(b);
    if (ha != hb) return ha < hb;
    return a > b;
  });
  rs.roots_ = all;
  for (std::size_t k = 0; k < all.size(); ++k) {
    rs.index_[all[k]] = static_cast<int>(k);
    rs.height_.push_back(height_of(all[k]));
  }
  for (std::size_t k = 0; k < all.size(); ++k) {
    rs.neg_.push_back(rs.index_.at(negate(all[k])));
    (rs.height_[k] > 0 ? rs.positive_ : rs.negative_).push_back(static_cast<int>(k));
  }
  for (int i = 0; i + 1 < l; ++i) {
    Root r(l, 0);
    r[i] = 1;
    r[i + 1] = -1;
    rs.simple_[i] = rs.index_.at(r);
  }
  {
    Root r(l, 0);
    r[l - 1] = 2;
    rs.simple_[l - 1] = rs.index_.at(r);
  }
  rs.cartan_.assign(l, std::vector<int>(l, 0));
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) rs.cartan_[i][j] = cartan_integer(rs.simple_root(i), rs.simple_root(j));
  return rs;
}

int RootSystem::index_of(const Root& r) const {
  auto it = index_.find(r);
  return it == index_.end() ? -1 : it->second;
}

std::vector<int> RootSystem::simple_coords(const Root& r) const {
  std::vector<int> a(rank_, 0);
  int run = 0;
  for (int i = 0; i < rank_; ++i) {
    run += r[i];
    if (i + 1 < rank_) a[i] = run;
  }
  require(run % 2 == 0, ErrorCode::InvalidArgument, "vector is not in the root lattice");
  a[rank_ - 1] = run / 2;
  return a;
}

std::vector<int> RootSystem::coroot_coords(const Root& r) const {
  const int rr = inner(r, r);
  require(rr == 2 || rr == 4, ErrorCode::InvalidArgument, "coroot_coords: not a root");
  std::vector<int> b(rank_, 0);
  int run = 0;
  for (int i = 0; i < rank_; ++i) {
    // r^vee = 2 r / (r, r) in epsilon coordinates.
    run += 2 * r[i] / rr;
    b[i] = run;
  }
  return b;
}

bool RootSystem::is_long(int idx) const { return inner(roots_[idx], roots_[idx]) == 4; }

std::vector<int> weyl_word_to_negative(const RootSystem& rs, const Root& alpha) {
  require(rs.is_root(alpha), ErrorCode::InvalidArgument, "weyl_word_to_negative: not a root");
  std::vector<int> word;
  Root cur = alpha;
  while (rs.is_positive(rs.index_of(cur))) {
    int pick = -1;
    for (int i = 0; i < rs.rank(); ++i)
      if (cartan_integer(cur, rs.simple_root(i)) > 0) {
        pick = i;
        break;
      }
    require(pick >= 0, ErrorCode::Internal, "no descending simple reflection");
    cur = reflect(cur, rs.simple_root(pick));
    word.push_back(pick);
  }
  return word;
}

Root apply_word(const RootSystem& rs, const std::vector<int>& word, Root r) {
  for (int i : word) r = reflect(r, rs.simple_root(i));
  return r;
}

}  // namespace chevrep
