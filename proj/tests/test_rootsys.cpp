#include <algorithm>
#include <set>

#include "chevrep/rootsys.hpp"
#include "doctest.h"

using namespace chevrep;

TEST_SUITE("rootsys") {
  TEST_CASE("root counts and lengths") {
    for (int l = 2; l <= 4; ++l) {
      const auto rs = RootSystem::build(RootType::C, l);
      CHECK(rs.num_roots() == static_cast<std::size_t>(2 * l * l));
      CHECK(rs.num_positive() == static_cast<std::size_t>(l * l));
      int longs = 0;
      for (std::size_t i = 0; i < rs.num_roots(); ++i) longs += rs.is_long(static_cast<int>(i));
      CHECK(longs == 2 * l);
    }
    const auto a1 = RootSystem::build(RootType::A1, 1);
    CHECK(a1.num_roots() == 2);
    CHECK(root_name(a1.simple_root(0)) == "2e1");
  }

  TEST_CASE("simple roots and ordering") {
    const auto rs = RootSystem::build(RootType::C, 3);
    CHECK(root_name(rs.simple_root(0)) == "e1-e2");
    CHECK(root_name(rs.simple_root(1)) == "e2-e3");
    CHECK(root_name(rs.simple_root(2)) == "2e3");
    for (std::size_t i = 1; i < rs.num_roots(); ++i)
      CHECK(rs.height(static_cast<int>(i - 1)) <= rs.height(static_cast<int>(i)));
    CHECK(root_name(rs.roots().back()) == "2e1");
    CHECK(root_name(rs.roots().front()) == "-2e1");
  }

  TEST_CASE("reflections permute the roots") {
    for (int l = 2; l <= 3; ++l) {
      const auto rs = RootSystem::build(RootType::C, l);
      std::set<Root> all(rs.roots().begin(), rs.roots().end());
      for (const auto& a : rs.roots()) {
        std::set<Root> img;
        for (const auto& b : rs.roots()) img.insert(reflect(b, a));
        CHECK(img == all);
        CHECK(reflect(a, a) == negate(a));
      }
    }
  }

  TEST_CASE("Cartan matrix of C2") {
    const auto rs = RootSystem::build(RootType::C, 2);
    const auto& c = rs.cartan_matrix();
    CHECK(c[0][0] == 2);
    CHECK(c[1][1] == 2);
    CHECK(c[0][1] * c[1][0] == 2);
    CHECK(cartan_integer(rs.simple_root(1), rs.simple_root(0)) == -2);
    CHECK(cartan_integer(rs.simple_root(0), rs.simple_root(1)) == -1);
  }

  TEST_CASE("root names") {
    CHECK(root_name(Root{1, -1, 0}) == "e1-e2");
    CHECK(root_name(Root{0, 0, 2}) == "2e3");
    CHECK(root_name(Root{-1, -1}) == "-e1-e2");
    const auto rs = RootSystem::build(RootType::C, 2);
    CHECK(rs.index_of(Root{1, 1}) >= 0);
    CHECK(rs.index_of(Root{1, 0}) < 0);
    const auto sc = rs.simple_coords(Root{2, 0});
    CHECK(sc == std::vector<int>{2, 1});
  }
}
