#include "doctest.h"

#include <algorithm>
#include <set>

#include "fellstab/groupoid.hpp"

using namespace fellstab;

namespace {

// Independent brute force: collect every (g,h) pair appearing in a failing
// associativity triple or with wrong ends.
std::set<std::pair<int, int>> brute_force_bad_pairs(const FiniteGroupoid& G) {
  std::set<std::pair<int, int>> bad;
  const int n = G.num_arrows();
  for (int g = 0; g < n; ++g)
    for (int h = 0; h < n; ++h) {
      if (G.source(g) != G.range(h)) continue;
      const int gh = G.compose(g, h);
      if (G.range(gh) != G.range(g) || G.source(gh) != G.source(h)) bad.insert({g, h});
      for (int k = 0; k < n; ++k) {
        if (G.source(h) != G.range(k)) continue;
        if (G.compose(gh, k) != G.compose(g, G.compose(h, k))) {
          bad.insert({g, h});
          bad.insert({h, k});
        }
      }
    }
  return bad;
}

}  // namespace

TEST_CASE("pair groupoid and cyclic group validate") {
  CHECK(validate_groupoid(pair_groupoid(3)).valid());
  CHECK(validate_groupoid(cyclic_group(4)).valid());
  CHECK(validate_groupoid(klein_four()).valid());
  CHECK(validate_groupoid(disjoint_union(pair_groupoid(2), cyclic_group(3))).valid());
  CHECK(validate_groupoid(action_groupoid({{0, 1}, {1, 0}}, {{0, 1}, {1, 0}})).valid());
}

TEST_CASE("redirected composition entry is reported with a witness") {
  FiniteGroupoid G = pair_groupoid(3);
  const int g01 = *G.find_arrow("(0,1)"), g12 = *G.find_arrow("(1,2)"), g00 = *G.find_arrow("(0,0)");
  G.set_compose(g01, g12, g00);
  const auto rep = validate_groupoid(G);
  REQUIRE_FALSE(rep.valid());
  CHECK((rep.has("associativity") || rep.has("range-source")));
  const auto bad = brute_force_bad_pairs(G);
  CHECK(bad.count({g01, g12}) == 1);
  bool cited = false;
  for (const auto& v : rep.violations)
    cited = cited || v.witness.find("(0,1),(1,2)") != std::string::npos;
  CHECK(cited);
}

TEST_CASE("parallel and serial validation agree") {
  FiniteGroupoid G = pair_groupoid(4);
  G.set_compose(1, 5, 3);
  G.set_compose(7, 13, 0);
  const auto a = validate_groupoid(G, Exec::parallel);
  const auto b = validate_groupoid(G, Exec::serial);
  CHECK(a.to_text() == b.to_text());
  CHECK_FALSE(a.valid());
}

TEST_CASE("orbits") {
  CHECK(orbits(pair_groupoid(3)).size() == 1);
  CHECK(orbits(pair_groupoid(3))[0].size() == 3);
  const auto two = orbits(disjoint_union(cyclic_group(2), cyclic_group(3)));
  CHECK(two == std::vector<std::vector<UnitId>>{{0}, {1}});
  CHECK(orbits(action_groupoid({{0, 1}, {1, 0}}, {{0, 1}, {1, 0}})).size() == 1);
  CHECK(orbits(action_groupoid({{0, 1}, {1, 0}}, {{0, 1}, {0, 1}})).size() == 2);
}

TEST_CASE("isotropy") {
  const auto P = pair_groupoid(3);
  for (int x = 0; x < 3; ++x) CHECK(isotropy(P, x).elements.size() == 1);
  const auto Z = cyclic_group(5);
  const auto iz = isotropy(Z, 0);
  CHECK(iz.elements.size() == 5);
  CHECK(iz.multiplication[2][4] == 1);
  const auto T = action_groupoid({{0, 1}, {1, 0}}, {{0, 1}, {0, 1}});
  CHECK(isotropy(T, 0).elements.size() == 2);
  CHECK(isotropy(T, 1).elements.size() == 2);
}

TEST_CASE("groupoid invariants over the constructor suite") {
  const std::vector<FiniteGroupoid> suite = {
      pair_groupoid(1), pair_groupoid(3), cyclic_group(4), klein_four(),
      action_groupoid({{0, 1}, {1, 0}}, {{0, 1}, {1, 0}}),
      action_groupoid({{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}, {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}),
      disjoint_union(pair_groupoid(2), klein_four())};
  for (const auto& G : suite) {
    REQUIRE(validate_groupoid(G).valid());
    for (int g = 0; g < G.num_arrows(); ++g) {
      CHECK(G.inverse(G.inverse(g)) == g);
      CHECK(G.compose(g, G.inverse(g)) == G.unit_arrow(G.range(g)));
    }
    CHECK(left_translation_bijective(G));
    for (const auto& orbit : orbits(G))
      for (UnitId y : orbit) CHECK(isotropy_conjugate(G, orbit.front(), y));
    for (UnitId x = 0; x < G.num_units(); ++x)
      CHECK(G.arrows_with_range(x).size() == G.arrows_with_source(x).size());
  }
}
