#include "doctest.h"

#include <cstdlib>
#include <numeric>
#include <random>

#include "fellstab/cocycle.hpp"
#include "fellstab/error.hpp"
#include "fellstab/integer_lattice.hpp"

using namespace fellstab;

namespace {

IntMat mat(std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  IntMat m(rows.size(), rows.begin()->size());
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (auto x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

IntVec vec(std::initializer_list<std::int64_t> xs) {
  IntVec v(xs.size());
  int i = 0;
  for (auto x : xs) v[i++] = x;
  return v;
}

bool is_diagonal_chain(const IntMat& d, int rank) {
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = 0; j < d.cols(); ++j)
      if (i != j && d(i, j) != 0) return false;
  for (int i = 0; i < rank; ++i) {
    if (d(i, i) <= 0) return false;
    if (i + 1 < rank && d(i + 1, i + 1) % d(i, i) != 0) return false;
  }
  for (Eigen::Index i = rank; i < std::min(d.rows(), d.cols()); ++i)
    if (d(i, i) != 0) return false;
  return true;
}

// Invariant factors of a 2x2 matrix by enumerating candidate pairs: d1 must
// be the gcd of the entries and d1*d2 = |det|.
std::pair<std::int64_t, std::int64_t> brute_factors_2x2(const IntMat& a) {
  const std::int64_t g = std::gcd(std::gcd(a(0, 0), a(0, 1)), std::gcd(a(1, 0), a(1, 1)));
  const std::int64_t det = std::llabs(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0));
  for (std::int64_t d1 = 0; d1 <= 9; ++d1)
    for (std::int64_t d2 = 0; d2 <= 81; ++d2) {
      if (d1 != g || d1 * d2 != det) continue;
      if (d1 != 0 && d2 % d1 != 0) continue;
      if (det == 0 && d2 != 0) continue;
      return {d1, d2};
    }
  return {-1, -1};
}

Bicharacter omega2(Rational x) {
  return bicharacter(make_cocycle({{0, x}, {0, 0}}));
}

}  // namespace

TEST_CASE("smith normal form examples") {
  CHECK(smith_normal_form(IntMat::Identity(2, 2)).D == IntMat::Identity(2, 2));
  CHECK(smith_normal_form(mat({{2, 0}, {0, 3}})).diagonal() == std::vector<std::int64_t>{1, 6});
  const auto z = smith_normal_form(IntMat::Zero(2, 2));
  CHECK(z.D.isZero());
  CHECK(z.rank == 0);
}

TEST_CASE("smith normal form properties on random matrices") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> entry(-9, 9), size(1, 5);
  for (int trial = 0; trial < 200; ++trial) {
    IntMat a(size(rng), size(rng));
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = entry(rng);
    const auto s = smith_normal_form(a);
    CHECK(std::llabs(determinant(s.U)) == 1);
    CHECK(std::llabs(determinant(s.V)) == 1);
    CHECK(s.U * a * s.V == s.D);
    CHECK(is_diagonal_chain(s.D, s.rank));
    if (a.rows() == 2 && a.cols() == 2) {
      const auto [d1, d2] = brute_factors_2x2(a);
      CHECK(s.D(0, 0) == d1);
      CHECK(s.D(1, 1) == d2);
    }
  }
}

TEST_CASE("determinant") {
  CHECK(determinant(mat({{2, 1}, {7, 4}})) == 1);
  CHECK(determinant(mat({{0, 1, 0}, {1, 0, 0}, {0, 0, 5}})) == -5);
  CHECK(determinant(mat({{1, 2}, {2, 4}})) == 0);
}

TEST_CASE("subgroup membership") {
  const Subgroup h{2, mat({{1}, {-1}})};
  CHECK(h.rank() == 1);
  CHECK(h.contains(vec({3, -3})));
  CHECK_FALSE(h.contains(vec({1, 0})));
  const Subgroup two{2, mat({{2, 0}, {0, 2}})};
  CHECK(two.contains(vec({4, -2})));
  CHECK_FALSE(two.contains(vec({1, 2})));
  CHECK(zero_subgroup(3).contains(IntVec::Zero(3)));
}

TEST_CASE("quotient monoid examples") {
  const QuotientMonoid free(zero_subgroup(2));
  CHECK_FALSE(free.same(vec({1, 0}), vec({0, 1})));
  CHECK(free.leq(vec({1, 0}), vec({2, 1})));
  CHECK_FALSE(free.leq(vec({1, 0}), vec({0, 1})));

  const QuotientMonoid all(full_subgroup(2));
  CHECK(all.same(vec({3, 1}), vec({0, 0})));

  const QuotientMonoid diag(Subgroup{2, mat({{1}, {-1}})});
  CHECK(diag.same(vec({1, 0}), vec({0, 1})));
  CHECK(diag.leq(vec({1, 0}), vec({0, 2})));
  CHECK_FALSE(diag.leq(vec({0, 2}), vec({1, 0})));
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("1/3") == Rational(1, 3));
  CHECK(parse_rational(" -2/4 ") == Rational(-1, 2));
  CHECK(parse_rational("5") == Rational(5));
  CHECK(format_rational(Rational(2, 5)) == "2/5");
  CHECK(mod_one(Rational(-1, 3)) == Rational(2, 3));
  for (const char* bad : {"0.41421356", "sqrt(2)", "1/0", ""}) {
    try {
      parse_rational(bad);
      FAIL("accepted " << bad);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::IrrationalPhase);
    }
  }
}

TEST_CASE("restrict cocycle") {
  const auto c = make_cocycle({{0, Rational(1, 4)}, {0, 0}});
  const auto id = restrict_cocycle(c, full_subgroup(2));
  CHECK(id.theta == c.theta);
  CHECK(restrict_cocycle(c, zero_subgroup(2)).m == 0);
  const auto diag = restrict_cocycle(c, Subgroup{2, mat({{1}, {1}})});
  REQUIRE(diag.m == 1);
  CHECK(diag.theta[0][0] == Rational(1, 4));
  CHECK(bicharacter(diag).trivial());
}

TEST_CASE("symmetrizer examples against residue brute force") {
  const auto h = full_subgroup(2);
  const auto triv = symmetrizer(omega2(0), h);
  CHECK(triv.index == 1);
  CHECK(triv.dual == DualShape{2, {}});

  for (auto [p, q] : {std::pair{1, 2}, {1, 3}, {2, 5}, {1, 4}}) {
    CAPTURE(q);
    const auto om = omega2(Rational(p, q));
    const auto s = symmetrizer(om, h);
    CHECK(s.index == q * q);
    CHECK(s.dual == DualShape{2, {}});
    CHECK(s.subgroup.contains(vec({q, 0})));
    CHECK(s.subgroup.contains(vec({0, q})));
    // Residues mod q decide membership since qZ^2 lies in Z(omega).
    int count = 0;
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) {
        const bool brute = in_symmetrizer(om, vec({a, b}));
        CHECK(s.subgroup.contains(vec({a, b})) == brute);
        count += brute;
      }
    CHECK(count == 1);
  }
}

TEST_CASE("symmetrizer invariants") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> num(0, 11);
  for (int trial = 0; trial < 30; ++trial) {
    RatMat theta(3, std::vector<Rational>(3));
    for (auto& row : theta)
      for (auto& x : row) x = Rational(num(rng), 12);
    const auto c = make_cocycle(theta);
    const auto om = bicharacter(c);
    const Subgroup h = full_subgroup(3);
    const auto s = symmetrizer(om, h);
    const std::int64_t n = om.denominator();
    for (Eigen::Index j = 0; j < s.subgroup.basis.cols(); ++j) {
      CHECK(in_symmetrizer(om, s.h_coords.col(j)));
      CHECK(s.subgroup.contains(IntVec(2 * s.subgroup.basis.col(j))));
      CHECK(s.subgroup.contains(IntVec(-s.subgroup.basis.col(j))));
    }
    for (int i = 0; i < 3; ++i) CHECK(s.subgroup.contains(IntVec(n * IntVec::Unit(3, i))));
    CHECK(s.dual.torus_rank + static_cast<int>(s.dual.finite.size()) == s.subgroup.rank());

    // A coboundary-like change with the same omega: add a symmetric part.
    RatMat shifted = theta;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) shifted[i][j] += Rational(i + j, 7) + (i == j ? 3 : 0);
    const auto s2 = symmetrizer(bicharacter(make_cocycle(shifted)), h);
    CHECK(s2.subgroup.basis == s.subgroup.basis);
    CHECK(s2.index == s.index);
  }
}

TEST_CASE("dual shape") {
  CHECK(dual_shape(mat({{2, 0}, {0, 3}}), 2) == DualShape{0, {6}});
  CHECK(dual_shape(mat({{4}, {0}}), 2) == DualShape{1, {4}});
  CHECK(dual_shape(IntMat(3, 0), 3) == DualShape{3, {}});
}
