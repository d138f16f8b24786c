#include "doctest.h"

#include <cmath>

#include "fellstab/error.hpp"
#include "fellstab/fell_bundle.hpp"

using namespace fellstab;

namespace {

cplx one(ArrowId, ArrowId) { return 1.0; }

cplx klein_twist(ArrowId g, ArrowId h) { return ((g & 1) & (h >> 1)) ? -1.0 : 1.0; }

// C^2 with the coordinate flip.
Mat flip2() {
  Mat f(2, 2);
  f << 0, 1, 1, 0;
  return f;
}

}  // namespace

TEST_CASE("trivial line bundle over the pair groupoid") {
  const auto B = from_cocycle(pair_groupoid(2), one);
  CHECK(validate_bundle(B).valid());
  CHECK(block_sizes(block_decompose(section_algebra(B).algebra)) == std::vector<int>{2});
  const auto B3 = from_cocycle(pair_groupoid(3), one);
  CHECK(block_sizes(block_decompose(section_algebra(B3).algebra)) == std::vector<int>{3});
}

TEST_CASE("non-cocycle phase table breaks associativity") {
  const auto G = cyclic_group(3);
  auto bad = [](ArrowId g, ArrowId h) { return (g == 1 && h == 1) ? cplx(0.0, 1.0) : cplx(1.0); };
  CHECK_THROWS_AS(from_cocycle(G, bad), Error);
  const auto B = line_bundle(G, bad);
  const auto rep = validate_bundle(B);
  REQUIRE(rep.has("associativity"));
  // Oracle: exhaustive search for the failing triples of the phase table.
  bool found = false;
  for (int g = 0; g < 3; ++g)
    for (int h = 0; h < 3; ++h)
      for (int k = 0; k < 3; ++k)
        if (std::abs(bad(g, h) * bad((g + h) % 3, k) - bad(h, k) * bad(g, (h + k) % 3)) > 1e-9) found = true;
  CHECK(found);
}

TEST_CASE("identity involution is rejected") {
  const auto G = cyclic_group(2);
  auto i_phase = [](ArrowId g, ArrowId h) { return (g == 1 && h == 1) ? cplx(0.0, 1.0) : cplx(1.0); };
  // u_1 u_1 = i, so u_1* must be -i u_1; forcing the identity breaks (bc)* = c* b*.
  const auto good = from_cocycle(G, i_phase);
  CHECK(validate_bundle(good).valid());
  std::vector<Mat> mult, invol;
  for (int g = 0; g < 2; ++g)
    for (int h = 0; h < 2; ++h) mult.push_back(good.mult(g, h));
  for (int g = 0; g < 2; ++g) invol.push_back(Mat::Identity(1, 1));
  const FellBundle broken(G, {1, 1}, mult, invol);
  const auto rep = validate_bundle(broken);
  CHECK(rep.has("involution-antimultiplicative"));
}

TEST_CASE("dynamical system bundles") {
  const auto Z2 = cyclic_group(2);
  const auto trivial = from_dynamical_system(Z2, {diagonal_algebra(1)}, {Mat::Identity(1, 1), Mat::Identity(1, 1)});
  CHECK(validate_bundle(trivial).valid());
  const auto s1 = section_algebra(trivial).algebra;
  CHECK(s1.dim() == 2);
  CHECK(center_dimension(s1) == 2);

  const auto P2 = pair_groupoid(2);
  std::vector<Mat> ids(4, Mat::Identity(1, 1));
  const auto pair = from_dynamical_system(P2, {diagonal_algebra(1), diagonal_algebra(1)}, ids);
  CHECK(block_sizes(block_decompose(section_algebra(pair).algebra)) == std::vector<int>{2});

  const auto flip = from_dynamical_system(Z2, {diagonal_algebra(2)}, {Mat::Identity(2, 2), flip2()});
  CHECK(validate_bundle(flip).valid());
  const auto s3 = section_algebra(flip).algebra;
  CHECK(s3.dim() == 4);
  CHECK(block_sizes(block_decompose(s3)) == std::vector<int>{2});
}

TEST_CASE("dynamical system preconditions") {
  const auto Z2 = cyclic_group(2);
  Mat half = 0.5 * Mat::Identity(2, 2);
  CHECK_THROWS_AS(from_dynamical_system(Z2, {diagonal_algebra(2)}, {Mat::Identity(2, 2), half}), Error);
  // flip on M_2 restricted to a non-functorial assignment: alpha_1^2 != id
  Mat rot = Mat::Zero(4, 4);
  rot(0, 0) = rot(3, 3) = 1.0;
  rot(1, 1) = cplx(0, 1);
  rot(2, 2) = cplx(0, -1);
  try {
    from_dynamical_system(Z2, {matrix_algebra(2)}, {Mat::Identity(4, 4), rot});
    FAIL("expected NotFunctorial");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotFunctorial);
  }
}

TEST_CASE("cocycle line bundles") {
  CHECK(block_sizes(block_decompose(section_algebra(from_cocycle(klein_four(), klein_twist)).algebra)) ==
        std::vector<int>{2});
  CHECK(block_sizes(block_decompose(section_algebra(from_cocycle(cyclic_group(3), one)).algebra)) ==
        std::vector<int>{1, 1, 1});
  CHECK(block_sizes(block_decompose(section_algebra(from_cocycle(cyclic_group(2), one)).algebra)) ==
        std::vector<int>{1, 1});
}

TEST_CASE("section algebra kernels agree") {
  for (const auto& B : {from_cocycle(klein_four(), klein_twist), from_cocycle(pair_groupoid(3), one),
                        from_dynamical_system(cyclic_group(2), {diagonal_algebra(2)}, {Mat::Identity(2, 2), flip2()})}) {
    const auto p = section_algebra(B, Exec::parallel);
    const auto s = section_algebra(B, Exec::serial);
    for (int i = 0; i < p.algebra.dim(); ++i) CHECK(max_abs(Mat(p.algebra.left(i) - s.algebra.left(i))) < 1e-14);
    CHECK(validate_bundle(B, kDefaultTolerance, Exec::parallel).to_text() ==
          validate_bundle(B, kDefaultTolerance, Exec::serial).to_text());
  }
}

TEST_CASE("section algebra invariants") {
  const auto P2 = pair_groupoid(2);
  const std::vector<FellBundle> suite = {
      from_cocycle(P2, one), from_cocycle(klein_four(), klein_twist), from_cocycle(cyclic_group(3), one),
      from_dynamical_system(cyclic_group(2), {diagonal_algebra(2)}, {Mat::Identity(2, 2), flip2()}),
      from_dynamical_system(disjoint_union(P2, cyclic_group(2)),
                            {diagonal_algebra(1), diagonal_algebra(1), diagonal_algebra(2)},
                            {Mat::Identity(1, 1), Mat::Identity(1, 1), Mat::Identity(1, 1), Mat::Identity(1, 1),
                             Mat::Identity(2, 2), flip2()})};
  for (const auto& B : suite) {
    REQUIRE(validate_bundle(B).valid());
    const auto S = section_algebra(B);
    CHECK(validate_star_algebra(S.algebra).valid());
    CHECK(S.algebra.semisimple());
    const auto& G = B.base();
    // Restriction to unit arrows reproduces each A(x).
    for (UnitId x = 0; x < G.num_units(); ++x) {
      const ArrowId e = G.unit_arrow(x);
      const auto& A = B.unit_algebra(x);
      const int o = S.offset[e];
      for (int i = 0; i < A.dim(); ++i) {
        CHECK(max_abs(Mat(S.algebra.left(o + i).block(o, o, A.dim(), A.dim()) - A.left(i))) < 1e-12);
        CHECK(max_abs(Mat(S.algebra.invol().block(o, o, A.dim(), A.dim()) - A.invol())) < 1e-12);
      }
    }
  }
}

TEST_CASE("cohomologous cocycles give the same blocks") {
  // Multiply the Klein twist by the coboundary b(g) b(h) / b(gh) for a phase b.
  const std::vector<cplx> b = {1.0, std::polar(1.0, 0.7), std::polar(1.0, -1.9), std::polar(1.0, 2.4)};
  auto shifted = [&](ArrowId g, ArrowId h) { return klein_twist(g, h) * b[g] * b[h] / b[g ^ h]; };
  const auto lhs = block_sizes(block_decompose(section_algebra(from_cocycle(klein_four(), klein_twist)).algebra));
  const auto rhs = block_sizes(block_decompose(section_algebra(from_cocycle(klein_four(), shifted)).algebra));
  CHECK(lhs == rhs);
}
