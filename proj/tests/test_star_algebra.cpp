#include "doctest.h"

#include <algorithm>

#include "fellstab/fell_bundle.hpp"
#include "fellstab/star_algebra.hpp"

using namespace fellstab;

namespace {

// Independent check that span(basis) is a two-sided ideal.
bool is_two_sided(const StarAlgebra& a, const Mat& basis) {
  if (basis.cols() == 0) return true;
  const Mat proj = basis * basis.adjoint();
  for (int i = 0; i < a.dim(); ++i)
    for (int c = 0; c < basis.cols(); ++c) {
      const Vec e = unit_vector(a.dim(), i);
      const Vec l = a.multiply(e, basis.col(c)), r = a.multiply(basis.col(c), e);
      if (max_abs(Vec(l - proj * l)) > 1e-8 || max_abs(Vec(r - proj * r)) > 1e-8) return false;
    }
  return true;
}

StarAlgebra twisted_klein(bool twisted) {
  auto sigma = [twisted](ArrowId g, ArrowId h) {
    const int b = g & 1, c = h >> 1;
    return cplx(twisted && (b & c) ? -1.0 : 1.0);
  };
  return section_algebra(from_cocycle(klein_four(), sigma)).algebra;
}

}  // namespace

TEST_CASE("constructors satisfy the *-algebra axioms") {
  for (const auto& a : {matrix_algebra(2), matrix_algebra(3), diagonal_algebra(3),
                        direct_sum(matrix_algebra(2), diagonal_algebra(1))}) {
    CHECK(validate_star_algebra(a).valid());
    CHECK(a.semisimple());
  }
}

TEST_CASE("associativity kernels agree") {
  const auto a = direct_sum(matrix_algebra(2), twisted_klein(true));
  CHECK(std::abs(associativity_residual(a, Exec::parallel) - associativity_residual(a, Exec::serial)) < 1e-12);
}

TEST_CASE("block decomposition examples") {
  CHECK(block_sizes(block_decompose(matrix_algebra(2))) == std::vector<int>{2});
  CHECK(block_sizes(block_decompose(diagonal_algebra(3))) == std::vector<int>{1, 1, 1});
  CHECK(block_sizes(block_decompose(twisted_klein(true))) == std::vector<int>{2});
  CHECK(block_sizes(block_decompose(twisted_klein(false))) == std::vector<int>{1, 1, 1, 1});
  CHECK(block_sizes(block_decompose(direct_sum(matrix_algebra(3), matrix_algebra(1)))) == std::vector<int>{1, 3});
}

TEST_CASE("twisted Klein algebra matches a Pauli realization") {
  // Oracle: u_(0,1) -> Z, u_(1,0) -> X, u_(1,1) -> XZ.
  Mat X(2, 2), Z(2, 2), I = Mat::Identity(2, 2);
  X << 0, 1, 1, 0;
  Z << 1, 0, 0, -1;
  const std::vector<Mat> rep = {I, Z, X, X * Z};
  Mat span(4, 4);
  for (int g = 0; g < 4; ++g) span.col(g) = Eigen::Map<const Vec>(rep[g].data(), 4);
  CHECK(numeric_rank(span) == 4);  // the four images span M_2
  const auto a = twisted_klein(true);
  for (int g = 0; g < 4; ++g)
    for (int h = 0; h < 4; ++h) {
      const Vec prod = a.left(g).col(h);
      Mat img = Mat::Zero(2, 2);
      for (int k = 0; k < 4; ++k) img += prod[k] * rep[k];
      CHECK(max_abs(Mat(img - rep[g] * rep[h])) < 1e-12);
    }
}

TEST_CASE("center dimension") {
  CHECK(center_dimension(matrix_algebra(3)) == 1);
  CHECK(center_dimension(direct_sum(matrix_algebra(2), matrix_algebra(2))) == 2);
  auto Z3 = section_algebra(from_cocycle(cyclic_group(3), [](ArrowId, ArrowId) { return cplx(1.0); })).algebra;
  CHECK(center_dimension(Z3) == 3);
  // Oracle: Z/3 is commutative, so every basis product commutes.
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(max_abs(Vec(Z3.left(i).col(j) - Z3.left(j).col(i))) < 1e-12);
}

TEST_CASE("ideal lattices") {
  const auto one = ideal_lattice(matrix_algebra(2));
  CHECK(one.ideals.size() == 2);
  const auto two = ideal_lattice(direct_sum(matrix_algebra(2), matrix_algebra(1)));
  CHECK(two.ideals.size() == 4);
  const auto three = ideal_lattice(diagonal_algebra(3));
  REQUIRE(three.ideals.size() == 8);
  const auto alg = diagonal_algebra(3);
  for (const auto& I : three.ideals) {
    CHECK(is_two_sided(alg, I.basis));
    CHECK(I.basis.cols() == __builtin_popcount(I.mask));
  }
}

TEST_CASE("poset isomorphism") {
  const auto a = ideal_lattice(diagonal_algebra(2)).order();
  const auto b = ideal_lattice(direct_sum(matrix_algebra(2), matrix_algebra(3))).order();
  CHECK(posets_isomorphic(a, b));
  std::vector<std::vector<bool>> chain = {{1, 1, 1, 1}, {0, 1, 1, 1}, {0, 0, 1, 1}, {0, 0, 0, 1}};
  CHECK_FALSE(posets_isomorphic(a, chain));
}

TEST_CASE("block invariants") {
  const std::vector<StarAlgebra> suite = {matrix_algebra(3), diagonal_algebra(4), twisted_klein(true),
                                          twisted_klein(false),
                                          direct_sum(matrix_algebra(2), diagonal_algebra(2))};
  for (const auto& a : suite) {
    const auto blocks = block_decompose(a);
    int total = 0;
    for (const auto& b : blocks) total += b.size * b.size;
    CHECK(total == a.dim());
    CHECK(center_dimension(a) == static_cast<int>(blocks.size()));
    const auto lat = ideal_lattice(a);
    CHECK(lat.ideals.size() == (1u << blocks.size()));
    // Sum and intersection match union and intersection of block subsets.
    for (const auto& I : lat.ideals)
      for (const auto& J : lat.ideals) {
        Mat both(a.dim(), I.basis.cols() + J.basis.cols());
        both << I.basis, J.basis;
        CHECK(numeric_rank(both) == lat.ideals[I.mask | J.mask].basis.cols());
      }
  }
}

TEST_CASE("degenerate algebra is rejected") {
  // Span of a nilpotent: e0 e0 = 0.
  std::vector<Mat> left = {Mat::Zero(1, 1)};
  StarAlgebra nil(left, Mat::Identity(1, 1));
  CHECK_FALSE(nil.semisimple());
  CHECK_THROWS(block_decompose(nil));
}
