#include "doctest.h"

#include <algorithm>

#include "fellstab/stabilization.hpp"
#include "suite.hpp"

using namespace fellstab;
using suite::trivial;

namespace {

int slot(const ModuleFiber& F, ArrowId c) {
  const auto it = std::find(F.arrows.begin(), F.arrows.end(), c);
  return F.offset[it - F.arrows.begin()];
}

}  // namespace

TEST_CASE("module fibre dimensions") {
  for (int n : {2, 3}) {
    const auto f = build_module_fibers(from_cocycle(pair_groupoid(n), trivial));
    for (const auto& F : f) CHECK(F.dim == n);
  }
  for (int m : {2, 3, 4}) CHECK(build_module_fibers(from_cocycle(cyclic_group(m), trivial))[0].dim == m);
  const auto f = build_module_fibers(suite::pair_flip_system());
  for (const auto& F : f) CHECK(F.dim == 2 * 2);
}

TEST_CASE("module fibre inner product axioms") {
  for (const auto& nb : suite::stabilization_suite()) {
    const auto fibers = build_module_fibers(nb.bundle);
    for (const auto& F : fibers) {
      const auto& A = nb.bundle.unit_algebra(F.unit);
      for (int p = 0; p < F.dim; ++p)
        for (int q = 0; q < F.dim; ++q) {
          const Vec u = unit_vector(F.dim, p), v = unit_vector(F.dim, q);
          CHECK(max_abs(Vec(A.star(F.inner_product(u, v)) - F.inner_product(v, u))) < 1e-12);
          for (int a = 0; a < A.dim(); ++a) {
            const Vec ea = unit_vector(A.dim(), a);
            const Vec lhs = F.inner_product(u, F.right_mult(ea) * v);
            CHECK(max_abs(Vec(lhs - A.multiply(F.inner_product(u, v), ea))) < 1e-12);
          }
        }
      // Compacts are every right-linear operator: dim K(V) = sum over blocks.
      CHECK(validate_star_algebra(F.compacts).valid());
    }
  }
}

TEST_CASE("beta matches its defining formula") {
  for (const auto& nb : suite::stabilization_suite()) {
    const auto& B = nb.bundle;
    const auto& G = B.base();
    const auto fibers = build_module_fibers(B);
    const auto beta = build_beta(B, fibers);
    for (ArrowId g = 0; g < G.num_arrows(); ++g) {
      const auto& Fr = fibers[G.range(g)];
      const auto& Fs = fibers[G.source(g)];
      const int db = B.fiber_dim(g);
      // beta_g(xi (x) b)(c) = xi(c g^-1) b for c with source s(g).
      for (int p = 0; p < Fr.dim; ++p)
        for (int i = 0; i < db; ++i) {
          Vec expect = Vec::Zero(Fs.dim);
          for (ArrowId c : Fs.arrows) {
            const ArrowId cg = G.compose(c, G.inverse(g));
            const int o = slot(Fr, cg);
            if (p < o || p >= o + B.fiber_dim(cg)) continue;
            expect.segment(slot(Fs, c), B.fiber_dim(c)) =
                B.multiply(cg, g, unit_vector(B.fiber_dim(cg), p - o), unit_vector(db, i));
          }
          CHECK(max_abs(Vec(beta[g].col(p * db + i) - expect)) < 1e-12);
        }
      if (G.is_unit_arrow(g)) {
        // beta_x(xi (x) a) = xi . a
        for (int p = 0; p < Fr.dim; ++p)
          for (int i = 0; i < db; ++i)
            CHECK(max_abs(Vec(beta[g].col(p * db + i) - Fr.right[i] * unit_vector(Fr.dim, p))) < 1e-12);
      }
    }
  }
}

TEST_CASE("beta on the pair groupoid and on Z/2 permutes coordinates") {
  const auto B = from_cocycle(cyclic_group(2), trivial);
  const auto beta = build_beta(B, build_module_fibers(B));
  Mat swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK(max_abs(Mat(beta[1] - swap)) < 1e-12);
  const auto P = from_cocycle(pair_groupoid(2), trivial);
  const auto pb = build_beta(P, build_module_fibers(P));
  for (const auto& m : pb) {
    CHECK(max_abs(Mat(m * m.adjoint() - Mat::Identity(2, 2))) < 1e-12);
    CHECK((m.array().abs() > 0.5).count() == 2);
  }
}

TEST_CASE("alpha examples") {
  const auto P = from_cocycle(pair_groupoid(2), trivial);
  const auto fibers = build_module_fibers(P);
  const auto beta = build_beta(P, fibers);
  const auto act = build_alpha(P, fibers, beta);
  CHECK(act.report.passed());
  const auto& G = P.base();
  for (UnitId x = 0; x < 2; ++x) {
    const Mat& a = act.alpha[G.unit_arrow(x)];
    CHECK(max_abs(Mat(a - Mat::Identity(a.rows(), a.cols()))) < 1e-12);
  }
  // Conjugation by the permutation: alpha_g(T) = P^T T P where beta_g = P.
  for (ArrowId g = 0; g < 4; ++g) {
    const auto& Fs = fibers[G.source(g)];
    const auto& Fr = fibers[G.range(g)];
    for (int a = 0; a < Fs.compacts.dim(); ++a) {
      const Mat expect = beta[g].adjoint() * Fs.compact_basis[a] * beta[g];
      CHECK(max_abs(Mat(Fr.op(act.alpha[g].col(a)) - expect)) < 1e-12);
    }
    const Vec one = Fs.coords(Mat::Identity(Fs.dim, Fs.dim));
    CHECK(max_abs(Vec(act.alpha[g] * one - Fr.coords(Mat::Identity(Fr.dim, Fr.dim)))) < 1e-12);
  }
}

TEST_CASE("alpha solve kernels agree") {
  const auto B = from_cocycle(klein_four(), suite::klein_twist);
  const auto fibers = build_module_fibers(B);
  const auto beta = build_beta(B, fibers);
  const auto a = solve_alpha(B, fibers, beta, kDefaultTolerance, Exec::parallel);
  const auto b = solve_alpha(B, fibers, beta, kDefaultTolerance, Exec::serial);
  for (std::size_t g = 0; g < a.size(); ++g) CHECK(max_abs(Mat(a[g] - b[g])) == 0.0);
}

TEST_CASE("crossed product examples") {
  // Units only: the section algebra is the sum of the K(V(x)).
  const auto units = disjoint_union(pair_groupoid(1), pair_groupoid(1));
  const auto U = from_cocycle(units, trivial);
  const auto su = stabilize(U);
  REQUIRE(su.failed_stage.empty());
  CHECK(section_algebra(su.crossed).algebra.dim() == 2);

  const auto sp = stabilize(from_cocycle(pair_groupoid(2), trivial));
  REQUIRE(sp.failed_stage.empty());
  CHECK(validate_bundle(sp.crossed).valid());
  CHECK(sp.morita.stabilized.dim == 16);
  CHECK(sp.morita.stabilized.blocks == std::vector<int>{4});
  CHECK(sp.morita.stabilized.center == 1);

  const auto sz = stabilize(from_cocycle(cyclic_group(2), trivial));
  REQUIRE(sz.failed_stage.empty());
  CHECK(sz.morita.stabilized.blocks == std::vector<int>{2, 2});
}

TEST_CASE("equivalence bimodule examples") {
  const auto B = from_cocycle(pair_groupoid(2), trivial);
  const auto s = stabilize(B);
  REQUIRE(s.failed_stage.empty());
  for (ArrowId g = 0; g < 4; ++g) CHECK(s.equivalence.dim[g] == 2);
  const auto& G = B.base();
  const StabilizationContext ctx{B, s.fibers, s.beta, s.alpha.alpha, s.crossed};
  // At a unit the B-valued form is a* <v,w> b.
  const ArrowId e = G.unit_arrow(0);
  const auto& F = s.fibers[0];
  for (int p = 0; p < F.dim; ++p)
    for (int q = 0; q < F.dim; ++q) {
      const Vec lhs = b_inner(ctx, e, unit_vector(F.dim, p), e, unit_vector(F.dim, q));
      CHECK(max_abs(Vec(lhs - F.inner_product(unit_vector(F.dim, p), unit_vector(F.dim, q)))) < 1e-12);
    }
}

TEST_CASE("stabilization suite passes every identity") {
  for (const auto& nb : suite::stabilization_suite()) {
    CAPTURE(nb.name);
    const auto s = stabilize(nb.bundle);
    REQUIRE(s.failed_stage.empty());
    CHECK(s.report.passed());
    CHECK(validate_bundle(s.crossed).valid());
    CHECK(s.morita.matches());
    for (ArrowId g = 0; g < nb.bundle.base().num_arrows(); ++g)
      CHECK(s.equivalence.dim[g] == s.fibers[nb.bundle.base().source(g)].dim);
  }
}

TEST_CASE("corrupted alpha is caught") {
  StabilizeOptions opt;
  opt.corrupt_alpha = true;
  const auto s = stabilize(from_cocycle(pair_groupoid(2), trivial), opt);
  CHECK_FALSE(s.report.passed());
  CHECK(s.report.max_residual("alpha-intertwines") > opt.tolerance);
}
