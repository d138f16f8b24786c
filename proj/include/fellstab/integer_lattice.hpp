#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace fellstab {

using IntMat = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVec = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

struct SmithForm {
  IntMat U, D, V;  // D = U A V
  int rank = 0;
  std::vector<std::int64_t> diagonal() const;
};

/// Pivot = smallest nonzero absolute value, ties broken in row-major order;
/// d_1 | d_2 | ... and every d_i >= 0. Throws InvalidInput on int64 overflow.
SmithForm smith_normal_form(const IntMat& a);

/// Exact determinant (fraction-free elimination in 128-bit arithmetic).
std::int64_t determinant(const IntMat& a);

/// Subgroup of Z^k generated by the columns of `basis`.
struct Subgroup {
  int k = 0;
  IntMat basis;  // k x r
  int rank() const;
  bool contains(const IntVec& v) const;
};

Subgroup zero_subgroup(int k);
Subgroup full_subgroup(int k);

/// P = image of N^k in Z^k / H.
class QuotientMonoid {
 public:
  explicit QuotientMonoid(Subgroup h);

  const Subgroup& subgroup() const { return h_; }
  /// Canonical coordinates of q(m): torsion part reduced, free part kept.
  std::vector<std::int64_t> image(const IntVec& m) const;
  bool same(const IntVec& m, const IntVec& n) const { return image(m) == image(n); }
  /// q(m) <= q(n) in P, searching witnesses in {0..bound}^k.
  bool leq(const IntVec& m, const IntVec& n, int bound = 8) const;
  /// q(e_i) for each generator.
  std::vector<std::vector<std::int64_t>> generators() const;

 private:
  Subgroup h_;
  SmithForm snf_;
};

/// Shape of the Pontryagin dual of Z^n / (column span of relations).
struct DualShape {
  int torus_rank = 0;
  std::vector<std::int64_t> finite;  // invariant factors > 1
  bool operator==(const DualShape&) const = default;
};

DualShape dual_shape(const IntMat& relations, int n);

}  // namespace fellstab
