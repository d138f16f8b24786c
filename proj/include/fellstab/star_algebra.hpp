#pragma once

#include <string>
#include <vector>

#include "fellstab/groupoid.hpp"
#include "fellstab/linalg.hpp"

namespace fellstab {

/// Finite-dimensional *-algebra in a fixed basis. Multiplication is stored
/// through the left-regular matrices L_i (column j of L_i is e_i e_j) and the
/// involution as a matrix J with b* = J conj(b).
class StarAlgebra {
 public:
  StarAlgebra() = default;
  StarAlgebra(std::vector<Mat> left, Mat invol, std::vector<std::string> labels = {});

  int dim() const { return static_cast<int>(left_.size()); }
  const std::string& label(int i) const { return labels_[i]; }
  const Mat& left(int i) const { return left_[i]; }
  const SpMat& left_sparse(int i) const { return left_sparse_[i]; }
  const Mat& invol() const { return invol_; }

  /// L_a = sum_i a_i L_i.
  Mat left_mult(const Vec& a) const;
  Vec multiply(const Vec& a, const Vec& b) const;
  Vec star(const Vec& a) const;

  /// Gram matrix of <a,b> = tr(L_{a* b}), so <a,b> = a^H G b.
  const Mat& trace_gram() const { return gram_; }
  /// Positive definite trace form within tolerance.
  bool semisimple(double tol = kDefaultTolerance) const;
  /// C*-norm: spectral norm of L_a in the trace inner product. Requires semisimple.
  double norm(const Vec& a) const;
  /// a = a* and the spectrum of L_a is nonnegative.
  bool positive(const Vec& a, double tol = kDefaultTolerance) const;

 private:
  std::vector<std::string> labels_;
  std::vector<Mat> left_;
  std::vector<SpMat> left_sparse_;
  Mat invol_;
  Mat gram_;
  Mat whiten_, unwhiten_;  // G^{-1/2}, G^{1/2}; empty when G is not positive definite
};

/// Multiplication associative, involution an order-2 conjugate-linear
/// anti-automorphism, trace form positive semidefinite.
ValidationReport validate_star_algebra(const StarAlgebra& a, double tol = kDefaultTolerance,
                                       Exec exec = Exec::parallel);

/// Max residual of L_i L_j - L_{e_i e_j} over all i, j.
double associativity_residual(const StarAlgebra& a, Exec exec = Exec::parallel);

int center_dimension(const StarAlgebra& a, double tol = kDefaultTolerance);

struct Block {
  int size = 0;    // n for a copy of M_n
  Vec projection;  // minimal central projection
  int first_index = 0;
};

/// Matrix blocks, sorted by size then by first basis index of the projection.
/// Throws NotSemisimple.
std::vector<Block> block_decompose(const StarAlgebra& a, double tol = kDefaultTolerance);
std::vector<int> block_sizes(const std::vector<Block>& blocks);

struct Ideal {
  unsigned mask = 0;  // subset of blocks
  Mat basis;          // orthonormal columns spanning the ideal
};

struct IdealLattice {
  std::vector<Ideal> ideals;  // ordered by mask
  int blocks = 0;
  bool contains(int i, int j) const { return (ideals[j].mask & ~ideals[i].mask) == 0; }
  std::vector<std::vector<bool>> order() const;
};

IdealLattice ideal_lattice(const StarAlgebra& a, double tol = kDefaultTolerance);

/// Isomorphism of finite posets given by their <= relation matrices.
bool posets_isomorphic(const std::vector<std::vector<bool>>& a,
                       const std::vector<std::vector<bool>>& b);

// Constructors.
StarAlgebra matrix_algebra(int n);
StarAlgebra diagonal_algebra(int n);
StarAlgebra direct_sum(const StarAlgebra& a, const StarAlgebra& b);

}  // namespace fellstab
