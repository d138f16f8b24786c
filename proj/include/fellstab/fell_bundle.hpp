#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "fellstab/groupoid.hpp"
#include "fellstab/star_algebra.hpp"

namespace fellstab {

/// Fell bundle over a finite groupoid. Fibres are abstract spaces in fixed
/// bases; for composable (g,h) the product B(g) x B(h) -> B(gh) is a matrix
/// of shape dim(gh) x (dim(g) dim(h)) whose column i*dim(h)+j is e_i e_j.
/// The involution B(g) -> B(g^{-1}) is b* = J_g conj(b).
class FellBundle {
 public:
  FellBundle() = default;
  FellBundle(FiniteGroupoid base, std::vector<int> fiber_dim, std::vector<Mat> mult,
             std::vector<Mat> invol);

  const FiniteGroupoid& base() const { return base_; }
  int fiber_dim(ArrowId g) const { return dims_[g]; }
  /// Empty matrix when (g,h) is not composable.
  const Mat& mult(ArrowId g, ArrowId h) const { return mult_[index(g, h)]; }
  const Mat& invol(ArrowId g) const { return invol_[g]; }

  Vec multiply(ArrowId g, ArrowId h, const Vec& b, const Vec& c) const;
  Vec star(ArrowId g, const Vec& b) const { return invol_[g] * b.conjugate(); }

  /// A(x) = B(unit_arrow(x)) with the induced *-algebra structure.
  const StarAlgebra& unit_algebra(UnitId x) const { return units_[x]; }

  /// Replace one structure tensor; used to build negative controls.
  void set_mult(ArrowId g, ArrowId h, Mat m);

 private:
  std::size_t index(ArrowId g, ArrowId h) const {
    return static_cast<std::size_t>(g) * static_cast<std::size_t>(base_.num_arrows()) + static_cast<std::size_t>(h);
  }
  void rebuild_units();

  FiniteGroupoid base_;
  std::vector<int> dims_;
  std::vector<Mat> mult_;
  std::vector<Mat> invol_;
  std::vector<StarAlgebra> units_;
};

ValidationReport validate_bundle(const FellBundle& b, double tol = kDefaultTolerance,
                                 Exec exec = Exec::parallel);

/// act[g] is the matrix of alpha_g : A(s(g)) -> A(r(g)). Throws NotFunctorial
/// or NotStarIso.
FellBundle from_dynamical_system(const FiniteGroupoid& g, const std::vector<StarAlgebra>& algebras,
                                 const std::vector<Mat>& act, double tol = kDefaultTolerance);

using CocycleFn = std::function<cplx(ArrowId, ArrowId)>;

/// Line bundle u_g u_h = sigma(g,h) u_{gh}, u_g* = conj(sigma(g,g^{-1})) u_{g^{-1}}
/// without checking the cocycle identity.
FellBundle line_bundle(const FiniteGroupoid& g, const CocycleFn& sigma);

/// Checked version; throws CocycleIdentityFailed with the failing triple.
FellBundle from_cocycle(const FiniteGroupoid& g, const CocycleFn& sigma,
                        double tol = kDefaultTolerance);

struct SectionAlgebra {
  StarAlgebra algebra;
  std::vector<int> offset;  // basis of B(g) starts at offset[g]
};

/// C*(G;B) on the direct sum of the fibres with convolution and f*(g) = f(g^{-1})*.
/// The serial path evaluates the convolution sum literally.
SectionAlgebra section_algebra(const FellBundle& b, Exec exec = Exec::parallel);

}  // namespace fellstab
