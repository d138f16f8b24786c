#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fellstab/fell_bundle.hpp"

namespace fellstab {

struct CheckLine {
  std::string identity;
  std::string where;
  double residual = 0.0;
};

/// One line per identity per location with its max residual.
struct VerificationReport {
  double tolerance = kDefaultTolerance;
  std::vector<CheckLine> lines;

  void add(std::string identity, std::string where, double residual);
  void append(const VerificationReport& other);
  bool passed() const;
  /// Identities in first-seen order.
  std::vector<std::string> identities() const;
  double max_residual(const std::string& identity) const;
  std::string to_text() const;
};

/// V(x) = direct sum of B(c) over arrows c with source x, with the A(x)-valued
/// inner product <u,v> = sum u(c)* v(c), the right A(x)-action, and the
/// compacts K(V(x)) spanned by rank-one operators.
struct ModuleFiber {
  UnitId unit = 0;
  std::vector<ArrowId> arrows;  // G_x, ascending
  std::vector<int> offset;      // block start of each arrow; back() = dim
  int dim = 0;
  Mat inner;               // dim A(x) x dim^2, column p*dim+q = <e_p, e_q>
  std::vector<Mat> right;  // right action of each basis element of A(x)

  std::vector<std::pair<int, int>> rank_one;  // (p,q) with theta_{e_p,e_q} in the basis of K
  std::vector<Mat> compact_basis;             // operator matrices on V(x)
  Mat coords_solver;                          // pseudo-inverse of the vectorised basis
  StarAlgebra compacts;

  Vec inner_product(const Vec& u, const Vec& v) const;
  Mat right_mult(const Vec& a) const;
  /// theta_{u,v}(w) = u <v,w>.
  Mat theta(const Vec& u, const Vec& v) const;
  Vec coords(const Mat& op) const;
  Mat op(const Vec& coords) const;
  /// Adjoint for the A(x)-valued inner product.
  Mat adjoint(const Mat& op) const;
};

/// Throws NotFull when the inner products do not span A(x).
std::vector<ModuleFiber> build_module_fibers(const FellBundle& b, double tol = kDefaultTolerance);

/// beta_g : V(r(g)) (x) B(g) -> V(s(g)), column p*dim B(g) + i is beta_g(e_p (x) e_i).
/// Throws IsometryFailed or NotSurjective.
std::vector<Mat> build_beta(const FellBundle& b, const std::vector<ModuleFiber>& fibers,
                            double tol = kDefaultTolerance);

struct AlphaAction {
  std::vector<Mat> alpha;  // per arrow: K(V(s(g))) -> K(V(r(g))) in compact-basis coordinates
  VerificationReport report;
};

/// Solves T beta_g = beta_g (alpha_g(T) (x) I) for every basis T. Throws SolveFailed.
std::vector<Mat> solve_alpha(const FellBundle& b, const std::vector<ModuleFiber>& fibers,
                             const std::vector<Mat>& beta, double tol = kDefaultTolerance,
                             Exec exec = Exec::parallel);

/// Checks beta and a given alpha against the module identities.
VerificationReport verify_alpha(const FellBundle& b, const std::vector<ModuleFiber>& fibers,
                                const std::vector<Mat>& beta, const std::vector<Mat>& alpha,
                                double tol = kDefaultTolerance);

AlphaAction build_alpha(const FellBundle& b, const std::vector<ModuleFiber>& fibers,
                        const std::vector<Mat>& beta, double tol = kDefaultTolerance,
                        Exec exec = Exec::parallel);

/// K(V) x_alpha G as a Fell bundle over the same groupoid.
FellBundle crossed_product_bundle(const FellBundle& b, const std::vector<ModuleFiber>& fibers,
                                  const std::vector<Mat>& alpha, double tol = kDefaultTolerance);

/// E(g) = V(r(g)) (x)_{A(r(g))} B(g). Elements are algebraic tensors with
/// coordinate p*dim B(g) + i; two tensors are equal in E(g) when their
/// images under beta_g agree.
struct EquivalenceBimodule {
  std::vector<int> tensor_dim;             // dim V(r(g)) * dim B(g)
  std::vector<int> dim;                    // dim E(g) after balancing
  std::vector<std::vector<int>> spanning;  // pivot tensors spanning E(g)
  std::vector<Mat> section;                // right inverse of beta_g supported on the pivots
  VerificationReport report;
};

struct StabilizationContext {
  const FellBundle& bundle;
  const std::vector<ModuleFiber>& fibers;
  const std::vector<Mat>& beta;
  const std::vector<Mat>& alpha;
  const FellBundle& crossed;
};

/// Left action of (T,t), T given in compact coordinates of K(V(r(t))), on E(g).
Mat left_action(const StabilizationContext& ctx, const EquivalenceBimodule& e, const Vec& t_coords,
                ArrowId t, ArrowId g);
/// Right action of b in B(h) on E(g).
Mat right_action(const StabilizationContext& ctx, ArrowId g, ArrowId h, const Vec& b);
/// <e,f>_B in B(g^{-1}h) for e in E(g), f in E(h), r(g) = r(h).
Vec b_inner(const StabilizationContext& ctx, ArrowId g, const Vec& e, ArrowId h, const Vec& f);
/// Compact coordinates of the K(V) x G valued form, which lives over g h^{-1}.
Vec k_inner(const StabilizationContext& ctx, ArrowId g, const Vec& e, ArrowId h, const Vec& f);

EquivalenceBimodule build_equivalence(const StabilizationContext& ctx, double tol = kDefaultTolerance,
                                      Exec exec = Exec::parallel);

struct AlgebraSummary {
  int dim = 0;
  int center = 0;
  std::vector<int> blocks;
};

struct MoritaReport {
  AlgebraSummary original, stabilized;
  bool lattices_isomorphic = false;
  bool matches() const {
    return original.center == stabilized.center && original.blocks.size() == stabilized.blocks.size() &&
           lattices_isomorphic;
  }
};

MoritaReport morita_report(const FellBundle& b, const FellBundle& crossed, double tol = kDefaultTolerance);

struct StabilizeOptions {
  double tolerance = kDefaultTolerance;
  Exec exec = Exec::parallel;
  /// Perturb alpha after solving; negative control for the verification.
  bool corrupt_alpha = false;
};

struct Stabilization {
  std::vector<ModuleFiber> fibers;
  std::vector<Mat> beta;
  AlphaAction alpha;
  FellBundle crossed;
  EquivalenceBimodule equivalence;
  MoritaReport morita;
  VerificationReport report;  // alpha and equivalence checks together
  std::string failed_stage;   // empty when every stage ran
  std::string failure;
};

/// Runs every stage; construction errors are recorded with the stage name.
Stabilization stabilize(const FellBundle& b, const StabilizeOptions& options = {});

}  // namespace fellstab
