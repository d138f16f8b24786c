#include "fellstab/stabilization.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "fellstab/error.hpp"

namespace fellstab {

void VerificationReport::add(std::string identity, std::string where, double residual) {
  lines.push_back({std::move(identity), std::move(where), residual});
}

void VerificationReport::append(const VerificationReport& other) {
  lines.insert(lines.end(), other.lines.begin(), other.lines.end());
}

bool VerificationReport::passed() const {
  return std::all_of(lines.begin(), lines.end(), [&](const CheckLine& l) { return l.residual <= tolerance; });
}

std::vector<std::string> VerificationReport::identities() const {
  std::vector<std::string> out;
  for (const auto& l : lines)
    if (std::find(out.begin(), out.end(), l.identity) == out.end()) out.push_back(l.identity);
  return out;
}

double VerificationReport::max_residual(const std::string& identity) const {
  double m = 0.0;
  for (const auto& l : lines)
    if (l.identity == identity) m = std::max(m, l.residual);
  return m;
}

std::string VerificationReport::to_text() const {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3);
  for (const auto& l : lines)
    os << (l.residual <= tolerance ? "ok   " : "FAIL ") << l.identity << " [" << l.where << "] max_residual=" << l.residual
       << '\n';
  os << "summary:\n";
  for (const auto& id : identities())
    os << "  " << id << " max_residual=" << max_residual(id) << (max_residual(id) <= tolerance ? " ok" : " FAIL") << '\n';
  return os.str();
}

namespace {

Vec tensor(const Vec& a, const Vec& b) { return kron(a, b); }

Vec vec_of(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

int position(const ModuleFiber& F, ArrowId c) {
  return F.offset[std::lower_bound(F.arrows.begin(), F.arrows.end(), c) - F.arrows.begin()];
}

}  // namespace

Vec ModuleFiber::inner_product(const Vec& u, const Vec& v) const { return inner * tensor(u.conjugate(), v); }

Mat ModuleFiber::right_mult(const Vec& a) const {
  Mat out = Mat::Zero(dim, dim);
  for (int k = 0; k < a.size(); ++k)
    if (a[k] != cplx(0.0)) out += a[k] * right[k];
  return out;
}

Mat ModuleFiber::theta(const Vec& u, const Vec& v) const {
  Mat out(dim, dim);
  for (int q = 0; q < dim; ++q) out.col(q) = right_mult(inner_product(v, unit_vector(dim, q))) * u;
  return out;
}

Vec ModuleFiber::coords(const Mat& op) const { return coords_solver * vec_of(op); }

Mat ModuleFiber::op(const Vec& c) const {
  Mat out = Mat::Zero(dim, dim);
  for (int a = 0; a < c.size(); ++a)
    if (c[a] != cplx(0.0)) out += c[a] * compact_basis[a];
  return out;
}

Mat ModuleFiber::adjoint(const Mat& T) const { return op(compacts.star(coords(T))); }

std::vector<ModuleFiber> build_module_fibers(const FellBundle& B, double tol) {
  const FiniteGroupoid& G = B.base();
  std::vector<ModuleFiber> fibers(G.num_units());
  for (UnitId x = 0; x < G.num_units(); ++x) {
    ModuleFiber& F = fibers[x];
    F.unit = x;
    F.arrows = G.arrows_with_source(x);
    F.offset.push_back(0);
    for (ArrowId c : F.arrows) F.offset.push_back(F.offset.back() + B.fiber_dim(c));
    F.dim = F.offset.back();
    const ArrowId ex = G.unit_arrow(x);
    const int da = B.fiber_dim(ex);

    F.inner = Mat::Zero(da, static_cast<Eigen::Index>(F.dim) * F.dim);
    F.right.assign(da, Mat::Zero(F.dim, F.dim));
    for (std::size_t k = 0; k < F.arrows.size(); ++k) {
      const ArrowId c = F.arrows[k];
      const int o = F.offset[k], d = B.fiber_dim(c);
      for (int i = 0; i < d; ++i) {
        const Vec ci = B.star(c, unit_vector(d, i));
        for (int j = 0; j < d; ++j)
          F.inner.col((o + i) * F.dim + o + j) = B.multiply(G.inverse(c), c, ci, unit_vector(d, j));
        for (int a = 0; a < da; ++a) F.right[a].block(o, o + i, d, 1) = B.mult(c, ex).col(i * da + a);
      }
    }
    if (numeric_rank(F.inner, tol) != da)
      throw Error(ErrorKind::NotFull, "inner products on V(" + G.unit_name(x) + ") do not span A(" + G.unit_name(x) + ")");
    for (int p = 0; p < F.dim; ++p)
      if (!B.unit_algebra(x).positive(F.inner_product(unit_vector(F.dim, p), unit_vector(F.dim, p)), tol))
        throw Error(ErrorKind::AxiomFailed, "inner product on V(" + G.unit_name(x) + ") is not positive");

    // Greedy pivoting over theta_{e_p,e_q} in lexicographic order.
    std::vector<Vec> ortho;
    const double scale = std::max(1.0, max_abs(F.inner));
    for (int p = 0; p < F.dim; ++p)
      for (int q = 0; q < F.dim; ++q) {
        const Mat T = F.theta(unit_vector(F.dim, p), unit_vector(F.dim, q));
        Vec r = vec_of(T);
        const double n0 = r.norm();
        if (n0 <= tol * scale) continue;
        for (int pass = 0; pass < 2; ++pass)
          for (const Vec& o : ortho) r -= o.dot(r) * o;
        if (r.norm() <= 1e-7 * n0) continue;
        ortho.push_back(r / r.norm());
        F.rank_one.emplace_back(p, q);
        F.compact_basis.push_back(T);
      }
    const int dk = static_cast<int>(F.compact_basis.size());
    Mat K(static_cast<Eigen::Index>(F.dim) * F.dim, dk);
    for (int a = 0; a < dk; ++a) K.col(a) = vec_of(F.compact_basis[a]);
    F.coords_solver = Eigen::CompleteOrthogonalDecomposition<Mat>(K).pseudoInverse();

    std::vector<Mat> left(dk, Mat(dk, dk));
    Mat J(dk, dk);
    std::vector<std::string> labels;
    for (int a = 0; a < dk; ++a) {
      for (int b = 0; b < dk; ++b) left[a].col(b) = F.coords(F.compact_basis[a] * F.compact_basis[b]);
      const auto [p, q] = F.rank_one[a];
      J.col(a) = F.coords(F.theta(unit_vector(F.dim, q), unit_vector(F.dim, p)));
      labels.push_back("theta(" + std::to_string(p) + "," + std::to_string(q) + ")");
    }
    F.compacts = StarAlgebra(std::move(left), std::move(J), std::move(labels));
  }
  return fibers;
}

std::vector<Mat> build_beta(const FellBundle& B, const std::vector<ModuleFiber>& fibers, double tol) {
  const FiniteGroupoid& G = B.base();
  std::vector<Mat> beta(G.num_arrows());
  for (ArrowId g = 0; g < G.num_arrows(); ++g) {
    const ModuleFiber& Fr = fibers[G.range(g)];
    const ModuleFiber& Fs = fibers[G.source(g)];
    const int db = B.fiber_dim(g);
    Mat m = Mat::Zero(Fs.dim, static_cast<Eigen::Index>(Fr.dim) * db);
    for (std::size_t k = 0; k < Fr.arrows.size(); ++k) {
      const ArrowId d = Fr.arrows[k];
      const ArrowId dg = G.compose(d, g);
      const int target = position(Fs, dg);
      for (int c = 0; c < B.fiber_dim(d); ++c)
        for (int i = 0; i < db; ++i)
          m.block(target, (Fr.offset[k] + c) * db + i, B.fiber_dim(dg), 1) = B.mult(d, g).col(c * db + i);
    }

    const ArrowId gi = G.inverse(g), er = G.unit_arrow(G.range(g));
    double iso = 0.0;
    for (int p = 0; p < Fr.dim; ++p)
      for (int q = 0; q < Fr.dim; ++q) {
        const Vec pq = Fr.inner.col(p * Fr.dim + q);
        for (int i = 0; i < db; ++i) {
          const Vec left = B.multiply(gi, er, B.star(g, unit_vector(db, i)), pq);
          for (int j = 0; j < db; ++j) {
            const Vec expect = B.multiply(gi, g, left, unit_vector(db, j));
            const Vec got = Fs.inner_product(m.col(p * db + i), m.col(q * db + j));
            iso = std::max(iso, max_abs(Vec(got - expect)));
          }
        }
      }
    if (iso > tol)
      throw Error(ErrorKind::IsometryFailed, G.arrow_name(g) + " residual " + std::to_string(iso));
    if (Fs.dim > 0 && numeric_rank(m, tol) != Fs.dim)
      throw Error(ErrorKind::NotSurjective, G.arrow_name(g));
    beta[g] = std::move(m);
  }
  return beta;
}

std::vector<Mat> solve_alpha(const FellBundle& B, const std::vector<ModuleFiber>& fibers,
                             const std::vector<Mat>& beta, double tol, Exec exec) {
  const FiniteGroupoid& G = B.base();
  const int n = G.num_arrows();
  std::vector<Mat> alpha(n);
  std::vector<std::string> errors(n);
  auto solve_one = [&](ArrowId g) {
    const ModuleFiber& Fr = fibers[G.range(g)];
    const ModuleFiber& Fs = fibers[G.source(g)];
    const int db = B.fiber_dim(g);
    const int kr = Fr.compacts.dim(), ks = Fs.compacts.dim();
    const Mat I = Mat::Identity(db, db);
    Mat sys(beta[g].size(), kr);
    for (int c = 0; c < kr; ++c) sys.col(c) = vec_of(Mat(beta[g] * kron(Fr.compact_basis[c], I)));
    Eigen::ColPivHouseholderQR<Mat> qr(sys);
    qr.setThreshold(tol);
    if (qr.rank() != kr) {
      errors[g] = G.arrow_name(g) + ": defining system is singular";
      return;
    }
    alpha[g].resize(kr, ks);
    for (int a = 0; a < ks; ++a) {
      const Vec rhs = vec_of(Mat(Fs.compact_basis[a] * beta[g]));
      const Vec sol = qr.solve(rhs);
      const double res = max_abs(Vec(sys * sol - rhs));
      if (res > tol * std::max(1.0, max_abs(rhs))) {
        errors[g] = G.arrow_name(g) + ": inconsistent, residual " + std::to_string(res);
        return;
      }
      alpha[g].col(a) = sol;
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (ArrowId g = 0; g < n; ++g) solve_one(g);
  } else {
    for (ArrowId g = 0; g < n; ++g) solve_one(g);
  }
  for (const auto& e : errors)
    if (!e.empty()) throw Error(ErrorKind::SolveFailed, e);
  return alpha;
}

VerificationReport verify_alpha(const FellBundle& B, const std::vector<ModuleFiber>& fibers,
                                const std::vector<Mat>& beta, const std::vector<Mat>& alpha, double tol) {
  const FiniteGroupoid& G = B.base();
  const int n = G.num_arrows();
  std::vector<VerificationReport> parts(n);

#pragma omp parallel for schedule(dynamic)
  for (ArrowId g = 0; g < n; ++g) {
    VerificationReport& rep = parts[g];
    const std::string at = G.arrow_name(g);
    const ArrowId gi = G.inverse(g);
    const ModuleFiber& Fr = fibers[G.range(g)];
    const ModuleFiber& Fs = fibers[G.source(g)];
    const int db = B.fiber_dim(g);
    const Mat& A = alpha[g];

    // beta_{g^-1}(beta_g(xi (x) b1) (x) b2*) = xi . (b1 b2*)
    double r2 = 0.0;
    for (int p = 0; p < Fr.dim; ++p)
      for (int i = 0; i < db; ++i) {
        const Vec img = beta[g].col(p * db + i);
        for (int j = 0; j < db; ++j) {
          const Vec b2s = B.star(g, unit_vector(db, j));
          const Vec lhs = beta[gi] * tensor(img, b2s);
          const Vec prod = B.multiply(g, gi, unit_vector(db, i), b2s);
          const Vec rhs = Fr.right_mult(prod) * unit_vector(Fr.dim, p);
          r2 = std::max(r2, max_abs(Vec(lhs - rhs)));
        }
      }
    rep.add("beta-inverse-product", at, r2);

    // beta_{gh}(xi (x) b1 b2) = beta_h(beta_g(xi (x) b1) (x) b2)
    double r7 = 0.0;
    for (ArrowId h : G.arrows_with_range(G.source(g))) {
      const ArrowId gh = G.compose(g, h);
      const int dh = B.fiber_dim(h);
      for (int p = 0; p < Fr.dim; ++p)
        for (int i = 0; i < db; ++i)
          for (int j = 0; j < dh; ++j) {
            const Vec b12 = B.multiply(g, h, unit_vector(db, i), unit_vector(dh, j));
            const Vec lhs = beta[gh] * tensor(unit_vector(Fr.dim, p), b12);
            const Vec rhs = beta[h] * tensor(beta[g].col(p * db + i), unit_vector(dh, j));
            r7 = std::max(r7, max_abs(Vec(lhs - rhs)));
          }
    }
    rep.add("beta-composition", at, r7);

    // T beta_g = beta_g (alpha_g(T) (x) Id)
    double r8 = 0.0;
    const Mat I = Mat::Identity(db, db);
    for (int a = 0; a < Fs.compacts.dim(); ++a) {
      const Mat lhs = Fs.compact_basis[a] * beta[g];
      const Mat rhs = beta[g] * kron(Fr.op(A.col(a)), I);
      r8 = std::max(r8, max_abs(Mat(lhs - rhs)));
    }
    rep.add("alpha-intertwines", at, r8);

    // alpha_g(theta_{beta_g(xi (x) b), eta}) = theta_{xi, beta_{g^-1}(eta (x) b*)}
    double r1 = 0.0;
    for (int p = 0; p < Fr.dim; ++p)
      for (int i = 0; i < db; ++i)
        for (int q = 0; q < Fs.dim; ++q) {
          const Mat T = Fs.theta(beta[g].col(p * db + i), unit_vector(Fs.dim, q));
          const Mat lhs = Fr.op(A * Fs.coords(T));
          const Vec zeta = beta[gi] * tensor(unit_vector(Fs.dim, q), B.star(g, unit_vector(db, i)));
          const Mat rhs = Fr.theta(unit_vector(Fr.dim, p), zeta);
          r1 = std::max(r1, max_abs(Mat(lhs - rhs)));
        }
    rep.add("alpha-rank-one", at, r1);

    double mult = 0.0, star = 0.0;
    for (int a = 0; a < Fs.compacts.dim(); ++a) {
      for (int b = 0; b < Fs.compacts.dim(); ++b) {
        const Vec lhs = A * Fs.compacts.left(a).col(b);
        const Vec rhs = Fr.compacts.multiply(A.col(a), A.col(b));
        mult = std::max(mult, max_abs(Vec(lhs - rhs)));
      }
      const Vec lhs = A * Fs.compacts.invol().col(a);
      const Vec rhs = Fr.compacts.star(A.col(a));
      star = std::max(star, max_abs(Vec(lhs - rhs)));
    }
    rep.add("alpha-multiplicative", at, mult);
    rep.add("alpha-star", at, star);
    const Vec one_s = Fs.coords(Mat::Identity(Fs.dim, Fs.dim));
    const Vec one_r = Fr.coords(Mat::Identity(Fr.dim, Fr.dim));
    rep.add("alpha-unital", at, max_abs(Vec(A * one_s - one_r)));

    double func = 0.0;
    for (ArrowId h : G.arrows_with_range(G.source(g)))
      func = std::max(func, max_abs(Mat(alpha[G.compose(g, h)] - A * alpha[h])));
    rep.add("alpha-functorial", at, func);
  }

  VerificationReport out;
  out.tolerance = tol;
  for (const auto& p : parts) out.append(p);
  for (UnitId x = 0; x < G.num_units(); ++x) {
    const Mat& A = alpha[G.unit_arrow(x)];
    out.add("alpha-unit-identity", G.unit_name(x), max_abs(Mat(A - Mat::Identity(A.rows(), A.cols()))));
  }
  return out;
}

AlphaAction build_alpha(const FellBundle& B, const std::vector<ModuleFiber>& fibers, const std::vector<Mat>& beta,
                        double tol, Exec exec) {
  AlphaAction out;
  out.alpha = solve_alpha(B, fibers, beta, tol, exec);
  out.report = verify_alpha(B, fibers, beta, out.alpha, tol);
  return out;
}

FellBundle crossed_product_bundle(const FellBundle& B, const std::vector<ModuleFiber>& fibers,
                                  const std::vector<Mat>& alpha, double tol) {
  std::vector<StarAlgebra> algebras;
  for (const auto& F : fibers) algebras.push_back(F.compacts);
  return from_dynamical_system(B.base(), algebras, alpha, tol);
}

Mat left_action(const StabilizationContext& ctx, const EquivalenceBimodule& e, const Vec& t_coords, ArrowId t,
                ArrowId g) {
  const FiniteGroupoid& G = ctx.bundle.base();
  const ArrowId tg = G.compose(t, g);
  const Mat T = ctx.fibers[G.range(t)].op(t_coords);
  const int vr = ctx.fibers[G.range(t)].dim;
  return kron(T, Mat::Identity(ctx.bundle.fiber_dim(tg), ctx.bundle.fiber_dim(tg))) *
         kron(Mat::Identity(vr, vr), ctx.bundle.mult(t, g)) *
         kron(e.section[t], Mat::Identity(ctx.bundle.fiber_dim(g), ctx.bundle.fiber_dim(g)));
}

Mat right_action(const StabilizationContext& ctx, ArrowId g, ArrowId h, const Vec& b) {
  const FiniteGroupoid& G = ctx.bundle.base();
  const int dg = ctx.bundle.fiber_dim(g);
  Mat m(ctx.bundle.fiber_dim(G.compose(g, h)), dg);
  for (int i = 0; i < dg; ++i) m.col(i) = ctx.bundle.multiply(g, h, unit_vector(dg, i), b);
  const int vr = ctx.fibers[G.range(g)].dim;
  return kron(Mat::Identity(vr, vr), m);
}

Vec b_inner(const StabilizationContext& ctx, ArrowId g, const Vec& e, ArrowId h, const Vec& f) {
  const FellBundle& B = ctx.bundle;
  const FiniteGroupoid& G = B.base();
  const ModuleFiber& F = ctx.fibers[G.range(g)];
  const ArrowId gi = G.inverse(g), ex = G.unit_arrow(G.range(g)), gih = G.compose(gi, h);
  const int dg = B.fiber_dim(g), dh = B.fiber_dim(h);
  Vec out = Vec::Zero(B.fiber_dim(gih));
  for (int p = 0; p < F.dim; ++p) {
    const Vec a = e.segment(p * dg, dg);
    if (max_abs(a) == 0.0) continue;
    const Vec as = B.star(g, a);
    for (int q = 0; q < F.dim; ++q) {
      const Vec b = f.segment(q * dh, dh);
      if (max_abs(b) == 0.0) continue;
      const Vec left = B.multiply(gi, ex, as, F.inner.col(p * F.dim + q));
      out += B.multiply(gi, h, left, b);
    }
  }
  return out;
}

Vec k_inner(const StabilizationContext& ctx, ArrowId g, const Vec& e, ArrowId h, const Vec& f) {
  const FellBundle& B = ctx.bundle;
  const FiniteGroupoid& G = B.base();
  const ModuleFiber& Fg = ctx.fibers[G.range(g)];
  const ModuleFiber& Fh = ctx.fibers[G.range(h)];
  const ArrowId gi = G.inverse(g), u = G.compose(h, gi);
  const int dg = B.fiber_dim(g), dh = B.fiber_dim(h);
  Mat T = Mat::Zero(Fg.dim, Fg.dim);
  for (int p = 0; p < Fg.dim; ++p) {
    const Vec a = e.segment(p * dg, dg);
    if (max_abs(a) == 0.0) continue;
    const Vec as = B.star(g, a);
    for (int q = 0; q < Fh.dim; ++q) {
      const Vec b = f.segment(q * dh, dh);
      if (max_abs(b) == 0.0) continue;
      const Vec zeta = ctx.beta[u] * tensor(unit_vector(Fh.dim, q), B.multiply(h, gi, b, as));
      T += Fg.theta(unit_vector(Fg.dim, p), zeta);
    }
  }
  return Fg.coords(T);
}

EquivalenceBimodule build_equivalence(const StabilizationContext& ctx, double tol, Exec exec) {
  const FellBundle& B = ctx.bundle;
  const FellBundle& C = ctx.crossed;
  const FiniteGroupoid& G = B.base();
  const int n = G.num_arrows();
  EquivalenceBimodule E;
  E.tensor_dim.resize(n);
  E.dim.resize(n);
  E.spanning.resize(n);
  E.section.resize(n);
  std::vector<Mat> kernel(n);
  for (ArrowId g = 0; g < n; ++g) {
    const Mat& bg = ctx.beta[g];
    E.tensor_dim[g] = static_cast<int>(bg.cols());
    Eigen::ColPivHouseholderQR<Mat> qr(bg);
    qr.setThreshold(tol);
    const int rank = static_cast<int>(qr.rank());
    E.dim[g] = rank;
    for (int k = 0; k < rank; ++k) E.spanning[g].push_back(qr.colsPermutation().indices()[k]);
    std::sort(E.spanning[g].begin(), E.spanning[g].end());
    Mat sub(bg.rows(), rank);
    for (int k = 0; k < rank; ++k) sub.col(k) = bg.col(E.spanning[g][k]);
    const Mat inv = sub.fullPivLu().inverse();
    E.section[g] = Mat::Zero(bg.cols(), bg.rows());
    for (int k = 0; k < rank; ++k) E.section[g].row(E.spanning[g][k]) = inv.row(k);
    kernel[g] = null_space(bg, tol);
  }

  auto basis = [&](ArrowId g, int k) { return unit_vector(E.tensor_dim[g], E.spanning[g][k]); };
  auto same = [&](ArrowId g, const Vec& x, const Vec& y) { return max_abs(Vec(ctx.beta[g] * (x - y))); };

  std::vector<VerificationReport> parts(n);
  auto check_arrow = [&](ArrowId g) {
    VerificationReport& rep = parts[g];
    const std::string at = G.arrow_name(g);
    const ArrowId gi = G.inverse(g);
    const UnitId rg = G.range(g), sg = G.source(g);
    const int eg = E.dim[g];

    double commute = 0.0;
    for (ArrowId t : G.arrows_with_source(rg))
      for (int c = 0; c < C.fiber_dim(t); ++c) {
        const Vec tc = unit_vector(C.fiber_dim(t), c);
        const ArrowId tg = G.compose(t, g);
        const Mat L = left_action(ctx, E, tc, t, g);
        for (ArrowId h : G.arrows_with_range(sg)) {
          const Mat L2 = left_action(ctx, E, tc, t, G.compose(g, h));
          for (int j = 0; j < B.fiber_dim(h); ++j) {
            const Vec b = unit_vector(B.fiber_dim(h), j);
            const Mat Rg = right_action(ctx, g, h, b), Rtg = right_action(ctx, tg, h, b);
            for (int k = 0; k < eg; ++k) {
              const Vec e = basis(g, k);
              commute = std::max(commute, same(G.compose(tg, h), Rtg * (L * e), L2 * (Rg * e)));
            }
          }
        }
      }
    rep.add("commuting-actions", at, commute);

    double base = 0.0;
    for (ArrowId h : G.arrows_with_range(rg))
      if (G.compose(g, G.compose(gi, h)) != h) base = 1.0;
    for (ArrowId h : G.arrows_with_source(sg))
      if (G.compose(G.compose(g, G.inverse(h)), h) != g) base = 1.0;
    rep.add("base-maps", at, base);

    double badj = 0.0, bright = 0.0;
    for (ArrowId h : G.arrows_with_range(rg)) {
      const ArrowId gih = G.compose(gi, h);
      for (int k = 0; k < eg; ++k)
        for (int l = 0; l < E.dim[h]; ++l) {
          const Vec e = basis(g, k), f = basis(h, l);
          const Vec ef = b_inner(ctx, g, e, h, f);
          badj = std::max(badj, max_abs(Vec(B.star(gih, ef) - b_inner(ctx, h, f, g, e))));
          for (ArrowId m : G.arrows_with_range(G.source(h)))
            for (int j = 0; j < B.fiber_dim(m); ++j) {
              const Vec b = unit_vector(B.fiber_dim(m), j);
              const Vec lhs = b_inner(ctx, g, e, G.compose(h, m), right_action(ctx, h, m, b) * f);
              const Vec rhs = B.multiply(gih, m, ef, b);
              bright = std::max(bright, max_abs(Vec(lhs - rhs)));
            }
        }
    }
    rep.add("b-inner-adjoint", at, badj);
    rep.add("b-inner-right-linear", at, bright);

    double kadj = 0.0, kleft = 0.0, imprim = 0.0;
    for (ArrowId h : G.arrows_with_source(sg)) {
      const ArrowId ghi = G.compose(g, G.inverse(h));
      for (int k = 0; k < eg; ++k)
        for (int l = 0; l < E.dim[h]; ++l) {
          const Vec e = basis(g, k), f = basis(h, l);
          const Vec ef = k_inner(ctx, g, e, h, f);
          kadj = std::max(kadj, max_abs(Vec(C.star(ghi, ef) - k_inner(ctx, h, f, g, e))));
          for (ArrowId t : G.arrows_with_source(rg))
            for (int c = 0; c < C.fiber_dim(t); ++c) {
              const Vec tc = unit_vector(C.fiber_dim(t), c);
              const Vec lhs = k_inner(ctx, G.compose(t, g), left_action(ctx, E, tc, t, g) * e, h, f);
              const Vec rhs = C.multiply(t, ghi, tc, ef);
              kleft = std::max(kleft, max_abs(Vec(lhs - rhs)));
            }
          for (ArrowId m : G.arrows_with_range(G.range(h))) {
            const ArrowId him = G.compose(G.inverse(h), m);
            for (int j = 0; j < E.dim[m]; ++j) {
              const Vec w = basis(m, j);
              const Vec lhs = left_action(ctx, E, ef, ghi, m) * w;
              const Vec rhs = right_action(ctx, g, him, b_inner(ctx, h, f, m, w)) * e;
              imprim = std::max(imprim, same(G.compose(ghi, m), lhs, rhs));
            }
          }
        }
    }
    rep.add("k-inner-adjoint", at, kadj);
    rep.add("k-inner-left-linear", at, kleft);
    rep.add("imprimitivity", at, imprim);

    Mat bspan(B.fiber_dim(G.unit_arrow(sg)), eg * eg), kspan(C.fiber_dim(G.unit_arrow(rg)), eg * eg);
    for (int k = 0; k < eg; ++k)
      for (int l = 0; l < eg; ++l) {
        bspan.col(k * eg + l) = b_inner(ctx, g, basis(g, k), g, basis(g, l));
        kspan.col(k * eg + l) = k_inner(ctx, g, basis(g, k), g, basis(g, l));
      }
    rep.add("full-b", at, std::abs(numeric_rank(bspan, tol) - static_cast<int>(bspan.rows())));
    rep.add("full-k", at, std::abs(numeric_rank(kspan, tol) - static_cast<int>(kspan.rows())));

    // Everything must vanish on the kernel of the balancing map.
    double wd = 0.0;
    for (Eigen::Index c = 0; c < kernel[g].cols(); ++c) {
      const Vec z = kernel[g].col(c);
      for (ArrowId h : G.arrows_with_range(rg))
        for (int l = 0; l < E.dim[h]; ++l) wd = std::max(wd, max_abs(b_inner(ctx, g, z, h, basis(h, l))));
      for (ArrowId h : G.arrows_with_source(sg))
        for (int l = 0; l < E.dim[h]; ++l) wd = std::max(wd, max_abs(k_inner(ctx, g, z, h, basis(h, l))));
      for (ArrowId t : G.arrows_with_source(rg))
        for (int a = 0; a < C.fiber_dim(t); ++a)
          wd = std::max(wd, max_abs(Vec(ctx.beta[G.compose(t, g)] *
                                        (left_action(ctx, E, unit_vector(C.fiber_dim(t), a), t, g) * z))));
      for (ArrowId h : G.arrows_with_range(sg))
        for (int j = 0; j < B.fiber_dim(h); ++j)
          wd = std::max(wd, max_abs(Vec(ctx.beta[G.compose(g, h)] *
                                        (right_action(ctx, g, h, unit_vector(B.fiber_dim(h), j)) * z))));
    }
    // The left action does not depend on the chosen preimage under beta_t.
    for (ArrowId t : G.arrows_with_source(rg)) {
      const ArrowId tg = G.compose(t, g);
      const int vr = ctx.fibers[G.range(t)].dim, dtg = B.fiber_dim(tg), dg = B.fiber_dim(g);
      for (int a = 0; a < C.fiber_dim(t); ++a) {
        const Mat T = ctx.fibers[G.range(t)].op(unit_vector(C.fiber_dim(t), a));
        const Mat act = kron(T, Mat::Identity(dtg, dtg)) * kron(Mat::Identity(vr, vr), B.mult(t, g));
        for (Eigen::Index c = 0; c < kernel[t].cols(); ++c)
          for (int i = 0; i < dg; ++i)
            wd = std::max(wd, max_abs(Vec(ctx.beta[tg] * (act * tensor(kernel[t].col(c), unit_vector(dg, i))))));
      }
    }
    rep.add("well-defined", at, wd);
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (ArrowId g = 0; g < n; ++g) check_arrow(g);
  } else {
    for (ArrowId g = 0; g < n; ++g) check_arrow(g);
  }
  E.report.tolerance = tol;
  for (const auto& p : parts) E.report.append(p);
  return E;
}

namespace {

AlgebraSummary summarize(const StarAlgebra& a, double tol) {
  AlgebraSummary s;
  s.dim = a.dim();
  s.center = center_dimension(a, tol);
  s.blocks = block_sizes(block_decompose(a, tol));
  return s;
}

}  // namespace

MoritaReport morita_report(const FellBundle& B, const FellBundle& crossed, double tol) {
  const auto a = section_algebra(B).algebra;
  const auto c = section_algebra(crossed).algebra;
  MoritaReport rep;
  rep.original = summarize(a, tol);
  rep.stabilized = summarize(c, tol);
  rep.lattices_isomorphic = posets_isomorphic(ideal_lattice(a, tol).order(), ideal_lattice(c, tol).order());
  return rep;
}

Stabilization stabilize(const FellBundle& B, const StabilizeOptions& opt) {
  Stabilization out;
  out.report.tolerance = opt.tolerance;
  std::string stage;
  try {
    stage = "build_module_fibers";
    out.fibers = build_module_fibers(B, opt.tolerance);
    stage = "build_beta";
    out.beta = build_beta(B, out.fibers, opt.tolerance);
    stage = "build_alpha";
    out.alpha.alpha = solve_alpha(B, out.fibers, out.beta, opt.tolerance, opt.exec);
    if (opt.corrupt_alpha) {
      const FiniteGroupoid& G = B.base();
      ArrowId g = 0;
      while (g + 1 < G.num_arrows() && G.is_unit_arrow(g)) ++g;
      if (out.alpha.alpha[g].size() > 0) out.alpha.alpha[g](0, 0) += 1e-3;
    }
    out.alpha.report = verify_alpha(B, out.fibers, out.beta, out.alpha.alpha, opt.tolerance);
    out.report.append(out.alpha.report);
    stage = "crossed_product_bundle";
    out.crossed = crossed_product_bundle(B, out.fibers, out.alpha.alpha, std::max(opt.tolerance, 1e-9));
    stage = "build_equivalence";
    const StabilizationContext ctx{B, out.fibers, out.beta, out.alpha.alpha, out.crossed};
    out.equivalence = build_equivalence(ctx, opt.tolerance, opt.exec);
    out.report.append(out.equivalence.report);
    stage = "morita_report";
    out.morita = morita_report(B, out.crossed, opt.tolerance);
  } catch (const Error& e) {
    out.failed_stage = stage;
    out.failure = e.what();
  }
  return out;
}

}  // namespace fellstab
