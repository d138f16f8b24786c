#include "fellstab/fell_bundle.hpp"

#include <algorithm>
#include <cmath>

#include "fellstab/error.hpp"

namespace fellstab {

namespace {

StarAlgebra algebra_from_tensor(const Mat& m, const Mat& j, int d) {
  std::vector<Mat> left(d, Mat(d, d));
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) left[i].col(k) = m.col(i * d + k);
  return StarAlgebra(std::move(left), j);
}

std::string names(const FiniteGroupoid& G, std::initializer_list<ArrowId> arrows) {
  std::string out = "(";
  for (auto a : arrows) out += (out.size() > 1 ? "," : "") + G.arrow_name(a);
  return out + ")";
}

}  // namespace

FellBundle::FellBundle(FiniteGroupoid base, std::vector<int> fiber_dim, std::vector<Mat> mult,
                       std::vector<Mat> invol)
    : base_(std::move(base)), dims_(std::move(fiber_dim)), mult_(std::move(mult)), invol_(std::move(invol)) {
  const int n = base_.num_arrows();
  if (static_cast<int>(dims_.size()) != n || static_cast<int>(invol_.size()) != n ||
      mult_.size() != static_cast<std::size_t>(n) * n)
    throw Error(ErrorKind::InvalidInput, "bundle tables do not match the base groupoid");
  for (ArrowId g = 0; g < n; ++g) {
    const ArrowId gi = base_.inverse(g);
    if (invol_[g].rows() != dims_[gi] || invol_[g].cols() != dims_[g])
      throw Error(ErrorKind::InvalidInput, "involution on " + base_.arrow_name(g) + " has wrong shape");
    for (ArrowId h = 0; h < n; ++h) {
      const Mat& m = mult_[index(g, h)];
      if (!base_.composable(g, h)) {
        if (m.size() != 0)
          throw Error(ErrorKind::InvalidInput, "product given for non-composable " + names(base_, {g, h}));
        continue;
      }
      const ArrowId gh = base_.compose(g, h);
      if (gh == kNoArrow) continue;
      if (m.rows() != dims_[gh] || m.cols() != dims_[g] * dims_[h])
        throw Error(ErrorKind::InvalidInput, "product on " + names(base_, {g, h}) + " has wrong shape");
    }
  }
  rebuild_units();
}

void FellBundle::rebuild_units() {
  units_.clear();
  for (UnitId x = 0; x < base_.num_units(); ++x) {
    const ArrowId e = base_.unit_arrow(x);
    units_.push_back(algebra_from_tensor(mult(e, e), invol_[e], dims_[e]));
  }
}

void FellBundle::set_mult(ArrowId g, ArrowId h, Mat m) {
  mult_[index(g, h)] = std::move(m);
  rebuild_units();
}

Vec FellBundle::multiply(ArrowId g, ArrowId h, const Vec& b, const Vec& c) const {
  Vec bc(dims_[g] * dims_[h]);
  for (int i = 0; i < dims_[g]; ++i) bc.segment(i * dims_[h], dims_[h]) = b[i] * c;
  return mult(g, h) * bc;
}

namespace {

struct Worst {
  double residual = 0.0;
  std::string witness;
  void take(double r, const std::string& w) {
    if (r > residual) residual = r, witness = w;
  }
};

// Triple and pair checks anchored at arrow g.
void check_arrow(const FellBundle& B, ArrowId g, Worst& assoc, Worst& anti) {
  const FiniteGroupoid& G = B.base();
  const int dg = B.fiber_dim(g);
  for (ArrowId h : G.arrows_with_range(G.source(g))) {
    const ArrowId gh = G.compose(g, h);
    const int dh = B.fiber_dim(h);
    for (ArrowId k : G.arrows_with_range(G.source(h))) {
      const ArrowId hk = G.compose(h, k);
      const int dk = B.fiber_dim(k);
      const ArrowId ghk = G.compose(gh, k);
      const int dgh = B.fiber_dim(gh), dhk = B.fiber_dim(hk), dghk = B.fiber_dim(ghk);
      const Mat& left = B.mult(gh, k);
      const Mat& right = B.mult(g, hk);
      const Mat& inner = B.mult(h, k);
      double worst = 0.0;
      // (e_i e_j) e_l against e_i (e_j e_l), all l at once.
      for (int i = 0; i < dg; ++i)
        for (int j = 0; j < dh; ++j) {
          const Vec x = B.mult(g, h).col(i * dh + j);
          Mat lhs = Mat::Zero(dghk, dk);
          for (int m = 0; m < dgh; ++m)
            if (x[m] != cplx(0.0)) lhs += x[m] * left.middleCols(m * dk, dk);
          const Mat rhs = right.middleCols(i * dhk, dhk) * inner.middleCols(j * dk, dk);
          worst = std::max(worst, max_abs(Mat(lhs - rhs)));
        }
      assoc.take(worst, names(G, {g, h, k}));
    }
    const ArrowId gi = G.inverse(g), hi = G.inverse(h);
    for (int i = 0; i < dg; ++i)
      for (int j = 0; j < dh; ++j) {
        const Vec ei = unit_vector(dg, i), ej = unit_vector(dh, j);
        const Vec lhs = B.star(gh, B.multiply(g, h, ei, ej));
        const Vec rhs = B.multiply(hi, gi, B.star(h, ej), B.star(g, ei));
        anti.take(max_abs(Vec(lhs - rhs)), names(G, {g, h}));
      }
  }
}

std::vector<Vec> probe_vectors(int d) {
  std::vector<Vec> out;
  for (int i = 0; i < d; ++i) out.push_back(unit_vector(d, i));
  if (d <= 6)
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        out.push_back(unit_vector(d, i) + unit_vector(d, j));
        out.push_back(unit_vector(d, i) + cplx(0.0, 1.0) * unit_vector(d, j));
      }
  return out;
}

}  // namespace

ValidationReport validate_bundle(const FellBundle& B, double tol, Exec exec) {
  ValidationReport rep;
  const FiniteGroupoid& G = B.base();
  const int n = G.num_arrows();

  std::vector<Worst> assoc(n), anti(n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (ArrowId g = 0; g < n; ++g) check_arrow(B, g, assoc[g], anti[g]);
  } else {
    for (ArrowId g = 0; g < n; ++g) check_arrow(B, g, assoc[g], anti[g]);
  }
  for (ArrowId g = 0; g < n; ++g)
    if (assoc[g].residual > tol) rep.add("associativity", assoc[g].witness, assoc[g].residual);
  for (ArrowId g = 0; g < n; ++g)
    if (anti[g].residual > tol) rep.add("involution-antimultiplicative", anti[g].witness, anti[g].residual);

  for (ArrowId g = 0; g < n; ++g) {
    const ArrowId gi = G.inverse(g);
    const double r = max_abs(Mat(B.invol(gi) * B.invol(g).conjugate() - Mat::Identity(B.fiber_dim(g), B.fiber_dim(g))));
    if (r > tol) rep.add("involution-order", names(G, {g}), r);
  }

  bool units_ok = true;
  for (UnitId x = 0; x < G.num_units(); ++x) {
    const auto sub = validate_star_algebra(B.unit_algebra(x), tol, exec);
    for (const auto& v : sub.violations) rep.add("unit-fiber", G.unit_name(x) + " " + v.axiom, v.residual);
    if (!sub.valid() || !B.unit_algebra(x).semisimple(tol)) units_ok = false;
  }
  if (!units_ok) return rep;

  for (ArrowId g = 0; g < n; ++g) {
    const ArrowId gi = G.inverse(g);
    const UnitId r = G.range(g), s = G.source(g);
    const StarAlgebra& Ar = B.unit_algebra(r);
    const StarAlgebra& As = B.unit_algebra(s);
    Worst cstar;
    for (const Vec& b : probe_vectors(B.fiber_dim(g))) {
      const Vec bstar = B.star(g, b);
      const Vec left = B.multiply(gi, g, bstar, b);   // b* b in A(s(g))
      const Vec right = B.multiply(g, gi, b, bstar);  // b b* in A(r(g))
      if (!As.positive(left, tol) || !Ar.positive(right, tol)) {
        rep.add("positivity", names(G, {g}));
        break;
      }
      const double nl = As.norm(left), nr = Ar.norm(right);
      cstar.take(std::abs(nl - nr) / std::max(1.0, nl), names(G, {g}));
      const double sq = As.norm(As.multiply(As.star(left), left));
      cstar.take(std::abs(sq - nl * nl) / std::max(1.0, nl * nl), names(G, {g}));
    }
    if (cstar.residual > tol * 100) rep.add("c-star-identity", cstar.witness, cstar.residual);

    const int d = B.fiber_dim(g);
    Mat outer(Ar.dim(), d * d), inner(As.dim(), d * d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const Vec ei = unit_vector(d, i), ej = unit_vector(d, j);
        outer.col(i * d + j) = B.multiply(g, gi, ei, B.star(g, ej));
        inner.col(i * d + j) = B.multiply(gi, g, B.star(g, ei), ej);
      }
    if ((d == 0 ? 0 : numeric_rank(outer, tol)) != Ar.dim() ||
        (d == 0 ? 0 : numeric_rank(inner, tol)) != As.dim())
      rep.add("saturation", names(G, {g}));
  }
  return rep;
}

FellBundle from_dynamical_system(const FiniteGroupoid& G, const std::vector<StarAlgebra>& algebras,
                                 const std::vector<Mat>& act, double tol) {
  const int n = G.num_arrows();
  if (static_cast<int>(algebras.size()) != G.num_units() || static_cast<int>(act.size()) != n)
    throw Error(ErrorKind::InvalidInput, "dynamical system data does not match the groupoid");
  for (ArrowId g = 0; g < n; ++g) {
    const StarAlgebra& As = algebras[G.source(g)];
    const StarAlgebra& Ar = algebras[G.range(g)];
    const Mat& a = act[g];
    if (a.rows() != Ar.dim() || a.cols() != As.dim())
      throw Error(ErrorKind::InvalidInput, "action on " + G.arrow_name(g) + " has wrong shape");
    if (a.rows() != a.cols() || numeric_rank(a, tol) != a.cols())
      throw Error(ErrorKind::NotStarIso, G.arrow_name(g) + " is not invertible");
    for (int i = 0; i < As.dim(); ++i) {
      const Vec ei = unit_vector(As.dim(), i);
      if (max_abs(Vec(a * As.star(ei) - Ar.star(a * ei))) > tol)
        throw Error(ErrorKind::NotStarIso, G.arrow_name(g) + " does not preserve the involution");
      for (int j = 0; j < As.dim(); ++j) {
        const Vec ej = unit_vector(As.dim(), j);
        if (max_abs(Vec(a * As.multiply(ei, ej) - Ar.multiply(a * ei, a * ej))) > tol)
          throw Error(ErrorKind::NotStarIso, G.arrow_name(g) + " is not multiplicative");
      }
    }
  }
  for (UnitId x = 0; x < G.num_units(); ++x) {
    const ArrowId e = G.unit_arrow(x);
    if (max_abs(Mat(act[e] - Mat::Identity(act[e].rows(), act[e].cols()))) > tol)
      throw Error(ErrorKind::NotFunctorial, "unit " + G.unit_name(x) + " does not act trivially");
  }
  for (ArrowId g = 0; g < n; ++g)
    for (ArrowId h : G.arrows_with_range(G.source(g)))
      if (max_abs(Mat(act[G.compose(g, h)] - act[g] * act[h])) > tol)
        throw Error(ErrorKind::NotFunctorial, names(G, {g, h}));

  std::vector<int> dims(n);
  for (ArrowId g = 0; g < n; ++g) dims[g] = algebras[G.range(g)].dim();
  std::vector<Mat> mult(static_cast<std::size_t>(n) * n), invol(n);
  for (ArrowId g = 0; g < n; ++g) {
    const StarAlgebra& Ar = algebras[G.range(g)];
    const int dr = Ar.dim();
    for (ArrowId h : G.arrows_with_range(G.source(g))) {
      const int dh = dims[h];
      Mat m(dr, dr * dh);
      for (int i = 0; i < dr; ++i)
        for (int j = 0; j < dh; ++j) m.col(i * dh + j) = Ar.multiply(unit_vector(dr, i), act[g] * unit_vector(dh, j));
      mult[static_cast<std::size_t>(g) * n + h] = std::move(m);
    }
    invol[g] = act[G.inverse(g)] * Ar.invol();
  }
  return FellBundle(G, std::move(dims), std::move(mult), std::move(invol));
}

FellBundle line_bundle(const FiniteGroupoid& G, const CocycleFn& sigma) {
  const int n = G.num_arrows();
  std::vector<Mat> mult(static_cast<std::size_t>(n) * n), invol(n);
  for (ArrowId g = 0; g < n; ++g) {
    for (ArrowId h : G.arrows_with_range(G.source(g))) {
      Mat m(1, 1);
      m(0, 0) = sigma(g, h);
      mult[static_cast<std::size_t>(g) * n + h] = std::move(m);
    }
    Mat j(1, 1);
    j(0, 0) = std::conj(sigma(g, G.inverse(g)));
    invol[g] = std::move(j);
  }
  return FellBundle(G, std::vector<int>(n, 1), std::move(mult), std::move(invol));
}

FellBundle from_cocycle(const FiniteGroupoid& G, const CocycleFn& sigma, double tol) {
  for (ArrowId g = 0; g < G.num_arrows(); ++g) {
    if (std::abs(std::abs(sigma(g, G.inverse(g))) - 1.0) > tol)
      throw Error(ErrorKind::CocycleIdentityFailed, "phase off the unit circle at " + names(G, {g, G.inverse(g)}));
    const ArrowId er = G.unit_arrow(G.range(g)), es = G.unit_arrow(G.source(g));
    if (std::abs(sigma(er, g) - 1.0) > tol || std::abs(sigma(g, es) - 1.0) > tol)
      throw Error(ErrorKind::CocycleIdentityFailed, "not normalized at " + names(G, {g}));
    for (ArrowId h : G.arrows_with_range(G.source(g)))
      for (ArrowId k : G.arrows_with_range(G.source(h))) {
        const cplx lhs = sigma(g, h) * sigma(G.compose(g, h), k);
        const cplx rhs = sigma(h, k) * sigma(g, G.compose(h, k));
        if (std::abs(lhs - rhs) > tol) throw Error(ErrorKind::CocycleIdentityFailed, names(G, {g, h, k}));
      }
  }
  return line_bundle(G, sigma);
}

SectionAlgebra section_algebra(const FellBundle& B, Exec exec) {
  const FiniteGroupoid& G = B.base();
  const int n = G.num_arrows();
  SectionAlgebra out;
  out.offset.resize(n + 1, 0);
  for (ArrowId g = 0; g < n; ++g) out.offset[g + 1] = out.offset[g] + B.fiber_dim(g);
  const int dim = out.offset[n];
  std::vector<Mat> left(dim, Mat::Zero(dim, dim));
  std::vector<std::string> labels(dim);
  const auto& off = out.offset;

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (ArrowId g = 0; g < n; ++g) {
      const int dg = B.fiber_dim(g);
      for (ArrowId h : G.arrows_with_range(G.source(g))) {
        const ArrowId gh = G.compose(g, h);
        const int dh = B.fiber_dim(h);
        const Mat& m = B.mult(g, h);
        for (int i = 0; i < dg; ++i)
          for (int j = 0; j < dh; ++j)
            left[off[g] + i].block(off[gh], off[h] + j, B.fiber_dim(gh), 1) = m.col(i * dh + j);
      }
    }
  } else {
    // (f1 * f2)(c) = sum over a in G^{r(c)} of f1(a) f2(a^{-1} c), on basis sections.
    for (ArrowId g = 0; g < n; ++g)
      for (int i = 0; i < B.fiber_dim(g); ++i)
        for (ArrowId h = 0; h < n; ++h)
          for (int j = 0; j < B.fiber_dim(h); ++j)
            for (ArrowId c = 0; c < n; ++c) {
              Vec acc = Vec::Zero(B.fiber_dim(c));
              for (ArrowId a : G.arrows_with_range(G.range(c))) {
                const ArrowId rest = G.compose(G.inverse(a), c);
                if (a != g || rest != h) continue;
                acc += B.multiply(a, rest, unit_vector(B.fiber_dim(g), i), unit_vector(B.fiber_dim(h), j));
              }
              left[off[g] + i].block(off[c], off[h] + j, B.fiber_dim(c), 1) = acc;
            }
  }

  Mat J = Mat::Zero(dim, dim);
  for (ArrowId g = 0; g < n; ++g) {
    J.block(off[G.inverse(g)], off[g], B.fiber_dim(G.inverse(g)), B.fiber_dim(g)) = B.invol(g);
    for (int i = 0; i < B.fiber_dim(g); ++i) labels[off[g] + i] = G.arrow_name(g) + "#" + std::to_string(i);
  }
  out.algebra = StarAlgebra(std::move(left), std::move(J), std::move(labels));
  return out;
}

}  // namespace fellstab
