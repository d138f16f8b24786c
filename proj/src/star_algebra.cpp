#include "fellstab/star_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "fellstab/error.hpp"

namespace fellstab {

namespace {

SpMat sparsify(const Mat& m) {
  SpMat s = m.sparseView(cplx(1.0), 1e-14);
  s.makeCompressed();
  return s;
}

}  // namespace

StarAlgebra::StarAlgebra(std::vector<Mat> left, Mat invol, std::vector<std::string> labels)
    : labels_(std::move(labels)), left_(std::move(left)), invol_(std::move(invol)) {
  const int n = dim();
  if (labels_.empty())
    for (int i = 0; i < n; ++i) labels_.push_back("e" + std::to_string(i));
  if (static_cast<int>(labels_.size()) != n || invol_.rows() != n || invol_.cols() != n)
    throw Error(ErrorKind::InvalidInput, "star algebra data has inconsistent dimensions");
  for (const auto& l : left_)
    if (l.rows() != n || l.cols() != n)
      throw Error(ErrorKind::InvalidInput, "left-regular matrix has wrong shape");
  for (const auto& l : left_) left_sparse_.push_back(sparsify(l));

  Vec t(n);
  for (int m = 0; m < n; ++m) t[m] = left_[m].trace();
  Mat r(n, n);
  for (int i = 0; i < n; ++i) r.row(i) = t.transpose() * left_[i];
  gram_ = invol_.transpose() * r;

  if (n == 0) return;
  const Mat herm = 0.5 * (gram_ + gram_.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(herm);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  if (ev.minCoeff() > kDefaultTolerance * std::max(1.0, top)) {
    const Mat& u = es.eigenvectors();
    unwhiten_ = u * ev.cwiseSqrt().cast<cplx>().asDiagonal() * u.adjoint();
    whiten_ = u * ev.cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal() * u.adjoint();
  }
}

Mat StarAlgebra::left_mult(const Vec& a) const {
  Mat out = Mat::Zero(dim(), dim());
  for (int i = 0; i < dim(); ++i)
    if (a[i] != cplx(0.0)) out += a[i] * left_[i];
  return out;
}

Vec StarAlgebra::multiply(const Vec& a, const Vec& b) const {
  Vec out = Vec::Zero(dim());
  for (int i = 0; i < dim(); ++i)
    if (a[i] != cplx(0.0)) out += a[i] * (left_sparse_[i] * b);
  return out;
}

Vec StarAlgebra::star(const Vec& a) const { return invol_ * a.conjugate(); }

bool StarAlgebra::semisimple(double tol) const {
  if (dim() == 0) return true;
  if (whiten_.size() == 0) return false;
  return max_abs(Mat(gram_ - gram_.adjoint())) <= tol * std::max(1.0, max_abs(gram_));
}

double StarAlgebra::norm(const Vec& a) const {
  if (whiten_.size() == 0) throw Error(ErrorKind::NotSemisimple, "norm needs a definite trace form");
  const Mat op = unwhiten_ * left_mult(a) * whiten_;
  Eigen::JacobiSVD<Mat> svd(op);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

bool StarAlgebra::positive(const Vec& a, double tol) const {
  if (whiten_.size() == 0) throw Error(ErrorKind::NotSemisimple, "positivity needs a definite trace form");
  const double scale = std::max(1.0, max_abs(a));
  if (max_abs(Vec(a - star(a))) > tol * scale) return false;
  const Mat op = unwhiten_ * left_mult(a) * whiten_;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (op + op.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().size() == 0 || es.eigenvalues().minCoeff() >= -tol * scale * dim();
}

double associativity_residual(const StarAlgebra& a, Exec exec) {
  const int n = a.dim();
  std::vector<double> worst(n, 0.0);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
      const SpMat& li = a.left_sparse(i);
      for (int j = 0; j < n; ++j) {
        SpMat diff = li * a.left_sparse(j);
        for (SpMat::InnerIterator it(li, j); it; ++it) diff -= it.value() * a.left_sparse(static_cast<int>(it.row()));
        for (int c = 0; c < diff.outerSize(); ++c)
          for (SpMat::InnerIterator it(diff, c); it; ++it) worst[i] = std::max(worst[i], std::abs(it.value()));
      }
    }
  } else {
    // Literal (e_i e_j) e_k against e_i (e_j e_k).
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Vec eij = a.left(i).col(j);
        for (int k = 0; k < n; ++k) {
          Vec lhs = Vec::Zero(n);
          for (int m = 0; m < n; ++m) lhs += eij[m] * a.left(m).col(k);
          const Vec rhs = a.left(i) * a.left(j).col(k);
          worst[i] = std::max(worst[i], max_abs(Vec(lhs - rhs)));
        }
      }
  }
  return n == 0 ? 0.0 : *std::max_element(worst.begin(), worst.end());
}

ValidationReport validate_star_algebra(const StarAlgebra& a, double tol, Exec exec) {
  ValidationReport rep;
  const int n = a.dim();
  if (n == 0) return rep;
  const double assoc = associativity_residual(a, exec);
  if (assoc > tol) rep.add("associativity", "structure constants", assoc);

  const Mat& J = a.invol();
  const double order = max_abs(Mat(J * J.conjugate() - Mat::Identity(n, n)));
  if (order > tol) rep.add("involution-order", "J conj(J) != I", order);

  double anti = 0.0;
  int wi = 0, wj = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec lhs = a.star(a.left(i).col(j));
      const Vec rhs = a.multiply(J.col(j), J.col(i));
      const double r = max_abs(Vec(lhs - rhs));
      if (r > anti) anti = r, wi = i, wj = j;
    }
  if (anti > tol)
    rep.add("involution-antimultiplicative", "(" + a.label(wi) + "," + a.label(wj) + ")", anti);

  const Mat& G = a.trace_gram();
  const double scale = std::max(1.0, max_abs(G));
  const double herm = max_abs(Mat(G - G.adjoint()));
  if (herm > tol * scale) rep.add("trace-form-hermitian", "trace Gram matrix", herm);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (G + G.adjoint()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol * scale)
    rep.add("trace-form-positive", "trace Gram matrix", -es.eigenvalues().minCoeff());
  return rep;
}

namespace {

Mat commutator_system(const StarAlgebra& a) {
  const int n = a.dim();
  Mat sys(static_cast<Eigen::Index>(n) * n, n);
  for (int b = 0; b < n; ++b) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m.col(i) = a.left(i).col(b);
    sys.middleRows(static_cast<Eigen::Index>(b) * n, n) = m - a.left(b);
  }
  return sys;
}

}  // namespace

int center_dimension(const StarAlgebra& a, double tol) {
  if (a.dim() == 0) return 0;
  return static_cast<int>(null_space(commutator_system(a), tol).cols());
}

std::vector<Block> block_decompose(const StarAlgebra& a, double tol) {
  const int n = a.dim();
  if (n == 0) return {};
  if (!a.semisimple(tol)) throw Error(ErrorKind::NotSemisimple, "trace form is degenerate");
  const Mat& G = a.trace_gram();

  const Mat Z = null_space(commutator_system(a), tol);
  const int m = static_cast<int>(Z.cols());
  const Mat C = Z.adjoint() * G * Z;
  Eigen::SelfAdjointEigenSolver<Mat> ces(0.5 * (C + C.adjoint()));
  if (ces.eigenvalues().minCoeff() <= tol * std::max(1.0, ces.eigenvalues().maxCoeff()))
    throw Error(ErrorKind::NotSemisimple, "trace form degenerates on the center");
  const Mat Q = Z * ces.eigenvectors() *
                ces.eigenvalues().cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal() *
                ces.eigenvectors().adjoint();

  std::vector<Mat> pieces{Mat::Identity(m, m)};
  auto split_by = [&](const Vec& h) {
    const Mat M = Q.adjoint() * G * (a.left_mult(h) * Q);
    std::vector<Mat> next;
    for (const Mat& W : pieces) {
      if (W.cols() == 1) {
        next.push_back(W);
        continue;
      }
      const Mat H = W.adjoint() * M * W;
      Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (H + H.adjoint()));
      const Eigen::VectorXd& ev = es.eigenvalues();
      const double gap = 1e-6 * (1.0 + ev.cwiseAbs().maxCoeff());
      Eigen::Index start = 0;
      for (Eigen::Index i = 1; i <= ev.size(); ++i) {
        if (i == ev.size() || ev[i] - ev[i - 1] > gap) {
          next.push_back(W * es.eigenvectors().middleCols(start, i - start));
          start = i;
        }
      }
    }
    pieces = std::move(next);
  };
  for (int j = 0; j < m && static_cast<int>(pieces.size()) < m; ++j) {
    const Vec q = Q.col(j);
    split_by(q + a.star(q));
    if (static_cast<int>(pieces.size()) < m) split_by(cplx(0.0, 1.0) * (q - a.star(q)));
  }
  if (static_cast<int>(pieces.size()) != m)
    throw Error(ErrorKind::NotSemisimple, "center does not split into minimal projections");

  std::vector<Block> blocks;
  for (const Mat& W : pieces) {
    const Vec v = Q * W.col(0);
    const Vec vv = a.multiply(v, v);
    const cplx c = v.dot(vv) / v.dot(v);
    if (std::abs(c) <= tol) throw Error(ErrorKind::NotSemisimple, "central element is nilpotent");
    Block b;
    b.projection = v / c;
    const double idem = max_abs(Vec(a.multiply(b.projection, b.projection) - b.projection));
    if (idem > 1e-6) throw Error(ErrorKind::NotSemisimple, "central idempotent residual too large");
    const int rank = numeric_rank(a.left_mult(b.projection), tol);
    b.size = static_cast<int>(std::lround(std::sqrt(static_cast<double>(rank))));
    if (b.size * b.size != rank)
      throw Error(ErrorKind::NotSemisimple, "block of dimension " + std::to_string(rank) + " is not square");
    const double top = max_abs(b.projection);
    b.first_index = 0;
    while (std::abs(b.projection[b.first_index]) <= 1e-7 * top) ++b.first_index;
    blocks.push_back(std::move(b));
  }
  std::sort(blocks.begin(), blocks.end(), [](const Block& x, const Block& y) {
    return x.size != y.size ? x.size < y.size : x.first_index < y.first_index;
  });
  return blocks;
}

std::vector<int> block_sizes(const std::vector<Block>& blocks) {
  std::vector<int> out;
  for (const auto& b : blocks) out.push_back(b.size);
  return out;
}

std::vector<std::vector<bool>> IdealLattice::order() const {
  const auto n = ideals.size();
  std::vector<std::vector<bool>> le(n, std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) le[i][j] = contains(static_cast<int>(j), static_cast<int>(i));
  return le;
}

IdealLattice ideal_lattice(const StarAlgebra& a, double tol) {
  const auto blocks = block_decompose(a, tol);
  const int m = static_cast<int>(blocks.size());
  if (m > 20) throw Error(ErrorKind::InvalidInput, "too many blocks to enumerate ideals");
  IdealLattice lat;
  lat.blocks = m;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    Vec p = Vec::Zero(a.dim());
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) p += blocks[i].projection;
    Ideal I;
    I.mask = mask;
    I.basis = mask == 0 ? Mat(a.dim(), 0) : column_span(a.left_mult(p), tol);
    lat.ideals.push_back(std::move(I));
  }
  return lat;
}

bool posets_isomorphic(const std::vector<std::vector<bool>>& a,
                       const std::vector<std::vector<bool>>& b) {
  const int n = static_cast<int>(a.size());
  if (static_cast<int>(b.size()) != n) return false;
  auto degrees = [n](const std::vector<std::vector<bool>>& r, int i) {
    int up = 0, down = 0;
    for (int j = 0; j < n; ++j) up += r[i][j], down += r[j][i];
    return std::pair{up, down};
  };
  std::vector<int> map(n, -1);
  std::vector<char> used(n, 0);
  std::function<bool(int)> extend = [&](int i) {
    if (i == n) return true;
    for (int j = 0; j < n; ++j) {
      if (used[j] || degrees(a, i) != degrees(b, j)) continue;
      bool ok = a[i][i] == b[j][j];
      for (int k = 0; ok && k < i; ++k)
        ok = a[i][k] == b[j][map[k]] && a[k][i] == b[map[k]][j];
      if (!ok) continue;
      map[i] = j;
      used[j] = 1;
      if (extend(i + 1)) return true;
      used[j] = 0;
    }
    map[i] = -1;
    return false;
  };
  return extend(0);
}

StarAlgebra matrix_algebra(int n) {
  const int d = n * n;
  std::vector<Mat> left(d, Mat::Zero(d, d));
  Mat J = Mat::Zero(d, d);
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      labels.push_back("E" + std::to_string(i) + std::to_string(j));
      J(j * n + i, i * n + j) = 1.0;
      for (int l = 0; l < n; ++l) left[i * n + j](i * n + l, j * n + l) = 1.0;
    }
  return StarAlgebra(std::move(left), std::move(J), std::move(labels));
}

StarAlgebra diagonal_algebra(int n) {
  std::vector<Mat> left(n, Mat::Zero(n, n));
  for (int i = 0; i < n; ++i) left[i](i, i) = 1.0;
  return StarAlgebra(std::move(left), Mat::Identity(n, n));
}

StarAlgebra direct_sum(const StarAlgebra& a, const StarAlgebra& b) {
  const int da = a.dim(), db = b.dim(), d = da + db;
  std::vector<Mat> left;
  std::vector<std::string> labels;
  for (int i = 0; i < da; ++i) {
    Mat l = Mat::Zero(d, d);
    l.topLeftCorner(da, da) = a.left(i);
    left.push_back(std::move(l));
    labels.push_back("a." + a.label(i));
  }
  for (int i = 0; i < db; ++i) {
    Mat l = Mat::Zero(d, d);
    l.bottomRightCorner(db, db) = b.left(i);
    left.push_back(std::move(l));
    labels.push_back("b." + b.label(i));
  }
  Mat J = Mat::Zero(d, d);
  J.topLeftCorner(da, da) = a.invol();
  J.bottomRightCorner(db, db) = b.invol();
  return StarAlgebra(std::move(left), std::move(J), std::move(labels));
}

}  // namespace fellstab
