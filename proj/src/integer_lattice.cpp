#include "fellstab/integer_lattice.hpp"

#include <cstdlib>
#include <functional>
#include <numeric>
#include <utility>

#include "fellstab/error.hpp"

namespace fellstab {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorKind::InvalidInput, "integer overflow in lattice arithmetic");
  return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw Error(ErrorKind::InvalidInput, "integer overflow in lattice arithmetic");
  return r;
}

// row_i -= q * row_j
void row_axpy(IntMat& m, Eigen::Index i, Eigen::Index j, std::int64_t q) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) m(i, c) = checked_sub(m(i, c), checked_mul(q, m(j, c)));
}

void col_axpy(IntMat& m, Eigen::Index i, Eigen::Index j, std::int64_t q) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, i) = checked_sub(m(r, i), checked_mul(q, m(r, j)));
}

}  // namespace

std::vector<std::int64_t> SmithForm::diagonal() const {
  std::vector<std::int64_t> d;
  for (Eigen::Index i = 0; i < std::min(D.rows(), D.cols()); ++i) d.push_back(D(i, i));
  return d;
}

SmithForm smith_normal_form(const IntMat& a) {
  const Eigen::Index m = a.rows(), n = a.cols();
  SmithForm s;
  s.D = a;
  s.U = IntMat::Identity(m, m);
  s.V = IntMat::Identity(n, n);
  IntMat& D = s.D;

  auto swap_rows = [&](Eigen::Index i, Eigen::Index j) {
    if (i == j) return;
    D.row(i).swap(D.row(j));
    s.U.row(i).swap(s.U.row(j));
  };
  auto swap_cols = [&](Eigen::Index i, Eigen::Index j) {
    if (i == j) return;
    D.col(i).swap(D.col(j));
    s.V.col(i).swap(s.V.col(j));
  };

  for (Eigen::Index t = 0; t < std::min(m, n); ++t) {
    // Smallest nonzero |entry| in the trailing block, row-major ties.
    Eigen::Index pi = -1, pj = -1;
    for (Eigen::Index i = t; i < m; ++i)
      for (Eigen::Index j = t; j < n; ++j)
        if (D(i, j) != 0 && (pi < 0 || std::llabs(D(i, j)) < std::llabs(D(pi, pj)))) pi = i, pj = j;
    if (pi < 0) break;
    swap_rows(t, pi);
    swap_cols(t, pj);

    for (;;) {
      bool clean = true;
      for (Eigen::Index i = t + 1; i < m; ++i) {
        const std::int64_t q = D(i, t) / D(t, t);
        if (q != 0) {
          row_axpy(D, i, t, q);
          row_axpy(s.U, i, t, q);
        }
        if (D(i, t) != 0) clean = false;
      }
      for (Eigen::Index j = t + 1; j < n; ++j) {
        const std::int64_t q = D(t, j) / D(t, t);
        if (q != 0) {
          col_axpy(D, j, t, q);
          col_axpy(s.V, j, t, q);
        }
        if (D(t, j) != 0) clean = false;
      }
      if (!clean) {
        // Move the smallest remainder in row t / column t to the pivot.
        Eigen::Index bi = t, bj = t;
        for (Eigen::Index i = t + 1; i < m; ++i)
          if (D(i, t) != 0 && std::llabs(D(i, t)) < std::llabs(D(bi, bj))) bi = i, bj = t;
        for (Eigen::Index j = t + 1; j < n; ++j)
          if (D(t, j) != 0 && std::llabs(D(t, j)) < std::llabs(D(bi, bj))) bi = t, bj = j;
        swap_rows(t, bi);
        swap_cols(t, bj);
        continue;
      }
      // Divisibility: fold an offending row into row t and repeat.
      Eigen::Index bad = -1;
      for (Eigen::Index i = t + 1; i < m && bad < 0; ++i)
        for (Eigen::Index j = t + 1; j < n; ++j)
          if (D(i, j) % D(t, t) != 0) {
            bad = i;
            break;
          }
      if (bad < 0) break;
      row_axpy(D, t, bad, -1);
      row_axpy(s.U, t, bad, -1);
    }
    if (D(t, t) < 0) {
      D.row(t) = -D.row(t);
      s.U.row(t) = -s.U.row(t);
    }
    ++s.rank;
  }
  return s;
}

std::int64_t determinant(const IntMat& a) {
  const Eigen::Index n = a.rows();
  if (n != a.cols()) throw Error(ErrorKind::InvalidInput, "determinant of a non-square matrix");
  if (n == 0) return 1;
  std::vector<std::vector<__int128>> m(n, std::vector<__int128>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m[i][j] = a(i, j);
  __int128 prev = 1;
  int sign = 1;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      Eigen::Index r = k + 1;
      while (r < n && m[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(m[k], m[r]);
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i)
      for (Eigen::Index j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return static_cast<std::int64_t>(sign * m[n - 1][n - 1]);
}

int Subgroup::rank() const { return basis.cols() == 0 ? 0 : smith_normal_form(basis).rank; }

bool Subgroup::contains(const IntVec& v) const {
  if (basis.cols() == 0) return v.isZero();
  const SmithForm s = smith_normal_form(basis);
  const IntVec c = s.U * v;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (i < s.rank) {
      if (c[i] % s.D(i, i) != 0) return false;
    } else if (c[i] != 0) {
      return false;
    }
  }
  return true;
}

Subgroup zero_subgroup(int k) { return {k, IntMat(k, 0)}; }
Subgroup full_subgroup(int k) { return {k, IntMat::Identity(k, k)}; }

QuotientMonoid::QuotientMonoid(Subgroup h) : h_(std::move(h)) {
  snf_ = h_.basis.cols() == 0 ? SmithForm{IntMat::Identity(h_.k, h_.k), IntMat(h_.k, 0), IntMat(0, 0), 0}
                              : smith_normal_form(h_.basis);
}

std::vector<std::int64_t> QuotientMonoid::image(const IntVec& m) const {
  const IntVec c = snf_.U * m;
  std::vector<std::int64_t> out(c.data(), c.data() + c.size());
  for (int i = 0; i < snf_.rank; ++i) {
    const std::int64_t d = snf_.D(i, i);
    out[i] = ((out[i] % d) + d) % d;
  }
  return out;
}

bool QuotientMonoid::leq(const IntVec& m, const IntVec& n, int bound) const {
  const auto target = image(n - m);
  IntVec w = IntVec::Zero(h_.k);
  std::function<bool(int)> search = [&](int i) {
    if (i == h_.k) return image(w) == target;
    for (int v = 0; v <= bound; ++v) {
      w[i] = v;
      if (search(i + 1)) return true;
    }
    return false;
  };
  return search(0);
}

std::vector<std::vector<std::int64_t>> QuotientMonoid::generators() const {
  std::vector<std::vector<std::int64_t>> out;
  for (int i = 0; i < h_.k; ++i) {
    IntVec e = IntVec::Zero(h_.k);
    e[i] = 1;
    out.push_back(image(e));
  }
  return out;
}

DualShape dual_shape(const IntMat& relations, int n) {
  DualShape shape;
  if (relations.cols() == 0) {
    shape.torus_rank = n;
    return shape;
  }
  const SmithForm s = smith_normal_form(relations);
  shape.torus_rank = n - s.rank;
  for (int i = 0; i < s.rank; ++i)
    if (s.D(i, i) > 1) shape.finite.push_back(s.D(i, i));
  return shape;
}

}  // namespace fellstab
