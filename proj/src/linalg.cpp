#include "fellstab/linalg.hpp"
#include "fellstab/error.hpp"

#include <algorithm>

namespace fellstab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NotSemisimple: return "NotSemisimple";
    case ErrorKind::NotFunctorial: return "NotFunctorial";
    case ErrorKind::NotStarIso: return "NotStarIso";
    case ErrorKind::CocycleIdentityFailed: return "CocycleIdentityFailed";
    case ErrorKind::NotFull: return "NotFull";
    case ErrorKind::IsometryFailed: return "IsometryFailed";
    case ErrorKind::NotSurjective: return "NotSurjective";
    case ErrorKind::SolveFailed: return "SolveFailed";
    case ErrorKind::AxiomFailed: return "AxiomFailed";
    case ErrorKind::DegreeMismatch: return "DegreeMismatch";
    case ErrorKind::IrrationalPhase: return "IrrationalPhase";
    case ErrorKind::HypothesisFailed: return "HypothesisFailed";
    case ErrorKind::HypothesisUnknown: return "HypothesisUnknown";
    case ErrorKind::InconsistentAssignment: return "InconsistentAssignment";
  }
  return "Error";
}

namespace {

int rank_from_singular_values(const Eigen::VectorXd& s, double rel_tol) {
  if (s.size() == 0) return 0;
  const double top = s.maxCoeff();
  if (top <= 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * top) ++r;
  return r;
}

}  // namespace

int numeric_rank(const Mat& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Mat> svd(m);
  return rank_from_singular_values(svd.singularValues(), rel_tol);
}

Mat null_space(const Mat& m, double rel_tol) {
  const auto n = m.cols();
  if (n == 0) return Mat(0, 0);
  if (m.rows() == 0) return Mat::Identity(n, n);
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeFullV);
  const int r = rank_from_singular_values(svd.singularValues(), rel_tol);
  return svd.matrixV().rightCols(n - r);
}

Mat column_span(const Mat& m, double rel_tol) {
  if (m.cols() == 0 || m.rows() == 0) return Mat(m.rows(), 0);
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU);
  const int r = rank_from_singular_values(svd.singularValues(), rel_tol);
  return svd.matrixU().leftCols(r);
}

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
double max_abs(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

Vec unit_vector(int dim, int i) {
  Vec v = Vec::Zero(dim);
  v[i] = 1.0;
  return v;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat columns(const std::vector<Vec>& vs, int rows) {
  Mat out(rows, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = vs[i];
  return out;
}

}  // namespace fellstab
