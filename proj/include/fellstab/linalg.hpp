#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace fellstab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<cplx>;

/// Default relative tolerance for rank and kernel decisions and absolute
/// tolerance for axiom residuals.
inline constexpr double kDefaultTolerance = 1e-9;

/// Execution policy for the data-parallel kernels. `serial` selects the
/// reference implementation the parallel kernels are tested against.
enum class Exec { parallel, serial };

/// Singular values below rel_tol * (largest singular value) count as zero.
int numeric_rank(const Mat& m, double rel_tol = kDefaultTolerance);

/// Orthonormal basis of the kernel of m (columns).
Mat null_space(const Mat& m, double rel_tol = kDefaultTolerance);

/// Orthonormal basis of the column span of m.
Mat column_span(const Mat& m, double rel_tol = kDefaultTolerance);

/// Max absolute entry; 0 for empty input.
double max_abs(const Mat& m);
double max_abs(const Vec& v);

Vec unit_vector(int dim, int i);

/// Kronecker product a (x) b with row index (i, k) -> i * b.rows() + k.
Mat kron(const Mat& a, const Mat& b);

/// Stack the given vectors as the columns of a matrix with `rows` rows.
Mat columns(const std::vector<Vec>& vs, int rows);

}  // namespace fellstab
