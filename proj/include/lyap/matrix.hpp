#pragma once

#include <span>
#include <vector>

#include "lyap/errors.hpp"

namespace lyap {

// Dense row-major d x d matrix with the small-d helpers the estimators need.
// Carries no validity guarantees; see InvertibleMatrix for the checked type.
// Long cocycle products are accumulated on Mat so that near-rank-deficient
// intermediates never hit the invertibility gate.
struct Mat {
  int d = 0;
  std::vector<double> a;  // row-major, size d*d

  Mat() = default;
  explicit Mat(int dim, double fill = 0.0)
      : d(dim), a(static_cast<size_t>(dim) * static_cast<size_t>(dim), fill) {}

  double& at(int r, int c) { return a[static_cast<size_t>(r) * d + c]; }
  double at(int r, int c) const { return a[static_cast<size_t>(r) * d + c]; }

  static Mat identity(int dim);
};

Mat matmul(const Mat& x, const Mat& y);
// out must be preallocated and distinct from x and y.
void matmul_into(const Mat& x, const Mat& y, Mat& out);
Mat transpose(const Mat& m);
void matvec(const Mat& m, std::span<const double> x, std::span<double> out);
double frobenius_norm(const Mat& m);
double max_abs(const Mat& m);
void scale_in_place(Mat& m, double s);

// Determinant by LU with partial pivoting.
double determinant(const Mat& m);

// Gauss-Jordan with partial pivoting; returns false on pivot collapse.
bool invert(const Mat& m, Mat& out);

// Singular values in descending order via one-sided Jacobi. For the d <= 8
// matrices used here this converges to ~1e-15 relative accuracy.
std::vector<double> singular_values(const Mat& m);

double log_plus(double x);

// Invertible d x d matrix (d >= 2). Construction rejects numerically singular
// input at |det| <= 1e-12 * ||M||_F^d and checks the materialized inverse
// against ||M M^-1 - I||_inf <= 1e-10. Immutable afterwards; singular values
// and ell are cached.
class InvertibleMatrix {
 public:
  InvertibleMatrix(std::vector<double> entries, int dim);
  explicit InvertibleMatrix(Mat m);

  static InvertibleMatrix identity(int dim);
  static InvertibleMatrix rotation(double phi);  // d = 2
  static InvertibleMatrix diagonal(std::span<const double> diag);
  static InvertibleMatrix scaled_rotation(double c, double phi);  // c * R(phi)

  int dim() const { return mat_.d; }
  double at(int r, int c) const { return mat_.at(r, c); }
  const Mat& mat() const { return mat_; }
  const Mat& inverse() const { return inv_; }
  double det() const { return det_; }
  double sigma_max() const { return sigma_.front(); }
  double sigma_min() const { return sigma_.back(); }
  const std::vector<double>& sigma() const { return sigma_; }

  InvertibleMatrix transposed() const;

 private:
  void validate_and_cache();

  Mat mat_;
  Mat inv_;
  std::vector<double> sigma_;  // descending
  double det_ = 0.0;
};

/// Spectral norm, i.e. the largest singular value.
double operator_norm(const InvertibleMatrix& m);

/// ell(M) = max(log+ ||M||, log+ ||M^-1||); controls all distortion bounds.
double ell(const InvertibleMatrix& m);

/// log |det M| for d = 2 (the second exterior power collapses to det).
double wedge2_log_det(const InvertibleMatrix& m);

// The k generator matrices with cached ell values and K = max ell.
class MatrixFamily {
 public:
  explicit MatrixFamily(std::vector<InvertibleMatrix> mats);

  int size() const { return static_cast<int>(mats_.size()); }
  int dim() const { return mats_.front().dim(); }
  const InvertibleMatrix& operator[](int i) const { return mats_[static_cast<size_t>(i)]; }
  double ell_of(int i) const { return ells_[static_cast<size_t>(i)]; }
  double max_ell() const { return max_ell_; }

  MatrixFamily transposed() const;

 private:
  std::vector<InvertibleMatrix> mats_;
  std::vector<double> ells_;
  double max_ell_ = 0.0;
};

}  // namespace lyap
