#include "lyap/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <utility>

namespace lyap {

Mat Mat::identity(int dim) {
  Mat m(dim);
  for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
  return m;
}

Mat matmul(const Mat& x, const Mat& y) {
  Mat out(x.d);
  for (int r = 0; r < x.d; ++r) {
    for (int c = 0; c < x.d; ++c) {
      double s = 0.0;
      for (int q = 0; q < x.d; ++q) s += x.at(r, q) * y.at(q, c);
      out.at(r, c) = s;
    }
  }
  return out;
}

void matmul_into(const Mat& x, const Mat& y, Mat& out) {
  for (int r = 0; r < x.d; ++r) {
    for (int c = 0; c < x.d; ++c) {
      double s = 0.0;
      for (int q = 0; q < x.d; ++q) s += x.at(r, q) * y.at(q, c);
      out.at(r, c) = s;
    }
  }
}

Mat transpose(const Mat& m) {
  Mat out(m.d);
  for (int r = 0; r < m.d; ++r)
    for (int c = 0; c < m.d; ++c) out.at(c, r) = m.at(r, c);
  return out;
}

void matvec(const Mat& m, std::span<const double> x, std::span<double> out) {
  for (int r = 0; r < m.d; ++r) {
    double s = 0.0;
    for (int c = 0; c < m.d; ++c) s += m.at(r, c) * x[static_cast<size_t>(c)];
    out[static_cast<size_t>(r)] = s;
  }
}

double frobenius_norm(const Mat& m) {
  double s = 0.0;
  for (double v : m.a) s += v * v;
  return std::sqrt(s);
}

double max_abs(const Mat& m) {
  double s = 0.0;
  for (double v : m.a) s = std::max(s, std::abs(v));
  return s;
}

void scale_in_place(Mat& m, double s) {
  for (double& v : m.a) v *= s;
}

double determinant(const Mat& m) {
  Mat lu = m;
  int d = m.d;
  double det = 1.0;
  for (int col = 0; col < d; ++col) {
    int pivot = col;
    for (int r = col + 1; r < d; ++r)
      if (std::abs(lu.at(r, col)) > std::abs(lu.at(pivot, col))) pivot = r;
    if (lu.at(pivot, col) == 0.0) return 0.0;
    if (pivot != col) {
      for (int c = 0; c < d; ++c) std::swap(lu.at(pivot, c), lu.at(col, c));
      det = -det;
    }
    det *= lu.at(col, col);
    for (int r = col + 1; r < d; ++r) {
      double f = lu.at(r, col) / lu.at(col, col);
      for (int c = col + 1; c < d; ++c) lu.at(r, c) -= f * lu.at(col, c);
    }
  }
  return det;
}

bool invert(const Mat& m, Mat& out) {
  int d = m.d;
  Mat work = m;
  out = Mat::identity(d);
  for (int col = 0; col < d; ++col) {
    int pivot = col;
    for (int r = col + 1; r < d; ++r)
      if (std::abs(work.at(r, col)) > std::abs(work.at(pivot, col))) pivot = r;
    double p = work.at(pivot, col);
    if (p == 0.0 || !std::isfinite(p)) return false;
    if (pivot != col) {
      for (int c = 0; c < d; ++c) {
        std::swap(work.at(pivot, c), work.at(col, c));
        std::swap(out.at(pivot, c), out.at(col, c));
      }
    }
    double inv_p = 1.0 / work.at(col, col);
    for (int c = 0; c < d; ++c) {
      work.at(col, c) *= inv_p;
      out.at(col, c) *= inv_p;
    }
    for (int r = 0; r < d; ++r) {
      if (r == col) continue;
      double f = work.at(r, col);
      if (f == 0.0) continue;
      for (int c = 0; c < d; ++c) {
        work.at(r, c) -= f * work.at(col, c);
        out.at(r, c) -= f * out.at(col, c);
      }
    }
  }
  return true;
}

std::vector<double> singular_values(const Mat& m) {
  // Hestenes one-sided Jacobi: orthogonalize column pairs until all cross
  // products vanish; singular values are the final column norms.
  int d = m.d;
  Mat a = m;
  const double tol = 1e-15;
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool converged = true;
    for (int p = 0; p < d - 1; ++p) {
      for (int q = p + 1; q < d; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int r = 0; r < d; ++r) {
          double vp = a.at(r, p), vq = a.at(r, q);
          app += vp * vp;
          aqq += vq * vq;
          apq += vp * vq;
        }
        if (std::abs(apq) <= tol * std::sqrt(app * aqq)) continue;
        converged = false;
        double tau = (aqq - app) / (2.0 * apq);
        double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = c * t;
        for (int r = 0; r < d; ++r) {
          double vp = a.at(r, p), vq = a.at(r, q);
          a.at(r, p) = c * vp - s * vq;
          a.at(r, q) = s * vp + c * vq;
        }
      }
    }
    if (converged) break;
  }
  std::vector<double> sigma(static_cast<size_t>(d));
  for (int c = 0; c < d; ++c) {
    double s = 0.0;
    for (int r = 0; r < d; ++r) s += a.at(r, c) * a.at(r, c);
    sigma[static_cast<size_t>(c)] = std::sqrt(s);
  }
  std::sort(sigma.begin(), sigma.end(), std::greater<double>());
  return sigma;
}

double log_plus(double x) { return std::max(std::log(x), 0.0); }

InvertibleMatrix::InvertibleMatrix(std::vector<double> entries, int dim) {
  if (dim < 2) throw ValidationError("bad-dimension", "matrix dimension must be >= 2");
  if (entries.size() != static_cast<size_t>(dim) * static_cast<size_t>(dim))
    throw ValidationError("bad-dimension", "entry count does not match dimension");
  mat_.d = dim;
  mat_.a = std::move(entries);
  validate_and_cache();
}

InvertibleMatrix::InvertibleMatrix(Mat m) : mat_(std::move(m)) {
  if (mat_.d < 2) throw ValidationError("bad-dimension", "matrix dimension must be >= 2");
  validate_and_cache();
}

void InvertibleMatrix::validate_and_cache() {
  for (double v : mat_.a) {
    if (!std::isfinite(v))
      throw ValidationError("matrix-not-invertible", "matrix has non-finite entries");
  }
  det_ = determinant(mat_);
  double fro = frobenius_norm(mat_);
  double gate = 1e-12 * std::pow(fro, mat_.d);
  if (!(std::abs(det_) > gate))
    throw ValidationError("matrix-not-invertible",
                          "matrix is numerically singular (|det| below scale-invariant gate)");
  if (!invert(mat_, inv_))
    throw ValidationError("matrix-not-invertible", "matrix inversion failed");
  // Residual check on the materialized inverse.
  Mat prod = matmul(mat_, inv_);
  double resid = 0.0;
  for (int r = 0; r < mat_.d; ++r)
    for (int c = 0; c < mat_.d; ++c)
      resid = std::max(resid, std::abs(prod.at(r, c) - (r == c ? 1.0 : 0.0)));
  if (!(resid <= 1e-10))
    throw ValidationError("matrix-not-invertible", "inverse residual exceeds 1e-10");
  sigma_ = singular_values(mat_);
}

InvertibleMatrix InvertibleMatrix::identity(int dim) {
  return InvertibleMatrix(Mat::identity(dim));
}

InvertibleMatrix InvertibleMatrix::rotation(double phi) {
  Mat m(2);
  m.at(0, 0) = std::cos(phi);
  m.at(0, 1) = -std::sin(phi);
  m.at(1, 0) = std::sin(phi);
  m.at(1, 1) = std::cos(phi);
  return InvertibleMatrix(std::move(m));
}

InvertibleMatrix InvertibleMatrix::diagonal(std::span<const double> diag) {
  Mat m(static_cast<int>(diag.size()));
  for (size_t i = 0; i < diag.size(); ++i) m.at(static_cast<int>(i), static_cast<int>(i)) = diag[i];
  return InvertibleMatrix(std::move(m));
}

InvertibleMatrix InvertibleMatrix::scaled_rotation(double c, double phi) {
  Mat m(2);
  m.at(0, 0) = c * std::cos(phi);
  m.at(0, 1) = -c * std::sin(phi);
  m.at(1, 0) = c * std::sin(phi);
  m.at(1, 1) = c * std::cos(phi);
  return InvertibleMatrix(std::move(m));
}

InvertibleMatrix InvertibleMatrix::transposed() const {
  return InvertibleMatrix(transpose(mat_));
}

double operator_norm(const InvertibleMatrix& m) { return m.sigma_max(); }

double ell(const InvertibleMatrix& m) {
  return std::max(log_plus(m.sigma_max()), log_plus(1.0 / m.sigma_min()));
}

double wedge2_log_det(const InvertibleMatrix& m) {
  if (m.dim() != 2)
    throw ValidationError("unsupported-dimension", "wedge2_log_det requires d = 2");
  return std::log(std::abs(m.det()));
}

MatrixFamily::MatrixFamily(std::vector<InvertibleMatrix> mats) : mats_(std::move(mats)) {
  if (mats_.empty()) throw ValidationError("empty-family", "matrix family must be non-empty");
  int d = mats_.front().dim();
  ells_.reserve(mats_.size());
  for (const auto& m : mats_) {
    if (m.dim() != d)
      throw ValidationError("bad-dimension", "all family matrices must share one dimension");
    ells_.push_back(ell(m));
    max_ell_ = std::max(max_ell_, ells_.back());
  }
}

MatrixFamily MatrixFamily::transposed() const {
  std::vector<InvertibleMatrix> out;
  out.reserve(mats_.size());
  for (const auto& m : mats_) out.push_back(m.transposed());
  return MatrixFamily(std::move(out));
}

}  // namespace lyap
