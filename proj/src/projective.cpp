#include "lyap/projective.hpp"

#include <algorithm>
#include <cmath>

#include "lyap/errors.hpp"

namespace lyap {

namespace {

constexpr double kSignZero = 1e-14;

void normalize_and_canonicalize(std::vector<double>& v) {
  double norm2 = 0.0;
  for (double c : v) {
    if (!std::isfinite(c))
      throw ValidationError("bad-vector", "projective point has non-finite coordinates");
    norm2 += c * c;
  }
  if (norm2 <= 0.0)
    throw ValidationError("bad-vector", "projective point needs a non-zero vector");
  double inv = 1.0 / std::sqrt(norm2);
  for (double& c : v) c *= inv;
  for (double c : v) {
    if (std::abs(c) > kSignZero) {
      if (c < 0.0)
        for (double& e : v) e = -e;
      break;
    }
  }
}

}  // namespace

ProjPoint::ProjPoint(std::vector<double> v) : v_(std::move(v)) {
  if (v_.size() < 2)
    throw ValidationError("bad-dimension", "projective point needs dimension >= 2");
  normalize_and_canonicalize(v_);
}

ProjPoint ProjPoint::axis(int dim, int index) {
  std::vector<double> v(static_cast<size_t>(dim), 0.0);
  v[static_cast<size_t>(index)] = 1.0;
  return ProjPoint(std::move(v));
}

ProjPoint ProjPoint::from_angle(double theta) {
  return ProjPoint({std::cos(theta), std::sin(theta)});
}

double proj_metric(const ProjPoint& x, const ProjPoint& y) {
  // ||x ^ y||^2 = 1 - <x,y>^2 for unit vectors; the Gram form avoids the
  // cancellation of 1 - dot^2 near coincident lines.
  const auto& a = x.vec();
  const auto& b = y.vec();
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = i + 1; j < a.size(); ++j) {
      double w = a[i] * b[j] - a[j] * b[i];
      s += w * w;
    }
  return std::min(1.0, std::sqrt(s));
}

namespace {

ProjPoint action_impl(const Mat& m, const ProjPoint& x) {
  std::vector<double> y(static_cast<size_t>(m.d));
  matvec(m, x.vec(), y);
  return ProjPoint(std::move(y));
}

}  // namespace

ProjPoint proj_action(const InvertibleMatrix& m, const ProjPoint& x) {
  return action_impl(m.mat(), x);
}

ProjPoint proj_action(const Mat& m, const ProjPoint& x) { return action_impl(m, x); }

double log_gain(const InvertibleMatrix& m, const ProjPoint& x) {
  std::vector<double> y(static_cast<size_t>(m.dim()));
  matvec(m.mat(), x.vec(), y);
  double norm2 = 0.0;
  for (double c : y) norm2 += c * c;
  return 0.5 * std::log(norm2);
}

double angle_chart(const ProjPoint& x) {
  if (x.dim() != 2)
    throw ValidationError("unsupported-dimension", "angle chart exists only for d = 2");
  double a = std::atan2(x[1], x[0]);
  if (a < 0.0) a += kPi;
  if (a >= kPi) a = 0.0;  // fold the seam: the angle-pi line is the angle-0 line
  return a;
}

}  // namespace lyap
