#pragma once

#include <vector>

#include "lyap/matrix.hpp"

namespace lyap {

inline constexpr double kPi = 3.14159265358979323846;

// Point of RP^{d-1} stored as a sign-canonicalized unit vector: the first
// coordinate of magnitude > 1e-14 is positive, so ProjPoint(x) and
// ProjPoint(-x) are bit-for-bit identical.
class ProjPoint {
 public:
  explicit ProjPoint(std::vector<double> v);

  static ProjPoint axis(int dim, int index);
  static ProjPoint from_angle(double theta);  // d = 2 line at the given angle

  int dim() const { return static_cast<int>(v_.size()); }
  const std::vector<double>& vec() const { return v_; }
  double operator[](int i) const { return v_[static_cast<size_t>(i)]; }

  bool same_bits(const ProjPoint& other) const { return v_ == other.v_; }

 private:
  std::vector<double> v_;
};

/// d_X(x, y) = sqrt(1 - <x,y>^2), computed via the wedge norm so small
/// separations keep full relative precision. Value in [0, 1].
double proj_metric(const ProjPoint& x, const ProjPoint& y);

/// Normalized action M.x = Mx / ||Mx||, canonicalized.
ProjPoint proj_action(const InvertibleMatrix& m, const ProjPoint& x);
ProjPoint proj_action(const Mat& m, const ProjPoint& x);

/// log ||Mx|| for unit x; bounded by ell(M) in magnitude.
double log_gain(const InvertibleMatrix& m, const ProjPoint& x);

/// Angle of the line in [0, pi); d = 2 only. Inverse of from_angle.
double angle_chart(const ProjPoint& x);

}  // namespace lyap
