#include <doctest.h>

#include <cmath>

#include "lyap/errors.hpp"
#include "lyap/matrix.hpp"
#include "lyap/rng.hpp"

using namespace lyap;

namespace {

// Random invertible matrix with entries in [-5, 5]; resamples rejected input.
InvertibleMatrix random_invertible(RngStream& rng, int d) {
  for (;;) {
    std::vector<double> entries(static_cast<size_t>(d) * d);
    for (auto& e : entries) e = rng.uniform(-5.0, 5.0);
    try {
      return InvertibleMatrix(std::move(entries), d);
    } catch (const ValidationError&) {
    }
  }
}

double ell_raw(const Mat& m) {
  auto sigma = singular_values(m);
  return std::max(log_plus(sigma.front()), log_plus(1.0 / sigma.back()));
}

}  // namespace

TEST_CASE("operator norm on closed-form cases") {
  CHECK(operator_norm(InvertibleMatrix::identity(2)) == doctest::Approx(1.0).epsilon(1e-12));

  double diag[] = {2.0, 0.5};
  CHECK(operator_norm(InvertibleMatrix::diagonal(diag)) == doctest::Approx(2.0).epsilon(1e-12));

  // Shear [[1,1],[0,1]]: M^T M = [[1,1],[1,2]], so sigma_1^2 = (3+sqrt(5))/2
  // by the quadratic formula.
  InvertibleMatrix shear({1.0, 1.0, 0.0, 1.0}, 2);
  double oracle = std::sqrt((3.0 + std::sqrt(5.0)) / 2.0);
  CHECK(std::abs(operator_norm(shear) - oracle) <= 1e-10);
}

TEST_CASE("ell on closed-form cases") {
  CHECK(ell(InvertibleMatrix::identity(3)) <= 1e-12);
  CHECK(ell(InvertibleMatrix::rotation(0.7)) <= 1e-12);

  double diag[] = {2.0, 0.5};
  InvertibleMatrix m = InvertibleMatrix::diagonal(diag);
  // Singular values of a diagonal matrix are the |entries|.
  CHECK(std::abs(m.sigma_max() - 2.0) <= 1e-12);
  CHECK(std::abs(m.sigma_min() - 0.5) <= 1e-12);
  CHECK(std::abs(ell(m) - std::log(2.0)) <= 1e-12);
}

TEST_CASE("wedge2_log_det") {
  CHECK(wedge2_log_det(InvertibleMatrix::identity(2)) == doctest::Approx(0.0).epsilon(1e-14));
  double diag[] = {2.0, 0.5};
  CHECK(std::abs(wedge2_log_det(InvertibleMatrix::diagonal(diag))) <= 1e-12);
  CHECK(std::abs(wedge2_log_det(InvertibleMatrix::scaled_rotation(3.0, 0.9)) - 2.0 * std::log(3.0)) <=
        1e-12);
  CHECK_THROWS_AS(wedge2_log_det(InvertibleMatrix::identity(3)), ValidationError);
}

TEST_CASE("construction rejects singular and malformed input") {
  CHECK_THROWS_AS(InvertibleMatrix({1.0, 2.0, 2.0, 4.0}, 2), ValidationError);
  CHECK_THROWS_AS(InvertibleMatrix({1.0, 0.0, 0.0, 0.0}, 2), ValidationError);
  CHECK_THROWS_AS(InvertibleMatrix({1.0, 2.0, 3.0}, 2), ValidationError);
  try {
    InvertibleMatrix({1.0, 2.0, 2.0, 4.0}, 2);
    CHECK(false);
  } catch (const ValidationError& e) {
    CHECK(e.category() == "matrix-not-invertible");
  }
}

TEST_CASE("inverse residual stays below 1e-10") {
  RngStream rng(2024, 0);
  for (int trial = 0; trial < 200; ++trial) {
    int d = 2 + static_cast<int>(rng.next_u64() % 4);
    InvertibleMatrix m = random_invertible(rng, d);
    Mat prod = matmul(m.mat(), m.inverse());
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        CHECK(std::abs(prod.at(r, c) - (r == c ? 1.0 : 0.0)) <= 1e-10);
  }
}

TEST_CASE("ell is subadditive under products") {
  RngStream rng(7, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    int d = trial % 2 == 0 ? 2 : 3;
    InvertibleMatrix a = random_invertible(rng, d);
    InvertibleMatrix b = random_invertible(rng, d);
    double lhs = ell_raw(matmul(a.mat(), b.mat()));
    CHECK(lhs <= ell(a) + ell(b) + 1e-9);
  }
}

TEST_CASE("d=2 exterior power bound |log|det|| <= 2 ell") {
  RngStream rng(8, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    InvertibleMatrix m = random_invertible(rng, 2);
    CHECK(std::abs(std::log(std::abs(m.det()))) <= 2.0 * ell(m) + 1e-9);
  }
}

TEST_CASE("operator norm is transpose invariant") {
  RngStream rng(9, 0);
  for (int trial = 0; trial < 500; ++trial) {
    int d = 2 + static_cast<int>(rng.next_u64() % 3);
    InvertibleMatrix m = random_invertible(rng, d);
    CHECK(std::abs(operator_norm(m) - operator_norm(m.transposed())) <= 1e-10);
  }
}

TEST_CASE("matrix family caches ell and K") {
  std::vector<InvertibleMatrix> mats;
  double diag[] = {2.0, 0.5};
  mats.push_back(InvertibleMatrix::diagonal(diag));
  mats.push_back(InvertibleMatrix::rotation(1.0));
  MatrixFamily family(std::move(mats));
  CHECK(family.size() == 2);
  CHECK(std::abs(family.ell_of(0) - std::log(2.0)) <= 1e-12);
  CHECK(family.ell_of(1) <= 1e-12);
  CHECK(std::abs(family.max_ell() - std::log(2.0)) <= 1e-12);
}
