#include <doctest.h>

#include <cmath>

#include "lyap/errors.hpp"
#include "lyap/projective.hpp"
#include "lyap/rng.hpp"

using namespace lyap;

namespace {

InvertibleMatrix random_invertible2(RngStream& rng) {
  for (;;) {
    std::vector<double> entries(4);
    for (auto& e : entries) e = rng.uniform(-5.0, 5.0);
    try {
      return InvertibleMatrix(std::move(entries), 2);
    } catch (const ValidationError&) {
    }
  }
}

ProjPoint random_point(RngStream& rng, int d) { return ProjPoint(rng.random_unit_vector(d)); }

}  // namespace

TEST_CASE("proj_metric basics") {
  ProjPoint e1 = ProjPoint::axis(2, 0);
  ProjPoint e2 = ProjPoint::axis(2, 1);
  CHECK(proj_metric(e1, e2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(proj_metric(e1, e1) == 0.0);

  ProjPoint x({0.3, -0.8, 0.5});
  ProjPoint minus_x({-0.3, 0.8, -0.5});
  CHECK(proj_metric(x, minus_x) == 0.0);

  // Lines at angle pi/4: d_X = |sin(pi/4)| = sqrt(2)/2.
  CHECK(proj_metric(ProjPoint::from_angle(0.0), ProjPoint::from_angle(kPi / 4)) ==
        doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("sign canonicalization is bit-exact") {
  RngStream rng(11, 0);
  for (int trial = 0; trial < 200; ++trial) {
    int d = 2 + static_cast<int>(rng.next_u64() % 4);
    auto v = rng.random_unit_vector(d);
    auto flipped = v;
    for (auto& c : flipped) c = -c;
    CHECK(ProjPoint(v).same_bits(ProjPoint(flipped)));
  }
}

TEST_CASE("proj_action examples") {
  ProjPoint x({1.0, 1.0});
  CHECK(proj_metric(proj_action(InvertibleMatrix::identity(2), x), x) <= 1e-15);

  double diag[] = {2.0, 1.0};
  ProjPoint image = proj_action(InvertibleMatrix::diagonal(diag), x);
  CHECK(image[0] == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-14));
  CHECK(image[1] == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-14));

  // Rotations shift the angle chart mod pi.
  RngStream rng(12, 0);
  for (int trial = 0; trial < 100; ++trial) {
    double theta = rng.uniform(0.0, kPi);
    double phi = rng.uniform(-3.0, 3.0);
    ProjPoint moved = proj_action(InvertibleMatrix::rotation(phi), ProjPoint::from_angle(theta));
    double expected = std::fmod(theta + phi, kPi);
    if (expected < 0.0) expected += kPi;
    double got = angle_chart(moved);
    double gap = std::abs(got - expected);
    gap = std::min(gap, kPi - gap);
    CHECK(gap <= 1e-12);
  }
}

TEST_CASE("log_gain examples and bound") {
  ProjPoint e1 = ProjPoint::axis(2, 0);
  CHECK(std::abs(log_gain(InvertibleMatrix::identity(2), e1)) <= 1e-14);
  CHECK(std::abs(log_gain(InvertibleMatrix::scaled_rotation(3.5, 1.2), ProjPoint::from_angle(0.4)) -
                 std::log(3.5)) <= 1e-12);
  double diag[] = {2.0, 0.5};
  CHECK(std::abs(log_gain(InvertibleMatrix::diagonal(diag), e1) - std::log(2.0)) <= 1e-14);

  RngStream rng(13, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    InvertibleMatrix m = random_invertible2(rng);
    ProjPoint x = random_point(rng, 2);
    CHECK(std::abs(log_gain(m, x)) <= ell(m) + 1e-9);
  }
}

TEST_CASE("angle chart") {
  CHECK(angle_chart(ProjPoint::axis(2, 0)) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(angle_chart(ProjPoint::axis(2, 1)) == doctest::Approx(kPi / 2).epsilon(1e-14));
  CHECK(angle_chart(ProjPoint({1.0, 1.0})) == doctest::Approx(kPi / 4).epsilon(1e-14));
  CHECK_THROWS_AS(angle_chart(ProjPoint::axis(3, 0)), ValidationError);

  RngStream rng(14, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    double a = rng.uniform(0.0, kPi);
    double back = angle_chart(ProjPoint::from_angle(a));
    double gap = std::abs(back - a);
    gap = std::min(gap, kPi - gap);
    CHECK(gap <= 1e-12);
  }
}

TEST_CASE("metric contraction bound d_X(Mx, My) <= e^{4 ell} d_X(x, y)") {
  RngStream rng(15, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    InvertibleMatrix m = random_invertible2(rng);
    ProjPoint x = random_point(rng, 2);
    ProjPoint y = random_point(rng, 2);
    double lhs = proj_metric(proj_action(m, x), proj_action(m, y));
    CHECK(lhs <= std::exp(4.0 * ell(m)) * proj_metric(x, y) + 1e-9);
  }
}

TEST_CASE("rotations and scalar multiples act as isometries") {
  RngStream rng(16, 0);
  for (int trial = 0; trial < 300; ++trial) {
    InvertibleMatrix m = InvertibleMatrix::scaled_rotation(rng.uniform(0.2, 5.0),
                                                           rng.uniform(-3.0, 3.0));
    ProjPoint x = random_point(rng, 2);
    ProjPoint y = random_point(rng, 2);
    CHECK(std::abs(proj_metric(proj_action(m, x), proj_action(m, y)) - proj_metric(x, y)) <= 1e-12);
  }
}

TEST_CASE("log gains telescope along words") {
  RngStream rng(17, 0);
  const int n = 20;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<InvertibleMatrix> word;
    for (int m = 0; m < n; ++m) {
      // Moderate entries keep the full product inside double range.
      for (;;) {
        std::vector<double> entries(4);
        for (auto& e : entries) e = rng.uniform(-2.0, 2.0);
        try {
          word.emplace_back(entries, 2);
          break;
        } catch (const ValidationError&) {
        }
      }
    }
    ProjPoint x0 = random_point(rng, 2);

    double sum = 0.0;
    ProjPoint x = x0;
    Mat prod = Mat::identity(2);
    for (int m = 0; m < n; ++m) {
      sum += log_gain(word[static_cast<size_t>(m)], x);
      x = proj_action(word[static_cast<size_t>(m)], x);
      prod = matmul(word[static_cast<size_t>(m)].mat(), prod);  // B_n ... B_1
    }
    std::vector<double> image(2);
    matvec(prod, x0.vec(), image);
    double direct = 0.5 * std::log(image[0] * image[0] + image[1] * image[1]);
    CHECK(std::abs(direct - sum) <= 1e-9 * n);
  }
}
