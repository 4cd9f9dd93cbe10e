#include <doctest.h>

#include <random>

#include "formidex/errors.hpp"
#include "formidex/tfcore.hpp"
#include "helpers.hpp"

using namespace formidex;

TEST_CASE("line form and its closed-form inverse") {
  for (double f : {0.0, 0.5, 60.0, 1e3}) {
    const Complex s(0.0, kTwoPi * f);
    const Mat2 z = eval_z(s, 0.1, kDefaultOmega0);
    const Mat2 zi = eval_z_inverse(s, 0.1, kDefaultOmega0);
    CHECK((z * zi - Mat2::Identity()).norm() < 1e-14);
  }
  const Mat2 z = eval_z(Complex(0.0, kDefaultOmega0), 0.1, kDefaultOmega0);
  CHECK(z(0, 0) == Complex(0.1, 1.0));
  CHECK(z(0, 1) == Complex(-1.0, 0.0));
  CHECK(z(1, 0) == Complex(1.0, 0.0));
  // a^2 + 1 = 0 at a = j, i.e. s = j w0 with tau = 0
  CHECK_THROWS_AS(eval_z_inverse(Complex(0.0, kDefaultOmega0), 0.0, kDefaultOmega0), NumericalError);
}

TEST_CASE("frequency grids") {
  const auto g = default_freq_grid();
  CHECK(g.size() == 400);
  CHECK(g.hz(0) == 0.01);
  CHECK(g.hz(399) == 1000.0);
  for (std::size_t k = 1; k < g.size(); ++k) CHECK(g.hz(k) > g.hz(k - 1));
  CHECK_THROWS_AS(make_freq_grid(0.0, 10.0, 5), ConfigError);
  CHECK_THROWS_AS(make_freq_grid(10.0, 1.0, 5), ConfigError);
  CHECK_THROWS_AS(make_freq_grid(1.0, 10.0, 1), ConfigError);
  CHECK_THROWS_AS(FrequencyGrid({1.0, 1.0}), ConfigError);
  CHECK(g.s(0) == Complex(0.0, kTwoPi * 0.01));
}

TEST_CASE("singular value extremes") {
  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = 3.0;
  d(1, 1) = Complex(0.0, -5.0);
  d(2, 2) = 0.5;
  const auto ex = svd_extremes(d);
  CHECK(ex.max == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(ex.min == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(svd_extremes(Mat2::Identity()).max == 1.0);
  CMatrix bad = CMatrix::Identity(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(svd_extremes(bad), NumericalError);
  CHECK(condition_number(CMatrix::Zero(2, 2)) == std::numeric_limits<double>::infinity());
}

TEST_CASE("kron block layout") {
  RMatrix b(2, 2);
  b << 1, 2, 3, 4;
  Mat2 m;
  m << 1, Complex(0, 1), 2, 3;
  const CMatrix k = kron_block(b, m);
  CHECK(k.rows() == 4);
  CHECK(k(2, 1) == Complex(0.0, 3.0));
  CHECK(k(3, 2) == Complex(8.0, 0.0));
}

TEST_CASE("rotations") {
  const auto r = rotation(0.3);
  CHECK((r * r.transpose() - Eigen::Matrix2d::Identity()).norm() < 1e-15);
  CHECK(rotation_generator()(1, 0) == 1.0);
  CHECK((rotation(std::numbers::pi / 2) - rotation_generator()).norm() < 1e-15);
}

TEST_CASE("line parameter validation") {
  CHECK_NOTHROW(LineParams{0.0, 0.1}.validate());
  CHECK_THROWS_AS((LineParams{-0.1, 0.1}.validate()), ConfigError);
  CHECK_THROWS_AS((LineParams{0.3, 0.1, 0.0}.validate()), ConfigError);
}
