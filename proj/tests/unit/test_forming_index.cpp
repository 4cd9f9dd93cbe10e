#include <doctest.h>

#include "formidex/errors.hpp"
#include "formidex/forming_index.hpp"
#include "helpers.hpp"

using namespace formidex;

TEST_CASE("sensitivity of a unit static admittance at the base frequency") {
  // inverse of [[1.03+0.3j, -0.3], [0.3, 1.03+0.3j]], mpmath
  const auto y = build_admittance(ConverterSpec::make(Strategy::StaticAdmittance, {{"g", 1.0}}));
  const Mat2 sv = sensitivity(y, LineParams{0.3, 0.1}, Complex(0.0, kDefaultOmega0));
  fdxtest::check_close(sv(0, 0), {0.84788323003265398233, -0.21113378844394396716}, 1e-13);
  fdxtest::check_close(sv(0, 1), {0.21113378844394396716, -0.12299055637511298284}, 1e-13);
  fdxtest::check_close(sv(1, 0), {-0.21113378844394396716, 0.12299055637511298284}, 1e-13);
  fdxtest::check_close(sv(1, 1), {0.84788323003265398233, -0.21113378844394396716}, 1e-13);
}

TEST_CASE("zero admittance or zero line gives identity") {
  const auto grid = default_freq_grid();
  const auto zero = ConverterSpec::make(Strategy::StaticAdmittance, {{"g", 0.0}});
  for (double fi : forming_index_sweep(zero, LineParams{0.3, 0.1}, grid).fi) CHECK(fi == 1.0);
  for (Strategy s : control_strategies()) {
    const auto sw = forming_index_sweep(ConverterSpec::make(s), LineParams{0.0, 0.1}, grid);
    for (double fi : sw.fi) CHECK(fi == 1.0);
  }
}

TEST_CASE("grid-following strategies stay above one") {
  const auto grid = default_freq_grid();
  for (Strategy s : {Strategy::PllPq, Strategy::PllPv}) {
    const auto sw = forming_index_sweep(ConverterSpec::make(s), LineParams{}, grid);
    for (double fi : sw.fi) CHECK(fi > 1.0);
  }
}

TEST_CASE("grid-forming strategies reject voltage above 100 Hz") {
  const auto grid = default_freq_grid();
  for (Strategy s : {Strategy::Droop, Strategy::Vsg, Strategy::Vfc, Strategy::PllGfm}) {
    const auto sw = forming_index_sweep(ConverterSpec::make(s), LineParams{}, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (grid.hz(k) > 100.0) CHECK(sw.fi[k] < 1.0);
    }
  }
}

TEST_CASE("pll_pq peak grows with line inductance") {
  const auto grid = default_freq_grid();
  double prev = 0.0;
  for (double lg : {0.2, 0.4, 0.6}) {
    const auto sw = forming_index_sweep(ConverterSpec::make(Strategy::PllPq), LineParams{lg, 0.1}, grid);
    const double peak = *std::max_element(sw.fi.begin(), sw.fi.end());
    CHECK(peak > prev);
    prev = peak;
  }
}

TEST_CASE("ideal source approaches FI = 0 as its filter shrinks") {
  const Complex s(0.0, kTwoPi * 10.0);
  double prev = 2.0;
  for (double lf : {0.1, 0.01, 1e-3, 1e-4}) {
    const auto y = build_admittance(ConverterSpec::make(Strategy::IdealSource, {{"l_f", lf}, {"r_f", lf / 10}}));
    const double fi = svd_extremes(sensitivity(y, LineParams{}, s)).max;
    CHECK(fi < prev);
    prev = fi;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("sweep is deterministic and ordered by the grid") {
  const auto grid = make_freq_grid(0.1, 100.0, 37);
  const auto a = forming_index_sweep(ConverterSpec::make(Strategy::Vsg), LineParams{}, grid);
  const auto b = forming_index_sweep(ConverterSpec::make(Strategy::Vsg), LineParams{}, grid);
  CHECK(a.fi == b.fi);
  const auto y = build_admittance(ConverterSpec::make(Strategy::Vsg));
  CHECK(a.fi[5] == svd_extremes(sensitivity(y, LineParams{}, grid.s(5))).max);
}

TEST_CASE("classification") {
  SUBCASE("constant one is a single inclusive GFM band") {
    const auto c = classify({1.0, 10.0, 100.0}, {1.0, 1.0, 1.0});
    REQUIRE(c.bands.size() == 1);
    CHECK(c.bands[0].label == Behavior::GridForming);
    CHECK(c.crossovers.empty());
  }
  SUBCASE("constant 1.5 is GFL") {
    const auto c = classify({1.0, 10.0}, {1.5, 1.5});
    REQUIRE(c.bands.size() == 1);
    CHECK(c.bands[0].label == Behavior::GridFollowing);
  }
  SUBCASE("one crossing") {
    const auto c = classify({1.0, 10.0}, {2.0, 0.5});
    REQUIRE(c.crossovers.size() == 1);
    const double x = c.crossovers[0];
    // t = 1/1.5 of the way in log10
    CHECK(x == doctest::Approx(std::pow(10.0, 2.0 / 3.0)).epsilon(1e-12));
    REQUIRE(c.bands.size() == 2);
    CHECK(c.bands[0].f_low == 1.0);
    CHECK(c.bands[0].f_high == x);
    CHECK(c.bands[0].label == Behavior::GridFollowing);
    CHECK(c.bands[1].f_low == x);
    CHECK(c.bands[1].f_high == 10.0);
    CHECK(c.bands[1].label == Behavior::GridForming);
  }
  CHECK_THROWS_AS(classify({}, {}), ConfigError);
}

TEST_CASE("evaluation failures name the point") {
  const auto y = build_admittance(ConverterSpec::make(Strategy::Droop));
  try {
    sensitivity(y, LineParams{}, Complex(0.0, 0.0));
    FAIL("expected an error");
  } catch (const NumericalError& e) {
    REQUIRE(e.point().has_value());
    CHECK(*e.point() == Complex(0.0, 0.0));
  }
}
