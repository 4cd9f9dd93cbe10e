#include <doctest.h>

#include <cmath>

#include "../support/random_cases.hpp"
#include "formidex/case_io.hpp"
#include "formidex/errors.hpp"
#include "formidex/strength.hpp"
#include "helpers.hpp"

using namespace formidex;

namespace {

ConverterSpec static_g(double g) { return ConverterSpec::make(Strategy::StaticAdmittance, {{"g", g}}); }

std::string data_file(const char* name) { return std::string(FORMIDEX_DATA_DIR) + "/" + name; }

Network with_extra(const std::string& path, Strategy s) {
  auto c = load_case_file(path);
  c.extra->spec = ConverterSpec::make(s, {}, c.extra->spec.op);
  return Network(c);
}

}  // namespace

TEST_CASE("system strength of a single static bus at DC") {
  // 2I + [[0.1,-1],[1,0.1]]^-1 has both singular values 2.32080559587859193 (mpmath)
  SusceptanceBlocks b;
  b.b1 = RMatrix::Constant(1, 1, 1.0);
  const Network net = Network::from_blocks(b, {build_admittance(static_g(2.0))}, std::nullopt, 0.1);
  const auto p = strength_at(net, Complex(0.0, 0.0));
  CHECK(p.kappa == doctest::Approx(2.3208055958785919299).epsilon(1e-13));
  CHECK(std::isnan(p.sv_max));
}

TEST_CASE("diagonal closed loop gives kappa = |c|") {
  SusceptanceBlocks b;
  b.b1 = RMatrix::Zero(2, 2);
  const Network net = Network::from_blocks(b, {build_admittance(static_g(0.8)), build_admittance(static_g(0.8))},
                                           std::nullopt, 0.1);
  CHECK(strength_at(net, Complex(0.0, 3.0)).kappa == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("bounds hold on random cases") {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    const auto rc = fdxtest::random_case(seed, 4);
    const Network net(rc.network);
    const auto r = prop1_check(net, FrequencyGrid([&] {
                                 auto f = rc.f_hz;
                                 std::sort(f.begin(), f.end());
                                 return f;
                               }()));
    CHECK(r.all_satisfied());
  }
}

TEST_CASE("zero extra device") {
  const auto rc = fdxtest::random_case(3);
  auto c = rc.network;
  c.extra->spec = static_g(0.0);
  const Network net(c);
  const auto& b = net.blocks();
  const RMatrix coupling = b.b2 * b.b3 / b.b4;
  const double want = svd_extremes(b.b1.cast<Complex>()).min - svd_extremes(coupling.cast<Complex>()).max;
  for (double f : {0.1, 10.0, 500.0}) {
    const auto p = strength_at(net, Complex(0.0, kTwoPi * f));
    CHECK(p.sv_max == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.bound_alpha == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("ideal source extra device recovers sigma_min(B1) at high frequency") {
  const auto rc = fdxtest::random_case(5);
  auto c = rc.network;
  c.extra->spec = ConverterSpec::make(Strategy::IdealSource, {{"l_f", 1e-5}, {"r_f", 1e-6}});
  const Network net(c);
  const auto p = strength_at(net, Complex(0.0, kTwoPi * 800.0));
  CHECK(p.sv_max < 1e-3);
  const double b1_min = svd_extremes(net.blocks().b1.cast<Complex>()).min;
  CHECK(p.bound_alpha == doctest::Approx(b1_min).epsilon(1e-2));
}

TEST_CASE("alpha bound falls as the extra device sensitivity grows") {
  const auto rc = fdxtest::random_case(11);
  auto c = rc.network;
  c.extra->spec = ConverterSpec::make(Strategy::PllPq);
  const Network base(c);
  const Complex s(0.0, kTwoPi * 20.0);
  const auto p0 = strength_at(base, s);
  // a GFL device in this band has sigma_max(S_v) > 1; compare against Y = 0
  c.extra->spec = static_g(0.0);
  const auto p1 = strength_at(Network(c), s);
  CHECK(p0.sv_max > p1.sv_max);
  CHECK(p0.bound_alpha < p1.bound_alpha);
}

TEST_CASE("inverse gain equals 1/kappa") {
  const auto rc = fdxtest::random_case(21);
  const Network net(rc.network);
  for (double f : rc.f_hz) {
    const Complex s(0.0, kTwoPi * f);
    const CMatrix y = net.closed_loop(s);
    const double kappa = svd_extremes(y).min;
    const double gain = svd_extremes(y.inverse()).max;
    CHECK(gain * kappa == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("strength is covariant under uniform scaling") {
  const auto rc = fdxtest::random_case(33);
  const Network net(rc.network);
  const Network twice = net.scaled(2.0);
  for (double f : {0.3, 30.0}) {
    const Complex s(0.0, kTwoPi * f);
    const auto a = strength_at(net, s);
    const auto b = strength_at(twice, s);
    CHECK(b.kappa == doctest::Approx(2.0 * a.kappa).epsilon(1e-10));
    CHECK(b.alpha == doctest::Approx(2.0 * a.alpha).epsilon(1e-10));
  }
}

TEST_CASE("comparing a case with itself") {
  const auto rc = fdxtest::random_case(8);
  const Network net(rc.network);
  const auto cmp = compare_scenarios(net, net, make_freq_grid(0.1, 100.0, 9));
  for (double d : cmp.delta_kappa) CHECK(d == 0.0);
  for (double d : cmp.delta_alpha) CHECK(d == 0.0);
  auto other = rc.network;
  other.retained.push_back(99);
  other.buses.push_back(99);
  other.branches.push_back({99, 1, 1.0});
  other.devices.push_back({99, static_g(1.0)});
  CHECK_THROWS_AS(compare_scenarios(net, Network(other), make_freq_grid(1.0, 10.0, 3)), ConfigError);
}

TEST_CASE("39-bus: droop at bus 9 raises the worst-case system strength") {
  const auto grid = make_freq_grid(0.01, 1000.0, 60);
  const auto droop = prop1_check(with_extra(data_file("ieee39.json"), Strategy::Droop), grid);
  const auto pll = strength_sweep(with_extra(data_file("ieee39.json"), Strategy::PllPq), grid);
  CHECK(droop.all_satisfied());
  CHECK(droop.sweep.min_kappa() > pll.min_kappa());
  // the droop device is grid forming above its crossover
  REQUIRE_FALSE(droop.extra_behavior.bands.empty());
  CHECK(droop.extra_behavior.bands.back().label == Behavior::GridForming);
}
