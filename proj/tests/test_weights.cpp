#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <molli/weights.hpp>
#include <molli/windows.hpp>

using namespace molli;

namespace {
const Grid g1 = make_grid(1, 16.0, 4096);
}

TEST_CASE("builtin systems evaluate as defined") {
  WeightSystem one = builtin_system(WeightTag::one);
  CHECK(one.weight(3, 7.7) == 1.0);

  WeightSystem pol = builtin_system(WeightTag::pol);
  CHECK(pol.weight(2, 0.0) == Catch::Approx(1.0));
  CHECK(pol.weight(2, 3.0) == Catch::Approx(std::pow(std::sqrt(10.0), 2.0)));

  WeightSystem exp = builtin_system(WeightTag::exp);
  CHECK(exp.weight(1, 3.0) == Catch::Approx(std::exp(3.0)));

  CHECK_THROWS_AS(builtin_system("nope"), std::invalid_argument);
}

TEST_CASE("weights are >= 1 and monotone in n") {
  for (auto tag : {WeightTag::one, WeightTag::log, WeightTag::pol, WeightTag::exp}) {
    WeightSystem W = builtin_system(tag);
    for (int n = 0; n < 8; ++n)
      for (double r = 0.0; r <= 16.0; r += 0.37) {
        REQUIRE(W.log_weight(n, r) >= -1e-12);
        REQUIRE(W.log_weight(n, r) <= W.log_weight(n + 1, r) + 1e-12);
      }
  }
}

TEST_CASE("(wM) on the builtin systems") {
  CheckResult r = check_wM(builtin_system(WeightTag::exp), 1, 9, g1);
  REQUIRE(r.passed);
  CHECK(*r.witness_m == 1);
  CHECK(*r.constant_C <= std::exp(1.0) * (1.0 + 1e-9));
  CHECK(*r.constant_C >= std::exp(1.0) * 0.99);  // attained at y = 1

  r = check_wM(builtin_system(WeightTag::one), 2, 10, g1);
  REQUIRE(r.passed);
  CHECK(*r.witness_m == 2);
  CHECK(*r.constant_C == Catch::Approx(1.0));

  r = check_wM(builtin_system(WeightTag::pol), 1, 9, g1);
  REQUIRE(r.passed);
  CHECK(*r.witness_m == 1);
  CHECK(*r.constant_C <= 2.0);
  // the true sup of <x+y>/<x> over |y|<=1 is the golden ratio
  CHECK(*r.constant_C == Catch::Approx(1.6180339887).margin(2e-3));
}

TEST_CASE("(wN) reproduces the example matrix") {
  CHECK_FALSE(check_wN(builtin_system(WeightTag::one), 1, 9, g1).passed);

  CheckResult r = check_wN(builtin_system(WeightTag::log), 1, 9, g1);
  REQUIRE(r.passed);
  CHECK(*r.witness_m > 1);

  r = check_wN(builtin_system(WeightTag::exp), 1, 9, g1);
  REQUIRE(r.passed);
  CHECK(*r.witness_m == 2);
  CHECK(*r.constant_C == Catch::Approx(std::exp(-16.0)).epsilon(1e-6));

  r = check_wN(builtin_system(WeightTag::pol), 1, 9, g1);
  REQUIRE(r.passed);
}

TEST_CASE("(N) far-field shell quadrature reproduces the example matrix") {
  CHECK_FALSE(check_N(builtin_system(WeightTag::one), 0, 8, g1).passed);
  CHECK_FALSE(check_N(builtin_system(WeightTag::log), 0, 8, g1).passed);
  CHECK_FALSE(check_N(builtin_system(WeightTag::log), 1, 9, g1).passed);

  CheckResult r = check_N(builtin_system(WeightTag::pol), 0, 8, g1);
  REQUIRE(r.passed);
  CHECK(*r.witness_m == 2);  // m - n > d forced analytically
  // the L1 mass of <x>^{-2} is pi
  CHECK(*r.constant_C == Catch::Approx(3.14159265).epsilon(1e-2));

  r = check_N(builtin_system(WeightTag::exp), 1, 9, g1);
  REQUIRE(r.passed);
  CHECK(*r.witness_m == 2);
}

TEST_CASE("(N) in two dimensions needs m - n > 2 for the polynomial system") {
  Grid g2 = make_grid(2, 8.0, 256);
  CheckResult r = check_N(builtin_system(WeightTag::pol), 0, 8, g2);
  REQUIRE(r.passed);
  CHECK(*r.witness_m == 3);
}

TEST_CASE("moderateness") {
  WeightSystem Wexp = builtin_system(WeightTag::exp);
  CheckResult r = check_moderate(Wexp, Wexp, 1, 9, g1);
  REQUIRE(r.passed);
  CHECK(*r.witness_m == 1);
  CHECK(*r.constant_C == Catch::Approx(1.0).margin(1e-9));

  WeightSystem Wpol = builtin_system(WeightTag::pol);
  r = check_moderate(Wpol, Wpol, 1, 9, g1);
  REQUIRE(r.passed);  // Peetre inequality

  r = check_moderate(Wexp, builtin_system(WeightTag::one), 1, 9, g1);
  CHECK_FALSE(r.passed);  // ratio e^{|x+y|-|x|} grows like e^{|y|}
}

TEST_CASE("squarability") {
  CheckResult r = check_squarable(builtin_system(WeightTag::exp), 1, 9, g1);
  REQUIRE(r.passed);
  CHECK(*r.witness_m == 2);
  CHECK(*r.constant_C == Catch::Approx(1.0));

  r = check_squarable(builtin_system(WeightTag::one), 3, 11, g1);
  REQUIRE(r.passed);
  CHECK(*r.witness_m == 3);
  CHECK(*r.constant_C == Catch::Approx(1.0));

  // custom w_n = e^{n x^2} squares exactly onto m = 2n
  WeightSystem Wsq = WeightSystem::custom("x*x");
  r = check_squarable(Wsq, 1, 9, g1);
  REQUIRE(r.passed);
  CHECK(*r.witness_m == 2);
}

TEST_CASE("check results survive constant rescaling of the system") {
  for (auto tag : {WeightTag::one, WeightTag::log, WeightTag::pol, WeightTag::exp}) {
    WeightSystem W = builtin_system(tag);
    WeightSystem Wc = WeightSystem::scaled(W, 7.5);
    CHECK(check_wM(W, 1, 9, g1).passed == check_wM(Wc, 1, 9, g1).passed);
    CHECK(check_wN(W, 1, 9, g1).passed == check_wN(Wc, 1, 9, g1).passed);
    CHECK(check_N(W, 1, 9, g1).passed == check_N(Wc, 1, 9, g1).passed);
    CHECK(check_squarable(W, 1, 9, g1).passed == check_squarable(Wc, 1, 9, g1).passed);
  }
}

TEST_CASE("(wM) + (N) imply (wN) on the builtins") {
  for (auto tag : {WeightTag::one, WeightTag::log, WeightTag::pol, WeightTag::exp}) {
    WeightSystem W = builtin_system(tag);
    for (int n = 0; n <= 2; ++n) {
      if (check_wM(W, n, n + 8, g1).passed && check_N(W, n, n + 8, g1).passed)
        CHECK(check_wN(W, n, n + 8, g1).passed);
    }
  }
}

TEST_CASE("smoothing a weight system") {
  Grid g = make_grid(1, 16.0, 2048);
  SampledField bump = standard_bump_field(g);

  WeightSystem one_s = smooth_system(builtin_system(WeightTag::one), bump, 4);
  for (double r = 0.0; r <= 14.0; r += 0.5)
    CHECK(one_s.log_weight(2, r) == Catch::Approx(0.0).margin(1e-9));

  WeightSystem exp_s = smooth_system(builtin_system(WeightTag::exp), bump, 4);
  for (double r = 0.0; r <= 14.0; r += 0.5) {
    CHECK(exp_s.log_weight(1, r) <= r + 0.5 + 1e-9);
    CHECK(exp_s.log_weight(1, r) >= std::max(0.0, r - 0.5) - 1e-9);
    CHECK(exp_s.log_weight(1, r) <= exp_s.log_weight(2, r) + 1e-12);
  }

  // smoothed system keeps (wM), constant within a factor of the original
  CheckResult orig = check_wM(builtin_system(WeightTag::exp), 1, 9, g);
  CheckResult smth = check_wM(exp_s, 1, 9, g);
  REQUIRE(smth.passed);
  CHECK(*smth.constant_C <= *orig.constant_C * std::exp(1.0));

  // bump validation
  SampledField bad = bump;
  bad.values[100] = -1.0;
  CHECK_THROWS_AS(smooth_system(builtin_system(WeightTag::one), bad, 2), std::invalid_argument);
  SampledField wide = standard_bump_field(g, 2.0);
  CHECK_THROWS_AS(smooth_system(builtin_system(WeightTag::one), wide, 2), std::invalid_argument);
  SampledField unnorm = bump;
  for (auto& v : unnorm.values) v *= 1.5;
  CHECK_THROWS_AS(smooth_system(builtin_system(WeightTag::one), unnorm, 2), std::invalid_argument);
}

TEST_CASE("custom generator grammar") {
  WeightSystem W = WeightSystem::custom("log(1+abs(x))");
  CHECK(W.weight(1, 0.0) == Catch::Approx(1.0));
  CHECK(W.weight(2, 3.0) == Catch::Approx(16.0));  // (1+3)^2

  CHECK_THROWS_AS(WeightSystem::custom("log(1+abs(x)"), ExprError);
  CHECK_THROWS_AS(WeightSystem::custom("frob(x)"), ExprError);
  CHECK_THROWS_AS(WeightSystem::custom("-1-x"), std::invalid_argument);  // negative generator
  CHECK(WeightSystem::custom("pow(x,2)/(1+x)").weight(1, 1.0) == Catch::Approx(std::exp(0.5)));
}
