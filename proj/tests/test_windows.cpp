#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <molli/grid.hpp>
#include <molli/mollify.hpp>
#include <molli/radial.hpp>
#include <molli/windows.hpp>

using namespace molli;

namespace {

const Grid g1 = make_grid(1, 16.0, 4096);

double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
  double s = 0.5 * (f(a) + f(b));
  const double h = (b - a) / n;
  for (int i = 1; i < n; ++i) s += f(a + i * h);
  return s * h;
}

SampledField smooth_cutoff(const Grid& g) {
  // C-infinity transition, identically 1 on [-1/2,1/2], supported in [-1,1]
  auto blend = [](double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
  };
  return sample(g, std::function<double(double)>([&](double x) {
                  return blend((1.0 - std::abs(x)) * 2.0);
                }));
}

}  // namespace

TEST_CASE("base bump profile: normalization, support, shape") {
  const double c0 = bump_normalization(1);
  // independent trapezoid oracle for 2 c0 ∫ bump = 1
  const double mass = 2.0 * c0 * trapezoid([](double r) { return bump_raw(r); }, 0.5, 1.0, 1 << 16);
  CHECK(mass == Catch::Approx(1.0).margin(1e-10));

  CHECK(bump_raw(0.4) == 0.0);
  CHECK(bump_raw(1.0) == 0.0);
  // the exponent is stationary at the midpoint of the support interval
  double best = 0.0, arg = 0.0;
  for (double r = 0.5; r <= 1.0; r += 1e-4)
    if (bump_raw(r) > best) { best = bump_raw(r); arg = r; }
  CHECK(arg == Catch::Approx(0.75).margin(1e-3));
}

TEST_CASE("recursion coefficients solve the two-scale moment system") {
  auto [mu0, lam0] = recursion_coeffs(0, 1);
  CHECK(mu0 == Catch::Approx(-1.0 / 3.0));
  CHECK(lam0 == Catch::Approx(8.0 / 3.0));
  for (int L = 0; L <= 3; ++L)
    for (int d : {1, 2}) {
      auto [mu, lam] = recursion_coeffs(L, d);
      CHECK(mu + std::exp2(-double(d)) * lam == Catch::Approx(1.0));
      CHECK(mu + std::exp2(-double(d) - 2.0 * (L + 1)) * lam == Catch::Approx(0.0).margin(1e-15));
    }
}

TEST_CASE("recursion preserves unit mass and kills even moments") {
  for (int L = 0; L <= 3; ++L) {
    BumpSum phi = phi_profile_terms(L, 1);
    const double mass =
        2.0 * trapezoid([&](double r) { return phi(r); }, 0.0, 1.0, 1 << 16);
    CHECK(mass == Catch::Approx(1.0).margin(1e-10));
    for (int k = 1; k <= L; ++k) {
      const double m2k =
          2.0 * trapezoid([&](double r) { return std::pow(r, 2 * k) * phi(r); }, 0.0, 1.0, 1 << 16);
      CHECK(std::abs(m2k) <= 1e-10);
    }
  }
}

TEST_CASE("support of the level-1 profile") {
  BumpSum phi1 = phi_profile_terms(1, 1);
  CHECK(phi1.support_lo() == Catch::Approx(0.25));
  CHECK(phi1.support_hi() == Catch::Approx(1.0));
  CHECK(phi1(0.2) == 0.0);
  CHECK(std::abs(phi1(0.3)) > 0.0);
  CHECK(phi1(1.01) == 0.0);
}

TEST_CASE("operator T: zero, step profile, radial Laplacian inverse") {
  const double hr = 1.0 / 4096.0;
  RadialProfile zero = sample_profile([](double) { return 0.0; }, 3.0, hr, 0.0, 2.0);
  RadialProfile tz = apply_T(zero, 1);
  for (double v : tz.samples) REQUIRE(v == 0.0);

  // T of 1_{[1,2]} at r=2 equals the exact double integral 1/2
  RadialProfile step =
      sample_profile([](double r) { return r >= 1.0 && r <= 2.0 ? 1.0 : 0.0; }, 3.0, hr, 1.0, 2.0);
  RadialProfile ts = apply_T(step, 1);
  CHECK(profile_eval(ts, 2.0) == Catch::Approx(0.5).margin(1e-3));

  for (int d : {1, 2}) {
    BumpSum eta = eta_profile_terms(1, d);
    RadialProfile ep = sample_profile([&](double r) { return eta(r); }, 3.0, hr, 0.0, 2.0);
    RadialProfile te = apply_T(ep, d);
    RadialProfile lap = profile_radial_laplacian(te, d);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < ep.samples.size(); ++i) {
      const double r = double(i) * hr;
      if (r > 2.5) break;
      err = std::max(err, std::abs(lap.samples[i] - ep.samples[i]));
      scale = std::max(scale, std::abs(ep.samples[i]));
    }
    CHECK(err <= 1e-6 * scale);
  }
}

TEST_CASE("polynomial tail extraction") {
  const double hr = 1.0 / 4096.0;
  for (int L = 0; L <= 2; ++L) {
    BumpSum eta = eta_profile_terms(L, 1);
    RadialProfile p = sample_profile([&](double r) { return eta(r); }, 3.0, hr, 0.0, 2.0);
    for (int k = 0; k <= L; ++k) p = apply_T(p, 1);
    PolynomialFit fit = extract_polynomial(p, L);
    CHECK(fit.residual <= 1e-8 * std::max(fit.scale, 1e-30));
    if (L == 0) CHECK(fit.coeffs[0] == Catch::Approx(profile_eval(p, 2.5)));
    // zeta = p - P vanishes identically on [2, 3]
    for (double r = 2.0; r <= 3.0; r += 0.05)
      CHECK(std::abs(profile_eval(p, r) - fit.eval(r)) <= 1e-8 * std::max(fit.scale, 1e-30));
  }
}

TEST_CASE("window pair certificates at d = 1") {
  for (int L = 0; L <= 2; ++L) {
    WindowPair pair = build_window_pair(1, L, g1);
    REQUIRE(pair.certified);
    CHECK(pair.cert.integral_err <= 1e-8);
    CHECK(pair.cert.two_scale_residual <= 1e-5);
    if (L > 0) CHECK(pair.cert.max_moment_err <= 1e-6);

    // supports inside the closed ball of radius 2
    for (int i = 0; i < g1.n; ++i) {
      if (std::abs(g1.coord(i)) <= 2.0) continue;
      REQUIRE(std::abs(pair.varphi.values[std::size_t(i)]) <= 1e-12);
      REQUIRE(std::abs(pair.psi.values[std::size_t(i)]) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(build_window_pair(1, 5, g1), std::invalid_argument);
  CHECK_THROWS_AS(build_window_pair(1, -1, g1), std::invalid_argument);
  CHECK_THROWS_AS(build_window_pair(1, 1, make_grid(1, 16.0, 256)), std::invalid_argument);
}

TEST_CASE("window pair in two dimensions") {
  Grid g2 = make_grid(2, 4.0, 512);
  WindowPair pair = build_window_pair(2, 1, g2);
  REQUIRE(pair.certified);
  CHECK(pair.cert.integral_err <= 1e-8);
  CHECK(pair.cert.two_scale_residual <= 1e-5);
  CHECK(pair.cert.max_moment_err <= 1e-6);
  CHECK(std::abs(pair.cert.fourier_slope - 2.0) <= 0.1);
}

TEST_CASE("psi moment table: vanishing below 2L, alive at 2L") {
  WindowPair p1 = build_window_pair(1, 1, g1);
  auto m1 = verify_moments(p1, 2);
  for (const auto& m : m1) {
    if (order(m.alpha) < 2) CHECK(std::abs(m.normalized) <= 1e-6);
    if (order(m.alpha) == 2) CHECK(std::abs(m.normalized) >= 1e-3);
  }
  WindowPair p2 = build_window_pair(1, 2, g1);
  auto m2 = verify_moments(p2, 3);
  for (const auto& m : m2) CHECK(std::abs(m.normalized) <= 1e-6);

  // varphi has unit mass; the certificate stores the radial quadrature error
  CHECK(p1.cert.integral_err <= 1e-8);
}

TEST_CASE("two-scale residual shrinks at least 4x per radial halving") {
  for (int L = 0; L <= 2; ++L) {
    WindowPair coarse = build_window_pair(1, L, g1, 1.0 / 2048.0);
    WindowPair fine = build_window_pair(1, L, g1, 1.0 / 4096.0);
    CHECK(coarse.cert.two_scale_residual / fine.cert.two_scale_residual >= 4.0);
  }
}

TEST_CASE("two-scale verification rejects a zero pair") {
  WindowPair junk;
  junk.dim = 1;
  junk.psi_prof = sample_profile([](double) { return 0.0; }, 3.0, 1.0 / 256.0, 0.0, 2.0);
  CHECK_THROWS_AS(verify_two_scale(junk), std::invalid_argument);
}

TEST_CASE("fourier decay of psi") {
  WindowPair p0 = build_window_pair(1, 0, g1);
  CHECK(std::abs(p0.cert.fourier_slope) <= 0.1);
  // a nonzero-mean psi is exactly the slope-0 case
  CHECK(std::abs(detail::grid_moment(p0.psi, {0, 0})) > 0.5);

  WindowPair p1 = build_window_pair(1, 1, g1);
  CHECK(p1.cert.fourier_slope == Catch::Approx(2.0).margin(0.1));
  WindowPair p2 = build_window_pair(1, 2, g1);
  CHECK(p2.cert.fourier_slope == Catch::Approx(4.0).margin(0.1));
}

TEST_CASE("telescoping identity on the grid") {
  WindowPair pair = build_window_pair(1, 1, g1);
  double scale = sup_abs(pair.varphi);
  for (int j = 0; j <= 2; ++j) {
    // lhs: 2^{(j+1)d} varphi(2^{j+1} x) - 2^{jd} varphi(2^j x)
    SampledField lhs = linear_combination(1.0, dyadic_dilate(pair.varphi, j + 1), -1.0,
                                          dyadic_dilate(pair.varphi, j));
    // rhs: 2^{j(d-2)} Delta(psi(2^j .)), via the grid Laplacian
    SampledField psi_j = dyadic_dilate(pair.psi, j);
    for (auto& v : psi_j.values) v /= std::exp2(double(j));  // strip the 2^{jd} amplitude
    SampledField rhs = laplacian(psi_j);
    for (auto& v : rhs.values) v *= std::exp2(double(j) * (1.0 - 2.0));
    SampledField diff = linear_combination(1.0, lhs, -1.0, rhs);
    CHECK(inner_sup(diff, 1.0) <= 1e-4 * scale * std::exp2(double(j + 1)));
  }
}

TEST_CASE("window-side derivatives match grid differentiation") {
  WindowPair pair = build_window_pair(1, 1, g1);
  for (int ord : {1, 2}) {
    SampledField radial_route = window_derivative(pair, WindowHalf::psi, {ord, 0});
    SampledField grid_route = derivative(pair.psi, {ord, 0});
    SampledField diff = linear_combination(1.0, radial_route, -1.0, grid_route);
    CHECK(inner_sup(diff, 1.0) <= 1e-5 * sup_abs(grid_route));
  }
}

TEST_CASE("parametrix: support, plateau, reconstruction") {
  Grid g = make_grid(1, 16.0, 4096);
  SampledField cutoff = smooth_cutoff(g);

  ParametrixReport rep = parametrix_1d(1, cutoff);
  CHECK(rep.sup_outside <= 1e-8);
  CHECK(rep.sup_plateau <= 1e-8);
  // F_1 = |x|/2
  const int at = g.n / 2 + 32;  // x = 1/4
  CHECK(rep.chi_F.values[std::size_t(at)] == Catch::Approx(0.125));

  // f = (f'') * (chi F_1) - f * phi_1 for the Gaussian
  SampledField f = sample(g, std::function<double(double)>([](double x) { return std::exp(-x * x); }));
  SampledField recon = linear_combination(1.0, convolve(derivative(f, {2, 0}), rep.chi_F), -1.0,
                                          convolve(f, rep.residual));
  SampledField diff = linear_combination(1.0, f, -1.0, recon);
  CHECK(inner_sup(diff, 1.0) <= 1e-4);

  ParametrixReport rep2 = parametrix_1d(2, cutoff);
  CHECK(rep2.sup_outside <= 1e-8);

  SampledField bad = sample(g, std::function<double(double)>([](double x) {
                              return std::abs(x) <= 1.5 ? 1.0 : 0.0;
                            }));
  CHECK_THROWS_AS(parametrix_1d(1, bad), std::invalid_argument);
  CHECK_THROWS_AS(parametrix_1d(0, cutoff), std::invalid_argument);
}

TEST_CASE("window builds are deterministic") {
  WindowPair a = build_window_pair(1, 1, g1);
  WindowPair b = build_window_pair(1, 1, g1);
  CHECK(a.varphi.values == b.varphi.values);
  CHECK(a.psi.values == b.psi.values);
  CHECK(a.cert.two_scale_residual == b.cert.two_scale_residual);
}
