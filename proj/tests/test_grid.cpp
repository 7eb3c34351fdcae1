#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <molli/grid.hpp>

using namespace molli;

namespace {

SampledField sample1(const Grid& g, double (*fn)(double)) {
  return sample(g, std::function<double(double)>(fn));
}

SampledField random_field(const Grid& g, unsigned seed, double support = 4.0) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  SampledField f = zero_field(g);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    Point p = g.point(i);
    if (std::abs(p[0]) > support || (g.dim == 2 && std::abs(p[1]) > support)) continue;
    f.values[i] = dist(rng);
  }
  return f;
}

// brute-force O(N^2) quadrature oracle for the zero-extension convolution
SampledField convolve_direct(const SampledField& f, const SampledField& g) {
  const Grid& gr = f.grid;
  SampledField out = zero_field(gr);
  const double h = gr.spacing();
  for (int m = 0; m < gr.n; ++m) {
    double s = 0.0;
    for (int k = 0; k < gr.n; ++k) {
      const int i = m - k + gr.n / 2;  // f(y_k) g(x_m - y_k); x_m - y_k = coord(m-k+n/2)
      if (i < 0 || i >= gr.n) continue;
      s += f.values[std::size_t(k)] * g.values[std::size_t(i)];
    }
    out.values[std::size_t(m)] = s * h;
  }
  return out;
}

}  // namespace

TEST_CASE("make_grid contract") {
  Grid g = make_grid(1, 16.0, 4096);
  CHECK(g.spacing() == Catch::Approx(1.0 / 128.0));
  CHECK(g.coord(g.n / 2) == 0.0);

  Grid g2 = make_grid(2, 8.0, 256);
  CHECK(g2.size() == 256u * 256u);
  CHECK(g2.spacing() == Catch::Approx(1.0 / 16.0));
  CHECK(g2.spacing() * g2.n == 2.0 * g2.half_width);

  CHECK_THROWS_AS(make_grid(1, 16.0, 1000), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(3, 16.0, 4096), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, -1.0, 4096), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 16.0, 32), std::invalid_argument);
}

TEST_CASE("sample evaluators") {
  Grid g = make_grid(1, 16.0, 4096);
  SampledField gauss = sample1(g, [](double x) { return std::exp(-x * x); });
  double best = 0.0;
  int arg = -1;
  for (int i = 0; i < g.n; ++i)
    if (gauss.values[std::size_t(i)] > best) { best = gauss.values[std::size_t(i)]; arg = i; }
  CHECK(best == Catch::Approx(1.0));
  CHECK(arg == g.n / 2);

  SampledField one = sample1(g, [](double) { return 1.0; });
  for (double v : one.values) REQUIRE(v == 1.0);

  SampledField ch = sample1(g, [](double x) { return std::cosh(2.0 * x); });
  double mx = 0.0;
  for (double v : ch.values) mx = std::max(mx, v);
  CHECK(mx == Catch::Approx(std::cosh(32.0)).epsilon(1e-12));

  CHECK_THROWS_AS(sample1(g, [](double x) { return std::sqrt(x); }), std::domain_error);
}

TEST_CASE("spike is the convolution identity") {
  Grid g = make_grid(1, 16.0, 2048);
  SampledField d = spike_field(g);
  CHECK(d.values[std::size_t(g.n / 2)] == Catch::Approx(1.0 / g.spacing()));
  SampledField gauss = sample1(g, [](double x) { return std::exp(-x * x); });
  SampledField c = convolve(d, gauss);
  double sup = 0.0;
  for (int i = 0; i < g.n; ++i)
    sup = std::max(sup, std::abs(c.values[std::size_t(i)] - gauss.values[std::size_t(i)]));
  CHECK(sup <= 1e-12 * sup_abs(gauss));
}

TEST_CASE("box autoconvolution gives the triangle") {
  Grid g = make_grid(1, 16.0, 4096);
  SampledField box = sample1(g, [](double x) { return std::abs(x) <= 1.0 ? 1.0 : 0.0; });
  SampledField tri = convolve(box, box);
  const double h = g.spacing();
  CHECK(std::abs(tri.values[std::size_t(g.n / 2)] - 2.0) <= 2.0 * h);
  // triangle drops to ~1 at |x| = 1 and vanishes past |x| = 2
  CHECK(std::abs(tri.values[std::size_t(g.n / 2 + 128)] - 1.0) <= 2.0 * h);
  CHECK(std::abs(tri.values[std::size_t(g.n / 2 + 300)]) <= 2.0 * h + 1e-12);
}

TEST_CASE("fft convolution matches the direct quadrature oracle") {
  Grid g = make_grid(1, 4.0, 256);
  SampledField f = random_field(g, 11, 3.0);
  SampledField w = random_field(g, 12, 3.0);
  SampledField fast = convolve(f, w);
  SampledField slow = convolve_direct(f, w);
  double sup = 0.0, scale = sup_abs(slow);
  for (std::size_t i = 0; i < fast.values.size(); ++i)
    sup = std::max(sup, std::abs(fast.values[i] - slow.values[i]));
  CHECK(sup <= 1e-10 * scale);
}

TEST_CASE("convolution commutes and is bilinear") {
  Grid g = make_grid(1, 8.0, 512);
  SampledField a = random_field(g, 21), b = random_field(g, 22), c = random_field(g, 23);
  SampledField ab = convolve(a, b), ba = convolve(b, a);
  double sup = 0.0;
  for (std::size_t i = 0; i < ab.values.size(); ++i)
    sup = std::max(sup, std::abs(ab.values[i] - ba.values[i]));
  CHECK(sup <= 1e-12 * (sup_abs(ab) + 1.0));

  SampledField lhs = convolve(linear_combination(2.0, a, -3.0, c), b);
  SampledField rhs = linear_combination(2.0, ab, -3.0, convolve(c, b));
  sup = 0.0;
  for (std::size_t i = 0; i < lhs.values.size(); ++i)
    sup = std::max(sup, std::abs(lhs.values[i] - rhs.values[i]));
  CHECK(sup <= 1e-11 * (sup_abs(lhs) + 1.0));

  Grid g2 = make_grid(1, 8.0, 1024);
  CHECK_THROWS_AS(convolve(a, zero_field(g2)), std::invalid_argument);
}

TEST_CASE("discrete Young inequality") {
  Grid g = make_grid(1, 8.0, 512);
  SampledField f = random_field(g, 31), w = random_field(g, 32);
  SampledField c = convolve(f, w);
  const double h = g.spacing();
  auto lp = [&](const SampledField& x, double p) {
    if (std::isinf(p)) return sup_abs(x);
    double s = 0.0;
    for (double v : x.values) s += std::pow(std::abs(v), p);
    return std::pow(h * s, 1.0 / p);
  };
  const double l1f = lp(f, 1.0);
  for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()})
    CHECK(lp(c, p) <= l1f * lp(w, p) * (1.0 + 1e-10));
}

TEST_CASE("torus convolution is translation equivariant") {
  Grid g = make_grid(1, 8.0, 512);
  SampledField f = random_field(g, 41), w = random_field(g, 42);
  SampledField base = convolve_circular(f, w);
  const int shift = 37;
  SampledField moved = convolve_circular(circular_shift(f, shift), circular_shift(w, 0));
  SampledField expect = circular_shift(base, shift);
  double sup = 0.0;
  for (std::size_t i = 0; i < moved.values.size(); ++i)
    sup = std::max(sup, std::abs(moved.values[i] - expect.values[i]));
  CHECK(sup <= 1e-12 * (sup_abs(base) + 1.0));
}

TEST_CASE("derivatives: analytic checks and the spike contract") {
  Grid g = make_grid(1, 16.0, 4096);
  SampledField s = sample1(g, [](double x) { return std::sin(x); });
  SampledField d2 = derivative(s, {2, 0});
  double err = 0.0;
  for (int i = 0; i < g.n; ++i) {
    if (std::abs(g.coord(i)) > 15.0) continue;
    err = std::max(err, std::abs(d2.values[std::size_t(i)] + std::sin(g.coord(i))));
  }
  CHECK(err <= 1e-8);

  SampledField one = sample1(g, [](double) { return 1.0; });
  CHECK(inner_sup(derivative(one, {3, 0}), 1.0) <= 1e-12);

  SampledField x2 = sample1(g, [](double x) { return std::abs(x) < 8.0 ? x * x : 0.0; });
  SampledField d1 = derivative(x2, {1, 0});
  err = 0.0;
  for (int i = 0; i < g.n; ++i) {
    if (std::abs(g.coord(i)) > 7.0) continue;
    err = std::max(err, std::abs(d1.values[std::size_t(i)] - 2.0 * g.coord(i)));
  }
  CHECK(err <= 1e-10);

  CHECK_THROWS_AS(derivative(spike_field(g), {1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(derivative(s, {13, 0}), std::invalid_argument);
}

TEST_CASE("derivative converges at fourth order") {
  auto sup_err = [](int n) {
    Grid g = make_grid(1, 16.0, n);
    SampledField f = sample(g, std::function<double(double)>([](double x) { return std::exp(std::sin(x)); }));
    SampledField d = derivative(f, {1, 0});
    double e = 0.0;
    for (int i = 0; i < g.n; ++i) {
      const double x = g.coord(i);
      if (std::abs(x) > 15.0) continue;
      e = std::max(e, std::abs(d.values[std::size_t(i)] - std::cos(x) * std::exp(std::sin(x))));
    }
    return e;
  };
  const double e1 = sup_err(1024), e2 = sup_err(2048);
  CHECK(e1 / e2 > 10.0);  // order 4 gives 16x per halving
  CHECK(e1 / e2 < 24.0);
}

TEST_CASE("laplacian analytic checks") {
  Grid g = make_grid(1, 16.0, 4096);
  SampledField f = sample1(g, [](double x) { return std::exp(-x * x); });
  SampledField lap = laplacian(f);
  double err = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double x = g.coord(i);
    if (std::abs(x) > 15.0) continue;
    err = std::max(err, std::abs(lap.values[std::size_t(i)] -
                                 (4.0 * x * x - 2.0) * std::exp(-x * x)));
  }
  CHECK(err <= 1e-6);

  CHECK(inner_sup(laplacian(sample1(g, [](double) { return 1.0; })), 1.0) <= 1e-12);

  // Delta applied L times annihilates polynomials of degree < 2L
  SampledField cubic = sample1(g, [](double x) { return std::abs(x) < 8.0 ? x * x * x + x : 0.0; });
  SampledField l2 = laplacian(laplacian(cubic));
  double e = 0.0;
  for (int i = 0; i < g.n; ++i)
    if (std::abs(g.coord(i)) < 7.0) e = std::max(e, std::abs(l2.values[std::size_t(i)]));
  CHECK(e <= 1e-7);
}

TEST_CASE("laplacian in two dimensions") {
  Grid g = make_grid(2, 8.0, 256);
  SampledField f = sample(g, std::function<double(double, double)>(
                                 [](double x, double y) { return std::exp(-(x * x + y * y)); }));
  SampledField lap = laplacian(f);
  double err = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    Point p = g.point(i);
    const double r2 = p[0] * p[0] + p[1] * p[1];
    if (std::abs(p[0]) > 7.0 || std::abs(p[1]) > 7.0) continue;
    err = std::max(err, std::abs(lap.values[i] - (4.0 * r2 - 4.0) * std::exp(-r2)));
  }
  CHECK(err <= 2e-4);  // h = 1/16 at fourth order
}

TEST_CASE("restrict_inner") {
  Grid g = make_grid(1, 16.0, 1024);
  SampledField one = sample1(g, [](double) { return 1.0; });
  SampledField same = restrict_inner(one, 0.0);
  CHECK(same.values == one.values);

  SampledField half = restrict_inner(one, 8.0);
  for (int i = 0; i < g.n; ++i)
    CHECK(half.values[std::size_t(i)] == (std::abs(g.coord(i)) <= 8.0 ? 1.0 : 0.0));

  SampledField twice = restrict_inner(restrict_inner(one, 3.0), 7.0);
  SampledField once = restrict_inner(one, 7.0);
  CHECK(twice.values == once.values);

  CHECK_THROWS_AS(restrict_inner(one, 16.0), std::invalid_argument);
}
