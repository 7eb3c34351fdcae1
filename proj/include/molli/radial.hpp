#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace molli {

// ---- Radial profiles -------------------------------------------------------

/// Samples of a radial profile on the uniform grid r_i = i * step, i = 0..count-1.
struct RadialProfile {
  double step = 0.0;
  std::vector<double> samples;
  double support_lo = 0.0;  // declared support [lo, hi]
  double support_hi = 0.0;

  double r_max() const { return step * double(samples.size() - 1); }
};

/// Quintic (6-point) Lagrange interpolation of a profile; zero outside support.
inline double profile_eval(const RadialProfile& p, double r) {
  r = std::abs(r);
  if (r >= p.support_hi || p.samples.size() < 6) return 0.0;
  const double t = r / p.step;
  long i = long(t);
  const long last = long(p.samples.size()) - 1;
  i = std::max<long>(2, std::min<long>(i, last - 3));
  const double fr = t - double(i);
  double out = 0.0;
  for (int off = -2; off <= 3; ++off) {
    double num = 1.0, den = 1.0;
    for (int o2 = -2; o2 <= 3; ++o2) {
      if (o2 == off) continue;
      num *= (fr - o2);
      den *= double(off - o2);
    }
    out += p.samples[std::size_t(i + off)] * num / den;
  }
  return out;
}

/// A radial (or radial-with-parity, d=1) function backing a sampled field.
/// eval(r) is the profile value at radius r >= 0; the field value at x is
/// eval(|x|) * sign(x)^parity for d=1 and eval(|x|) for d=2 (parity 0 only).
struct RadialSource {
  std::function<double(double)> eval;
  int parity = 0;
  double support_radius = 0.0;
  double quad_step = 0.0;  // integration cell size in the window coordinate
};

inline double radial_field_value(const RadialSource& src, double x) {
  double v = src.eval(std::abs(x));
  if (src.parity % 2 != 0 && x < 0) v = -v;
  return v;
}

// ---- The base bump and the two-scale recursion ------------------------------

/// Standard bump profile exp(-1/(1-t^2)) in the normalized coordinate
/// t = 4r - 3 of the support interval [1/2, 1]; zero elsewhere.
inline double bump_raw(double r) {
  if (r <= 0.5 || r >= 1.0) return 0.0;
  const double q = (r - 0.5) * (1.0 - r);  // in (0, 1/16]
  return std::exp(-1.0 / (16.0 * q));
}

inline double sphere_area(int d) { return d == 1 ? 2.0 : 2.0 * std::numbers::pi; }

namespace detail {

inline double simpson_closed(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace detail

/// Normalization constant c with |S^{d-1}| * c * ∫_0^1 r^{d-1} bump(r) dr = 1.
inline double bump_normalization(int d) {
  double I = detail::simpson_closed([d](double r) { return std::pow(r, d - 1) * bump_raw(r); },
                                    0.5, 1.0, 1 << 15);
  return 1.0 / (sphere_area(d) * I);
}

/// Coefficients of the two-scale recursion phi_{L+1} = mu_L phi_L + lambda_L phi_L(2·),
/// the unique solution of mu + 2^{-d} lambda = 1, mu + 2^{-d-2(L+1)} lambda = 0.
struct RecursionCoeffs {
  double mu;
  double lambda;
};

inline RecursionCoeffs recursion_coeffs(int L, int d) {
  const double k = std::exp2(-2.0 * (L + 1));
  return {-k / (1.0 - k), std::exp2(double(d)) / (1.0 - k)};
}

/// phi_L as a dilation sum: phi_L(r) = sum_k c_k * bump(s_k * r).
struct BumpSum {
  struct Term {
    double coeff;
    double scale;
  };
  std::vector<Term> terms;

  double operator()(double r) const {
    double v = 0.0;
    for (const auto& t : terms) v += t.coeff * bump_raw(t.scale * r);
    return v;
  }
  double support_lo() const {
    double s = 0.0;
    for (const auto& t : terms) s = std::max(s, t.scale);
    return 0.5 / s;
  }
  double support_hi() const {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& t : terms) s = std::min(s, t.scale);
    return 1.0 / s;
  }
};

/// Closed-form profile of phi_L (level-L iterate of the recursion), unit mass in R^d.
inline BumpSum phi_profile_terms(int L, int d) {
  const double c0 = bump_normalization(d);
  std::vector<double> c{1.0};
  for (int l = 0; l < L; ++l) {
    auto [mu, lam] = recursion_coeffs(l, d);
    std::vector<double> nc(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      nc[k] += mu * c[k];
      nc[k + 1] += lam * c[k];
    }
    c = std::move(nc);
  }
  BumpSum out;
  for (std::size_t k = 0; k < c.size(); ++k)
    out.terms.push_back({c0 * c[k], std::exp2(double(k))});
  return out;
}

/// eta_L = phi_L - 2^{-d} phi_L(2^{-1}·); support [2^{-(L+1)}, 2].
inline BumpSum eta_profile_terms(int L, int d) {
  BumpSum phi = phi_profile_terms(L, d);
  BumpSum out = phi;
  const double f = -std::exp2(-double(d));
  for (const auto& t : phi.terms) out.terms.push_back({f * t.coeff, 0.5 * t.scale});
  return out;
}

inline RadialProfile sample_profile(const std::function<double(double)>& f, double r_max,
                                    double step, double lo, double hi) {
  RadialProfile p;
  p.step = step;
  p.support_lo = lo;
  p.support_hi = hi;
  const std::size_t n = std::size_t(std::llround(r_max / step)) + 1;
  p.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.samples[i] = f(double(i) * step);
  return p;
}

// ---- Cumulative integration and the operator T ------------------------------

namespace detail {

/// 4-point cumulative integral (local O(h^5), exact on cubics).
inline std::vector<double> cumulative_integral(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  std::vector<double> F(n, 0.0);
  if (n < 4) throw std::invalid_argument("cumulative_integral: too few samples");
  F[1] = F[0] + h / 24.0 * (9.0 * y[0] + 19.0 * y[1] - 5.0 * y[2] + y[3]);
  for (std::size_t i = 1; i + 2 < n; ++i)
    F[i + 1] = F[i] + h / 24.0 * (-y[i - 1] + 13.0 * y[i] + 13.0 * y[i + 1] - y[i + 2]);
  const std::size_t i = n - 2;
  F[i + 1] = F[i] + h / 24.0 * (9.0 * y[i + 1] + 19.0 * y[i] - 5.0 * y[i - 1] + y[i - 2]);
  return F;
}

}  // namespace detail

/// (Tf)(r) = ∫_0^r ( ∫_0^t (s/t)^{d-1} f(s) ds ) dt on the profile grid;
/// the output grid is extended so that r_max >= 3.
inline RadialProfile apply_T(const RadialProfile& p, int d) {
  const double step = p.step;
  const double rmax = std::max(p.r_max(), 3.0);
  const std::size_t n = std::size_t(std::llround(rmax / step)) + 1;
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < p.samples.size() && i < n; ++i) y[i] = p.samples[i];

  std::vector<double> inner;
  if (d == 1) {
    inner = detail::cumulative_integral(y, step);
  } else {
    std::vector<double> ry(n);
    for (std::size_t i = 0; i < n; ++i) ry[i] = double(i) * step * y[i];
    auto I = detail::cumulative_integral(ry, step);
    inner.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) inner[i] = I[i] / (double(i) * step);
    // integrand has a removable zero at r=0 for profiles vanishing near 0
  }
  auto F = detail::cumulative_integral(inner, step);
  RadialProfile out;
  out.step = step;
  out.samples = std::move(F);
  out.support_lo = p.support_lo;
  out.support_hi = rmax;  // constant or polynomial beyond the input support
  return out;
}

// ---- Polynomial tail extraction ---------------------------------------------

struct PolynomialFit {
  std::vector<double> coeffs;  // P(r) = sum_i coeffs[i] r^{2i}
  double residual = 0.0;       // sup |p - P| on [2, 3]
  double scale = 0.0;          // sup |p| on [2, 3]

  double eval(double r) const {
    double v = 0.0, rp = 1.0;
    for (double c : coeffs) {
      v += c * rp;
      rp *= r * r;
    }
    return v;
  }
};

namespace detail {

inline std::vector<double> solve_dense(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    std::swap(A[c], A[piv]);
    std::swap(b[c], b[piv]);
    if (A[c][c] == 0.0) throw std::runtime_error("solve_dense: singular system");
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= A[r][k] * x[k];
    x[r] = s / A[r][r];
  }
  return x;
}

}  // namespace detail

/// Fits the even polynomial P_L of degree 2L that the iterated integral
/// T^{L+1} eta_L coincides with for r >= 2 (Vandermonde at L+1 radii in [2.1, ...]),
/// and audits the coincidence on all of [2, 3].
inline PolynomialFit extract_polynomial(const RadialProfile& p, int L) {
  if (p.r_max() < 3.0 - 1e-12)
    throw std::invalid_argument("extract_polynomial: profile must reach r = 3");
  const int m = L + 1;
  std::vector<std::vector<double>> A(m, std::vector<double>(m, 0.0));
  std::vector<double> b(m, 0.0);
  for (int i = 0; i < m; ++i) {
    const double r = 2.1 + 0.1 * i;
    const std::size_t idx = std::size_t(std::llround(r / p.step));
    const double r2 = double(idx) * p.step * double(idx) * p.step;
    double rp = 1.0;
    for (int j = 0; j < m; ++j) {
      A[i][j] = rp;
      rp *= r2;
    }
    b[i] = p.samples[idx];
  }
  PolynomialFit fit;
  fit.coeffs = detail::solve_dense(std::move(A), std::move(b));
  const std::size_t i2 = std::size_t(std::llround(2.0 / p.step));
  const std::size_t i3 = std::size_t(std::llround(3.0 / p.step));
  for (std::size_t i = i2; i <= i3 && i < p.samples.size(); ++i) {
    const double r = double(i) * p.step;
    fit.residual = std::max(fit.residual, std::abs(p.samples[i] - fit.eval(r)));
    fit.scale = std::max(fit.scale, std::abs(p.samples[i]));
  }
  return fit;
}

/// Delta^L applied to the even polynomial r^{2L} gives the constant
/// prod_{k=1..L} 2k (2k + d - 2); lower even powers are annihilated.
inline double laplacian_power_constant(int L, int d) {
  double c = 1.0;
  for (int k = 1; k <= L; ++k) c *= 2.0 * k * (2.0 * k + d - 2.0);
  return c;
}

// ---- Profile derivatives (parity-aware, order-4 stencils) --------------------

/// Derivative of a radial profile; `parity` is the parity of the profile itself
/// (0: even extension across r=0, 1: odd). Returns samples of g'.
inline RadialProfile profile_derivative(const RadialProfile& p, int parity) {
  const std::size_t n = p.samples.size();
  RadialProfile out = p;
  auto get = [&](long i) -> double {
    if (i >= 0) return i < long(n) ? p.samples[std::size_t(i)] : 0.0;
    const double v = -i < long(n) ? p.samples[std::size_t(-i)] : 0.0;
    return parity % 2 == 0 ? v : -v;
  };
  for (long i = 0; i < long(n); ++i)
    out.samples[std::size_t(i)] =
        (get(i - 2) - 8.0 * get(i - 1) + 8.0 * get(i + 1) - get(i + 2)) / (12.0 * p.step);
  out.support_lo = 0.0;
  return out;
}

/// Radial Laplacian g'' + (d-1)/r g' of an even profile, with the r -> 0 limit d*g''(0).
inline RadialProfile profile_radial_laplacian(const RadialProfile& p, int d) {
  const std::size_t n = p.samples.size();
  RadialProfile out = p;
  auto get = [&](long i) -> double {
    if (i < 0) i = -i;
    return i < long(n) ? p.samples[std::size_t(i)] : 0.0;
  };
  for (long i = 0; i < long(n); ++i) {
    const double d2 = (-get(i - 2) + 16.0 * get(i - 1) - 30.0 * get(i) + 16.0 * get(i + 1) -
                       get(i + 2)) /
                      (12.0 * p.step * p.step);
    if (i == 0) {
      out.samples[0] = d * d2;
    } else {
      const double d1 =
          (get(i - 2) - 8.0 * get(i - 1) + 8.0 * get(i + 1) - get(i + 2)) / (12.0 * p.step);
      out.samples[std::size_t(i)] = d2 + double(d - 1) * d1 / (double(i) * p.step);
    }
  }
  out.support_lo = 0.0;
  return out;
}

}  // namespace molli
