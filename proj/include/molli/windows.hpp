#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "grid.hpp"
#include "radial.hpp"

namespace molli {

struct WindowCertificate {
  double integral_err = 0.0;       // |∫ varphi - 1|
  double max_moment_err = 0.0;     // normalized psi moments of order < 2L
  double two_scale_residual = 0.0; // sup |2^d varphi(2·) - varphi - Δpsi| / sup |varphi|
  double fourier_slope = 0.0;      // log-log slope of |psi_hat| near 0 (expect 2L)
  double fourier_constant = 0.0;   // sup |psi_hat(xi)| / |xi|^{2L} over the fit range
};

struct WindowBuildError : std::runtime_error {
  std::string certificate;
  WindowBuildError(std::string cert, const std::string& msg)
      : std::runtime_error(msg), certificate(std::move(cert)) {}
};

/// Certified two-scale pair (varphi_L, psi_L): 2^d varphi(2·) - varphi = Δpsi,
/// ∫varphi = 1, psi with vanishing moments below order 2L, supports in B(0,2).
struct WindowPair {
  int dim = 1;
  int moment_order = 0;  // L
  double support_radius = 2.0;
  double radial_step = 0.0;

  SampledField varphi;
  SampledField psi;
  SampledField lap_psi;  // Δpsi = eta_L, closed form

  BumpSum varphi_terms;  // varphi(r) = 2^{-d} phi_L(r/2)
  BumpSum eta_terms;     // eta_L = Δ^{L+1} zeta_L
  RadialProfile psi_prof;
  RadialProfile t_eta;       // T eta_L (psi = T eta - K, zeroed past 2)
  RadialProfile t_chain;     // T^{L+1} eta_L
  PolynomialFit tail_fit;    // P_L
  double tail_constant = 0.0;  // a_L * prod 2k(2k+d-2)

  WindowCertificate cert;
  bool certified = false;
};

namespace detail {

inline SampledField field_from_radial(const Grid& g, std::shared_ptr<const RadialSource> src) {
  SampledField f = zero_field(g);
  for (std::size_t idx = 0; idx < f.values.size(); ++idx) {
    Point p = g.point(idx);
    const double r = g.dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
    double v = src->eval(r);
    if (g.dim == 1 && src->parity % 2 != 0 && p[0] < 0) v = -v;
    f.values[idx] = v;
  }
  f.radial = std::move(src);
  require_finite(f, "field_from_radial");
  return f;
}

/// ∫ x^alpha g(x) dx by grid quadrature.
inline double grid_moment(const SampledField& f, const MultiIndex& alpha) {
  const Grid& g = f.grid;
  double s = 0.0;
  for (std::size_t idx = 0; idx < f.values.size(); ++idx) {
    Point p = g.point(idx);
    double m = std::pow(p[0], alpha[0]);
    if (g.dim == 2) m *= std::pow(p[1], alpha[1]);
    s += m * f.values[idx];
  }
  const double hd = g.dim == 1 ? g.spacing() : g.spacing() * g.spacing();
  return s * hd;
}

inline double grid_l1(const SampledField& f) {
  double s = 0.0;
  for (double v : f.values) s += std::abs(v);
  const double hd = f.grid.dim == 1 ? f.grid.spacing() : f.grid.spacing() * f.grid.spacing();
  return s * hd;
}

/// Radial Fourier transform: d=1 cosine transform, d=2 Hankel (J0) transform.
inline double radial_ft(const RadialProfile& p, int d, double xi) {
  double s = 0.0;
  const std::size_t n = p.samples.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = double(i) * p.step;
    if (r >= p.support_hi) break;
    double k = d == 1 ? 2.0 * std::cos(xi * r) : 2.0 * std::numbers::pi * r * std::cyl_bessel_j(0.0, xi * r);
    double w = (i == 0 || r + p.step >= p.support_hi) ? 0.5 : 1.0;  // trapezoid
    s += w * k * p.samples[i];
  }
  return s * p.step;
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, resid = 0.0;
};

inline LineFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  LineFit f;
  const double det = double(n) * sxx - sx * sx;
  f.slope = (double(n) * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / double(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = ys[i] - (f.intercept + f.slope * xs[i]);
    ss += d * d;
  }
  f.resid = std::sqrt(ss / double(n));
  return f;
}

}  // namespace detail

// ---- Verification operations -------------------------------------------------

struct TwoScaleReport {
  double residual = 0.0;   // sup |2^d varphi(2·) - varphi - Δpsi| / sup |varphi|
  double sup_varphi = 0.0;
};

/// Independent two-scale check: Δpsi from order-4 radial stencils on the built
/// psi profile against the closed-form 2^d varphi(2·) - varphi, scanned at the
/// radial step (which covers every box radius).
inline TwoScaleReport verify_two_scale(const WindowPair& pair) {
  const int d = pair.dim;
  RadialProfile lap = profile_radial_laplacian(pair.psi_prof, d);
  double supv = 0.0;
  for (std::size_t i = 0; i < pair.psi_prof.samples.size(); ++i) {
    const double r = double(i) * pair.psi_prof.step;
    supv = std::max(supv, std::abs(pair.varphi_terms(r)));
  }
  if (supv == 0.0) throw std::invalid_argument("verify_two_scale: zero varphi window");
  double res = 0.0;
  for (std::size_t i = 0; i < lap.samples.size(); ++i) {
    const double r = double(i) * lap.step;
    if (r > pair.support_radius + 0.5) break;
    const double lhs = std::exp2(double(d)) * pair.varphi_terms(2.0 * r) - pair.varphi_terms(r);
    res = std::max(res, std::abs(lhs - lap.samples[i]));
  }
  return {res / supv, supv};
}

struct MomentEntry {
  MultiIndex alpha;
  double raw = 0.0;
  double normalized = 0.0;  // raw / (||psi||_1 * support^{|alpha|})
};

/// Grid quadrature of ∫ x^alpha psi dx for |alpha| <= max_order.
inline std::vector<MomentEntry> verify_moments(const WindowPair& pair, int max_order) {
  std::vector<MomentEntry> out;
  const double l1 = detail::grid_l1(pair.psi);
  for (int a = 0; a <= max_order; ++a) {
    for (int b = 0; b <= (pair.dim == 2 ? max_order - a : 0); ++b) {
      MomentEntry e;
      e.alpha = {a, b};
      e.raw = detail::grid_moment(pair.psi, e.alpha);
      e.normalized = e.raw / (l1 * std::pow(pair.support_radius, order(e.alpha)));
      out.push_back(e);
    }
  }
  return out;
}

struct FourierReport {
  double slope = 0.0;
  double constant = 0.0;
  double xi_lo = 0.0, xi_hi = 0.0;
};

/// Fits |psi_hat(xi)| ~ C |xi|^{2L} on a low-frequency window scaled with L.
inline FourierReport fourier_decay_check(const WindowPair& pair) {
  const int L = pair.moment_order;
  FourierReport rep;
  const double base = L <= 1 ? 0.15 : (L == 2 ? 0.30 : 0.40);
  const double top = L <= 1 ? 0.60 : (L == 2 ? 1.20 : 1.50);
  rep.xi_lo = base;
  rep.xi_hi = top;
  std::vector<double> lx, ly;
  for (int i = 0; i < 12; ++i) {
    const double xi = base * std::pow(top / base, i / 11.0);
    const double v = std::abs(detail::radial_ft(pair.psi_prof, pair.dim, xi));
    lx.push_back(std::log(xi));
    ly.push_back(std::log(std::max(v, 1e-300)));
    rep.constant = std::max(rep.constant, v / std::pow(xi, 2.0 * L));
  }
  rep.slope = detail::least_squares(lx, ly).slope;
  return rep;
}

// ---- Construction --------------------------------------------------------------

/// Builds the certified pair via bump -> moment-killing recursion -> eta ->
/// T^{L+1} -> polynomial tail -> zeta; psi evaluated through Δ^L zeta = T eta - K.
inline WindowPair build_window_pair(int d, int L, const Grid& grid,
                                    std::optional<double> radial_step = std::nullopt) {
  if (d != 1 && d != 2) throw std::invalid_argument("build_window_pair: d must be 1 or 2");
  if (L < 0 || L > 3) throw std::invalid_argument("build_window_pair: L must be in 0..3");
  if (grid.dim != d) throw std::invalid_argument("build_window_pair: grid dimension mismatch");
  if (4.0 / grid.spacing() < 64.0)
    throw std::invalid_argument("build_window_pair: grid too coarse for support radius 2");

  WindowPair pair;
  pair.dim = d;
  pair.moment_order = L;
  pair.radial_step = radial_step.value_or(std::min(grid.spacing() / 4.0, 1.0 / 4096.0));
  const double hr = pair.radial_step;
  // the innermost support ring [2^{-(L+2)}, ...] must be resolved by >= 32 samples
  if (std::exp2(-double(L + 2)) / hr < 32.0)
    throw std::invalid_argument("build_window_pair: radial step too coarse for level L");

  pair.eta_terms = eta_profile_terms(L, d);
  BumpSum phi = phi_profile_terms(L, d);
  pair.varphi_terms.terms.reserve(phi.terms.size());
  for (const auto& t : phi.terms)
    pair.varphi_terms.terms.push_back({t.coeff / std::exp2(double(d)), 0.5 * t.scale});

  RadialProfile eta_prof =
      sample_profile([&](double r) { return pair.eta_terms(r); }, 3.0, hr,
                     pair.eta_terms.support_lo(), 2.0);

  pair.t_eta = apply_T(eta_prof, d);
  pair.t_chain = pair.t_eta;
  for (int k = 1; k <= L; ++k) pair.t_chain = apply_T(pair.t_chain, d);

  pair.tail_fit = extract_polynomial(pair.t_chain, L);
  if (pair.tail_fit.residual > 1e-8 * std::max(pair.tail_fit.scale, 1e-30))
    throw WindowBuildError("polynomial_tail",
                           "T^{L+1} eta does not coincide with an even polynomial on [2,3]");

  pair.tail_constant = pair.tail_fit.coeffs.back() * laplacian_power_constant(L, d);
  // consistency: Δ^L zeta must vanish beyond 2, i.e. T eta == K there
  const double at_25 = profile_eval(pair.t_eta, 2.5);
  if (std::abs(at_25 - pair.tail_constant) > 1e-8 * std::max(1.0, std::abs(pair.tail_constant)))
    throw WindowBuildError("polynomial_tail", "T eta is not constant past the support radius");

  pair.psi_prof = pair.t_eta;
  pair.psi_prof.support_lo = 0.0;
  pair.psi_prof.support_hi = 2.0;
  for (std::size_t i = 0; i < pair.psi_prof.samples.size(); ++i) {
    const double r = double(i) * hr;
    pair.psi_prof.samples[i] = r < 2.0 ? pair.psi_prof.samples[i] - pair.tail_constant : 0.0;
  }

  auto varphi_src = std::make_shared<RadialSource>();
  varphi_src->eval = [terms = pair.varphi_terms](double r) { return terms(r); };
  varphi_src->support_radius = 2.0;
  varphi_src->quad_step = hr;
  auto psi_prof_shared = std::make_shared<RadialProfile>(pair.psi_prof);
  auto psi_src = std::make_shared<RadialSource>();
  psi_src->eval = [p = psi_prof_shared](double r) { return profile_eval(*p, r); };
  psi_src->support_radius = 2.0;
  psi_src->quad_step = hr;
  auto eta_src = std::make_shared<RadialSource>();
  eta_src->eval = [terms = pair.eta_terms](double r) { return terms(r); };
  eta_src->support_radius = 2.0;
  eta_src->quad_step = hr;

  pair.varphi = detail::field_from_radial(grid, varphi_src);
  pair.psi = detail::field_from_radial(grid, psi_src);
  pair.lap_psi = detail::field_from_radial(grid, eta_src);

  // certificates; the mass is a property of the radial window itself, so it is
  // quadratured on the radial side (grid sums alias for the inner rings)
  const double mass = sphere_area(d) * detail::simpson_closed(
                                           [&](double r) {
                                             return std::pow(r, d - 1) * pair.varphi_terms(r);
                                           },
                                           0.0, 2.0, 1 << 16);
  pair.cert.integral_err = std::abs(mass - 1.0);
  if (pair.cert.integral_err > 1e-8)
    throw WindowBuildError("integral", "∫ varphi differs from 1 beyond 1e-8");

  if (L > 0) {
    auto moments = verify_moments(pair, 2 * L - 1);
    for (const auto& m : moments)
      pair.cert.max_moment_err = std::max(pair.cert.max_moment_err, std::abs(m.normalized));
    if (pair.cert.max_moment_err > 1e-6)
      throw WindowBuildError("moments", "psi moments below order 2L exceed 1e-6 relative");
  }

  pair.cert.two_scale_residual = verify_two_scale(pair).residual;
  if (pair.cert.two_scale_residual > 1e-5)
    throw WindowBuildError("two_scale", "two-scale functional equation residual exceeds 1e-5");

  FourierReport fr = fourier_decay_check(pair);
  pair.cert.fourier_slope = fr.slope;
  pair.cert.fourier_constant = fr.constant;
  const double tol = L == 0 ? 0.1 : (L <= 2 ? 0.1 : 0.25);
  if (std::abs(fr.slope - 2.0 * L) > tol)
    throw WindowBuildError("fourier", "low-frequency Fourier slope deviates from 2L");

  pair.certified = true;
  return pair;
}

// ---- Window-side derivatives ----------------------------------------------------

enum class WindowHalf { varphi, psi, lap_psi };

/// ∂^k of a window as a field with a radial+parity source (d=1); d=2 windows
/// fall back to grid finite differences without a source.
inline SampledField window_derivative(const WindowPair& pair, WindowHalf which,
                                      const MultiIndex& alpha) {
  const SampledField& base =
      which == WindowHalf::varphi ? pair.varphi : (which == WindowHalf::psi ? pair.psi : pair.lap_psi);
  if (order(alpha) == 0) return base;
  if (pair.dim == 2) return derivative(base, alpha);

  const double hr = pair.radial_step;
  RadialProfile prof;
  if (which == WindowHalf::psi) {
    prof = pair.psi_prof;
  } else {
    const BumpSum& terms = which == WindowHalf::varphi ? pair.varphi_terms : pair.eta_terms;
    prof = sample_profile([&terms](double r) { return terms(r); }, 3.0, hr, 0.0, 2.0);
  }
  int parity = 0;
  for (int k = 0; k < alpha[0]; ++k) {
    prof = profile_derivative(prof, parity);
    parity ^= 1;
  }
  prof.support_hi = 2.0 + 6.0 * hr;  // stencil widens the support by its reach
  auto shared = std::make_shared<RadialProfile>(std::move(prof));
  auto src = std::make_shared<RadialSource>();
  src->eval = [p = shared](double r) { return profile_eval(*p, r); };
  src->parity = parity;
  src->support_radius = 2.0 + 6.0 * hr;
  src->quad_step = hr;
  return detail::field_from_radial(base.grid, src);
}

// ---- 1-d Schwartz parametrix ------------------------------------------------------

struct ParametrixReport {
  SampledField chi_F;      // cutoff times the fundamental solution of Δ^ell
  SampledField residual;   // Δ^ell(chi F) - δ
  double sup_outside = 0.0;   // residual sup outside [-1, 1]
  double sup_plateau = 0.0;   // residual sup on [-1/2,1/2] minus the 0-neighborhood
};

/// Δ^ell (chi F_ell) - δ with F_ell the 1-d fundamental solution
/// x^{2ell-1} sign(x) / (2 (2ell-1)!).
inline ParametrixReport parametrix_1d(int ell, const SampledField& cutoff) {
  if (cutoff.grid.dim != 1) throw std::invalid_argument("parametrix_1d: needs d = 1");
  if (ell < 1) throw std::invalid_argument("parametrix_1d: ell >= 1");
  const Grid& g = cutoff.grid;
  for (int i = 0; i < g.n; ++i) {
    const double x = g.coord(i);
    if (std::abs(x) <= 0.5 && std::abs(cutoff.values[i] - 1.0) > 1e-12)
      throw std::invalid_argument("parametrix_1d: cutoff must be 1 on [-1/2, 1/2]");
    if (std::abs(x) > 1.0 && std::abs(cutoff.values[i]) > 1e-12)
      throw std::invalid_argument("parametrix_1d: cutoff must vanish outside [-1, 1]");
  }
  double fact = 1.0;
  for (int k = 2; k <= 2 * ell - 1; ++k) fact *= k;
  ParametrixReport rep{zero_field(g), zero_field(g)};
  for (int i = 0; i < g.n; ++i) {
    const double x = g.coord(i);
    rep.chi_F.values[i] =
        cutoff.values[i] * std::pow(std::abs(x), 2 * ell - 1) / (2.0 * fact);
  }
  SampledField lap = rep.chi_F;
  for (int k = 0; k < ell; ++k) lap = laplacian(lap);
  SampledField delta = spike_field(g);
  rep.residual = linear_combination(1.0, lap, -1.0, delta);

  const double h = g.spacing();
  const double hole = (3.0 * ell + 1.0) * h;  // FD stencils feel the kink this far out
  for (int i = 0; i < g.n; ++i) {
    const double x = g.coord(i);
    const double v = std::abs(rep.residual.values[i]);
    if (std::abs(x) > 1.0) rep.sup_outside = std::max(rep.sup_outside, v);
    if (std::abs(x) <= 0.5 && std::abs(x) > hole) rep.sup_plateau = std::max(rep.sup_plateau, v);
  }
  if (rep.sup_outside > 1e-8)
    throw WindowBuildError("parametrix_support", "parametrix residual not compactly supported");
  return rep;
}

/// Canonical mollifier bump on the grid: exp(-1/(1-(r/radius)^2)) inside r < radius,
/// normalized to unit grid mass.
inline SampledField standard_bump_field(const Grid& g, double radius = 0.5) {
  auto val = [radius](double r) {
    const double t = r / radius;
    return t < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0;
  };
  SampledField f = zero_field(g);
  for (std::size_t idx = 0; idx < f.values.size(); ++idx) {
    Point p = g.point(idx);
    const double r = g.dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
    f.values[idx] = val(r);
  }
  const double mass = grid_integral(f);
  for (auto& v : f.values) v /= mass;
  return f;
}

}  // namespace molli
