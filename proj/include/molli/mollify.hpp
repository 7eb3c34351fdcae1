#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "grid.hpp"
#include "radial.hpp"
#include "windows.hpp"

namespace molli {

// ---- Scale resolvability -----------------------------------------------------

/// A dilated window is grid-resolved while its support diameter spans >= 4 cells.
inline bool scale_resolved(double support_radius, int j, double h) {
  return 2.0 * support_radius * std::exp2(-double(j)) >= 4.0 * h - 1e-12;
}

inline int max_resolved_scale(double support_radius, double h) {
  int j = 0;
  while (scale_resolved(support_radius, j + 1, h)) ++j;
  return j;
}

inline double field_support_radius(const SampledField& f) {
  if (f.radial) return f.radial->support_radius;
  const Grid& g = f.grid;
  const double tiny = 1e-12 * (sup_abs(f) + 1e-300);
  double r = 0.0;
  for (std::size_t idx = 0; idx < f.values.size(); ++idx) {
    if (std::abs(f.values[idx]) <= tiny) continue;
    Point p = g.point(idx);
    r = std::max(r, std::max(std::abs(p[0]), g.dim == 2 ? std::abs(p[1]) : 0.0));
  }
  return r;
}

// ---- Dyadic dilation -----------------------------------------------------------

namespace detail {

/// Separable degree-4 (5-point) Lagrange interpolation of grid samples.
inline double interp_field_1d(const std::vector<double>& v, double t) {
  const long n = long(v.size());
  long i = long(std::floor(t));
  i = std::max<long>(2, std::min<long>(i, n - 3));
  const double fr = t - double(i);
  double out = 0.0;
  for (int off = -2; off <= 2; ++off) {
    double num = 1.0, den = 1.0;
    for (int o2 = -2; o2 <= 2; ++o2) {
      if (o2 == off) continue;
      num *= (fr - o2);
      den *= double(off - o2);
    }
    out += v[std::size_t(i + off)] * num / den;
  }
  return out;
}

}  // namespace detail

/// w_j = 2^{jd} w(2^j ·) resampled on the grid; radial-backed windows are
/// evaluated from their profile, plain fields by quartic interpolation.
inline SampledField dyadic_dilate(const SampledField& w, int j) {
  if (j == 0) return w;
  if (j < 0) throw std::invalid_argument("dyadic_dilate: j >= 0");
  const Grid& g = w.grid;
  const double h = g.spacing();
  const double support = field_support_radius(w);
  if (!scale_resolved(support, j, h))
    throw std::invalid_argument("dyadic_dilate: scale " + std::to_string(j) +
                                " under-resolved (support thinner than 4 grid cells)");
  const double s = std::exp2(double(j));
  const double amp = g.dim == 1 ? s : s * s;
  SampledField out = zero_field(g);
  if (w.radial) {
    for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
      Point p = g.point(idx);
      const double r = g.dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
      double v = w.radial->eval(s * r);
      if (g.dim == 1 && w.radial->parity % 2 != 0 && p[0] < 0) v = -v;
      out.values[idx] = amp * v;
    }
    out.radial = nullptr;  // the dilated field is a plain grid field
  } else if (g.dim == 1) {
    for (int i = 0; i < g.n; ++i) {
      const double y = s * g.coord(i);
      if (std::abs(y) > g.half_width) continue;
      out.values[i] = amp * detail::interp_field_1d(w.values, (y + g.half_width) / h);
    }
  } else {
    std::vector<double> col(g.n);
    for (int i = 0; i < g.n; ++i) {
      const double yx = s * g.coord(i);
      if (std::abs(yx) > g.half_width) continue;
      for (int k = 0; k < g.n; ++k) {
        const double yy = s * g.coord(k);
        if (std::abs(yy) > g.half_width) { col[k] = 0.0; continue; }
        // interpolate along axis 0 at fixed source column, then along axis 1
        const double tx = (yx + g.half_width) / h;
        long i0 = std::max<long>(2, std::min<long>(long(std::floor(tx)), g.n - 3));
        double acc = 0.0;
        const double fr = tx - double(i0);
        for (int off = -2; off <= 2; ++off) {
          double num = 1.0, den = 1.0;
          for (int o2 = -2; o2 <= 2; ++o2) {
            if (o2 == off) continue;
            num *= (fr - o2);
            den *= double(off - o2);
          }
          std::vector<double> row(w.values.begin() + (i0 + off) * g.n,
                                  w.values.begin() + (i0 + off + 1) * g.n);
          acc += num / den * detail::interp_field_1d(row, (yy + g.half_width) / h);
        }
        col[k] = amp * acc;
      }
      for (int k = 0; k < g.n; ++k) out.values[std::size_t(i) * g.n + k] = col[k];
    }
  }
  out.kind = FieldKind::function;
  require_finite(out, "dyadic_dilate");
  return out;
}

// ---- Collocation-stencil convolution (d = 1) ------------------------------------

namespace detail {

inline std::array<double, 6> cardinal6(double fr) {
  std::array<double, 6> l{};
  for (int off = -2; off <= 3; ++off) {
    double num = 1.0, den = 1.0;
    for (int o2 = -2; o2 <= 3; ++o2) {
      if (o2 == off) continue;
      num *= (fr - o2);
      den *= double(off - o2);
    }
    l[std::size_t(off + 2)] = num / den;
  }
  return l;
}

constexpr std::array<double, 6> kGl6X = {
    -0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
    0.2386191860831969,  0.6612093864662645,  0.9324695142031521};
constexpr std::array<double, 6> kGl6W = {
    0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
    0.4679139345726910, 0.3607615730481386, 0.1713244923791704};

struct WindowStencil {
  long imin = 0;
  std::vector<double> w;
};

/// Effective grid weights W[i] = ∫ w_j(y) ℓ(y/h - i) dy with ℓ the quintic
/// cardinal basis: convolving the interpolation model of f with w_j exactly.
/// The substitution u = 2^j y turns this into ∫ w(u) ℓ(u/(2^j h) - i) du,
/// integrated per window-coordinate cell of the profile step so that each
/// Gauss cell sees a single smooth interpolation piece.
inline WindowStencil make_window_stencil(const RadialSource& src, int j, double h) {
  const double s = std::exp2(double(j));
  const double sh = s * h;
  const double half = src.support_radius / s;
  WindowStencil st;
  const long m0 = long(std::floor(-half / h)) - 1;
  const long m1 = long(std::ceil(half / h)) + 1;
  st.imin = m0 - 2;
  st.w.assign(std::size_t(m1 - m0 + 1 + 5), 0.0);
  const double q = src.quad_step > 0.0 ? src.quad_step : src.support_radius / 8192.0;
  const long cells = long(std::ceil(src.support_radius / q));
  for (long c = 0; c < cells; ++c) {
    const double a = double(c) * q;
    const double b = std::min(a + q, src.support_radius);
    if (b <= a) break;
    for (int g = 0; g < 6; ++g) {
      const double u = 0.5 * (a + b) + 0.5 * (b - a) * kGl6X[std::size_t(g)];
      const double v = src.eval(u);
      if (v == 0.0) continue;
      const double wq = 0.5 * (b - a) * kGl6W[std::size_t(g)] * v;
      for (int side = 0; side < 2; ++side) {
        const double y = side == 0 ? u / s : -u / s;
        const double sign = (side == 1 && src.parity % 2 != 0) ? -1.0 : 1.0;
        const long m = long(std::floor(y / h));
        const auto l6 = cardinal6(u / sh * (side == 0 ? 1.0 : -1.0) - double(m));
        for (int off = -2; off <= 3; ++off) {
          const long idx = m + off - st.imin;
          if (idx >= 0 && idx < long(st.w.size()))
            st.w[std::size_t(idx)] += sign * wq * l6[std::size_t(off + 2)];
        }
      }
    }
  }
  return st;
}

}  // namespace detail

/// f * w_j for a window w. Smooth f with a radial-backed window (d=1) goes through
/// collocation stencils, accurate at every resolved scale; spikes resolve exactly
/// through dilation; other cases use grid FFT convolution of the dilated window.
inline SampledField window_convolve(const SampledField& f, const SampledField& w, int j) {
  if (!(f.grid == w.grid)) throw std::invalid_argument("window_convolve: grid mismatch");
  if (f.kind == FieldKind::spike) {
    // spike at the origin: f * w_j = w_j, sampled exactly
    return dyadic_dilate(w, j);
  }
  if (f.grid.dim == 1 && w.radial) {
    const double h = f.grid.spacing();
    if (2.0 * w.radial->support_radius * std::exp2(-double(j)) < h)
      throw std::invalid_argument("window_convolve: scale far beyond grid resolution");
    auto st = detail::make_window_stencil(*w.radial, j, h);
    const int n = f.grid.n;
    SampledField out = zero_field(f.grid);
    for (std::size_t k = 0; k < st.w.size(); ++k) {
      const double c = st.w[k];
      if (c == 0.0) continue;
      const long i = st.imin + long(k);
      const long lo = std::max<long>(0, i);
      const long hi = std::min<long>(n, n + i);
      for (long m = lo; m < hi; ++m) out.values[std::size_t(m)] += c * f.values[std::size_t(m - i)];
    }
    require_finite(out, "window_convolve");
    return out;
  }
  return convolve(f, dyadic_dilate(w, j));
}

// ---- Mollifier runs ---------------------------------------------------------------

struct ScaleSummary {
  int j = 0;
  bool resolved = true;
  double sup_norm = 0.0;
  double l2_norm = 0.0;
};

struct MollifierRun {
  std::string window_id;
  int scales = 0;      // J: scales 0..J-1
  int j_resolved = 0;  // last scale satisfying the 4-cell rule
  std::vector<SampledField> fields;  // f * w_j restricted by margin 1
  std::vector<ScaleSummary> summary;
};

inline MollifierRun mollify_sequence(const SampledField& f, const SampledField& w, int J,
                                     std::string window_id = "window") {
  if (J < 1) throw std::invalid_argument("mollify_sequence: J >= 1");
  MollifierRun run;
  run.window_id = std::move(window_id);
  run.scales = J;
  const double support = field_support_radius(w);
  run.j_resolved = max_resolved_scale(support, f.grid.spacing());
  for (int j = 0; j < J; ++j) {
    SampledField conv = restrict_inner(window_convolve(f, w, j), 1.0);
    ScaleSummary s;
    s.j = j;
    s.resolved = scale_resolved(support, j, f.grid.spacing());
    s.sup_norm = sup_abs(conv);
    double ss = 0.0;
    for (double v : conv.values) ss += v * v;
    const double hd = f.grid.dim == 1 ? f.grid.spacing() : f.grid.spacing() * f.grid.spacing();
    s.l2_norm = std::sqrt(ss * hd);
    run.summary.push_back(s);
    run.fields.push_back(std::move(conv));
  }
  return run;
}

// ---- Dirac-sequence check -----------------------------------------------------------

struct DeltaApproxReport {
  std::vector<double> errors;  // e_j = sup inner |f*w_j - (∫w) f|
  bool monotone_trend = true;  // nonincreasing until the resolution floor
  double window_mass = 0.0;
};

inline DeltaApproxReport delta_approx_check(const SampledField& f, const SampledField& w, int J) {
  if (f.kind != FieldKind::function)
    throw std::invalid_argument("delta_approx_check: f must be a smooth-kind field");
  DeltaApproxReport rep;
  rep.window_mass = grid_integral(w);
  const double floor = 1e-13 * (sup_abs(f) + 1e-300);
  for (int j = 0; j < J; ++j) {
    SampledField conv = window_convolve(f, w, j);
    SampledField diff = linear_combination(1.0, conv, -rep.window_mass, f);
    rep.errors.push_back(inner_sup(diff, 1.0));
  }
  for (std::size_t j = 0; j + 1 < rep.errors.size(); ++j) {
    if (rep.errors[j] <= floor) break;
    if (rep.errors[j + 1] > rep.errors[j] * 1.05 + floor) rep.monotone_trend = false;
  }
  return rep;
}

// ---- Telescoping reconstruction ------------------------------------------------------

struct ReconstructionReport {
  SampledField result;          // R_J f
  std::vector<double> errors;   // errors[k] = sup inner |f - R_k f|, k = 0..J
  int scale_cap = 0;            // last scale the grid resolves
  bool capped = false;          // J exceeded the cap; trailing errors plateau
};

/// R_J f = f*varphi + sum_{j<J} f*(Δpsi)_j, with the derivative carried by the
/// certified window: 4^{-j} (Δf)*psi_j = f*(Δpsi)_j.
inline ReconstructionReport reconstruct(const SampledField& f, const WindowPair& pair, int J) {
  if (!pair.certified) throw std::invalid_argument("reconstruct: window pair is not certified");
  if (J < 0) throw std::invalid_argument("reconstruct: J >= 0");
  ReconstructionReport rep{window_convolve(f, pair.varphi, 0), {}, 0, false};
  rep.scale_cap = max_resolved_scale(pair.support_radius, f.grid.spacing());
  // zero extension invalidates a rim of window-support width; the error scan
  // stays clear of it
  const double margin = 1.0 + pair.support_radius;
  auto err = [&, margin]() {
    SampledField d = linear_combination(1.0, f, -1.0, rep.result);
    return inner_sup(d, margin);
  };
  rep.errors.push_back(err());
  for (int j = 0; j < J; ++j) {
    if (j > rep.scale_cap) {
      rep.capped = true;      // plateau: remaining terms alias on this grid
      rep.errors.push_back(rep.errors.back());
      continue;
    }
    SampledField term = window_convolve(f, pair.lap_psi, j);
    rep.result = linear_combination(1.0, rep.result, 1.0, term);
    rep.errors.push_back(err());
  }
  return rep;
}

}  // namespace molli
