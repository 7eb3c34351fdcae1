#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "grid.hpp"
#include "weights.hpp"

namespace molli {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Selects a solid-TIBF norm engine. p doubles as Lp exponent, mixed outer
/// exponent and Morrey p; q as mixed inner exponent and Morrey q.
struct NormDescriptor {
  enum class Engine { Lp, L0, MixedLp, Wiener, Morrey };
  Engine engine = Engine::Lp;
  double p = 2.0;
  double q = 2.0;

  static NormDescriptor lp(double p) { return {Engine::Lp, p, p}; }
  static NormDescriptor l0() { return {Engine::L0, 0, 0}; }
  static NormDescriptor mixed(double p1, double p2) { return {Engine::MixedLp, p1, p2}; }
  static NormDescriptor wiener() { return {Engine::Wiener, 0, 0}; }
  static NormDescriptor morrey(double p, double q) { return {Engine::Morrey, p, q}; }
};

inline void validate_descriptor(const NormDescriptor& nd, int dim) {
  using E = NormDescriptor::Engine;
  auto ok_exp = [](double p) { return p >= 1.0; };  // infinity() allowed
  switch (nd.engine) {
    case E::Lp:
      if (!ok_exp(nd.p)) throw std::invalid_argument("NormDescriptor: Lp needs p >= 1");
      break;
    case E::L0:
    case E::Wiener:
      break;
    case E::MixedLp:
      if (dim != 2) throw std::invalid_argument("NormDescriptor: MixedLp needs dim 2");
      if (!ok_exp(nd.p) || !ok_exp(nd.q))
        throw std::invalid_argument("NormDescriptor: MixedLp needs p1, p2 >= 1");
      break;
    case E::Morrey:
      if (!(nd.q >= 1.0 && nd.q <= nd.p && std::isfinite(nd.p)))
        throw std::invalid_argument("NormDescriptor: Morrey needs 1 <= q <= p < infinity");
      break;
  }
}

inline std::string to_string(const NormDescriptor& nd) {
  using E = NormDescriptor::Engine;
  switch (nd.engine) {
    case E::Lp: return std::isinf(nd.p) ? "Lp(inf)" : "Lp(" + std::to_string(nd.p) + ")";
    case E::L0: return "L0";
    case E::MixedLp: return "MixedLp";
    case E::Wiener: return "Wiener";
    case E::Morrey: return "Morrey";
  }
  return "?";
}

/// Norm outcome; values live in the log2 domain so exponential weights never
/// saturate. Overflow past e^700 and box-divergence trends are flagged.
struct NormValue {
  double log2_value = kNegInf;
  bool overflow = false;
  bool truncation_limited = false;
  std::vector<std::pair<double, double>> tail;  // engine-specific (R, log2) profile

  double value() const {
    if (log2_value == kNegInf) return 0.0;
    return std::exp2(log2_value);  // +inf past the double range, by design
  }
};

/// Log-magnitude view of a (weighted) field.
struct LogField {
  Grid grid;
  std::vector<double> u;  // natural log of |f w|, -inf at zeros
  double margin = 0.0;    // samples outside the margin box were dropped
};

inline LogField log_abs_field(const SampledField& f, double margin = 0.0) {
  LogField lf{f.grid, std::vector<double>(f.values.size(), kNegInf), margin};
  const double lim = f.grid.half_width - margin;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    Point p = f.grid.point(i);
    if (std::abs(p[0]) > lim || (f.grid.dim == 2 && std::abs(p[1]) > lim)) continue;
    const double a = std::abs(f.values[i]);
    if (a > 0.0) lf.u[i] = std::log(a);
  }
  return lf;
}

/// u = log|f| + log_weight(point); log_weight may be negative (1/w_n scaling).
inline LogField weighted_log_field(const SampledField& f,
                                   const std::function<double(const Point&)>& log_weight,
                                   double margin = 0.0) {
  LogField lf = log_abs_field(f, margin);
  for (std::size_t i = 0; i < lf.u.size(); ++i) {
    if (lf.u[i] == kNegInf) continue;
    lf.u[i] += log_weight(f.grid.point(i));
  }
  return lf;
}

namespace norms_detail {

struct Prepared {
  double m = kNegInf;           // max of u
  std::vector<double> v;        // exp(u - m) in [0, 1]
};

inline Prepared prepare(const LogField& lf) {
  Prepared pr;
  for (double u : lf.u) pr.m = std::max(pr.m, u);
  if (pr.m == kNegInf) return pr;
  pr.v.resize(lf.u.size());
  for (std::size_t i = 0; i < lf.u.size(); ++i)
    pr.v[i] = lf.u[i] == kNegInf ? 0.0 : std::exp(lf.u[i] - pr.m);
  return pr;
}

inline double hd(const Grid& g) { return g.dim == 1 ? g.spacing() : g.spacing() * g.spacing(); }

inline double lp_linear(const Grid& g, const std::vector<double>& v, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
  }
  double s = 0.0;
  for (double x : v) s += std::pow(x, p);
  return std::pow(hd(g) * s, 1.0 / p);
}

inline double wiener_linear(const Grid& g, const std::vector<double>& v) {
  const int k = std::max(1, int(std::llround(1.0 / g.spacing())));
  double best = 0.0;
  if (g.dim == 1) {
    std::vector<double> pre(v.size() + 1, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) pre[i + 1] = pre[i] + v[i];
    for (int i = 0; i < g.n; ++i) {
      const int lo = std::max(0, i - k), hi = std::min(g.n - 1, i + k);
      best = std::max(best, pre[std::size_t(hi) + 1] - pre[std::size_t(lo)]);
    }
  } else {
    const int n = g.n;
    std::vector<double> sat(std::size_t(n + 1) * (n + 1), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        sat[std::size_t(i + 1) * (n + 1) + j + 1] = v[std::size_t(i) * n + j] +
                                                    sat[std::size_t(i) * (n + 1) + j + 1] +
                                                    sat[std::size_t(i + 1) * (n + 1) + j] -
                                                    sat[std::size_t(i) * (n + 1) + j];
    auto box = [&](int i0, int j0, int i1, int j1) {
      return sat[std::size_t(i1 + 1) * (n + 1) + j1 + 1] - sat[std::size_t(i0) * (n + 1) + j1 + 1] -
             sat[std::size_t(i1 + 1) * (n + 1) + j0] + sat[std::size_t(i0) * (n + 1) + j0];
    };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        best = std::max(best, box(std::max(0, i - k), std::max(0, j - k), std::min(n - 1, i + k),
                                  std::min(n - 1, j + k)));
  }
  return hd(g) * best;
}

inline double mixed_linear(const Grid& g, const std::vector<double>& v, double p1, double p2) {
  const int n = g.n;
  const double h = g.spacing();
  std::vector<double> inner(std::size_t(n), 0.0);
  for (int i = 0; i < n; ++i) {
    if (std::isinf(p2)) {
      double m = 0.0;
      for (int j = 0; j < n; ++j) m = std::max(m, v[std::size_t(i) * n + j]);
      inner[std::size_t(i)] = m;
    } else {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += std::pow(v[std::size_t(i) * n + j], p2);
      inner[std::size_t(i)] = std::pow(h * s, 1.0 / p2);
    }
  }
  if (std::isinf(p1)) {
    double m = 0.0;
    for (double x : inner) m = std::max(m, x);
    return m;
  }
  double s = 0.0;
  for (double x : inner) s += std::pow(x, p1);
  return std::pow(h * s, 1.0 / p1);
}

inline double morrey_linear(const Grid& g, const std::vector<double>& v, double p, double q) {
  const int n = g.n;
  const double h = g.spacing();
  const double mexp = 1.0 / p - 1.0 / q;  // <= 0
  double best = 0.0;
  if (g.dim == 1) {
    std::vector<double> pre(v.size() + 1, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) pre[i + 1] = pre[i] + std::pow(v[i], q);
    for (double R = h; R <= 4.0 * g.half_width; R *= 2.0) {
      const int k = int(std::llround(R / h));
      const double measure = 2.0 * R;
      for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - k), hi = std::min(n - 1, i + k);
        const double s = h * (pre[std::size_t(hi) + 1] - pre[std::size_t(lo)]);
        best = std::max(best, std::pow(measure, mexp) * std::pow(s, 1.0 / q));
      }
    }
  } else {
    std::vector<double> sat(std::size_t(n + 1) * (n + 1), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        sat[std::size_t(i + 1) * (n + 1) + j + 1] = std::pow(v[std::size_t(i) * n + j], q) +
                                                    sat[std::size_t(i) * (n + 1) + j + 1] +
                                                    sat[std::size_t(i + 1) * (n + 1) + j] -
                                                    sat[std::size_t(i) * (n + 1) + j];
    auto box = [&](int i0, int j0, int i1, int j1) {
      return sat[std::size_t(i1 + 1) * (n + 1) + j1 + 1] - sat[std::size_t(i0) * (n + 1) + j1 + 1] -
             sat[std::size_t(i1 + 1) * (n + 1) + j0] + sat[std::size_t(i0) * (n + 1) + j0];
    };
    for (double R = h; R <= 4.0 * g.half_width; R *= 2.0) {
      const int k = int(std::llround(R / h));
      const double measure = 4.0 * R * R;  // square windows stand in for balls
      for (int i = 0; i < n; i += 2)
        for (int j = 0; j < n; j += 2) {
          const double s = h * h * box(std::max(0, i - k), std::max(0, j - k),
                                       std::min(n - 1, i + k), std::min(n - 1, j + k));
          best = std::max(best, std::pow(measure, mexp) * std::pow(s, 1.0 / q));
        }
    }
  }
  return best;
}

/// Divergence trend over inner-box shells: growing sup envelope flags every
/// engine; non-decaying shell mass additionally flags integral-type engines.
inline bool divergence_flag(const LogField& lf, double global_p) {
  const Grid& g = lf.grid;
  const double xi = g.half_width - std::max(1.0, lf.margin);
  const double fr[5] = {0.0, 0.4, 0.6, 0.8, 1.0};
  double s[4] = {kNegInf, kNegInf, kNegInf, kNegInf};
  double mass[4] = {0, 0, 0, 0};
  double mglobal = kNegInf;
  for (double u : lf.u) mglobal = std::max(mglobal, u);
  if (mglobal == kNegInf) return false;
  for (std::size_t i = 0; i < lf.u.size(); ++i) {
    if (lf.u[i] == kNegInf) continue;
    Point p = g.point(i);
    const double r = g.dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
    for (int k = 0; k < 4; ++k)
      if (r > fr[k] * xi && r <= fr[k + 1] * xi) {
        s[k] = std::max(s[k], lf.u[i]);
        if (std::isfinite(global_p))
          mass[k] += std::exp(std::max(global_p * (lf.u[i] - mglobal), -745.0));
      }
  }
  if (s[3] > s[2] + std::log(1.05)) return true;
  if (std::isfinite(global_p)) {
    const double total = mass[0] + mass[1] + mass[2] + mass[3];
    if (mass[3] > 0.9 * mass[2] && mass[3] > 1e-12 * total) return true;
  }
  return false;
}

inline double global_exponent(const NormDescriptor& nd) {
  using E = NormDescriptor::Engine;
  switch (nd.engine) {
    case E::Lp: return nd.p;
    case E::MixedLp: return std::min(nd.p, nd.q);
    case E::L0:
    case E::Wiener:
    case E::Morrey: return std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace norms_detail

/// Norm of the (already weighted) log-magnitude field under the selected engine.
inline NormValue engine_norm(const LogField& lf, const NormDescriptor& nd) {
  validate_descriptor(nd, lf.grid.dim);
  NormValue out;
  auto pr = norms_detail::prepare(lf);
  if (pr.m == kNegInf) return out;  // zero field

  using E = NormDescriptor::Engine;
  double lin = 0.0;
  switch (nd.engine) {
    case E::Lp: lin = norms_detail::lp_linear(lf.grid, pr.v, nd.p); break;
    case E::L0: {
      lin = norms_detail::lp_linear(lf.grid, pr.v, std::numeric_limits<double>::infinity());
      // tail profile sup_{|x| >= R} |f|
      for (int k = 1; k <= 8; ++k) {
        const double R = lf.grid.half_width * double(k) / 8.0;
        double s = kNegInf;
        for (std::size_t i = 0; i < lf.u.size(); ++i) {
          Point p = lf.grid.point(i);
          const double r = lf.grid.dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
          if (r >= R) s = std::max(s, lf.u[i]);
        }
        out.tail.emplace_back(R, s == kNegInf ? kNegInf : s / std::numbers::ln2);
      }
      break;
    }
    case E::MixedLp: lin = norms_detail::mixed_linear(lf.grid, pr.v, nd.p, nd.q); break;
    case E::Wiener: lin = norms_detail::wiener_linear(lf.grid, pr.v); break;
    case E::Morrey: lin = norms_detail::morrey_linear(lf.grid, pr.v, nd.p, nd.q); break;
  }
  if (lin <= 0.0) return out;
  const double ln_value = pr.m + std::log(lin);
  out.log2_value = ln_value / std::numbers::ln2;
  out.overflow = ln_value > 700.0;
  out.truncation_limited = norms_detail::divergence_flag(lf, norms_detail::global_exponent(nd));
  return out;
}

inline NormValue e_norm(const SampledField& f, const NormDescriptor& nd) {
  return engine_norm(log_abs_field(f), nd);
}

/// max_{|a| <= ...} style single-term weighted seminorm: || d^alpha f * w_n ||_E.
inline NormValue weighted_seminorm(const SampledField& f, const MultiIndex& alpha,
                                   const WeightSystem& W, int n, const NormDescriptor& nd) {
  SampledField g = derivative(f, alpha);
  const int dim = f.grid.dim;
  return engine_norm(
      weighted_log_field(g, [&](const Point& p) { return W.log_weight(n, p, dim); }), nd);
}

/// R -> ||(1 - 1_{B(0,R)}) f||_E ; monotone nonincreasing by solidity.
inline std::vector<std::pair<double, double>> ap_diagnostic(const SampledField& f,
                                                            const NormDescriptor& nd,
                                                            const std::vector<double>& radii) {
  std::vector<std::pair<double, double>> curve;
  for (double R : radii) {
    LogField lf = log_abs_field(f);
    for (std::size_t i = 0; i < lf.u.size(); ++i) {
      Point p = f.grid.point(i);
      const double r = f.grid.dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
      if (r <= R) lf.u[i] = kNegInf;
    }
    curve.emplace_back(R, engine_norm(lf, nd).log2_value);
  }
  return curve;
}

/// sup_R || 1_{B(0,R)} f ||_E over the tested radii, flagged when the sup is
/// still increasing at the box edge (truncation-limited).
inline NormValue sl_norm(const SampledField& f, const NormDescriptor& nd,
                         const std::vector<double>& radii) {
  NormValue out;
  double prev = kNegInf;
  for (double R : radii) {
    LogField lf = log_abs_field(f);
    for (std::size_t i = 0; i < lf.u.size(); ++i) {
      Point p = f.grid.point(i);
      const double r = f.grid.dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
      if (r > R) lf.u[i] = kNegInf;
    }
    NormValue v = engine_norm(lf, nd);
    out.tail.emplace_back(R, v.log2_value);
    out.log2_value = std::max(out.log2_value, v.log2_value);
    out.overflow = out.overflow || v.overflow;
    prev = v.log2_value;
  }
  if (out.tail.size() >= 2) {
    const double last = out.tail[out.tail.size() - 1].second;
    const double before = out.tail[out.tail.size() - 2].second;
    if (last > before + 1e-12 && last != kNegInf) out.truncation_limited = true;
  }
  (void)prev;
  return out;
}

inline std::vector<double> default_radii(const Grid& g, int count = 16) {
  std::vector<double> r;
  for (int k = 1; k <= count; ++k) r.push_back(g.half_width * double(k) / double(count));
  return r;
}

}  // namespace molli
