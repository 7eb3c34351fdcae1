#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "expr.hpp"
#include "grid.hpp"

namespace molli {

enum class WeightTag { one, log, pol, exp, custom, smoothed };

inline std::string to_string(WeightTag t) {
  switch (t) {
    case WeightTag::one: return "one";
    case WeightTag::log: return "log";
    case WeightTag::pol: return "pol";
    case WeightTag::exp: return "exp";
    case WeightTag::custom: return "custom";
    case WeightTag::smoothed: return "smoothed";
  }
  return "?";
}

/// Weight function system W = (w_n), w_n = e^{n omega} with a radial generator
/// omega >= 0; smoothed systems are grid-backed (w_n * bump per index).
class WeightSystem {
 public:
  WeightTag tag = WeightTag::one;
  std::string generator_text;  // expression text for custom systems

  static WeightSystem builtin(WeightTag t) {
    WeightSystem w;
    w.tag = t;
    switch (t) {
      case WeightTag::one:
        w.omega_ = [](double) { return 0.0; };
        break;
      case WeightTag::log:
        // log(1 + log<x>): the paper's log log<x> regularized near the origin,
        // an equivalent system with omega >= 0 everywhere
        w.omega_ = [](double r) { return std::log1p(0.5 * std::log1p(r * r)); };
        break;
      case WeightTag::pol:
        w.omega_ = [](double r) { return 0.5 * std::log1p(r * r); };  // log <x>
        break;
      case WeightTag::exp:
        w.omega_ = [](double r) { return r; };
        break;
      default:
        throw std::invalid_argument("WeightSystem::builtin: unknown tag");
    }
    return w;
  }

  /// c * W with c in [1, 10]: an equivalent system; axiom checks absorb c into C.
  static WeightSystem scaled(const WeightSystem& W, double c) {
    if (c < 1.0 || c > 10.0) throw std::invalid_argument("WeightSystem::scaled: c in [1, 10]");
    WeightSystem out = W;
    out.log_scale_ = W.log_scale_ + std::log(c);
    return out;
  }

  static WeightSystem custom(const std::string& text) {
    WeightSystem w;
    w.tag = WeightTag::custom;
    w.generator_text = text;
    auto fn = compile_expression(text);
    for (double r = 0.0; r <= 64.0; r += 1.0 / 64.0) {
      const double v = fn(r);
      if (!std::isfinite(v) || v < -1e-12)
        throw std::invalid_argument("WeightSystem::custom: generator must be finite and >= 0 (w_n >= 1)");
    }
    w.omega_ = [fn](double r) { return std::max(0.0, fn(r)); };
    return w;
  }

  /// log w_n at radius r (weights are radial; custom grammar sees x = |x|).
  double log_weight(int n, double r) const {
    if (n < 0) throw std::invalid_argument("WeightSystem: index n must be >= 0");
    if (smoothed_) {
      if (n >= int(smoothed_->radial.size()))
        throw std::invalid_argument("WeightSystem: smoothed system built up to n = " +
                                    std::to_string(int(smoothed_->radial.size()) - 1));
      return log_scale_ + smoothed_log_(n, r);
    }
    return log_scale_ + double(n) * omega_(r);
  }

  double log_weight(int n, const Point& p, int dim) const {
    return log_weight(n, dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]));
  }

  double weight(int n, double r) const { return std::exp(log_weight(n, r)); }

  double omega(double r) const {
    if (smoothed_) throw std::logic_error("WeightSystem: smoothed system has no closed generator");
    return omega_(r);
  }

  bool is_smoothed() const { return smoothed_ != nullptr; }
  const WeightSystem* source() const { return source_ ? source_.get() : nullptr; }

  friend WeightSystem smooth_system(const WeightSystem&, const SampledField&, int);

 private:
  std::function<double(double)> omega_;
  double log_scale_ = 0.0;

  struct Smoothed {
    Grid grid;
    std::vector<std::vector<double>> radial;  // per n: values on r_i = i*h, i=0..count
    double step = 0.0;
  };
  std::shared_ptr<const Smoothed> smoothed_;
  std::shared_ptr<const WeightSystem> source_;

  double smoothed_log_(int n, double r) const {
    const auto& tab = smoothed_->radial[std::size_t(n)];
    const double t = std::min(r / smoothed_->step, double(tab.size() - 1));
    const std::size_t i = std::min(std::size_t(t), tab.size() - 2);
    const double fr = t - double(i);
    const double v = tab[i] * (1.0 - fr) + tab[i + 1] * fr;
    return std::max(0.0, std::log(std::max(v, 1e-300)));  // boundary dip clamped at w = 1
  }
};

inline WeightSystem builtin_system(WeightTag t) { return WeightSystem::builtin(t); }

inline WeightSystem builtin_system(const std::string& tag) {
  if (tag == "one") return WeightSystem::builtin(WeightTag::one);
  if (tag == "log") return WeightSystem::builtin(WeightTag::log);
  if (tag == "pol") return WeightSystem::builtin(WeightTag::pol);
  if (tag == "exp") return WeightSystem::builtin(WeightTag::exp);
  throw std::invalid_argument("builtin_system: unknown tag '" + tag + "'");
}

/// Mollified system omega_n = w_n * bump (Lemma-style smoothing); verifies the
/// sandwich against the original on the inner box.
inline WeightSystem smooth_system(const WeightSystem& W, const SampledField& bump, int n_cap = 12) {
  if (W.is_smoothed()) throw std::invalid_argument("smooth_system: already smoothed");
  const Grid& g = bump.grid;
  const double sup_b = sup_abs(bump);
  for (std::size_t idx = 0; idx < bump.values.size(); ++idx) {
    const double v = bump.values[idx];
    if (v < -1e-12 * sup_b) throw std::invalid_argument("smooth_system: bump must be non-negative");
    Point p = g.point(idx);
    const double r = g.dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
    if (r > 0.5 + 1e-12 && std::abs(v) > 1e-12 * sup_b)
      throw std::invalid_argument("smooth_system: bump must be supported in radius 1/2");
  }
  if (std::abs(grid_integral(bump) - 1.0) > 1e-8)
    throw std::invalid_argument("smooth_system: bump must have unit integral");

  // guard the linear-domain convolution against overflow
  const double max_log = W.log_weight(n_cap, g.half_width * (g.dim == 1 ? 1.0 : std::sqrt(2.0)));
  if (max_log > 600.0)
    throw std::invalid_argument("smooth_system: weights overflow the linear domain on this box");

  WeightSystem out;
  out.tag = WeightTag::smoothed;
  auto data = std::make_shared<WeightSystem::Smoothed>();
  data->grid = g;
  data->step = g.spacing();
  const int half = g.n / 2;

  for (int n = 0; n <= n_cap; ++n) {
    SampledField wf = zero_field(g);
    for (std::size_t idx = 0; idx < wf.values.size(); ++idx) {
      Point p = g.point(idx);
      wf.values[idx] = std::exp(W.log_weight(n, p, g.dim));
    }
    SampledField sm = convolve(wf, bump);
    // radial table along the positive first axis
    std::vector<double> tab(std::size_t(half) + 1);
    for (int i = 0; i <= half; ++i)
      tab[std::size_t(i)] = g.dim == 1 ? sm.values[std::size_t(half + i)]
                                       : sm.values[std::size_t(half + i) * g.n + half];
    if (int(data->radial.size()) <= n) data->radial.resize(std::size_t(n) + 1);
    data->radial[std::size_t(n)] = std::move(tab);
  }
  out.smoothed_ = data;
  out.source_ = std::make_shared<WeightSystem>(W);

  // sandwich and monotonicity on the inner box
  for (int n = 0; n < n_cap; ++n) {
    for (double r = 0.0; r <= g.half_width - 1.0; r += g.half_width / 64.0) {
      const double a = out.log_weight(n, r);
      const double b = out.log_weight(n + 1, r);
      if (a > b + 1e-9) throw std::runtime_error("smooth_system: monotonicity violated");
      const double lo = W.log_weight(n, std::max(0.0, r - 0.5));
      const double hi = W.log_weight(n, r + 0.5);
      if (a < lo - 1e-9 || a > hi + 1e-9)
        throw std::runtime_error("smooth_system: smoothed weight escapes the sandwich");
    }
  }
  return out;
}

// ---- Axiom checks -----------------------------------------------------------------

/// Outcome of a numeric axiom check; truncation-aware, never a proof.
struct CheckResult {
  bool passed = false;
  std::optional<int> witness_m;
  std::optional<double> constant_C;
  std::vector<std::pair<double, double>> curve;  // diagnostic (x_or_R, ratio)
  double box_halfwidth = 0.0;
  std::string note;
};

namespace weights_detail {

inline std::vector<double> unit_ball_lattice_1d() {
  std::vector<double> ys;
  for (int k = 0; k < 17; ++k) ys.push_back(-1.0 + 2.0 * k / 16.0);
  return ys;
}

}  // namespace weights_detail

/// (wM): for some m >= n, w_n(x+y) <= C w_m(x) on the box for |y| <= 1.
inline CheckResult check_wM(const WeightSystem& W, int n, int m_cap, const Grid& g,
                            double c_limit = 1e6) {
  if (m_cap < n) throw std::invalid_argument("check_wM: m_cap >= n required");
  CheckResult res;
  res.box_halfwidth = g.half_width;
  const auto ys = weights_detail::unit_ball_lattice_1d();
  const int stride = g.dim == 1 ? 1 : 4;
  for (int m = n; m <= m_cap; ++m) {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, double>> curve(33, {0.0, 0.0});
    for (int i = 0; i < g.n; i += stride) {
      const double x0 = g.coord(i);
      if (std::abs(x0) > g.half_width - 1.0) continue;
      if (g.dim == 1) {
        for (double y : ys) {
          const double d = W.log_weight(n, std::abs(x0 + y)) - W.log_weight(m, std::abs(x0));
          best = std::max(best, d);
          auto& slot = curve[std::size_t(std::abs(x0) / g.half_width * 32.0)];
          slot.first = std::abs(x0);
          slot.second = std::max(slot.second, std::exp(std::min(d, 700.0)));
        }
      } else {
        for (int k = 0; k < g.n; k += stride) {
          const double x1 = g.coord(k);
          if (std::abs(x1) > g.half_width - 1.0) continue;
          for (double ya : ys)
            for (double yb : ys) {
              if (ya * ya + yb * yb > 1.0 + 1e-12) continue;
              const double d =
                  W.log_weight(n, std::hypot(x0 + ya, x1 + yb)) - W.log_weight(m, std::hypot(x0, x1));
              best = std::max(best, d);
            }
        }
      }
    }
    const double C = std::exp(std::min(best, 700.0));
    if (best <= std::log(c_limit)) {
      res.passed = true;
      res.witness_m = m;
      res.constant_C = C;
      res.curve = curve;
      return res;
    }
  }
  res.note = "no m <= m_cap bounds the translated ratio within C_limit on this box";
  return res;
}

/// (wN): for some m >= n, w_n/w_m decays to <= tail_drop of its central value,
/// trending down monotonically over the outer half of the box.
inline CheckResult check_wN(const WeightSystem& W, int n, int m_cap, const Grid& g,
                            double tail_drop = 0.1) {
  if (m_cap < n) throw std::invalid_argument("check_wN: m_cap >= n required");
  CheckResult res;
  res.box_halfwidth = g.half_width;
  const int samples = 512;
  for (int m = n; m <= m_cap; ++m) {
    std::vector<std::pair<double, double>> curve;
    for (int i = 0; i <= samples; ++i) {
      const double r = g.half_width * double(i) / samples;
      const double lr = W.log_weight(n, r) - W.log_weight(m, r);
      curve.emplace_back(r, std::exp(std::max(lr, -745.0)));
    }
    const double r0 = curve.front().second;
    const double rX = curve.back().second;
    bool monotone = true;
    for (int i = samples / 2; i < samples; ++i)
      if (curve[std::size_t(i + 1)].second > curve[std::size_t(i)].second * (1.0 + 1e-9))
        monotone = false;
    if (rX <= tail_drop * r0 && monotone) {
      res.passed = true;
      res.witness_m = m;
      res.constant_C = rX / r0;
      res.curve = std::move(curve);
      return res;
    }
    res.curve = std::move(curve);
  }
  res.note = "ratio does not decay below tail_drop of its central value within the box";
  return res;
}

/// (N): for some m >= n, w_n/w_m is integrable — far-field dyadic-shell quadrature;
/// converged when the last shell is <= tail_frac of the total and the outer-half
/// shell increments keep decreasing.
inline CheckResult check_N(const WeightSystem& W, int n, int m_cap, const Grid& g,
                           double tail_frac = 0.01, int shells = 16) {
  if (m_cap < n) throw std::invalid_argument("check_N: m_cap >= n required");
  if (W.is_smoothed() && W.source()) return check_N(*W.source(), n, m_cap, g, tail_frac, shells);
  CheckResult res;
  res.box_halfwidth = g.half_width * std::exp2(double(shells));
  const int d = g.dim;
  const int pts = 512;
  auto shell_integral = [&](int m, double a, double b) {
    double s = 0.0;
    for (int i = 0; i <= pts; ++i) {
      const double r = a + (b - a) * double(i) / pts;
      const double lr = W.log_weight(n, r) - W.log_weight(m, r);
      const double v = lr < -745.0 ? 0.0 : std::exp(std::min(lr, 700.0));
      const double w = (i == 0 || i == pts) ? 0.5 : 1.0;
      s += w * v * (d == 1 ? 1.0 : r);
    }
    return s * (b - a) / pts * (d == 1 ? 2.0 : 2.0 * std::numbers::pi);
  };
  for (int m = n; m <= m_cap; ++m) {
    std::vector<double> inc{shell_integral(m, 0.0, g.half_width)};
    for (int k = 1; k <= shells; ++k)
      inc.push_back(shell_integral(m, g.half_width * std::exp2(k - 1.0), g.half_width * std::exp2(double(k))));
    double total = 0.0;
    for (double v : inc) total += v;
    if (total <= 0.0) continue;
    auto negligible = [&](double v) { return v <= 1e-12 * total; };
    const bool tail_ok = negligible(inc.back()) || inc.back() <= tail_frac * total;
    bool trend_ok = true;
    for (int k = shells / 2; k < shells; ++k)
      if (!negligible(inc[std::size_t(k + 1)]) && inc[std::size_t(k + 1)] > 0.95 * inc[std::size_t(k)])
        trend_ok = false;
    std::vector<std::pair<double, double>> curve;
    double cum = 0.0;
    for (int k = 0; k <= shells; ++k) {
      cum += inc[std::size_t(k)];
      curve.emplace_back(g.half_width * std::exp2(double(k)) / 2.0, cum);
    }
    if (tail_ok && trend_ok) {
      res.passed = true;
      res.witness_m = m;
      res.constant_C = total;  // the L^1 mass estimate
      res.curve = std::move(curve);
      return res;
    }
    res.curve = std::move(curve);
  }
  res.note = "shell increments do not converge for any m <= m_cap (tested to R = box * 2^16)";
  return res;
}

/// V-moderateness: w_n(x+y) <= C w_m(x) v_m(y) over the inner box.
inline CheckResult check_moderate(const WeightSystem& W, const WeightSystem& V, int n, int m_cap,
                                  const Grid& g, double c_limit = 1e6) {
  if (m_cap < n) throw std::invalid_argument("check_moderate: m_cap >= n required");
  CheckResult res;
  res.box_halfwidth = g.half_width;
  const double lim = g.half_width - 1.0;
  std::vector<double> xs;
  const int samples = g.dim == 1 ? 257 : 33;
  for (int i = 0; i < samples; ++i) xs.push_back(-lim + 2.0 * lim * double(i) / (samples - 1));
  for (int m = n; m <= m_cap; ++m) {
    double best = -std::numeric_limits<double>::infinity();
    if (g.dim == 1) {
      for (double x : xs)
        for (double y : xs)
          best = std::max(best, W.log_weight(n, std::abs(x + y)) - W.log_weight(m, std::abs(x)) -
                                    V.log_weight(m, std::abs(y)));
    } else {
      for (double xa : xs)
        for (double xb : xs)
          for (double ya : xs)
            for (double yb : xs)
              best = std::max(best, W.log_weight(n, std::hypot(xa + ya, xb + yb)) -
                                        W.log_weight(m, std::hypot(xa, xb)) -
                                        V.log_weight(m, std::hypot(ya, yb)));
    }
    if (best <= std::log(c_limit)) {
      res.passed = true;
      res.witness_m = m;
      res.constant_C = std::exp(best);
      return res;
    }
  }
  res.note = "no m <= m_cap gives a bounded moderateness ratio on this box";
  return res;
}

/// Squarability: w_n^2 / w_m bounded on the box for some m <= m_cap.
inline CheckResult check_squarable(const WeightSystem& W, int n, int m_cap, const Grid& g,
                                   double c_limit = 1e6) {
  if (m_cap < n) throw std::invalid_argument("check_squarable: m_cap >= n required");
  CheckResult res;
  res.box_halfwidth = g.half_width;
  const double rmax = g.dim == 1 ? g.half_width : g.half_width * std::sqrt(2.0);
  for (int m = n; m <= m_cap; ++m) {
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 512; ++i) {
      const double r = rmax * double(i) / 512.0;
      best = std::max(best, 2.0 * W.log_weight(n, r) - W.log_weight(m, r));
    }
    if (best <= std::log(c_limit)) {
      res.passed = true;
      res.witness_m = m;
      res.constant_C = std::exp(best);
      return res;
    }
  }
  res.note = "w_n^2/w_m unbounded on the box for all m <= m_cap";
  return res;
}

}  // namespace molli
