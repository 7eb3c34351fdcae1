#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "grid.hpp"
#include "mollify.hpp"
#include "norms.hpp"
#include "weights.hpp"
#include "windows.hpp"

namespace molli {

struct TableCaps {
  int J = 10;
  int n_max = 4;
  int a_max = 4;
};

struct Thresholds {
  double slope_eps = 0.25;  // log2 units per scale
  double fit_resid = 0.15;  // RMS in log2 units
};

// ---- Divergence flags (per entry) ------------------------------------------------

struct DivergenceFlags {
  bool envelope = false;  // sup envelope grows toward the box edge
  bool mass = false;      // L^p shell mass fails to decay (p finite)
};

inline DivergenceFlags divergence_flags(const LogField& lf, double global_p) {
  DivergenceFlags out;
  const Grid& g = lf.grid;
  const double xi = g.half_width - std::max(1.0, lf.margin);
  const double fr[5] = {0.0, 0.4, 0.6, 0.8, 1.0};
  double s[4] = {kNegInf, kNegInf, kNegInf, kNegInf};
  double mass[4] = {0, 0, 0, 0};
  double mglobal = kNegInf;
  for (double u : lf.u) mglobal = std::max(mglobal, u);
  if (mglobal == kNegInf) return out;
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
  out.envelope = s[3] > s[2] + std::log(1.05);
  if (std::isfinite(global_p)) {
    const double total = mass[0] + mass[1] + mass[2] + mass[3];
    if (mass[3] > 0.9 * mass[2] && mass[3] > 1e-12 * total) out.mass = true;
  }
  return out;
}

// ---- Dyadic norm table --------------------------------------------------------------

struct TableEntry {
  double log2_norm = kNegInf;
  bool zero = true;
  bool overflow = false;
  bool env_growing = false;
  bool mass_heavy = false;
  bool unresolved = false;
};

struct DyadicNormTable {
  std::vector<std::string> window_ids;  // 1 or 2
  int J = 0;
  int n_max = 0;
  int dim = 1;
  int weight_sign = +1;  // +1: * w_n rows, -1: / w_n rows (multiplier scale)
  std::vector<MultiIndex> alphas;
  int j_resolved = 0;
  std::vector<TableEntry> entries;

  std::size_t index(int l, int j, int n, int a) const {
    return ((std::size_t(l) * J + j) * std::size_t(n_max + 1) + n) * alphas.size() + a;
  }
  TableEntry& at(int l, int j, int n, int a) { return entries[index(l, j, n, a)]; }
  const TableEntry& at(int l, int j, int n, int a) const { return entries[index(l, j, n, a)]; }
};

inline std::vector<MultiIndex> enumerate_alphas(int dim, int a_max) {
  std::vector<MultiIndex> out;
  if (dim == 1) {
    for (int a = 0; a <= a_max; ++a) out.push_back({a, 0});
  } else {
    for (int o = 0; o <= a_max; ++o)
      for (int a = o; a >= 0; --a) out.push_back({a, o - a});
  }
  return out;
}

namespace classify_detail {

/// log || w_j * exp(logw) ||_{L^p(R^d)} for a radial(-parity) window profile:
/// spike rows measured from the continuum profile, exact at every scale.
inline double spike_entry_log(const RadialSource& src, int j, int d,
                              const std::function<double(double)>& logw, double p) {
  const double step = (src.quad_step > 0.0 ? src.quad_step : src.support_radius / 8192.0) * 0.5;
  const double jd_ln2 = double(j) * d * std::numbers::ln2;
  const double scale = std::exp2(-double(j));
  double m = kNegInf;
  std::vector<double> terms;
  for (double u = 0.5 * step; u < src.support_radius; u += step) {
    const double w = std::abs(src.eval(u));
    if (w == 0.0) continue;
    const double v = std::log(w) + jd_ln2 + logw(scale * u);
    if (std::isinf(p)) {
      m = std::max(m, v);
    } else {
      // |S^{d-1}| r^{d-1} dr with r = 2^{-j} u
      const double jac = std::log(sphere_area(d) * step * scale) +
                         (d - 1) * std::log(std::max(scale * u, 1e-300));
      terms.push_back(p * v + jac);
      m = std::max(m, terms.back());
    }
  }
  if (m == kNegInf) return kNegInf;
  if (std::isinf(p)) return m;
  double s = 0.0;
  for (double t : terms) s += std::exp(std::max(t - m, -745.0));
  return (m + std::log(s)) / p;
}

}  // namespace classify_detail

/// A window list the classifier can differentiate on the window side.
struct WindowSet {
  struct Entry {
    std::string id;
    SampledField base;
    std::function<SampledField(const MultiIndex&)> deriv;
  };
  std::vector<Entry> windows;
  double support_radius = 2.0;
  bool certified = true;
};

inline WindowSet window_set(const WindowPair& pair) {
  WindowSet ws;
  ws.support_radius = pair.support_radius;
  ws.certified = pair.certified;
  ws.windows.push_back({"varphi", pair.varphi, [&pair](const MultiIndex& a) {
                          return window_derivative(pair, WindowHalf::varphi, a);
                        }});
  ws.windows.push_back({"psi", pair.psi, [&pair](const MultiIndex& a) {
                          return window_derivative(pair, WindowHalf::psi, a);
                        }});
  return ws;
}

inline WindowSet window_set_single(const SampledField& w, std::string id) {
  WindowSet ws;
  ws.support_radius = field_support_radius(w);
  SampledField base = w;
  ws.windows.push_back({std::move(id), base, [base](const MultiIndex& a) {
                          return order(a) == 0 ? base : derivative(base, a);
                        }});
  return ws;
}

/// Fills M[l][j][n][alpha] = log2 || d^alpha (f * w^l_j) * w_n^{sign} ||_E with
/// window-side derivatives d^alpha(f*w_j) = 2^{j|alpha|} f * ((d^alpha w)_j),
/// measured on the margin-1 inner box.
inline DyadicNormTable norm_table(const SampledField& f, const WindowSet& ws,
                                  const WeightSystem& W, const NormDescriptor& nd,
                                  const TableCaps& caps, int weight_sign = +1) {
  if (ws.windows.empty() || ws.windows.size() > 2)
    throw std::invalid_argument("norm_table: one or two windows expected");
  validate_descriptor(nd, f.grid.dim);
  DyadicNormTable t;
  t.J = caps.J;
  t.n_max = caps.n_max;
  t.dim = f.grid.dim;
  t.weight_sign = weight_sign;
  t.alphas = enumerate_alphas(f.grid.dim, caps.a_max);
  t.j_resolved = std::min(caps.J - 1, max_resolved_scale(ws.support_radius, f.grid.spacing()));
  for (const auto& w : ws.windows) t.window_ids.push_back(w.id);
  t.entries.assign(std::size_t(ws.windows.size()) * caps.J * (caps.n_max + 1) * t.alphas.size(),
                   TableEntry{});

  const double gp = norms_detail::global_exponent(nd);
  const bool spike = f.kind == FieldKind::spike;

  // d^alpha(f * w_j): spikes resolve through the window side (exact dilation of
  // d^alpha w, scaled by 2^{j|alpha|}); smooth inputs carry the derivative on the
  // field side ((d^alpha f) * w_j, the same object) which avoids amplifying
  // convolution round-off by 2^{j|alpha|}. Zero-extension junk within stencil
  // reach of the box edge is cut before convolving.
  std::vector<SampledField> field_derivs;
  if (!spike) {
    const double rim = 16.0 * f.grid.spacing();
    for (const auto& alpha : t.alphas)
      field_derivs.push_back(restrict_inner(derivative(f, alpha), rim));
  }
  const double zero_floor = 1e-12 * (spike ? 1.0 : sup_abs(f));

  const bool lp_engine =
      nd.engine == NormDescriptor::Engine::Lp || nd.engine == NormDescriptor::Engine::L0;

  for (int l = 0; l < int(ws.windows.size()); ++l) {
    for (int a = 0; a < int(t.alphas.size()); ++a) {
      const MultiIndex alpha = t.alphas[std::size_t(a)];
      SampledField dw = spike ? ws.windows[std::size_t(l)].deriv(alpha) : SampledField{};
      if (spike && dw.radial && f.grid.dim == 1 && lp_engine) {
        // d^alpha(delta * w_j) = 2^{j|alpha|} (d^alpha w)_j, measured radially
        const double p = nd.engine == NormDescriptor::Engine::L0
                             ? std::numeric_limits<double>::infinity()
                             : nd.p;
        for (int j = 0; j < caps.J; ++j) {
          for (int n = 0; n <= caps.n_max; ++n) {
            TableEntry& e = t.at(l, j, n, a);
            if (j > t.j_resolved) { e.unresolved = true; continue; }
            const double lw = classify_detail::spike_entry_log(
                *dw.radial, j, 1, [&](double r) { return weight_sign * W.log_weight(n, r); }, p);
            if (lw == kNegInf) { e.zero = true; continue; }
            e.zero = false;
            e.log2_norm = lw / std::numbers::ln2 + double(j) * order(alpha);
            e.overflow = lw > 700.0;
          }
        }
        continue;
      }
      for (int j = 0; j < caps.J; ++j) {
        if (j > t.j_resolved) {
          for (int n = 0; n <= caps.n_max; ++n) t.at(l, j, n, a).unresolved = true;
          continue;
        }
        SampledField conv = spike
                                ? window_convolve(f, dw, j)
                                : window_convolve(field_derivs[std::size_t(a)],
                                                  ws.windows[std::size_t(l)].base, j);
        const bool negligible = sup_abs(conv) <= zero_floor;
        for (int n = 0; n <= caps.n_max; ++n) {
          TableEntry& e = t.at(l, j, n, a);
          if (negligible) {
            e.zero = true;
            continue;
          }
          LogField lf = weighted_log_field(
              conv,
              [&](const Point& p) { return weight_sign * W.log_weight(n, p, f.grid.dim); }, 1.0);
          NormValue nv = engine_norm(lf, nd);
          if (nv.log2_value == kNegInf) {
            e.zero = true;
            continue;
          }
          e.zero = false;
          e.log2_norm = nv.log2_value;
          if (spike) e.log2_norm += double(j) * order(alpha);  // window-side scaling
          e.overflow = nv.overflow;
          DivergenceFlags df = divergence_flags(lf, gp);
          e.env_growing = df.envelope;
          e.mass_heavy = df.mass;
        }
      }
    }
  }
  return t;
}

// ---- Growth fits -------------------------------------------------------------------

struct RowFit {
  enum class Status { ok, divergent, zero, insufficient };
  Status status = Status::zero;
  double slope = 0.0;
  double intercept = 0.0;
  double resid = 0.0;
  int j_lo = 2, j_hi = 0;
  bool sl_caveat = false;  // some entries carried a box-growth caveat (sl rows)
};

struct GrowthFit {
  int n_max = 0;
  std::vector<MultiIndex> alphas;
  std::vector<RowFit> rows;  // [l][n][a]
  int windows = 0;

  std::size_t index(int l, int n, int a) const {
    return (std::size_t(l) * (n_max + 1) + n) * alphas.size() + a;
  }
  RowFit& at(int l, int n, int a) { return rows[index(l, n, a)]; }
  const RowFit& at(int l, int n, int a) const { return rows[index(l, n, a)]; }
};

/// Least-squares slope per (l, n, alpha) over resolved scales j in [2, J_resolved];
/// `strict_mass`: whether non-decaying L^p shell mass marks an entry divergent
/// (E-norm rows) or only records a caveat (E_sl rows of the multiplier scale).
inline GrowthFit fit_growth(const DyadicNormTable& t, bool strict_mass = true) {
  GrowthFit g;
  g.n_max = t.n_max;
  g.alphas = t.alphas;
  g.windows = int(t.window_ids.size());
  g.rows.assign(std::size_t(g.windows) * (t.n_max + 1) * t.alphas.size(), RowFit{});
  for (int l = 0; l < g.windows; ++l)
    for (int n = 0; n <= t.n_max; ++n)
      for (int a = 0; a < int(t.alphas.size()); ++a) {
        RowFit& rf = g.at(l, n, a);
        rf.j_hi = t.j_resolved;
        std::vector<double> xs, ys;
        int flagged = 0, zero = 0, usable = 0;
        for (int j = 2; j <= t.j_resolved && j < t.J; ++j) {
          const TableEntry& e = t.at(l, j, n, a);
          if (e.unresolved) continue;
          if (e.zero) { ++zero; continue; }
          const bool divergent = e.overflow || e.env_growing || (strict_mass && e.mass_heavy);
          if (e.mass_heavy && !strict_mass) rf.sl_caveat = true;
          if (divergent) { ++flagged; continue; }
          ++usable;
          xs.push_back(double(j));
          ys.push_back(e.log2_norm);
        }
        if (usable == 0 && flagged > 0) { rf.status = RowFit::Status::divergent; continue; }
        if (usable == 0) { rf.status = RowFit::Status::zero; continue; }
        if (usable < 4 || flagged > 0) { rf.status = RowFit::Status::insufficient; continue; }
        auto fit = detail::least_squares(xs, ys);
        rf.status = RowFit::Status::ok;
        rf.slope = fit.slope;
        rf.intercept = fit.intercept;
        rf.resid = fit.resid;
      }
  return g;
}

// ---- Verdicts -----------------------------------------------------------------------

enum class SpaceClass { membership, convolutor, multiplier };
enum class Decision { in, out, inconclusive };
enum class VerdictMode { falsify, certify, bounded_set };

inline std::string to_string(SpaceClass c) {
  switch (c) {
    case SpaceClass::membership: return "membership";
    case SpaceClass::convolutor: return "convolutor";
    case SpaceClass::multiplier: return "multiplier";
  }
  return "?";
}
inline std::string to_string(Decision d) {
  switch (d) {
    case Decision::in: return "in";
    case Decision::out: return "out";
    case Decision::inconclusive: return "inconclusive";
  }
  return "?";
}
inline std::string to_string(VerdictMode m) {
  switch (m) {
    case VerdictMode::falsify: return "falsify";
    case VerdictMode::certify: return "certify";
    case VerdictMode::bounded_set: return "bounded-set";
  }
  return "?";
}

struct Verdict {
  SpaceClass space_class = SpaceClass::membership;
  Decision decision = Decision::inconclusive;
  VerdictMode mode = VerdictMode::falsify;
  double r = 0.0;                                // witness exponent
  double alpha_escalation = 0.0;                 // fitted slope growth per |alpha|
  std::vector<std::pair<int, double>> per_n;     // (n, slope witness)
  std::vector<std::pair<int, int>> alpha_witness;  // (|alpha|, witness n)
  std::string trace;
  TableCaps caps;
  Thresholds thresholds;
};

namespace classify_detail {

inline void require_wM(const WeightSystem& W, const TableCaps& caps, const Grid& g) {
  for (int n = 0; n <= caps.n_max; ++n)
    if (!check_wM(W, n, n + 8, g).passed)
      throw std::invalid_argument("classifier precondition: weight system fails (wM) at n = " +
                                  std::to_string(n));
}

/// Fitted escalation of slopes across derivative order; requires >= 3 orders.
inline std::optional<double> slope_escalation(const GrowthFit& g, int l, int n) {
  std::vector<double> xs, ys;
  int max_order = 0;
  for (const auto& a : g.alphas) max_order = std::max(max_order, order(a));
  for (int o = 0; o <= max_order; ++o) {
    double best = kNegInf;
    for (int a = 0; a < int(g.alphas.size()); ++a) {
      if (order(g.alphas[std::size_t(a)]) != o) continue;
      const RowFit& rf = g.at(l, n, a);
      if (rf.status == RowFit::Status::ok) best = std::max(best, rf.slope);
    }
    if (best != kNegInf) {
      xs.push_back(double(o));
      ys.push_back(best);
    }
  }
  if (xs.size() < 3) return std::nullopt;
  return detail::least_squares(xs, ys).slope;
}

}  // namespace classify_detail

/// Theorem-style membership verdict: falsify via diverging rows / slope escalation
/// under the varphi window, certify via f*varphi in E^n and bounded psi-rows.
inline Verdict verdict_membership(const SampledField& f, const WindowPair& pair,
                                  const WeightSystem& W, const NormDescriptor& nd,
                                  const TableCaps& caps = {}, const Thresholds& th = {}) {
  if (!pair.certified) throw std::invalid_argument("verdict_membership: uncertified window pair");
  classify_detail::require_wM(W, caps, f.grid);
  Verdict v;
  v.space_class = SpaceClass::membership;
  v.caps = caps;
  v.thresholds = th;

  DyadicNormTable t = norm_table(f, window_set(pair), W, nd, caps, +1);
  GrowthFit g = fit_growth(t, true);

  // falsify on the varphi rows
  for (int n = 0; n <= caps.n_max; ++n)
    for (int a = 0; a < int(t.alphas.size()); ++a)
      if (g.at(0, n, a).status == RowFit::Status::divergent) {
        v.decision = Decision::out;
        v.mode = VerdictMode::falsify;
        std::ostringstream os;
        os << "row (n=" << n << ", |alpha|=" << order(t.alphas[std::size_t(a)])
           << ") diverges at every scale under the varphi window";
        v.trace = os.str();
        return v;
      }
  for (int n = 0; n <= caps.n_max; ++n) {
    auto esc = classify_detail::slope_escalation(g, 0, n);
    if (esc && *esc > th.slope_eps) {
      v.decision = Decision::out;
      v.mode = VerdictMode::falsify;
      v.alpha_escalation = *esc;
      std::ostringstream os;
      os << "slopes grow by " << *esc << " per derivative order at n=" << n
         << "; no single r fits all alpha";
      v.trace = os.str();
      return v;
    }
  }

  // certify: f*varphi rows usable and psi rows bounded (slope <= eps)
  bool all_ok = true;
  double rmax = 0.0;
  for (int n = 0; n <= caps.n_max && all_ok; ++n) {
    for (int a = 0; a < int(t.alphas.size()) && all_ok; ++a) {
      const RowFit& phi_row = g.at(0, n, a);
      if (phi_row.status == RowFit::Status::insufficient) all_ok = false;
      const RowFit& psi_row = g.at(1, n, a);
      switch (psi_row.status) {
        case RowFit::Status::ok:
          if (psi_row.slope > th.slope_eps || psi_row.resid > th.fit_resid) all_ok = false;
          rmax = std::max(rmax, psi_row.slope);
          break;
        case RowFit::Status::zero: break;
        default: all_ok = false;
      }
    }
    if (all_ok) v.per_n.emplace_back(n, rmax);
  }
  if (all_ok) {
    v.decision = Decision::in;
    v.mode = VerdictMode::certify;
    v.r = std::max(0.0, rmax);
    v.trace = "f*varphi in E^n and {f*psi_j} bounded for every tested n";
    return v;
  }
  v.decision = Decision::inconclusive;
  v.trace = "trends not separable at the declared thresholds";
  return v;
}

/// Convolutor verdict: per n, the alpha=0 rows must carry a stable finite slope.
inline Verdict verdict_convolutor(const SampledField& f, const WindowPair& pair,
                                  const WeightSystem& W, const NormDescriptor& nd,
                                  const TableCaps& caps = {}, const Thresholds& th = {}) {
  if (!pair.certified) throw std::invalid_argument("verdict_convolutor: uncertified window pair");
  classify_detail::require_wM(W, caps, f.grid);
  Verdict v;
  v.space_class = SpaceClass::convolutor;
  v.caps = caps;
  v.thresholds = th;
  TableCaps c0 = caps;
  c0.a_max = 0;
  DyadicNormTable t = norm_table(f, window_set(pair), W, nd, c0, +1);
  GrowthFit g = fit_growth(t, true);

  double rall = 0.0;
  for (int n = 0; n <= caps.n_max; ++n) {
    double rn = kNegInf;
    for (int l = 0; l < g.windows; ++l) {
      const RowFit& rf = g.at(l, n, 0);
      switch (rf.status) {
        case RowFit::Status::divergent: {
          v.decision = Decision::out;
          v.mode = VerdictMode::falsify;
          v.trace = "weighted rows diverge at n = " + std::to_string(n);
          return v;
        }
        case RowFit::Status::insufficient: {
          v.decision = Decision::inconclusive;
          v.trace = "insufficient resolved scales at n = " + std::to_string(n);
          return v;
        }
        case RowFit::Status::zero: break;
        case RowFit::Status::ok: {
          if (rf.resid > th.fit_resid) {
            v.decision = Decision::inconclusive;
            v.trace = "unstable growth fit at n = " + std::to_string(n);
            return v;
          }
          // super-linear growth probe: slopes across scale sub-windows
          std::vector<double> x1, y1, x2, y2;
          for (int j = 2; j <= t.j_resolved; ++j) {
            const TableEntry& e = t.at(l, j, n, 0);
            if (e.zero || e.unresolved) continue;
            ((j - 2) * 2 < t.j_resolved - 1 ? x1 : x2).push_back(double(j));
            ((j - 2) * 2 < t.j_resolved - 1 ? y1 : y2).push_back(e.log2_norm);
          }
          if (x1.size() >= 3 && x2.size() >= 3) {
            const double s1 = detail::least_squares(x1, y1).slope;
            const double s2 = detail::least_squares(x2, y2).slope;
            if (s2 - s1 > th.slope_eps) {
              v.decision = Decision::out;
              v.mode = VerdictMode::falsify;
              v.trace = "super-linear scale growth at n = " + std::to_string(n);
              return v;
            }
          }
          rn = std::max(rn, rf.slope);
          break;
        }
      }
    }
    if (rn == kNegInf) rn = 0.0;  // all-zero rows are trivially bounded
    v.per_n.emplace_back(n, rn);
    rall = std::max(rall, rn);
  }
  v.decision = Decision::in;
  v.mode = VerdictMode::certify;
  v.r = std::max(0.0, rall);
  v.trace = "finite stable growth exponent for every tested n";
  return v;
}

/// Multiplier verdict (E_sl rows at the 1/w_n scale). For the single-weight form
/// W must be squarable; rows are accepted per the sup-envelope rule, with the
/// box-growth caveat recorded rather than vetoing (desk convention).
inline Verdict verdict_multiplier(const SampledField& f, const WindowPair& pair,
                                  const WeightSystem& W, const NormDescriptor& nd,
                                  const TableCaps& caps = {}, const Thresholds& th = {}) {
  if (!pair.certified) throw std::invalid_argument("verdict_multiplier: uncertified window pair");
  for (int n = 0; n <= caps.n_max; ++n)
    if (!check_squarable(W, n, 2 * n + 8, f.grid).passed)
      throw std::invalid_argument("verdict_multiplier: weight system fails squarability at n = " +
                                  std::to_string(n));
  Verdict v;
  v.space_class = SpaceClass::multiplier;
  v.caps = caps;
  v.thresholds = th;
  DyadicNormTable t = norm_table(f, window_set(pair), W, nd, caps, -1);
  GrowthFit g = fit_growth(t, false);

  std::vector<double> esc_x, esc_y;
  double rmax = 0.0;
  for (int a = 0; a < int(t.alphas.size()); ++a) {
    std::optional<int> witness;
    double slope_at_witness = 0.0;
    for (int n = 0; n <= caps.n_max && !witness; ++n) {
      bool ok = true;
      double s = kNegInf;
      for (int l = 0; l < g.windows; ++l) {
        const RowFit& rf = g.at(l, n, a);
        if (rf.status == RowFit::Status::divergent) { ok = false; break; }
        if (rf.status == RowFit::Status::insufficient) { ok = false; break; }
        if (rf.status == RowFit::Status::ok) {
          if (rf.resid > th.fit_resid) { ok = false; break; }
          s = std::max(s, rf.slope);
        }
      }
      if (ok) {
        witness = n;
        slope_at_witness = s == kNegInf ? 0.0 : s;
      }
    }
    if (!witness) {
      v.decision = Decision::out;
      v.mode = VerdictMode::falsify;
      v.trace = "no weight index bounds the |alpha| = " +
                std::to_string(order(t.alphas[std::size_t(a)])) + " rows";
      return v;
    }
    v.alpha_witness.emplace_back(order(t.alphas[std::size_t(a)]), *witness);
    rmax = std::max(rmax, slope_at_witness);
    esc_x.push_back(double(order(t.alphas[std::size_t(a)])));
    esc_y.push_back(slope_at_witness);
  }
  if (esc_x.size() >= 3) {
    const double esc = detail::least_squares(esc_x, esc_y).slope;
    v.alpha_escalation = esc;
    if (esc > th.slope_eps) {
      v.decision = Decision::out;
      v.mode = VerdictMode::falsify;
      v.trace = "slopes grow with |alpha| even at the best weight index";
      return v;
    }
  }
  v.decision = Decision::in;
  v.mode = VerdictMode::certify;
  v.r = std::max(0.0, rmax);
  v.trace = "every derivative order admits a bounding weight index";
  return v;
}

/// r = 0 specialization with a single unit-mass window: is {f * w_j} bounded in E^inf_W?
inline Verdict bounded_set_test(const SampledField& f, const SampledField& window,
                                const WeightSystem& W, const NormDescriptor& nd,
                                const TableCaps& caps = {}, const Thresholds& th = {}) {
  classify_detail::require_wM(W, caps, f.grid);
  Verdict v;
  v.space_class = SpaceClass::membership;
  v.mode = VerdictMode::bounded_set;
  v.caps = caps;
  v.thresholds = th;
  DyadicNormTable t = norm_table(f, window_set_single(window, "window"), W, nd, caps, +1);
  GrowthFit g = fit_growth(t, true);
  for (int n = 0; n <= caps.n_max; ++n)
    for (int a = 0; a < int(t.alphas.size()); ++a) {
      const RowFit& rf = g.at(0, n, a);
      if (rf.status == RowFit::Status::zero) continue;
      if (rf.status == RowFit::Status::divergent ||
          (rf.status == RowFit::Status::ok && rf.slope > th.slope_eps)) {
        v.decision = Decision::out;
        std::ostringstream os;
        os << "boundedness violated at (n=" << n << ", |alpha|="
           << order(t.alphas[std::size_t(a)]) << ")";
        v.trace = os.str();
        if (rf.status == RowFit::Status::ok) v.r = rf.slope;
        return v;
      }
      if (rf.status == RowFit::Status::insufficient) {
        v.decision = Decision::inconclusive;
        v.trace = "insufficient resolved scales";
        return v;
      }
      v.r = std::max(v.r, rf.slope);
    }
  v.decision = Decision::in;
  v.trace = "boundedness observed within the tested ranges";
  return v;
}

/// Runs the membership verdict under several L^p engines; with (N) the decisions
/// must agree (TIBF-independence), without it a separating witness can appear.
struct IndependenceReport {
  std::vector<std::pair<double, Decision>> per_p;
  bool n_condition = false;
  bool agree = true;
};

inline IndependenceReport independence_spot_check(const SampledField& f, const WindowPair& pair,
                                                  const WeightSystem& W,
                                                  const std::vector<double>& p_list,
                                                  const TableCaps& caps = {},
                                                  const Thresholds& th = {}) {
  IndependenceReport rep;
  rep.n_condition = true;
  for (int n = 0; n <= 2; ++n)
    rep.n_condition = rep.n_condition && check_N(W, n, n + 8, f.grid).passed;
  std::optional<Decision> first;
  for (double p : p_list) {
    Verdict v = verdict_membership(f, pair, W, NormDescriptor::lp(p), caps, th);
    rep.per_p.emplace_back(p, v.decision);
    if (!first) first = v.decision;
    else if (*first != v.decision) rep.agree = false;
  }
  return rep;
}

}  // namespace molli
