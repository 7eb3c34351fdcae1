#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace molli {

struct RadialSource;  // defined in radial.hpp

using Point = std::array<double, 2>;
using MultiIndex = std::array<int, 2>;

inline int order(const MultiIndex& a) { return a[0] + a[1]; }

inline bool is_pow2(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Uniform grid on the box [-X, X]^dim with N power-of-two points per axis.
struct Grid {
  int dim = 1;
  double half_width = 16.0;  // X
  int n = 4096;              // points per axis

  double spacing() const { return 2.0 * half_width / n; }
  double coord(int k) const { return -half_width + k * spacing(); }
  std::size_t size() const { return dim == 1 ? std::size_t(n) : std::size_t(n) * n; }
  Point point(std::size_t idx) const {
    if (dim == 1) return {coord(int(idx)), 0.0};
    return {coord(int(idx / n)), coord(int(idx % n))};
  }
  bool operator==(const Grid&) const = default;
};

inline Grid make_grid(int dim, double half_width, int n) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("make_grid: dim must be 1 or 2");
  if (!(half_width > 0.0)) throw std::invalid_argument("make_grid: half_width must be positive");
  if (n < 64 || !is_pow2(std::uint64_t(n)))
    throw std::invalid_argument("make_grid: N must be a power of two, N >= 64");
  return Grid{dim, half_width, n};
}

enum class FieldKind : std::uint8_t { function = 0, spike = 1 };

/// A real-valued function (or unit-mass Dirac surrogate) sampled on a Grid.
struct SampledField {
  Grid grid;
  FieldKind kind = FieldKind::function;
  std::vector<double> values;  // row-major for dim 2: values[ix*n + iy]
  std::shared_ptr<const RadialSource> radial;  // optional closed-form/radial backing

  double& at(int ix, int iy = 0) { return values[std::size_t(ix) * (grid.dim == 2 ? grid.n : 1) + iy]; }
  double at(int ix, int iy = 0) const { return values[std::size_t(ix) * (grid.dim == 2 ? grid.n : 1) + iy]; }
};

inline void require_finite(const SampledField& f, const char* where) {
  for (double v : f.values)
    if (!std::isfinite(v)) throw std::domain_error(std::string(where) + ": non-finite sample");
}

inline SampledField zero_field(const Grid& g) {
  return SampledField{g, FieldKind::function, std::vector<double>(g.size(), 0.0), nullptr};
}

/// Dirac surrogate: single sample of value 1/h^dim at the node nearest the origin.
inline SampledField spike_field(const Grid& g) {
  SampledField f = zero_field(g);
  f.kind = FieldKind::spike;
  double mass = 1.0;
  for (int a = 0; a < g.dim; ++a) mass /= g.spacing();
  std::size_t c = g.dim == 1 ? std::size_t(g.n / 2) : std::size_t(g.n / 2) * g.n + g.n / 2;
  f.values[c] = mass;
  return f;
}

inline SampledField sample(const Grid& g, const std::function<double(double)>& f) {
  if (g.dim != 1) throw std::invalid_argument("sample: 1-argument evaluator needs dim 1");
  SampledField out = zero_field(g);
  for (int i = 0; i < g.n; ++i) out.values[i] = f(g.coord(i));
  require_finite(out, "sample");
  return out;
}

inline SampledField sample(const Grid& g, const std::function<double(double, double)>& f) {
  if (g.dim != 2) throw std::invalid_argument("sample: 2-argument evaluator needs dim 2");
  SampledField out = zero_field(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) out.values[std::size_t(i) * g.n + j] = f(g.coord(i), g.coord(j));
  require_finite(out, "sample");
  return out;
}

// ---- FFT ----------------------------------------------------------------

namespace detail {

inline void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (!is_pow2(n)) throw std::logic_error("fft: length must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  // direct twiddles per call keeps accumulation error at the ulp level
  std::vector<std::complex<double>> tw(n / 2);
  const double sgn = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n / 2; ++k)
    tw[k] = std::polar(1.0, sgn * 2.0 * std::numbers::pi * double(k) / double(n));
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len)
      for (std::size_t k = 0; k < len / 2; ++k) {
        auto u = a[i + k];
        auto v = a[i + k + len / 2] * tw[k * stride];
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
  }
  if (inverse)
    for (auto& z : a) z /= double(n);
}

inline void fft2_pow2(std::vector<std::complex<double>>& a, std::size_t rows, std::size_t cols,
                      bool inverse) {
  std::vector<std::complex<double>> buf(std::max(rows, cols));
  for (std::size_t r = 0; r < rows; ++r) {
    buf.assign(a.begin() + r * cols, a.begin() + (r + 1) * cols);
    fft_pow2(buf, inverse);
    std::copy(buf.begin(), buf.end(), a.begin() + r * cols);
  }
  for (std::size_t c = 0; c < cols; ++c) {
    buf.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) buf[r] = a[r * cols + c];
    fft_pow2(buf, inverse);
    for (std::size_t r = 0; r < rows; ++r) a[r * cols + c] = buf[r];
  }
}

}  // namespace detail

// ---- Convolution ---------------------------------------------------------

/// h^dim-scaled linear convolution via zero-padded FFT, cropped back to the box.
/// Approximates (f*g)(x) = ∫ f(x-y) g(y) dy with zero extension outside the box.
inline SampledField convolve(const SampledField& f, const SampledField& g) {
  if (!(f.grid == g.grid)) throw std::invalid_argument("convolve: grid mismatch");
  const Grid& gr = f.grid;
  const int n = gr.n;
  const double scale = gr.dim == 1 ? gr.spacing() : gr.spacing() * gr.spacing();
  SampledField out = zero_field(gr);

  if (gr.dim == 1) {
    const std::size_t m = std::size_t(2) * n;
    std::vector<std::complex<double>> A(m), B(m);
    for (int i = 0; i < n; ++i) { A[i] = f.values[i]; B[i] = g.values[i]; }
    detail::fft_pow2(A, false);
    detail::fft_pow2(B, false);
    for (std::size_t i = 0; i < m; ++i) A[i] *= B[i];
    detail::fft_pow2(A, true);
    // full index k corresponds to x = -2X + k h; target x_j = -X + j h -> k = j + n/2
    for (int j = 0; j < n; ++j) out.values[j] = scale * A[j + n / 2].real();
  } else {
    const std::size_t m = std::size_t(2) * n;
    std::vector<std::complex<double>> A(m * m), B(m * m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        A[std::size_t(i) * m + j] = f.values[std::size_t(i) * n + j];
        B[std::size_t(i) * m + j] = g.values[std::size_t(i) * n + j];
      }
    detail::fft2_pow2(A, m, m, false);
    detail::fft2_pow2(B, m, m, false);
    for (std::size_t i = 0; i < m * m; ++i) A[i] *= B[i];
    detail::fft2_pow2(A, m, m, true);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out.values[std::size_t(i) * n + j] = scale * A[std::size_t(i + n / 2) * m + (j + n / 2)].real();
  }
  require_finite(out, "convolve");
  return out;
}

/// Torus variant: circular convolution without padding (used by equivariance tests).
inline SampledField convolve_circular(const SampledField& f, const SampledField& g) {
  if (!(f.grid == g.grid)) throw std::invalid_argument("convolve_circular: grid mismatch");
  const Grid& gr = f.grid;
  const int n = gr.n;
  const double scale = gr.dim == 1 ? gr.spacing() : gr.spacing() * gr.spacing();
  SampledField out = zero_field(gr);
  if (gr.dim == 1) {
    std::vector<std::complex<double>> A(f.values.begin(), f.values.end());
    std::vector<std::complex<double>> B(g.values.begin(), g.values.end());
    detail::fft_pow2(A, false);
    detail::fft_pow2(B, false);
    for (int i = 0; i < n; ++i) A[i] *= B[i];
    detail::fft_pow2(A, true);
    // index arithmetic: sum_i f_i g_{(k-i) mod n}; origin of the torus is node n/2
    for (int j = 0; j < n; ++j) out.values[j] = scale * A[(j + n / 2) % n].real();
  } else {
    std::vector<std::complex<double>> A(f.values.begin(), f.values.end());
    std::vector<std::complex<double>> B(g.values.begin(), g.values.end());
    detail::fft2_pow2(A, n, n, false);
    detail::fft2_pow2(B, n, n, false);
    for (std::size_t i = 0; i < A.size(); ++i) A[i] *= B[i];
    detail::fft2_pow2(A, n, n, true);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out.values[std::size_t(i) * n + j] =
            scale * A[std::size_t((i + n / 2) % n) * n + (j + n / 2) % n].real();
  }
  return out;
}

inline SampledField circular_shift(const SampledField& f, int sx, int sy = 0) {
  SampledField out = zero_field(f.grid);
  const int n = f.grid.n;
  auto wrap = [n](int i) { return ((i % n) + n) % n; };
  if (f.grid.dim == 1) {
    for (int i = 0; i < n; ++i) out.values[i] = f.values[wrap(i - sx)];
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out.values[std::size_t(i) * n + j] = f.values[std::size_t(wrap(i - sx)) * n + wrap(j - sy)];
  }
  out.kind = f.kind;
  return out;
}

// ---- Derivatives ----------------------------------------------------------

namespace detail {

// order-4 central stencils for derivative orders 1..4, zero extension at the ends
inline void stencil(int order, std::vector<double>& w, int& reach, double h) {
  switch (order) {
    case 1: w = {1, -8, 0, 8, -1}; reach = 2;
      for (auto& c : w) c /= 12.0 * h;
      break;
    case 2: w = {-1, 16, -30, 16, -1}; reach = 2;
      for (auto& c : w) c /= 12.0 * h * h;
      break;
    case 3: w = {1, -8, 13, 0, -13, 8, -1}; reach = 3;
      for (auto& c : w) c /= 8.0 * h * h * h;
      break;
    case 4: w = {-1, 12, -39, 56, -39, 12, -1}; reach = 3;
      for (auto& c : w) c /= 6.0 * h * h * h * h;
      break;
    default: throw std::logic_error("stencil: order must be 1..4");
  }
}

inline std::vector<double> axis_derivative_1d(const std::vector<double>& v, int ord, double h) {
  std::vector<double> w;
  int reach = 0;
  stencil(ord, w, reach, h);
  const int n = int(v.size());
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = -reach; k <= reach; ++k) {
      int j = i + k;
      if (j >= 0 && j < n) s += w[k + reach] * v[j];
    }
    out[i] = s;
  }
  return out;
}

}  // namespace detail

/// Per-axis finite differences of composed order-4 stencils; the field is treated
/// as zero outside the box (boundary rows are only meaningful inside the margin).
inline SampledField derivative(const SampledField& f, const MultiIndex& alpha) {
  if (f.kind == FieldKind::spike && order(alpha) > 0)
    throw std::invalid_argument("derivative: spike fields are distributional; differentiate the window side instead");
  if (order(alpha) > 12) throw std::invalid_argument("derivative: |alpha| exceeds cap 12");
  if (f.grid.dim == 1 && alpha[1] != 0)
    throw std::invalid_argument("derivative: second axis on a 1-d grid");
  const double h = f.grid.spacing();
  const int n = f.grid.n;
  SampledField out = f;
  out.kind = FieldKind::function;
  out.radial = nullptr;

  auto apply_axis = [&](int axis, int ord) {
    while (ord > 0) {
      int step = std::min(ord, 4);
      if (f.grid.dim == 1) {
        out.values = detail::axis_derivative_1d(out.values, step, h);
      } else if (axis == 0) {
        std::vector<double> col(n);
        for (int j = 0; j < n; ++j) {
          for (int i = 0; i < n; ++i) col[i] = out.values[std::size_t(i) * n + j];
          auto d = detail::axis_derivative_1d(col, step, h);
          for (int i = 0; i < n; ++i) out.values[std::size_t(i) * n + j] = d[i];
        }
      } else {
        std::vector<double> row(n);
        for (int i = 0; i < n; ++i) {
          std::copy_n(out.values.begin() + std::size_t(i) * n, n, row.begin());
          auto d = detail::axis_derivative_1d(row, step, h);
          std::copy_n(d.begin(), n, out.values.begin() + std::size_t(i) * n);
        }
      }
      ord -= step;
    }
  };
  apply_axis(0, alpha[0]);
  if (f.grid.dim == 2) apply_axis(1, alpha[1]);
  require_finite(out, "derivative");
  return out;
}

inline SampledField laplacian(const SampledField& f) {
  SampledField out = derivative(f, {2, 0});
  if (f.grid.dim == 2) {
    SampledField oy = derivative(f, {0, 2});
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += oy.values[i];
  }
  return out;
}

/// Zeroes all samples with any coordinate of modulus > X - margin.
inline SampledField restrict_inner(const SampledField& f, double margin) {
  if (margin < 0.0 || margin >= f.grid.half_width)
    throw std::invalid_argument("restrict_inner: need 0 <= margin < X");
  SampledField out = f;
  const Grid& g = f.grid;
  const double lim = g.half_width - margin;
  for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
    Point p = g.point(idx);
    bool outside = std::abs(p[0]) > lim || (g.dim == 2 && std::abs(p[1]) > lim);
    if (outside) out.values[idx] = 0.0;
  }
  return out;
}

// ---- Small helpers shared across modules ----------------------------------

inline double sup_abs(const SampledField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

/// sup |f| over the margin-restricted inner box
inline double inner_sup(const SampledField& f, double margin = 1.0) {
  const Grid& g = f.grid;
  const double lim = g.half_width - margin;
  double m = 0.0;
  for (std::size_t idx = 0; idx < f.values.size(); ++idx) {
    Point p = g.point(idx);
    if (std::abs(p[0]) > lim || (g.dim == 2 && std::abs(p[1]) > lim)) continue;
    m = std::max(m, std::abs(f.values[idx]));
  }
  return m;
}

inline double grid_integral(const SampledField& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  double hd = f.grid.dim == 1 ? f.grid.spacing() : f.grid.spacing() * f.grid.spacing();
  return s * hd;
}

inline SampledField linear_combination(double a, const SampledField& f, double b,
                                       const SampledField& g) {
  if (!(f.grid == g.grid)) throw std::invalid_argument("linear_combination: grid mismatch");
  SampledField out = zero_field(f.grid);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = a * f.values[i] + b * g.values[i];
  return out;
}

}  // namespace molli
