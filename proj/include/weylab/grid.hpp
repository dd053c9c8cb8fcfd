#pragma once

// Periodic spatial grid, states on it, and the unitary transform between the
// position and frequency representations.

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <vector>

#include "weylab/expr.hpp"

namespace weylab {

using cdouble = std::complex<double>;

class GridError : public Error {
 public:
  using Error::Error;
};

// x_j = -L/2 + j L/N. Frequency bins are kept in transform order: bin i holds
// the integer index n_i = i for i < N/2 and i - N otherwise, k_i = 2 pi n_i/L,
// so k covers [-kmax, kmax - dk] with kmax = pi N / L.
struct GridSpec {
  std::size_t n = 0;
  double length = 0.0;

  double dx() const { return length / static_cast<double>(n); }
  double dk() const { return 2.0 * std::numbers::pi / length; }
  double kmax() const { return std::numbers::pi * static_cast<double>(n) / length; }
  double x(std::size_t j) const { return -0.5 * length + static_cast<double>(j) * dx(); }
  long long freq_index(std::size_t i) const {
    return i < n / 2 ? static_cast<long long>(i)
                     : static_cast<long long>(i) - static_cast<long long>(n);
  }
  double k(std::size_t i) const {
    return 2.0 * std::numbers::pi * static_cast<double>(freq_index(i)) / length;
  }
  bool operator==(const GridSpec&) const = default;
};

inline GridSpec make_grid(std::size_t n, double length) {
  if (n < 8 || (n & (n - 1)) != 0)
    throw GridError("grid size must be a power of two and at least 8");
  if (!(length > 0.0) || !std::isfinite(length))
    throw GridError("grid length must be a positive real");
  return GridSpec{n, length};
}

enum class Rep { Position, Fourier };

struct StateVector {
  GridSpec grid;
  Rep rep = Rep::Position;
  std::vector<cdouble> amp;
};

inline StateVector make_state(const GridSpec& grid, Rep rep = Rep::Position) {
  return StateVector{grid, rep, std::vector<cdouble>(grid.n, cdouble{0.0, 0.0})};
}

// antilinear in the first argument; trapezoidal weight L/N
inline cdouble inner(const StateVector& u, const StateVector& v) {
  if (u.grid != v.grid) throw GridError("inner: states live on different grids");
  if (u.rep != v.rep) throw GridError("inner: states are in different representations");
  cdouble s{0.0, 0.0};
  for (std::size_t i = 0; i < u.amp.size(); ++i) s += std::conj(u.amp[i]) * v.amp[i];
  return s * u.grid.dx();
}

inline double norm_squared(const StateVector& v) {
  double s = 0.0;
  for (const cdouble& a : v.amp) s += std::norm(a);
  return s * v.grid.dx();
}

inline double norm(const StateVector& v) { return std::sqrt(norm_squared(v)); }

namespace detail {

// twiddle table for the forward kernel exp(-2 pi i j/n), cached per thread
inline const std::vector<cdouble>& twiddles(std::size_t n) {
  thread_local std::map<std::size_t, std::vector<cdouble>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cdouble> w(n / 2);
  for (std::size_t j = 0; j < n / 2; ++j) {
    double ang = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    w[j] = std::polar(1.0, ang);
  }
  return cache.emplace(n, std::move(w)).first->second;
}

// in-place iterative radix-2 transform; forward = true applies the
// exp(-2 pi i jn/N) kernel, forward = false its conjugate. No normalization.
inline void fft_pow2(std::vector<cdouble>& a, bool forward) {
  const std::size_t n = a.size();
  if (n < 2) return;
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const std::vector<cdouble>& tw = twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        cdouble w = tw[j * stride];
        if (!forward) w = std::conj(w);
        cdouble u = a[i + j];
        cdouble v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
}

}  // namespace detail

// psi_hat_i = N^{-1/2} sum_j psi_j exp(-i k_i x_j). Because x starts at -L/2,
// this is the plain transform times the alternating phase (-1)^i.
inline StateVector to_fourier(const StateVector& psi) {
  if (psi.rep != Rep::Position) throw GridError("to_fourier: state is already in frequency form");
  StateVector out = psi;
  detail::fft_pow2(out.amp, true);
  const double scale = 1.0 / std::sqrt(static_cast<double>(psi.grid.n));
  for (std::size_t i = 0; i < out.amp.size(); ++i)
    out.amp[i] *= (i & 1) ? -scale : scale;
  out.rep = Rep::Fourier;
  return out;
}

// psi_j = N^{-1/2} sum_i psi_hat_i exp(+i k_i x_j); exact inverse of to_fourier
inline StateVector from_fourier(const StateVector& psi) {
  if (psi.rep != Rep::Fourier) throw GridError("from_fourier: state is already in position form");
  StateVector out = psi;
  for (std::size_t i = 0; i < out.amp.size(); ++i)
    if (i & 1) out.amp[i] = -out.amp[i];
  detail::fft_pow2(out.amp, false);
  const double scale = 1.0 / std::sqrt(static_cast<double>(psi.grid.n));
  for (cdouble& a : out.amp) a *= scale;
  out.rep = Rep::Position;
  return out;
}

// ---- small vector helpers shared by the residual computations ----

// u + c v
inline StateVector add_scaled(const StateVector& u, cdouble c, const StateVector& v) {
  if (u.grid != v.grid || u.rep != v.rep) throw GridError("add_scaled: incompatible states");
  StateVector out = u;
  for (std::size_t i = 0; i < out.amp.size(); ++i) out.amp[i] += c * v.amp[i];
  return out;
}

inline StateVector scaled(const StateVector& u, cdouble c) {
  StateVector out = u;
  for (cdouble& a : out.amp) a *= c;
  return out;
}

inline double distance(const StateVector& u, const StateVector& v) {
  if (u.grid != v.grid || u.rep != v.rep) throw GridError("distance: incompatible states");
  double s = 0.0;
  for (std::size_t i = 0; i < u.amp.size(); ++i) s += std::norm(u.amp[i] - v.amp[i]);
  return std::sqrt(s * u.grid.dx());
}

}  // namespace weylab
