#pragma once

// Functions of the momentum operator as diagonal multipliers in the frequency
// representation, with the singular set of the symbol masked out.

#include <cmath>
#include <string>
#include <vector>

#include "weylab/expr.hpp"
#include "weylab/grid.hpp"

namespace weylab {

class SpectralError : public Error {
 public:
  using Error::Error;
};

// Singular points plus the exclusion half-width around each of them.
struct SingularSet {
  std::vector<double> points;  // sorted
  double margin = 0.0;

  bool excludes(double k) const {
    for (double z : points)
      if (std::abs(k - z) <= margin) return true;
    return false;
  }
  bool operator==(const SingularSet&) const = default;
};

inline double default_margin(const GridSpec& grid) { return std::max(0.5, 4.0 * grid.dk()); }

inline SingularSet make_singular_set(std::vector<double> points, double margin) {
  if (!(margin > 0.0) || !std::isfinite(margin))
    throw SpectralError("exclusion margin must be a positive real");
  std::sort(points.begin(), points.end());
  return SingularSet{std::move(points), margin};
}

// Diagonal operator in the frequency representation. Masked bins (inside an
// exclusion margin) carry an exact zero.
struct MultiplierOp {
  GridSpec grid;
  std::vector<cdouble> values;
  std::vector<char> masked;
};

template <class F>
MultiplierOp make_multiplier(const GridSpec& grid, const SingularSet& excluded, F&& f,
                             const std::string& what) {
  MultiplierOp op{grid, std::vector<cdouble>(grid.n), std::vector<char>(grid.n, 0)};
  for (std::size_t i = 0; i < grid.n; ++i) {
    double k = grid.k(i);
    if (excluded.excludes(k)) {
      op.masked[i] = 1;
      op.values[i] = cdouble{0.0, 0.0};
      continue;
    }
    cdouble v = f(k);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw SpectralError(what + ": non-finite value at unmasked bin k = " +
                          detail::format_double(k));
    op.values[i] = v;
  }
  return op;
}

// multiplier for the regularized derivative g'(P) (zero on masked bins)
inline MultiplierOp gprime_op(const SpectralSymbol& sym, const GridSpec& grid,
                              const SingularSet& excluded) {
  if (!(excluded.margin > 2.0 * grid.dk()))
    throw SpectralError("exclusion margin must exceed two frequency spacings");
  return make_multiplier(
      grid, excluded, [&](double k) { return cdouble{evaluate(sym.gprime, k), 0.0}; },
      "g'(P)");
}

// multiplier for the regularized inverse 1/g'(P); refuses to build when the
// derivative is numerically zero on a bin the singular set failed to cover
inline MultiplierOp gprime_inv_op(const SpectralSymbol& sym, const GridSpec& grid,
                                  const SingularSet& excluded) {
  if (!(excluded.margin > 2.0 * grid.dk()))
    throw SpectralError("exclusion margin must exceed two frequency spacings");
  return make_multiplier(
      grid, excluded,
      [&](double k) -> cdouble {
        double gp = evaluate(sym.gprime, k);
        if (!std::isfinite(gp) || std::abs(gp) < 1e-13)
          throw SpectralError("derivative vanishes at unmasked bin k = " +
                              detail::format_double(k) +
                              "; the singular set does not cover it");
        return cdouble{1.0 / gp, 0.0};
      },
      "1/g'(P)");
}

inline StateVector apply_multiplier(const MultiplierOp& op, const StateVector& psi) {
  if (psi.grid != op.grid) throw SpectralError("apply_multiplier: grid mismatch");
  StateVector hat = to_fourier(psi);
  for (std::size_t i = 0; i < hat.amp.size(); ++i) hat.amp[i] *= op.values[i];
  return from_fourier(hat);
}

// fraction of the squared norm sitting on masked bins
inline double masked_mass(const StateVector& psi, const SingularSet& excluded) {
  StateVector hat = psi.rep == Rep::Fourier ? psi : to_fourier(psi);
  double in = 0.0, total = 0.0;
  for (std::size_t i = 0; i < hat.amp.size(); ++i) {
    double m = std::norm(hat.amp[i]);
    total += m;
    if (excluded.excludes(hat.grid.k(i))) in += m;
  }
  if (total == 0.0) throw SpectralError("masked_mass: zero state");
  return in / total;
}

// Per-bin phases of the propagator e^{-i t g(P)}. Bins where g is not finite
// get an exact zero and are flagged in *dropped (callers enforce the
// negligible-mass precondition there).
inline std::vector<cdouble> evolution_values(const SpectralSymbol& sym, const GridSpec& grid,
                                             double t, std::vector<char>* dropped = nullptr) {
  std::vector<cdouble> vals(grid.n);
  if (dropped) dropped->assign(grid.n, 0);
  for (std::size_t i = 0; i < grid.n; ++i) {
    double gk = evaluate(sym.g, grid.k(i));
    if (std::isfinite(gk)) {
      vals[i] = std::polar(1.0, -t * gk);
    } else {
      vals[i] = cdouble{0.0, 0.0};
      if (dropped) (*dropped)[i] = 1;
    }
  }
  return vals;
}

// e^{-i t g(P)} psi, exact per-bin phases (no splitting error in t).
// Requires that bins where g is singular carry at most 1e-14 of the mass.
inline StateVector evolve(const SpectralSymbol& sym, double t, const StateVector& psi) {
  // Zero shift is the identity on every state (all phases are exactly 1), so do
  // not pay a transform round trip that would blur downstream exactness checks.
  if (t == 0.0) return psi;
  std::vector<char> dropped;
  std::vector<cdouble> vals = evolution_values(sym, psi.grid, t, &dropped);
  StateVector hat = to_fourier(psi);
  double lost = 0.0, total = 0.0;
  for (std::size_t i = 0; i < hat.amp.size(); ++i) {
    double m = std::norm(hat.amp[i]);
    total += m;
    if (dropped[i]) lost += m;
    hat.amp[i] *= vals[i];
  }
  if (total == 0.0) throw SpectralError("evolve: zero state");
  if (lost > 1e-14 * total)
    throw SpectralError("evolve: state carries mass on bins where g is singular");
  return from_fourier(hat);
}

}  // namespace weylab
