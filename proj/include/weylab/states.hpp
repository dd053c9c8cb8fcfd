#pragma once

// Admissible states: Gaussian bases, smooth frequency bumps, and certified
// test vectors whose spectrum avoids the singular set.

#include <cmath>
#include <optional>
#include <string>

#include "weylab/grid.hpp"
#include "weylab/spectral.hpp"

namespace weylab {

class StateError : public Error {
 public:
  using Error::Error;
};

// Smooth compactly supported profile on [lo, hi]:
//   rho(k) = exp(1 - 1/(1 - u^2)),  u = (2k - lo - hi)/(hi - lo),
// exactly zero outside, peak value 1 at the midpoint.
struct BumpProfile {
  double lo = 0.0, hi = 0.0;

  double operator()(double k) const {
    double u = (2.0 * k - lo - hi) / (hi - lo);
    if (!(std::abs(u) < 1.0)) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
  }
};

inline BumpProfile make_bump(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw StateError("bump interval must be a finite nonempty interval");
  return BumpProfile{lo, hi};
}

// share of the squared norm within the outer `fraction` of the domain at each end
inline double boundary_mass(const StateVector& psi, double fraction = 0.05) {
  if (psi.rep != Rep::Position) throw StateError("boundary_mass: position representation required");
  const GridSpec& g = psi.grid;
  double cut_lo = -0.5 * g.length + fraction * g.length;
  double cut_hi = 0.5 * g.length - fraction * g.length;
  double edge = 0.0, total = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) {
    double m = std::norm(psi.amp[j]);
    total += m;
    double x = g.x(j);
    if (x < cut_lo || x >= cut_hi) edge += m;
  }
  if (total == 0.0) throw StateError("boundary_mass: zero state");
  return edge / total;
}

struct GaussianParams {
  double x0 = 0.0, sigma = 5.0, k0 = 3.0;
};

// normalized Gaussian packet exp(-(x-x0)^2/(2 sigma^2)) e^{i k0 x};
// the 6-sigma footprint must fit inside the domain
inline StateVector gaussian(const GridSpec& grid, double x0, double sigma, double k0) {
  if (!(sigma > 0.0)) throw StateError("gaussian: sigma must be positive");
  if (x0 - 6.0 * sigma < -0.5 * grid.length || x0 + 6.0 * sigma > 0.5 * grid.length)
    throw StateError("gaussian: 6-sigma footprint does not fit inside the domain");
  StateVector psi = make_state(grid);
  for (std::size_t j = 0; j < grid.n; ++j) {
    double x = grid.x(j);
    double env = std::exp(-(x - x0) * (x - x0) / (2.0 * sigma * sigma));
    psi.amp[j] = env * std::polar(1.0, k0 * x);
  }
  double n = norm(psi);
  if (!(n > 0.0)) throw StateError("gaussian: state underflowed to zero");
  for (cdouble& a : psi.amp) a /= n;
  return psi;
}

inline StateVector gaussian(const GridSpec& grid, const GaussianParams& p) {
  return gaussian(grid, p.x0, p.sigma, p.k0);
}

struct Certificate {
  double masked_mass = 0.0;
  double boundary_mass = 0.0;
};

// A normalized state with spectrum filtered through a bump whose support is
// disjoint from the exclusion margins, plus the measured certificate.
struct TestVector {
  StateVector state;
  BumpProfile bump;
  SingularSet excluded;
  std::optional<GaussianParams> base;
  Certificate cert;
};

inline constexpr double kMaskedMassBound = 1e-12;
inline constexpr double kBoundaryMassBound = 1e-10;

// filter phi through the bump, renormalize, and certify
inline TestVector make_test_vector(const StateVector& phi, const BumpProfile& bump,
                                   const SingularSet& excluded,
                                   std::optional<GaussianParams> base = std::nullopt) {
  for (double z : excluded.points)
    if (z - excluded.margin <= bump.hi && z + excluded.margin >= bump.lo)
      throw StateError("bump support [" + detail::format_double(bump.lo) + ", " +
                       detail::format_double(bump.hi) +
                       "] overlaps the exclusion margin around k = " + detail::format_double(z));

  MultiplierOp rho = make_multiplier(
      phi.grid, excluded, [&](double k) { return cdouble{bump(k), 0.0}; }, "bump");
  StateVector filtered = apply_multiplier(rho, phi);
  double n = norm(filtered), n0 = norm(phi);
  if (!(n >= 1e-6 * n0))
    throw StateError("bump removes essentially all mass of the base state "
                     "(filtered norm below 1e-6 of the original)");
  for (cdouble& a : filtered.amp) a /= n;

  TestVector tv{std::move(filtered), bump, excluded, base, {}};
  tv.cert.masked_mass = masked_mass(tv.state, excluded);
  tv.cert.boundary_mass = boundary_mass(tv.state);
  if (tv.cert.masked_mass > kMaskedMassBound)
    throw StateError("certificate failure: masked mass " +
                     detail::format_double(tv.cert.masked_mass) + " exceeds 1e-12");
  if (tv.cert.boundary_mass > kBoundaryMassBound)
    throw StateError("certificate failure: boundary mass " +
                     detail::format_double(tv.cert.boundary_mass) + " exceeds 1e-10");
  return tv;
}

inline TestVector make_gaussian_test_vector(const GridSpec& grid, const GaussianParams& p,
                                            const BumpProfile& bump,
                                            const SingularSet& excluded) {
  return make_test_vector(gaussian(grid, p), bump, excluded, p);
}

}  // namespace weylab
