#pragma once

// The symmetrized time operator
//   D = (1/2) ( g'(P)^{-1} Q + Q g'(P)^{-1} )
// on the periodic grid, with the inverse derivative regularized to zero on
// the exclusion margins around the symbol's singular set.

#include <cmath>

#include "weylab/spectral.hpp"
#include "weylab/states.hpp"

namespace weylab {

struct TimeOperator {
  SpectralSymbol symbol;
  GridSpec grid;
  SingularSet excluded;
  MultiplierOp dginv;  // regularized 1/g'(P)
  MultiplierOp dg;     // regularized g'(P)
};

// Builds the operator with a singular set recomputed on the grid's own
// frequency window, so the exclusion data is consistent by construction.
// margin <= 0 selects the default rule max(0.5, 4 dk).
inline TimeOperator make_time_operator(const SpectralSymbol& sym, const GridSpec& grid,
                                       double margin = 0.0) {
  double m = margin > 0.0 ? margin : default_margin(grid);
  auto pts = singular_points(sym, -grid.kmax(), grid.kmax(), grid.dk());
  SingularSet excluded = make_singular_set(std::move(pts), m);
  return TimeOperator{sym, grid, excluded, gprime_inv_op(sym, grid, excluded),
                      gprime_op(sym, grid, excluded)};
}

// position multiplication (Q psi)_j = x_j psi_j
inline StateVector apply_Q(const StateVector& psi) {
  if (psi.rep != Rep::Position) throw StateError("apply_Q: position representation required");
  StateVector out = psi;
  for (std::size_t j = 0; j < out.amp.size(); ++j) out.amp[j] *= psi.grid.x(j);
  return out;
}

// Q is only faithful on states that stay away from the periodic seam; callers
// record a warning when this is marginal.
inline bool position_window_marginal(const StateVector& psi) {
  return boundary_mass(psi) > 1e-6;
}

// D phi: the two summands are computed independently and averaged, never fused
inline StateVector apply_D(const TimeOperator& op, const StateVector& phi) {
  StateVector first = apply_multiplier(op.dginv, apply_Q(phi));
  StateVector second = apply_Q(apply_multiplier(op.dginv, phi));
  StateVector out = first;
  for (std::size_t j = 0; j < out.amp.size(); ++j)
    out.amp[j] = 0.5 * (first.amp[j] + second.amp[j]);
  return out;
}

inline StateVector apply_D(const TimeOperator& op, const TestVector& tv) {
  if (!(tv.excluded == op.excluded))
    throw StateError("apply_D: test vector was certified against a different singular set");
  return apply_D(op, tv.state);
}

struct ExpectationD {
  double value = 0.0;            // Re <phi, D phi> / ||phi||^2
  double symmetry_defect = 0.0;  // |Im <phi, D phi>| / ||phi||^2
};

inline ExpectationD expectation_D(const TimeOperator& op, const StateVector& phi) {
  cdouble ip = inner(phi, apply_D(op, phi));
  double n2 = norm_squared(phi);
  if (!(n2 > 0.0)) throw StateError("expectation_D: zero state");
  return ExpectationD{ip.real() / n2, std::abs(ip.imag()) / n2};
}

}  // namespace weylab
