#pragma once

// Residuals of the operator identities that make D a time operator for the
// propagator e^{-i t g(P)}. Each residual is computed against a backend that
// supplies the primitive operator applications, so the same formulas run on
// the fast transform path and on the dense verification path.

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "weylab/timeop.hpp"

namespace weylab {

class CapError : public Error {
 public:
  using Error::Error;
};

// fast path: FFT multipliers and pointwise position factors
struct FastBackend {
  const TimeOperator& op;

  const GridSpec& grid() const { return op.grid; }
  StateVector q(const StateVector& v) const { return apply_Q(v); }
  StateVector ginv(const StateVector& v) const { return apply_multiplier(op.dginv, v); }
  StateVector gp(const StateVector& v) const { return apply_multiplier(op.dg, v); }
  StateVector d(const StateVector& v) const { return apply_D(op, v); }
  StateVector u(double t, const StateVector& v) const { return evolve(op.symbol, t, v); }
  StateVector mult(const std::vector<cdouble>& vals, const StateVector& v) const {
    StateVector hat = to_fourier(v);
    for (std::size_t i = 0; i < hat.amp.size(); ++i) hat.amp[i] *= vals[i];
    return from_fourier(hat);
  }
  StateVector phase_q(double s, const StateVector& v) const {
    StateVector out = v;
    for (std::size_t j = 0; j < out.amp.size(); ++j)
      out.amp[j] *= std::polar(1.0, -s * v.grid.x(j));
    return out;
  }
  StateVector translate(double t, const StateVector& v) const {
    StateVector hat = to_fourier(v);
    for (std::size_t i = 0; i < hat.amp.size(); ++i)
      hat.amp[i] *= std::polar(1.0, -t * hat.grid.k(i));
    return from_fourier(hat);
  }
};

// ---- residual cores ----

// || D U(t) phi - U(t) (D phi + t phi) || / ||phi||
template <class B>
double weak_weyl_residual_core(const B& b, const StateVector& phi, double t) {
  StateVector lhs = b.d(b.u(t, phi));
  StateVector rhs = b.u(t, add_scaled(b.d(phi), cdouble{t, 0.0}, phi));
  return distance(lhs, rhs) / norm(phi);
}

struct StepResiduals {
  double tginv = 0.0;  // move U past Q g'(P)^{-1}
  double t_only = 0.0; // move U past Q, derivative correction t g'(P)
  double ginvt = 0.0;  // move U past g'(P)^{-1} Q
};

template <class B>
StepResiduals step_residuals_core(const B& b, const StateVector& phi, double t) {
  double n = norm(phi);
  StateVector uphi = b.u(t, phi);
  StepResiduals r;
  r.tginv = distance(b.q(b.ginv(uphi)),
                     b.u(t, add_scaled(b.q(b.ginv(phi)), cdouble{t, 0.0}, phi))) / n;
  r.t_only = distance(b.q(uphi),
                      b.u(t, add_scaled(b.q(phi), cdouble{t, 0.0}, b.gp(phi)))) / n;
  r.ginvt = distance(b.ginv(b.q(uphi)),
                     b.u(t, add_scaled(b.ginv(b.q(phi)), cdouble{t, 0.0}, phi))) / n;
  return r;
}

// || Q f(P) phi - f(P) Q phi - i f'(P) phi || / ||phi||
template <class B>
double commutator_residual_core(const B& b, const std::vector<cdouble>& f_vals,
                                const std::vector<cdouble>& fp_vals, const StateVector& phi) {
  StateVector lhs = b.q(b.mult(f_vals, phi));
  StateVector rhs = add_scaled(b.mult(f_vals, b.q(phi)), cdouble{0.0, 1.0}, b.mult(fp_vals, phi));
  return distance(lhs, rhs) / norm(phi);
}

// || e^{-isQ} e^{-itP} psi - e^{-ist} e^{-itP} e^{-isQ} psi || / ||psi||
template <class B>
double weyl_pq_residual_core(const B& b, const StateVector& psi, double s, double t) {
  StateVector lhs = b.phase_q(s, b.translate(t, psi));
  StateVector rhs = scaled(b.translate(t, b.phase_q(s, psi)), std::polar(1.0, -s * t));
  return distance(lhs, rhs) / norm(psi);
}

// | <D>_{U(t)phi} - <D>_phi - t |
template <class B>
double expectation_shift_core(const B& b, const StateVector& phi, double t) {
  auto expect = [&](const StateVector& v) {
    return inner(v, b.d(v)).real() / norm_squared(v);
  };
  return std::abs(expect(b.u(t, phi)) - expect(phi) - t);
}

// ---- public fast-path API ----

inline double weak_weyl_residual(const TimeOperator& op, const TestVector& tv, double t) {
  return weak_weyl_residual_core(FastBackend{op}, tv.state, t);
}

inline StepResiduals step_residuals(const TimeOperator& op, const TestVector& tv, double t) {
  return step_residuals_core(FastBackend{op}, tv.state, t);
}

// exact triangle bound linking the averaged identity to its two one-sided steps
inline double step_triangle_defect(double weak_weyl, const StepResiduals& s) {
  return std::max(0.0, weak_weyl - 0.5 * (s.tginv + s.ginvt));
}

// a bounded C^1 function of the momentum, with its derivative
struct BoundedFunction {
  std::string name;
  std::function<cdouble(double)> f;
  std::function<cdouble(double)> fprime;
};

inline BoundedFunction bounded_from_symbol(const SpectralSymbol& sym) {
  return BoundedFunction{
      sym.text,
      [g = sym.g](double k) { return cdouble{evaluate(g, k), 0.0}; },
      [gp = sym.gprime](double k) { return cdouble{evaluate(gp, k), 0.0}; }};
}

namespace detail {

inline std::vector<cdouble> sample_bounded(const std::function<cdouble(double)>& f,
                                           const GridSpec& grid, const std::string& what) {
  std::vector<cdouble> vals(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    cdouble v = f(grid.k(i));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw SpectralError(what + " is not bounded on the frequency window (non-finite at k = " +
                          format_double(grid.k(i)) + ")");
    vals[i] = v;
  }
  return vals;
}

}  // namespace detail

// backend without a time operator: the commutator and phase-translation
// identities involve no singular set
struct PlainBackend {
  GridSpec g;
  const GridSpec& grid() const { return g; }
  StateVector q(const StateVector& v) const { return apply_Q(v); }
  StateVector mult(const std::vector<cdouble>& vals, const StateVector& v) const {
    StateVector hat = to_fourier(v);
    for (std::size_t i = 0; i < hat.amp.size(); ++i) hat.amp[i] *= vals[i];
    return from_fourier(hat);
  }
  StateVector phase_q(double s, const StateVector& v) const {
    StateVector out = v;
    for (std::size_t j = 0; j < out.amp.size(); ++j)
      out.amp[j] *= std::polar(1.0, -s * v.grid.x(j));
    return out;
  }
  StateVector translate(double t, const StateVector& v) const {
    StateVector hat = to_fourier(v);
    for (std::size_t i = 0; i < hat.amp.size(); ++i)
      hat.amp[i] *= std::polar(1.0, -t * hat.grid.k(i));
    return from_fourier(hat);
  }
};

inline double commutator_residual(const BoundedFunction& f, const GridSpec& grid,
                                  const StateVector& phi) {
  auto f_vals = detail::sample_bounded(f.f, grid, "f");
  auto fp_vals = detail::sample_bounded(f.fprime, grid, "f'");
  return commutator_residual_core(PlainBackend{grid}, f_vals, fp_vals, phi);
}

inline double weyl_residual_PQ(const StateVector& psi, double s, double t) {
  return weyl_pq_residual_core(PlainBackend{psi.grid}, psi, s, t);
}

inline double expectation_shift_residual(const TimeOperator& op, const TestVector& tv, double t) {
  return expectation_shift_core(FastBackend{op}, tv.state, t);
}

// ---- convergence study ----

inline constexpr std::size_t kGridCap = std::size_t{1} << 20;

struct ConvergenceLevel {
  std::size_t n = 0;
  double length = 0.0;
  double residual = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceLevel> levels;
  std::vector<double> ratios;  // residual[i-1] / residual[i]
  bool pass = false;
};

inline constexpr double kConvergenceFloor = 1e-11;

// Rebuilds the whole pipeline at (N, L), (2N, 2L), ... — the frequency window
// is preserved while the bin spacing halves — and reports the weak Weyl
// residual per level. Passing means each level improves at least 4x on the
// previous one until the rounding floor 1e-11 is reached; below the floor
// no ratio is demanded (rounding noise grows slowly with N).
inline ConvergenceStudy convergence_study(const std::string& symbol_text,
                                          const std::map<std::string, double>& params,
                                          const GaussianParams& base, const BumpProfile& bump,
                                          std::size_t n0, double length0, double t, int levels,
                                          std::uint64_t seed = 1) {
  if (levels < 2) throw Error("convergence_study: at least two levels required");
  ConvergenceStudy st;
  std::size_t n = n0;
  double length = length0;
  for (int lvl = 0; lvl < levels; ++lvl) {
    if (n > kGridCap)
      throw CapError("convergence_study: grid size " + std::to_string(n) +
                     " exceeds the cap " + std::to_string(kGridCap));
    GridSpec grid = make_grid(n, length);
    SpectralSymbol sym =
        make_symbol(symbol_text, params, -grid.kmax(), grid.kmax(), grid.dk(), seed);
    TimeOperator op = make_time_operator(sym, grid);
    TestVector tv = make_gaussian_test_vector(grid, base, bump, op.excluded);
    double r = weak_weyl_residual(op, tv, t);
    st.levels.push_back({n, length, r});
    n *= 2;
    length *= 2.0;
  }
  st.pass = true;
  for (std::size_t i = 1; i < st.levels.size(); ++i) {
    double prev = st.levels[i - 1].residual, cur = st.levels[i].residual;
    st.ratios.push_back(cur > 0.0 ? prev / cur : std::numeric_limits<double>::infinity());
    if (cur > std::max(prev / 4.0, kConvergenceFloor)) st.pass = false;
  }
  return st;
}

}  // namespace weylab
