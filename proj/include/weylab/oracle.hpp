#pragma once

// Dense-matrix verification path. Every operator is materialized as an
// explicit N x N matrix built from the transform kernel written out
// elementwise, and residuals are recomputed by naive matrix-vector products.
// O(N^2)/O(N^3) on purpose: clarity and independence from the fast path.

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "weylab/verify.hpp"

namespace weylab {

inline constexpr std::size_t kDenseCap = 1024;

class OracleError : public Error {
 public:
  using Error::Error;
};

struct DenseOperator {
  GridSpec grid;
  std::string label;
  std::vector<cdouble> m;  // row-major N x N

  cdouble at(std::size_t r, std::size_t c) const { return m[r * grid.n + c]; }
  cdouble& at(std::size_t r, std::size_t c) { return m[r * grid.n + c]; }

  StateVector apply(const StateVector& v) const {
    if (v.grid != grid) throw OracleError(label + ": grid mismatch");
    StateVector out = v;
    const std::size_t n = grid.n;
    for (std::size_t r = 0; r < n; ++r) {
      cdouble s{0.0, 0.0};
      for (std::size_t c = 0; c < n; ++c) s += m[r * n + c] * v.amp[c];
      out.amp[r] = s;
    }
    return out;
  }
};

namespace dense {

inline void check_cap(const GridSpec& grid) {
  if (grid.n > kDenseCap)
    throw CapError("dense path: grid size " + std::to_string(grid.n) +
                   " exceeds the cap " + std::to_string(kDenseCap));
}

inline DenseOperator zero(const GridSpec& grid, std::string label) {
  check_cap(grid);
  return DenseOperator{grid, std::move(label),
                       std::vector<cdouble>(grid.n * grid.n, cdouble{0.0, 0.0})};
}

// transform matrix F[i][j] = exp(-i k_i x_j)/sqrt(N), evaluated elementwise
inline DenseOperator fourier(const GridSpec& grid) {
  DenseOperator f = zero(grid, "F");
  const double scale = 1.0 / std::sqrt(static_cast<double>(grid.n));
  for (std::size_t i = 0; i < grid.n; ++i)
    for (std::size_t j = 0; j < grid.n; ++j)
      f.at(i, j) = scale * std::polar(1.0, -grid.k(i) * grid.x(j));
  return f;
}

inline DenseOperator adjoint(const DenseOperator& a) {
  DenseOperator out = zero(a.grid, a.label + "^*");
  for (std::size_t r = 0; r < a.grid.n; ++r)
    for (std::size_t c = 0; c < a.grid.n; ++c) out.at(r, c) = std::conj(a.at(c, r));
  return out;
}

inline DenseOperator product(const DenseOperator& a, const DenseOperator& b) {
  if (a.grid != b.grid) throw OracleError("dense product: grid mismatch");
  const std::size_t n = a.grid.n;
  DenseOperator out = zero(a.grid, a.label + "*" + b.label);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i < n; ++i) {
      cdouble arv = a.at(r, i);
      if (arv == cdouble{0.0, 0.0}) continue;
      for (std::size_t c = 0; c < n; ++c) out.at(r, c) += arv * b.at(i, c);
    }
  return out;
}

inline double hermitian_defect(const DenseOperator& a) {
  double worst = 0.0;
  for (std::size_t r = 0; r < a.grid.n; ++r)
    for (std::size_t c = 0; c < a.grid.n; ++c)
      worst = std::max(worst, std::abs(a.at(r, c) - std::conj(a.at(c, r))));
  return worst;
}

inline void require_hermitian(const DenseOperator& a) {
  double d = hermitian_defect(a);
  if (d > 1e-12)
    throw OracleError(a.label + ": expected hermitian, defect " + detail::format_double(d));
}

// diag(x_j) in position
inline DenseOperator position(const GridSpec& grid) {
  DenseOperator q = zero(grid, "Q");
  for (std::size_t j = 0; j < grid.n; ++j) q.at(j, j) = cdouble{grid.x(j), 0.0};
  require_hermitian(q);
  return q;
}

// diag(e^{-i s x_j}) in position
inline DenseOperator position_phase(const GridSpec& grid, double s) {
  DenseOperator p = zero(grid, "e^(-isQ)");
  for (std::size_t j = 0; j < grid.n; ++j) p.at(j, j) = std::polar(1.0, -s * grid.x(j));
  return p;
}

// F^* diag(vals) F, the dense form of a frequency multiplier
inline DenseOperator multiplier(const GridSpec& grid, const std::vector<cdouble>& vals,
                                std::string label, bool hermitian_expected) {
  DenseOperator f = fourier(grid);
  DenseOperator df = f;  // diag(vals) F by row scaling
  for (std::size_t r = 0; r < grid.n; ++r)
    for (std::size_t c = 0; c < grid.n; ++c) df.at(r, c) *= vals[r];
  DenseOperator out = product(adjoint(f), df);
  out.label = std::move(label);
  if (hermitian_expected) require_hermitian(out);
  return out;
}

}  // namespace dense

// Dense backend: shares the symbol, singular set, and per-bin values with the
// fast path; only the arithmetic route differs. Built operators are cached.
class DenseBackend {
 public:
  explicit DenseBackend(const TimeOperator& op) : op_(op) { dense::check_cap(op.grid); }

  const GridSpec& grid() const { return op_.grid; }

  StateVector q(const StateVector& v) const { return cached_q().apply(v); }
  StateVector ginv(const StateVector& v) const { return cached_ginv().apply(v); }
  StateVector gp(const StateVector& v) const { return cached_gp().apply(v); }
  StateVector d(const StateVector& v) const { return cached_d().apply(v); }

  StateVector u(double t, const StateVector& v) const {
    auto key = "U@" + detail::format_double(t);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      std::vector<cdouble> vals = evolution_values(op_.symbol, op_.grid, t);
      it = cache_.emplace(key, dense::multiplier(op_.grid, vals, key, false)).first;
    }
    return it->second.apply(v);
  }

  StateVector mult(const std::vector<cdouble>& vals, const StateVector& v) const {
    return dense::multiplier(op_.grid, vals, "f(P)", false).apply(v);
  }

  StateVector phase_q(double s, const StateVector& v) const {
    return dense::position_phase(op_.grid, s).apply(v);
  }

  StateVector translate(double t, const StateVector& v) const {
    std::vector<cdouble> vals(op_.grid.n);
    for (std::size_t i = 0; i < op_.grid.n; ++i)
      vals[i] = std::polar(1.0, -t * op_.grid.k(i));
    return dense::multiplier(op_.grid, vals, "e^(-itP)", false).apply(v);
  }

  const DenseOperator& cached_q() const {
    auto it = cache_.find("Q");
    if (it == cache_.end()) it = cache_.emplace("Q", dense::position(op_.grid)).first;
    return it->second;
  }
  const DenseOperator& cached_ginv() const {
    auto it = cache_.find("Ginv");
    if (it == cache_.end())
      it = cache_.emplace("Ginv",
                          dense::multiplier(op_.grid, op_.dginv.values, "Ginv", true)).first;
    return it->second;
  }
  const DenseOperator& cached_gp() const {
    auto it = cache_.find("Gp");
    if (it == cache_.end())
      it = cache_.emplace("Gp", dense::multiplier(op_.grid, op_.dg.values, "Gp", true)).first;
    return it->second;
  }
  // D = (Ginv Q + (Ginv Q)^*) / 2 as an explicit matrix (Ginv, Q hermitian)
  const DenseOperator& cached_d() const {
    auto it = cache_.find("D");
    if (it == cache_.end()) {
      DenseOperator a = dense::product(cached_ginv(), cached_q());
      DenseOperator at = dense::adjoint(a);
      DenseOperator d = dense::zero(op_.grid, "D");
      for (std::size_t i = 0; i < d.m.size(); ++i) d.m[i] = 0.5 * (a.m[i] + at.m[i]);
      dense::require_hermitian(d);
      it = cache_.emplace("D", std::move(d)).first;
    }
    return it->second;
  }

 private:
  const TimeOperator& op_;
  mutable std::map<std::string, DenseOperator> cache_;
};

// ---- fast path vs dense path ----

struct CrossCheckRow {
  std::string name;
  double t = std::numeric_limits<double>::quiet_NaN();
  double s = std::numeric_limits<double>::quiet_NaN();
  double fast = 0.0;
  double dense = 0.0;
  double deviation = 0.0;
};

struct CrossCheck {
  std::vector<CrossCheckRow> rows;
  double max_deviation = 0.0;
};

// Recomputes every residual with dense matrices and reports |fast - dense|.
inline CrossCheck cross_check(const TimeOperator& op, const TestVector& tv,
                              const StateVector& base_state, const std::vector<double>& times,
                              const std::vector<std::pair<double, double>>& weyl_st,
                              const std::vector<BoundedFunction>& bounded) {
  FastBackend fb{op};
  DenseBackend db(op);
  CrossCheck out;
  auto push = [&](std::string name, double t, double s, double fast, double dense_v) {
    double dev = std::abs(fast - dense_v);
    out.rows.push_back({std::move(name), t, s, fast, dense_v, dev});
    out.max_deviation = std::max(out.max_deviation, dev);
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (double t : times) {
    push("weak_weyl", t, nan, weak_weyl_residual_core(fb, tv.state, t),
         weak_weyl_residual_core(db, tv.state, t));
    StepResiduals f = step_residuals_core(fb, tv.state, t);
    StepResiduals d = step_residuals_core(db, tv.state, t);
    push("step_tginv", t, nan, f.tginv, d.tginv);
    push("step_t", t, nan, f.t_only, d.t_only);
    push("step_ginvt", t, nan, f.ginvt, d.ginvt);
    push("expectation_shift", t, nan, expectation_shift_core(fb, tv.state, t),
         expectation_shift_core(db, tv.state, t));
  }
  for (auto [s, t] : weyl_st)
    push("weyl_pq", t, s, weyl_pq_residual_core(fb, base_state, s, t),
         weyl_pq_residual_core(db, base_state, s, t));
  for (const BoundedFunction& f : bounded) {
    auto fv = detail::sample_bounded(f.f, op.grid, "f");
    auto fpv = detail::sample_bounded(f.fprime, op.grid, "f'");
    push("commutator[" + f.name + "]", nan, nan,
         commutator_residual_core(fb, fv, fpv, base_state),
         commutator_residual_core(db, fv, fpv, base_state));
  }
  return out;
}

}  // namespace weylab
