// Acceptance gate: one line per criterion, nonzero exit if any fails.
//
// Every tolerance is pinned here, independent of the per-scenario defaults in
// the library, so a change to those defaults cannot quietly weaken this gate.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "weylab/oracle.hpp"
#include "weylab/scenario.hpp"

using namespace weylab;

namespace {

int g_failures = 0;

void criterion(int num, const std::string& what, bool pass, const std::string& detail) {
  std::printf("C%-2d %-58s %s  (%s)\n", num, what.c_str(), pass ? "PASS" : "FAIL",
              detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(double v) { return detail::format_double(v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Bench {
  GridSpec grid;
  SpectralSymbol sym;
  TimeOperator op;
  TestVector tv;
  StateVector base;
};

Bench bench_for(const std::string& text, const ParamMap& params, const GridSpec& grid,
                GaussianParams gp = GaussianParams{}, BumpProfile bump = BumpProfile{1.0, 5.0}) {
  SpectralSymbol sym = make_symbol(text, params, -grid.kmax(), grid.kmax(), grid.dk());
  TimeOperator op = make_time_operator(sym, grid);
  TestVector tv = make_gaussian_test_vector(grid, gp, bump, op.excluded);
  StateVector base = gaussian(grid, gp);
  return Bench{grid, std::move(sym), std::move(op), std::move(tv), std::move(base)};
}

const GridSpec kDefaultGrid = make_grid(4096, 200.0);
const std::vector<double> kTimes = {0.1, 0.5, 1.0};

}  // namespace

int main() {
  // C1: the identity symbol at default scale, shift residual and speed
  {
    auto t0 = std::chrono::steady_clock::now();
    Bench b = bench_for("x", {}, kDefaultGrid);
    double worst = 0.0;
    for (double t : kTimes) worst = std::max(worst, weak_weyl_residual(b.op, b.tv, t));
    double elapsed = seconds_since(t0);
    criterion(1, "shift identity, identity symbol, default scale",
              worst <= 1e-8 && elapsed < 1.0,
              "max " + fmt(worst) + " <= 1e-8, " + fmt(elapsed) + " s < 1 s");
  }

  // C2: all bundled presets satisfy the shift identity and refine 4x per level
  {
    double worst = 0.0;
    bool all_converge = true;
    std::string slowest;
    for (const Preset& p : presets()) {
      Bench b = bench_for(p.expression, p.defaults, kDefaultGrid);
      for (double t : kTimes) worst = std::max(worst, weak_weyl_residual(b.op, b.tv, t));
      ConvergenceStudy st = convergence_study(p.expression, p.defaults, GaussianParams{},
                                              BumpProfile{1.0, 5.0}, 4096, 200.0, 1.0, 3);
      if (!st.pass) {
        all_converge = false;
        slowest = p.name;
      }
    }
    criterion(2, "shift identity + 3-level refinement, all presets",
              worst <= 1e-6 && all_converge,
              "max " + fmt(worst) + " <= 1e-6" +
                  (all_converge ? ", all studies converged" : ", stalled: " + slowest));
  }

  // C3: commutator identity for bounded frequency functions on a plain packet
  {
    StateVector base = gaussian(kDefaultGrid, GaussianParams{});
    double worst_smooth = 0.0, worst_const = 0.0;
    for (const BoundedFunction& f : bounded_test_functions()) {
      double r = commutator_residual(f, kDefaultGrid, base);
      if (f.name == "constant")
        worst_const = std::max(worst_const, r);
      else
        worst_smooth = std::max(worst_smooth, r);
    }
    criterion(3, "commutator identity, bounded functions",
              worst_smooth <= 1e-8 && worst_const <= 1e-13,
              "smooth " + fmt(worst_smooth) + " <= 1e-8, constant " + fmt(worst_const) +
                  " <= 1e-13");
  }

  // C4: one-sided step residuals and the triangle diagnostic on every preset run
  {
    double worst_step = 0.0, worst_triangle = 0.0;
    for (const Preset& p : presets()) {
      Bench b = bench_for(p.expression, p.defaults, kDefaultGrid);
      for (double t : kTimes) {
        StepResiduals s = step_residuals(b.op, b.tv, t);
        double ww = weak_weyl_residual(b.op, b.tv, t);
        worst_step = std::max({worst_step, s.tginv, s.t_only, s.ginvt});
        worst_triangle = std::max(worst_triangle, step_triangle_defect(ww, s));
      }
    }
    criterion(4, "one-sided steps + triangle bound, all presets",
              worst_step <= 1e-6 && worst_triangle <= 1e-13,
              "steps " + fmt(worst_step) + " <= 1e-6, triangle " + fmt(worst_triangle) +
                  " <= 1e-13");
  }

  // C5: phase-translation exchange identity
  {
    StateVector base = gaussian(kDefaultGrid, GaussianParams{});
    double worst = std::max(weyl_residual_PQ(base, 1.0, 1.0),
                            weyl_residual_PQ(base, 3.14159265358979324, 2.0));
    criterion(5, "phase-translation exchange at (1,1) and (pi,2)", worst <= 1e-8,
              "max " + fmt(worst) + " <= 1e-8");
  }

  // C6: the generic operator equals each preset's closed form
  {
    double worst_mult = 0.0, worst_apply = 0.0;
    for (const Preset& p : presets()) {
      Bench b = bench_for(p.expression, p.defaults, kDefaultGrid);
      ClosedFormResiduals cf = closed_form_residuals(b.op, p, p.defaults, b.tv.state);
      worst_mult = std::max(worst_mult, cf.multiplier);
      worst_apply = std::max(worst_apply, cf.apply);
    }
    criterion(6, "closed-form equivalence, all presets",
              worst_mult <= 1e-12 && worst_apply <= 1e-12,
              "multiplier " + fmt(worst_mult) + ", apply " + fmt(worst_apply) + " <= 1e-12");
  }

  // C7: dense-matrix oracle agrees with the fast path on every residual
  {
    auto t0 = std::chrono::steady_clock::now();
    GridSpec grid = make_grid(256, 60.0);
    double worst = 0.0;
    for (const Preset& p : presets()) {
      Bench b = bench_for(p.expression, p.defaults, grid, GaussianParams{0.0, 4.0, 3.0});
      CrossCheck cc = cross_check(b.op, b.tv, b.base, kTimes,
                                  {{1.0, 1.0}, {3.14159265358979324, 2.0}},
                                  bounded_test_functions());
      worst = std::max(worst, cc.max_deviation);
    }
    double elapsed = seconds_since(t0);
    criterion(7, "fast path vs dense oracle, all presets", worst <= 1e-10 && elapsed < 30.0,
              "max dev " + fmt(worst) + " <= 1e-10, " + fmt(elapsed) + " s < 30 s");
  }

  // C8: symmetry of the time operator over random certified pairs
  {
    double worst = 0.0;
    for (const Preset& p : presets()) {
      Bench b = bench_for(p.expression, p.defaults, kDefaultGrid);
      SplitMix64 rng(2026);
      for (int pair = 0; pair < 50; ++pair) {
        GaussianParams pa{rng.uniform(-4.0, 4.0), rng.uniform(3.5, 6.0),
                          rng.uniform(1.8, 4.2)};
        GaussianParams pb{rng.uniform(-4.0, 4.0), rng.uniform(3.5, 6.0),
                          rng.uniform(1.8, 4.2)};
        TestVector phi = make_test_vector(gaussian(kDefaultGrid, pa), b.tv.bump,
                                          b.op.excluded, pa);
        TestVector psi = make_test_vector(gaussian(kDefaultGrid, pb), b.tv.bump,
                                          b.op.excluded, pb);
        cdouble lhs = inner(phi.state, apply_D(b.op, psi));
        cdouble rhs = inner(apply_D(b.op, phi), psi.state);
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
    criterion(8, "symmetry of D over 50 random pairs per preset", worst <= 1e-10,
              "max defect " + fmt(worst) + " <= 1e-10");
  }

  // C9: expectation value of D advances by exactly the elapsed shift
  {
    double worst = 0.0;
    for (const Preset& p : presets()) {
      Bench b = bench_for(p.expression, p.defaults, kDefaultGrid);
      for (double t : {0.25, 1.0})
        worst = std::max(worst, expectation_shift_residual(b.op, b.tv, t));
    }
    criterion(9, "expectation shift, all presets at t in {0.25, 1}", worst <= 1e-8,
              "max " + fmt(worst) + " <= 1e-8");
  }

  // C10: degenerate inputs — zero shift is exact, bad symbols and bumps refuse
  {
    double worst = 0.0;
    for (const Preset& p : presets()) {
      Bench b = bench_for(p.expression, p.defaults, kDefaultGrid);
      StepResiduals s = step_residuals(b.op, b.tv, 0.0);
      worst = std::max({worst, weak_weyl_residual(b.op, b.tv, 0.0), s.tginv, s.t_only,
                        s.ginvt, expectation_shift_residual(b.op, b.tv, 0.0)});
    }
    bool flat_rejected = false;
    std::string flat_msg;
    try {
      make_symbol("5", {}, -kDefaultGrid.kmax(), kDefaultGrid.kmax(), kDefaultGrid.dk());
    } catch (const SymbolError& e) {
      flat_msg = e.what();
      flat_rejected = flat_msg.find("measure zero") != std::string::npos;
    }
    bool overlap_rejected = false;
    try {
      (void)bench_for("x^2/2", {}, kDefaultGrid, GaussianParams{}, BumpProfile{0.2, 3.0});
    } catch (const StateError& e) {
      overlap_rejected = std::string(e.what()).find("overlaps") != std::string::npos;
    }
    criterion(10, "zero shift exact; flat symbol and covered bump refused",
              worst <= 1e-13 && flat_rejected && overlap_rejected,
              "t=0 max " + fmt(worst) + " <= 1e-13, rejections " +
                  (flat_rejected && overlap_rejected ? "verified" : "MISSING"));
  }

  if (g_failures == 0) {
    std::printf("acceptance: all criteria satisfied\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  return 1;
}
