#pragma once

// Bundled symbol presets. Each carries a closed-form reciprocal derivative
// and a closed operator form for D, so runs on these symbols can cross-check
// the generic symbolic route against hand-derived formulas.

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "weylab/timeop.hpp"

namespace weylab {

using ParamMap = std::map<std::string, double>;

struct Preset {
  std::string name;
  std::string expression;       // symbol text, may use parameters below
  ParamMap defaults;
  std::string d_form;           // closed operator form of D, for display
  std::vector<double> singular; // singular points of the default symbol
  // closed-form 1/g'(k) under the given parameter values
  std::function<double(double, const ParamMap&)> ginv_closed;
};

inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      {"polynomial",
       "x^2/2",
       {},
       "(1/2)(P^-1 Q + Q P^-1)",
       {0.0},
       [](double k, const ParamMap&) { return 1.0 / k; }},
      {"log_abs",
       "log(abs(x))",
       {},
       "(1/2)(P Q + Q P)",
       {0.0},
       [](double k, const ParamMap&) { return k; }},
      {"semirelativistic",
       "sqrt(x^2 + m^2)",
       {{"m", 1.0}},
       "(1/2)(H P^-1 Q + Q P^-1 H),  H = sqrt(P^2 + m^2)",
       {0.0},
       [](double k, const ParamMap& p) {
         double m = p.at("m");
         return std::sqrt(k * k + m * m) / k;
       }},
      {"fractional",
       "(x^2 + m^2)^(alpha/2)",
       {{"m", 1.0}, {"alpha", 0.6}},
       "(1/(2 alpha))((P^2 + m^2) P^-1 H^-1 Q + Q H^-1 P^-1 (P^2 + m^2)),  "
       "H = (P^2 + m^2)^(alpha/2)",
       {0.0},
       [](double k, const ParamMap& p) {
         double m = p.at("m");
         double alpha = p.at("alpha");
         return std::pow(k * k + m * m, 1.0 - alpha / 2.0) / (alpha * k);
       }},
  };
  return table;
}

inline const Preset* find_preset(std::string_view name) {
  for (const Preset& p : presets())
    if (p.name == name) return &p;
  return nullptr;
}

// Decide whether a scenario symbol is an instance of a bundled preset: merge
// the scenario parameters over the preset defaults, parse the preset text
// under the merged values, and compare canonical prints. On a match the
// merged parameter values are written to *merged.
inline const Preset* match_preset(const SpectralSymbol& sym, const ParamMap& params,
                                  ParamMap* merged_out = nullptr) {
  std::string want = to_string(sym.g);
  for (const Preset& p : presets()) {
    ParamMap merged = p.defaults;
    for (const auto& [k, v] : params) {
      if (merged.count(k)) merged[k] = v;
    }
    ExprPtr g;
    try {
      g = parse(p.expression, merged);
    } catch (const Error&) {
      continue;
    }
    if (to_string(g) == want) {
      if (merged_out) *merged_out = merged;
      return &p;
    }
  }
  return nullptr;
}

struct ClosedFormResiduals {
  double multiplier = 0.0;  // max per-bin gap, masked inverse vs closed form
  double apply = 0.0;       // relative gap of D phi through the closed route
};

// Compare the symbolic reciprocal-derivative multiplier (and the D built
// from it) against the preset's closed form. The closed multiplier carries
// the same mask, so the comparison isolates the formula, not the cutoff.
inline ClosedFormResiduals closed_form_residuals(const TimeOperator& op, const Preset& p,
                                                 const ParamMap& params,
                                                 const StateVector& phi) {
  const GridSpec& grid = op.grid;
  std::vector<cdouble> closed(grid.n);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    if (op.dginv.masked[i]) {
      closed[i] = cdouble{0.0, 0.0};
    } else {
      closed[i] = cdouble{p.ginv_closed(grid.k(i), params), 0.0};
    }
    worst = std::max(worst, std::abs(op.dginv.values[i] - closed[i]));
  }
  MultiplierOp closed_op{grid, std::move(closed), op.dginv.masked};
  StateVector first = apply_multiplier(closed_op, apply_Q(phi));
  StateVector second = apply_Q(apply_multiplier(closed_op, phi));
  StateVector d_closed = scaled(add_scaled(first, cdouble{1.0, 0.0}, second), cdouble{0.5, 0.0});
  ClosedFormResiduals r;
  r.multiplier = worst;
  r.apply = distance(apply_D(op, phi), d_closed) / norm(phi);
  return r;
}

}  // namespace weylab
