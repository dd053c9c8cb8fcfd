#pragma once

// Expression trees for real spectral symbols g(x) in a single variable,
// with parsing, symbolic differentiation, canonical printing, and numeric
// detection of singular points (non-smooth points of g plus zeros of g').

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "weylab/random.hpp"

namespace weylab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Syntax / identifier problems; carries the byte offset into the source text.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// A symbol failed one of the admissibility checks (real-valuedness,
// derivative consistency, measure-zero derivative zero set).
class SymbolError : public Error {
 public:
  using Error::Error;
};

enum class ExprKind {
  Constant,
  Variable,
  Sum,
  Product,
  Quotient,
  Power,  // right operand is a Constant node (real exponent)
  Sqrt,
  Log,
  Abs,
  Exp,
  Sin,
  Cos,
  Negate,
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

// Immutable after construction; shared freely across threads.
struct ExprNode {
  ExprKind kind;
  double value = 0.0;  // Constant only
  ExprPtr a, b;        // operands; b only for binary kinds
};

inline double evaluate(const ExprPtr& e, double x) {
  switch (e->kind) {
    case ExprKind::Constant: return e->value;
    case ExprKind::Variable: return x;
    case ExprKind::Sum:      return evaluate(e->a, x) + evaluate(e->b, x);
    case ExprKind::Product:  return evaluate(e->a, x) * evaluate(e->b, x);
    case ExprKind::Quotient: return evaluate(e->a, x) / evaluate(e->b, x);
    case ExprKind::Power:    return std::pow(evaluate(e->a, x), e->b->value);
    case ExprKind::Sqrt:     return std::sqrt(evaluate(e->a, x));
    case ExprKind::Log:      return std::log(evaluate(e->a, x));
    case ExprKind::Abs:      return std::abs(evaluate(e->a, x));
    case ExprKind::Exp:      return std::exp(evaluate(e->a, x));
    case ExprKind::Sin:      return std::sin(evaluate(e->a, x));
    case ExprKind::Cos:      return std::cos(evaluate(e->a, x));
    case ExprKind::Negate:   return -evaluate(e->a, x);
  }
  return 0.0;  // unreachable
}

// ---- node factories with local simplification ------------------------------
// Only local rules are applied (0*a -> 0, a+0 -> a, a*1 -> a, u^1 -> u,
// u^0 -> 1, folding of all-constant nodes with finite result); no global
// rewriting, so printed derivatives stay structurally predictable.

inline ExprPtr constant(double v) {
  return std::make_shared<ExprNode>(ExprNode{ExprKind::Constant, v, nullptr, nullptr});
}

inline ExprPtr variable() {
  return std::make_shared<ExprNode>(ExprNode{ExprKind::Variable, 0.0, nullptr, nullptr});
}

namespace detail {

inline bool is_const(const ExprPtr& e) { return e->kind == ExprKind::Constant; }
inline bool is_const(const ExprPtr& e, double v) { return is_const(e) && e->value == v; }

inline ExprPtr node(ExprKind k, ExprPtr a, ExprPtr b = nullptr) {
  return std::make_shared<ExprNode>(ExprNode{k, 0.0, std::move(a), std::move(b)});
}

}  // namespace detail

inline ExprPtr sum(ExprPtr a, ExprPtr b) {
  using namespace detail;
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (is_const(a) && is_const(b)) {
    double v = a->value + b->value;
    if (std::isfinite(v)) return constant(v);
  }
  return node(ExprKind::Sum, std::move(a), std::move(b));
}

inline ExprPtr negate(ExprPtr a) {
  using namespace detail;
  if (is_const(a)) return constant(-a->value);
  if (a->kind == ExprKind::Negate) return a->a;
  return node(ExprKind::Negate, std::move(a));
}

inline ExprPtr product(ExprPtr a, ExprPtr b);

inline ExprPtr quotient(ExprPtr a, ExprPtr b) {
  using namespace detail;
  if (is_const(a, 0.0) && !is_const(b, 0.0)) return constant(0.0);
  if (is_const(b, 1.0)) return a;
  if (is_const(a) && is_const(b)) {
    double v = a->value / b->value;
    if (std::isfinite(v)) return constant(v);
  }
  // (c1*u)/c2 -> (c1/c2)*u, still a local rule at this node
  if (is_const(b) && a->kind == ExprKind::Product && is_const(a->a)) {
    double v = a->a->value / b->value;
    if (std::isfinite(v)) return product(constant(v), a->b);
  }
  // (c1*u)/(c2*v) -> (c1/c2)*(u/v)
  if (a->kind == ExprKind::Product && is_const(a->a) &&
      b->kind == ExprKind::Product && is_const(b->a)) {
    double v = a->a->value / b->a->value;
    if (std::isfinite(v)) return product(constant(v), quotient(a->b, b->b));
  }
  return node(ExprKind::Quotient, std::move(a), std::move(b));
}

inline ExprPtr product(ExprPtr a, ExprPtr b) {
  using namespace detail;
  if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a) && is_const(b)) {
    double v = a->value * b->value;
    if (std::isfinite(v)) return constant(v);
  }
  // c1*(c2*u) -> (c1*c2)*u, keeping constant prefactors in one place
  if (is_const(a) && b->kind == ExprKind::Product && is_const(b->a)) {
    double v = a->value * b->a->value;
    if (std::isfinite(v)) return product(constant(v), b->b);
  }
  // (c1*u)*c2 -> (c1*c2)*u
  if (is_const(b) && a->kind == ExprKind::Product && is_const(a->a)) {
    double v = a->a->value * b->value;
    if (std::isfinite(v)) return product(constant(v), a->b);
  }
  // (c1*u)*(c2*v) -> (c1*c2)*(u*v)
  if (a->kind == ExprKind::Product && is_const(a->a) &&
      b->kind == ExprKind::Product && is_const(b->a)) {
    double v = a->a->value * b->a->value;
    if (std::isfinite(v)) return product(constant(v), product(a->b, b->b));
  }
  return node(ExprKind::Product, std::move(a), std::move(b));
}

inline ExprPtr power(ExprPtr base, double expo) {
  using namespace detail;
  if (expo == 1.0) return base;
  if (expo == 0.0) return constant(1.0);
  if (is_const(base)) {
    double v = std::pow(base->value, expo);
    if (std::isfinite(v)) return constant(v);
  }
  return node(ExprKind::Power, std::move(base), constant(expo));
}

inline ExprPtr unary(ExprKind k, ExprPtr a) {
  using namespace detail;
  if (is_const(a)) {
    double x = a->value, v = 0.0;
    switch (k) {
      case ExprKind::Sqrt: v = std::sqrt(x); break;
      case ExprKind::Log:  v = std::log(x); break;
      case ExprKind::Abs:  v = std::abs(x); break;
      case ExprKind::Exp:  v = std::exp(x); break;
      case ExprKind::Sin:  v = std::sin(x); break;
      case ExprKind::Cos:  v = std::cos(x); break;
      default: return node(k, std::move(a));
    }
    if (std::isfinite(v)) return constant(v);
  }
  return node(k, std::move(a));
}

inline ExprPtr sqrt_of(ExprPtr a) { return unary(ExprKind::Sqrt, std::move(a)); }
inline ExprPtr log_of(ExprPtr a) { return unary(ExprKind::Log, std::move(a)); }
inline ExprPtr abs_of(ExprPtr a) { return unary(ExprKind::Abs, std::move(a)); }
inline ExprPtr exp_of(ExprPtr a) { return unary(ExprKind::Exp, std::move(a)); }
inline ExprPtr sin_of(ExprPtr a) { return unary(ExprKind::Sin, std::move(a)); }
inline ExprPtr cos_of(ExprPtr a) { return unary(ExprKind::Cos, std::move(a)); }

// ---- parsing ----------------------------------------------------------------
// Grammar (precedence loosest to tightest; '^' right-associative, unary minus
// binds tighter than '^'):
//   expression := term (('+'|'-') term)*
//   term       := factor (('*'|'/') factor)*
//   factor     := unary ('^' factor)?
//   unary      := '-' unary | primary
//   primary    := number | 'x' | parameter | func '(' expression ')'
//               | '(' expression ')'
//   func       := sqrt | log | abs | exp | sin | cos
// Parameters are bound to their numeric values at parse time; exponents must
// fold to constants.

namespace detail {

struct Token {
  enum Type { Number, Ident, Op, End } type;
  std::string text;
  double num = 0.0;
  std::size_t offset = 0;
};

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto isident = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    if ((c >= '0' && c <= '9') || c == '.') {
      double v = 0.0;
      const char* first = src.data() + i;
      const char* last = src.data() + src.size();
      auto res = std::from_chars(first, last, v);
      if (res.ec != std::errc() || res.ptr == first)
        throw ParseError("malformed number", i);
      std::size_t len = static_cast<std::size_t>(res.ptr - first);
      out.push_back({Token::Number, std::string(src.substr(i, len)), v, i});
      i += len;
      continue;
    }
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
      std::size_t j = i + 1;
      while (j < src.size() && isident(src[j])) ++j;
      out.push_back({Token::Ident, std::string(src.substr(i, j - i)), 0.0, i});
      i = j;
      continue;
    }
    if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^' || c == '(' || c == ')') {
      out.push_back({Token::Op, std::string(1, c), 0.0, i});
      ++i;
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", i);
  }
  out.push_back({Token::End, "", 0.0, src.size()});
  return out;
}

class Parser {
 public:
  Parser(std::string_view src, const std::map<std::string, double>& params)
      : tokens_(lex(src)), params_(params) {
    if (params.count("x"))
      throw ParseError("'x' is the free variable and cannot be a parameter name", 0);
    for (const auto& [name, value] : params)
      if (!std::isfinite(value))
        throw ParseError("parameter '" + name + "' is not a finite real", 0);
  }

  ExprPtr run() {
    ExprPtr e = expression();
    if (peek().type != Token::End)
      throw ParseError("unexpected trailing input", peek().offset);
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }
  bool accept_op(const char* op) {
    if (peek().type == Token::Op && peek().text == op) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr expression() {
    ExprPtr e = term();
    for (;;) {
      if (accept_op("+"))
        e = sum(std::move(e), term());
      else if (accept_op("-"))
        e = sum(std::move(e), negate(term()));
      else
        return e;
    }
  }

  ExprPtr term() {
    ExprPtr e = factor();
    for (;;) {
      if (accept_op("*"))
        e = product(std::move(e), factor());
      else if (accept_op("/"))
        e = quotient(std::move(e), factor());
      else
        return e;
    }
  }

  ExprPtr factor() {
    ExprPtr base = unary_expr();
    if (peek().type == Token::Op && peek().text == "^") {
      std::size_t caret = take().offset;
      ExprPtr expo = factor();  // right-associative
      if (expo->kind != ExprKind::Constant)
        throw ParseError("exponent must be a constant expression", caret);
      return power(std::move(base), expo->value);
    }
    return base;
  }

  ExprPtr unary_expr() {
    if (accept_op("-")) return negate(unary_expr());
    return primary();
  }

  ExprPtr primary() {
    const Token& t = take();
    if (t.type == Token::Number) return constant(t.num);
    if (t.type == Token::Ident) {
      if (accept_op("(")) {
        ExprPtr arg = expression();
        if (!accept_op(")")) throw ParseError("expected ')'", peek().offset);
        if (t.text == "sqrt") return sqrt_of(std::move(arg));
        if (t.text == "log") return log_of(std::move(arg));
        if (t.text == "abs") return abs_of(std::move(arg));
        if (t.text == "exp") return exp_of(std::move(arg));
        if (t.text == "sin") return sin_of(std::move(arg));
        if (t.text == "cos") return cos_of(std::move(arg));
        throw ParseError("unknown function '" + t.text + "'", t.offset);
      }
      if (t.text == "x") return variable();
      auto it = params_.find(t.text);
      if (it != params_.end()) return constant(it->second);
      throw ParseError("unknown identifier '" + t.text + "'", t.offset);
    }
    if (t.type == Token::Op && t.text == "(") {
      ExprPtr e = expression();
      if (!accept_op(")")) throw ParseError("expected ')'", peek().offset);
      return e;
    }
    throw ParseError("expected an operand", t.offset);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const std::map<std::string, double>& params_;
};

}  // namespace detail

inline ExprPtr parse(std::string_view text, const std::map<std::string, double>& params = {}) {
  return detail::Parser(text, params).run();
}

// ---- canonical printing ------------------------------------------------------
// Output re-parses to an evaluation-equivalent tree and printing is a fixed
// point: print(parse(print(t))) == print(t).

namespace detail {

inline int precedence(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Sum: return 1;
    case ExprKind::Product:
    case ExprKind::Quotient: return 2;
    case ExprKind::Power: return 3;
    case ExprKind::Negate: return 4;
    default: return 5;
  }
}

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string render(const ExprPtr& e, int ctx);

inline std::string wrap(const ExprPtr& e, int ctx) {
  std::string s = render(e, ctx);
  if (precedence(e) < ctx) return "(" + s + ")";
  return s;
}

inline std::string render(const ExprPtr& e, int /*ctx*/) {
  switch (e->kind) {
    case ExprKind::Constant: return format_double(e->value);
    case ExprKind::Variable: return "x";
    case ExprKind::Sum:
      if (e->b->kind == ExprKind::Negate)
        return wrap(e->a, 1) + " - " + wrap(e->b->a, 2);
      return wrap(e->a, 1) + " + " + wrap(e->b, 2);
    case ExprKind::Product: return wrap(e->a, 2) + "*" + wrap(e->b, 3);
    case ExprKind::Quotient: return wrap(e->a, 2) + "/" + wrap(e->b, 3);
    case ExprKind::Power: return wrap(e->a, 4) + "^" + wrap(e->b, 4);
    case ExprKind::Sqrt: return "sqrt(" + render(e->a, 1) + ")";
    case ExprKind::Log: return "log(" + render(e->a, 1) + ")";
    case ExprKind::Abs: return "abs(" + render(e->a, 1) + ")";
    case ExprKind::Exp: return "exp(" + render(e->a, 1) + ")";
    case ExprKind::Sin: return "sin(" + render(e->a, 1) + ")";
    case ExprKind::Cos: return "cos(" + render(e->a, 1) + ")";
    case ExprKind::Negate: return "-" + wrap(e->a, 5);
  }
  return "";
}

}  // namespace detail

inline std::string to_string(const ExprPtr& e) { return detail::render(e, 1); }

// ---- differentiation ----------------------------------------------------------

inline ExprPtr differentiate(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Constant: return constant(0.0);
    case ExprKind::Variable: return constant(1.0);
    case ExprKind::Sum: return sum(differentiate(e->a), differentiate(e->b));
    case ExprKind::Product:
      return sum(product(differentiate(e->a), e->b), product(e->a, differentiate(e->b)));
    case ExprKind::Quotient:
      if (e->b->kind == ExprKind::Constant) return quotient(differentiate(e->a), e->b);
      return quotient(
          sum(product(differentiate(e->a), e->b), negate(product(e->a, differentiate(e->b)))),
          power(e->b, 2.0));
    case ExprKind::Power: {
      double c = e->b->value;
      return product(product(constant(c), power(e->a, c - 1.0)), differentiate(e->a));
    }
    case ExprKind::Sqrt:
      return quotient(differentiate(e->a), product(constant(2.0), sqrt_of(e->a)));
    case ExprKind::Log: return quotient(differentiate(e->a), e->a);
    case ExprKind::Abs:
      // sign(u) written as u/|u|; undefined at u = 0, which the singular-set
      // detection already attributes to the abs subterm.
      return product(differentiate(e->a), quotient(e->a, abs_of(e->a)));
    case ExprKind::Exp: return product(differentiate(e->a), exp_of(e->a));
    case ExprKind::Sin: return product(differentiate(e->a), cos_of(e->a));
    case ExprKind::Cos: return negate(product(differentiate(e->a), sin_of(e->a)));
    case ExprKind::Negate: return negate(differentiate(e->a));
  }
  return constant(0.0);  // unreachable
}

// ---- zero scanning -------------------------------------------------------------

namespace detail {

// Roots of f on [lo, hi]: samples at ~step spacing; sign changes refined by
// bisection, plus tangential touches caught by refining strict local minima
// of |f| and accepting them when |f| <= 1e-12. Absolute accuracy 1e-12.
template <class F>
std::vector<double> scan_zeros(F&& f, double lo, double hi, double step) {
  std::vector<double> roots;
  const std::size_t cells = static_cast<std::size_t>(
      std::max(2.0, std::min(4e6, std::ceil((hi - lo) / step))));
  std::vector<double> xs(cells + 1), fs(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) {
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
    fs[i] = f(xs[i]);
  }
  auto bisect = [&](double a, double b, double fa) {
    for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
      double m = 0.5 * (a + b), fm = f(m);
      if (fm == 0.0) return m;
      if ((fa < 0) != (fm < 0))
        b = m;
      else
        a = m, fa = fm;
    }
    return 0.5 * (a + b);
  };
  // golden-section minimum of |f| for tangential zeros
  auto refine_min = [&](double a, double b) {
    const double gr = 0.6180339887498949;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = std::abs(f(c)), fd = std::abs(f(d));
    for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
      if (fc < fd) {
        b = d; d = c; fd = fc;
        c = b - gr * (b - a); fc = std::abs(f(c));
      } else {
        a = c; c = d; fc = fd;
        d = a + gr * (b - a); fd = std::abs(f(d));
      }
    }
    return 0.5 * (a + b);
  };
  for (std::size_t i = 0; i <= cells; ++i)
    if (fs[i] == 0.0) roots.push_back(xs[i]);
  for (std::size_t i = 0; i < cells; ++i) {
    if (!std::isfinite(fs[i]) || !std::isfinite(fs[i + 1])) continue;
    if (fs[i] == 0.0 || fs[i + 1] == 0.0) continue;
    if ((fs[i] < 0) != (fs[i + 1] < 0)) roots.push_back(bisect(xs[i], xs[i + 1], fs[i]));
  }
  for (std::size_t i = 1; i < cells; ++i) {
    if (!std::isfinite(fs[i - 1]) || !std::isfinite(fs[i]) || !std::isfinite(fs[i + 1])) continue;
    if (fs[i] == 0.0) continue;
    if ((fs[i - 1] < 0) != (fs[i] < 0) || (fs[i] < 0) != (fs[i + 1] < 0)) continue;
    if (std::abs(fs[i]) < std::abs(fs[i - 1]) && std::abs(fs[i]) < std::abs(fs[i + 1])) {
      double z = refine_min(xs[i - 1], xs[i + 1]);
      if (std::abs(f(z)) <= 1e-12) roots.push_back(z);
    }
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots)
    if (out.empty() || r - out.back() > 1e-9) out.push_back(r);
  return out;
}

// Candidate non-smooth points of g: zeros of the arguments of abs/log/sqrt,
// of powers with negative or non-integer exponent, and of quotient
// denominators. A sound overapproximation for this grammar.
inline void collect_kink_candidates(const ExprPtr& e, double lo, double hi, double step,
                                    std::vector<double>& out) {
  if (!e) return;
  auto arg_zeros = [&](const ExprPtr& arg) {
    auto zs = scan_zeros([&](double x) { return evaluate(arg, x); }, lo, hi, step);
    out.insert(out.end(), zs.begin(), zs.end());
  };
  switch (e->kind) {
    case ExprKind::Abs:
    case ExprKind::Log:
    case ExprKind::Sqrt:
      arg_zeros(e->a);
      break;
    case ExprKind::Power: {
      double c = e->b->value;
      if (c < 0.0 || c != std::floor(c)) arg_zeros(e->a);
      break;
    }
    case ExprKind::Quotient:
      arg_zeros(e->b);
      break;
    default:
      break;
  }
  collect_kink_candidates(e->a, lo, hi, step, out);
  if (e->kind != ExprKind::Power)  // exponent is a constant, nothing to scan
    collect_kink_candidates(e->b, lo, hi, step, out);
}

inline std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > 1e-9) out.push_back(x);
  return out;
}

}  // namespace detail

// Non-smooth points of g inside [lo, hi], found structurally.
inline std::vector<double> kink_points(const ExprPtr& g, double lo, double hi, double step) {
  std::vector<double> pts;
  detail::collect_kink_candidates(g, lo, hi, step, pts);
  return detail::sorted_unique(std::move(pts));
}

// ---- spectral symbols -----------------------------------------------------------

// A validated symbol: source text, tree, derivative tree, the window the
// admissibility checks ran on, and the non-smooth points found there.
struct SpectralSymbol {
  std::string text;
  ExprPtr g;
  ExprPtr gprime;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::vector<double> kinks;
  bool validated = false;
};

// Singular points of the symbol inside [lo, hi]: non-smooth points of g plus
// zeros of g' away from them, each located to absolute accuracy 1e-12.
// Fails when g' vanishes on a dense subset of the scan (its zero set must
// have measure zero for the time operator to exist).
inline std::vector<double> singular_points(const SpectralSymbol& sym, double lo, double hi,
                                           double resolution) {
  if (!(lo < hi) || !(resolution > 0))
    throw SymbolError("singular_points: window must be nonempty and resolution positive");
  auto kinks = kink_points(sym.g, lo, hi, resolution);
  auto gp = [&](double x) { return evaluate(sym.gprime, x); };

  const std::size_t cells = static_cast<std::size_t>(
      std::max(2.0, std::min(4e6, std::ceil((hi - lo) / resolution))));
  std::size_t near_zero = 0, finite = 0;
  for (std::size_t i = 0; i <= cells; ++i) {
    double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
    double v = gp(x);
    if (!std::isfinite(v)) continue;
    ++finite;
    if (std::abs(v) < 1e-14) ++near_zero;
  }
  if (finite == 0 || near_zero * 10 > finite) {
    std::size_t pct = finite == 0 ? 100 : (100 * near_zero) / finite;
    throw SymbolError("derivative vanishes on " + std::to_string(pct) +
                      "% of the window; the zero set of g' must have measure zero");
  }

  auto zeros = detail::scan_zeros(gp, lo, hi, resolution);
  std::vector<double> all = kinks;
  for (double z : zeros) {
    bool near_kink = false;
    for (double k : kinks)
      if (std::abs(z - k) <= 1e-9) near_kink = true;
    if (!near_kink) all.push_back(z);
  }
  return detail::sorted_unique(std::move(all));
}

// Parse + differentiate + admissibility checks on [lo, hi]:
//  - g and g' evaluate to finite reals at sampled non-singular points,
//  - the symbolic derivative matches a central finite difference to
//    1e-6 * (1 + |g'|) at 1000 seeded random points outside 1e-3
//    neighborhoods of the non-smooth set,
//  - the zero set of g' passes the measure-zero screen.
inline SpectralSymbol make_symbol(std::string_view text,
                                  const std::map<std::string, double>& params, double lo,
                                  double hi, double resolution, std::uint64_t seed = 1) {
  SpectralSymbol sym;
  sym.text = std::string(text);
  sym.g = parse(text, params);
  sym.gprime = differentiate(sym.g);
  sym.window_lo = lo;
  sym.window_hi = hi;
  sym.kinks = kink_points(sym.g, lo, hi, resolution);

  SplitMix64 rng(seed);
  auto near_kink = [&](double x) {
    for (double k : sym.kinks)
      if (std::abs(x - k) <= 1e-3) return true;
    return false;
  };
  const int wanted = 1000;
  int got = 0;
  for (int tries = 0; got < wanted && tries < 100 * wanted; ++tries) {
    double x = rng.uniform(lo, hi);
    if (near_kink(x)) continue;
    ++got;
    double gx = evaluate(sym.g, x);
    if (!std::isfinite(gx))
      throw SymbolError("symbol is not finite and real at x = " + detail::format_double(x));
    double sp = evaluate(sym.gprime, x);
    if (!std::isfinite(sp))
      throw SymbolError("derivative is not finite at x = " + detail::format_double(x));
    double h = 1e-5 * std::max(1e-2, std::abs(x));
    if (near_kink(x - h) || near_kink(x + h)) continue;
    double fd = (evaluate(sym.g, x + h) - evaluate(sym.g, x - h)) / (2.0 * h);
    if (!std::isfinite(fd)) continue;
    if (std::abs(sp - fd) > 1e-6 * (1.0 + std::abs(sp)))
      throw SymbolError("symbolic derivative disagrees with finite difference at x = " +
                        detail::format_double(x) + " (symbolic " + detail::format_double(sp) +
                        ", finite difference " + detail::format_double(fd) + ")");
  }
  if (got < wanted)
    throw SymbolError("could not sample enough admissible points in the window");

  // measure-zero screen (and a first full scan for singular points)
  (void)singular_points(sym, lo, hi, resolution);
  sym.validated = true;
  return sym;
}

}  // namespace weylab
