#pragma once

/**
 * @file expr.hpp
 * @brief A small expression language for integrands f(z).
 *
 * Grammar (whitespace is insignificant):
 *
 *   expr     = term { ("+" | "-") term } ;
 *   term     = unary { ("*" | "/") unary } ;
 *   unary    = "-" unary | power ;
 *   power    = primary [ "^" exponent ] ;
 *   exponent = "-" exponent | power ;          (* must not contain z *)
 *   primary  = number | "z" | "pi" | "e"
 *            | func "(" expr ")" | "(" expr ")" ;
 *   func     = "exp" | "log" | "sin" | "cos" | "sqrt" ;
 *   number   = digits [ "." [ digits ] ] [ exponent-part ]
 *            | "." digits [ exponent-part ] ;
 *
 * So ^ binds tighter than unary minus, which binds tighter than * and /;
 * ^ is right-associative, the others left-associative. There is no implicit
 * multiplication. log, sqrt and non-integer powers use principal branches.
 */

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "fpquad/errors.hpp"
#include "fpquad/model.hpp"

namespace fpquad::expr {

enum class Func { exp, log, sin, cos, sqrt };
enum class BinOp { add, sub, mul, div, pow };
enum class Named { pi, e };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Number {
  double value;
};
struct Constant {
  Named which;
};
struct Variable {};
struct Negate {
  NodePtr arg;
};
struct Binary {
  BinOp op;
  NodePtr lhs;
  NodePtr rhs;
};
struct Call {
  Func fn;
  NodePtr arg;
};

struct Node {
  std::variant<Number, Constant, Variable, Negate, Binary, Call> v;
};

/// Immutable expression tree; copies share nodes.
class Expr {
 public:
  explicit Expr(NodePtr root) : root_(std::move(root)) {}
  [[nodiscard]] const Node& root() const noexcept { return *root_; }
  [[nodiscard]] const NodePtr& ptr() const noexcept { return root_; }

 private:
  NodePtr root_;
};

inline constexpr std::size_t kMaxSourceBytes = 64 * 1024;
inline constexpr int kMaxDepth = 256;

// Node constructors, also used by tests to build trees directly.
inline NodePtr number(double v) { return std::make_shared<const Node>(Node{Number{v}}); }
inline NodePtr constant(Named c) { return std::make_shared<const Node>(Node{Constant{c}}); }
inline NodePtr variable() { return std::make_shared<const Node>(Node{Variable{}}); }
inline NodePtr negate(NodePtr a) { return std::make_shared<const Node>(Node{Negate{std::move(a)}}); }
inline NodePtr binary(BinOp op, NodePtr l, NodePtr r) {
  return std::make_shared<const Node>(Node{Binary{op, std::move(l), std::move(r)}});
}
inline NodePtr call(Func f, NodePtr a) { return std::make_shared<const Node>(Node{Call{f, std::move(a)}}); }

inline const char* name(Func f) {
  switch (f) {
    case Func::exp: return "exp";
    case Func::log: return "log";
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::sqrt: return "sqrt";
  }
  return "?";
}

inline char symbol(BinOp op) {
  switch (op) {
    case BinOp::add: return '+';
    case BinOp::sub: return '-';
    case BinOp::mul: return '*';
    case BinOp::div: return '/';
    case BinOp::pow: return '^';
  }
  return '?';
}

inline bool depends_on_z(const Node& n) {
  return std::visit(
      [](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Variable>) return true;
        else if constexpr (std::is_same_v<T, Negate> || std::is_same_v<T, Call>) return depends_on_z(*x.arg);
        else if constexpr (std::is_same_v<T, Binary>) return depends_on_z(*x.lhs) || depends_on_z(*x.rhs);
        else return false;
      },
      n.v);
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

// Binding strength used to decide where parentheses are needed.
inline int precedence(const Node& n) {
  if (const auto* b = std::get_if<Binary>(&n.v)) {
    switch (b->op) {
      case BinOp::add:
      case BinOp::sub: return 1;
      case BinOp::mul:
      case BinOp::div: return 2;
      case BinOp::pow: return 4;
    }
  }
  if (std::holds_alternative<Negate>(n.v)) return 3;
  return 5;
}

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void print_to(const Node& n, std::string& out);

inline void print_wrapped(const Node& n, bool parens, std::string& out) {
  if (parens) out += '(';
  print_to(n, out);
  if (parens) out += ')';
}

inline void print_to(const Node& n, std::string& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Number>) {
          out += format_number(x.value);
        } else if constexpr (std::is_same_v<T, Constant>) {
          out += x.which == Named::pi ? "pi" : "e";
        } else if constexpr (std::is_same_v<T, Variable>) {
          out += 'z';
        } else if constexpr (std::is_same_v<T, Negate>) {
          out += '-';
          print_wrapped(*x.arg, precedence(*x.arg) < 3, out);
        } else if constexpr (std::is_same_v<T, Call>) {
          out += name(x.fn);
          print_wrapped(*x.arg, true, out);
        } else {
          const int p = precedence(n);
          if (x.op == BinOp::pow) {
            print_wrapped(*x.lhs, precedence(*x.lhs) <= 4, out);
            out += '^';
            print_wrapped(*x.rhs, precedence(*x.rhs) < 4, out);
          } else {
            print_wrapped(*x.lhs, precedence(*x.lhs) < p, out);
            out += symbol(x.op);
            print_wrapped(*x.rhs, precedence(*x.rhs) <= p, out);
          }
        }
      },
      n.v);
}

}  // namespace detail

/// Source text that parses back to the same tree.
inline std::string print(const Node& n) {
  std::string out;
  detail::print_to(n, out);
  return out;
}
inline std::string print(const Expr& e) { return print(e.root()); }

inline bool structurally_equal(const Node& a, const Node& b) {
  if (a.v.index() != b.v.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.v);
        if constexpr (std::is_same_v<T, Number>) return x.value == y.value;
        else if constexpr (std::is_same_v<T, Constant>) return x.which == y.which;
        else if constexpr (std::is_same_v<T, Variable>) return true;
        else if constexpr (std::is_same_v<T, Negate>) return structurally_equal(*x.arg, *y.arg);
        else if constexpr (std::is_same_v<T, Call>) return x.fn == y.fn && structurally_equal(*x.arg, *y.arg);
        else return x.op == y.op && structurally_equal(*x.lhs, *y.lhs) && structurally_equal(*x.rhs, *y.rhs);
      },
      a.v);
}
inline bool structurally_equal(const Expr& a, const Expr& b) { return structurally_equal(a.root(), b.root()); }

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse_all() {
    skip_space();
    if (pos_ == src_.size()) fail("empty expression", {"expression"});
    NodePtr root = parse_expr();
    skip_space();
    if (pos_ != src_.size()) {
      if (src_[pos_] == ')') fail("unbalanced ')'", {"operator", "end of input"});
      fail("unexpected character", {"operator", "end of input"});
    }
    return root;
  }

 private:
  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxDepth) p_.fail("expression nested too deeply", {});
    }
    ~DepthGuard() { --p_.depth_; }
    DepthGuard(const DepthGuard&) = delete;
    DepthGuard& operator=(const DepthGuard&) = delete;
    Parser& p_;
  };

  [[noreturn]] void fail(const std::string& what, std::vector<std::string> expected) const {
    std::string msg = "syntax error at offset " + std::to_string(pos_) + ": " + what;
    if (!expected.empty()) {
      msg += " (expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i) msg += i + 1 == expected.size() ? " or " : ", ";
        msg += expected[i];
      }
      msg += ")";
    }
    throw ParseError(msg, pos_, std::move(expected));
  }

  void skip_space() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_expr() {
    DepthGuard guard(*this);
    NodePtr lhs = parse_term();
    while (true) {
      if (accept('+')) lhs = binary(BinOp::add, lhs, parse_term());
      else if (accept('-')) lhs = binary(BinOp::sub, lhs, parse_term());
      else return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    while (true) {
      if (accept('*')) lhs = binary(BinOp::mul, lhs, parse_unary());
      else if (accept('/')) lhs = binary(BinOp::div, lhs, parse_unary());
      else return lhs;
    }
  }

  NodePtr parse_unary() {
    DepthGuard guard(*this);
    if (accept('-')) return negate(parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (!accept('^')) return base;
    skip_space();
    const std::size_t start = pos_;
    NodePtr exponent = parse_exponent();
    if (depends_on_z(*exponent)) {
      pos_ = start;
      fail("exponent must not depend on z", {"constant exponent"});
    }
    return binary(BinOp::pow, base, exponent);
  }

  NodePtr parse_exponent() {
    DepthGuard guard(*this);
    if (accept('-')) return negate(parse_exponent());
    return parse_power();
  }

  NodePtr parse_primary() {
    DepthGuard guard(*this);
    skip_space();
    if (pos_ == src_.size()) fail("unexpected end of input", {"number", "identifier", "'('"});
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      if (!accept(')')) fail("unbalanced '('", {"')'"});
      return inner;
    }
    if (is_digit(c) || c == '.') return parse_number();
    if (is_ident_start(c)) return parse_identifier();
    fail("unexpected character", {"number", "identifier", "'('"});
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    std::size_t p = pos_;
    bool digits = false;
    while (p < src_.size() && is_digit(src_[p])) {
      ++p;
      digits = true;
    }
    if (p < src_.size() && src_[p] == '.') {
      ++p;
      while (p < src_.size() && is_digit(src_[p])) {
        ++p;
        digits = true;
      }
    }
    if (!digits) fail("malformed number", {"digit"});
    if (p < src_.size() && (src_[p] == 'e' || src_[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
      if (q < src_.size() && is_digit(src_[q])) {
        while (q < src_.size() && is_digit(src_[q])) ++q;
        p = q;
      }
      // Otherwise the 'e' is left for the caller (and fails there: no
      // implicit multiplication).
    }
    double value = 0.0;
    const auto [end, ec] = std::from_chars(src_.data() + start, src_.data() + p, value);
    if (ec != std::errc() || end != src_.data() + p || !std::isfinite(value)) {
      fail("number out of range", {"finite number"});
    }
    pos_ = p;
    return number(value);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (is_ident_start(src_[pos_]) || is_digit(src_[pos_]))) ++pos_;
    const std::string_view id = src_.substr(start, pos_ - start);
    if (id == "z") return variable();
    if (id == "pi") return constant(Named::pi);
    if (id == "e") return constant(Named::e);
    static constexpr std::pair<std::string_view, Func> kFuncs[] = {
        {"exp", Func::exp}, {"log", Func::log}, {"sin", Func::sin}, {"cos", Func::cos}, {"sqrt", Func::sqrt}};
    for (const auto& [fname, fn] : kFuncs) {
      if (id == fname) {
        if (!accept('(')) fail("function '" + std::string(id) + "' needs an argument", {"'('"});
        NodePtr arg = parse_expr();
        if (!accept(')')) fail("unbalanced '('", {"')'"});
        return call(fn, arg);
      }
    }
    pos_ = start;
    fail("unknown identifier '" + std::string(id) + "'", {"z", "pi", "e", "exp", "log", "sin", "cos", "sqrt"});
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

  std::string_view src_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace detail

/// Parses `src` or throws ParseError carrying the byte offset.
inline Expr parse(std::string_view src) {
  if (src.size() > kMaxSourceBytes) {
    throw ParseError("expression exceeds 64 KiB", kMaxSourceBytes, {});
  }
  return Expr(detail::Parser(src).parse_all());
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

inline Complex integer_power(Complex z, long long k) {
  const bool invert = k < 0;
  auto e = static_cast<unsigned long long>(invert ? -k : k);
  Complex result = 1.0;
  Complex base = z;
  for (; e != 0; e >>= 1) {
    if (e & 1u) result *= base;
    base *= base;
  }
  return invert ? 1.0 / result : result;
}

inline Complex eval_node(const Node& n, Complex z) {
  const Complex value = std::visit(
      [&](const auto& x) -> Complex {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Number>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, Constant>) {
          return x.which == Named::pi ? std::numbers::pi : std::numbers::e;
        } else if constexpr (std::is_same_v<T, Variable>) {
          return z;
        } else if constexpr (std::is_same_v<T, Negate>) {
          // 0 − v keeps a zero imaginary part at +0, so sqrt(-1) = i.
          return Complex(0.0) - eval_node(*x.arg, z);
        } else if constexpr (std::is_same_v<T, Call>) {
          const Complex a = eval_node(*x.arg, z);
          switch (x.fn) {
            case Func::exp: return std::exp(a);
            case Func::log: return std::log(a);
            case Func::sin: return std::sin(a);
            case Func::cos: return std::cos(a);
            case Func::sqrt: return std::sqrt(a);
          }
          return a;
        } else {
          const Complex l = eval_node(*x.lhs, z);
          const Complex r = eval_node(*x.rhs, z);
          switch (x.op) {
            case BinOp::add: return l + r;
            case BinOp::sub: return l - r;
            case BinOp::mul: return l * r;
            case BinOp::div: return l / r;
            case BinOp::pow: {
              constexpr double kIntLimit = 1 << 30;
              if (r.imag() == 0.0 && std::nearbyint(r.real()) == r.real() && std::abs(r.real()) <= kIntLimit) {
                return integer_power(l, static_cast<long long>(r.real()));
              }
              if (l == Complex(0.0) && r.real() > 0.0) return 0.0;
              return std::exp(r * std::log(l));
            }
          }
          return l;
        }
      },
      n.v);
  if (!is_finite(value)) {
    const std::string sub = print(n);
    throw NonFiniteResult("expression '" + sub + "' is not finite at z = " + fpquad::detail::format_complex(z), sub);
  }
  return value;
}

}  // namespace detail

inline Complex eval_expr(const Expr& e, Complex z) { return detail::eval_node(e.root(), z); }

/// Heuristic: evaluates at n_probe midpoints of [0,1] and reports whether
/// every value is real to 1e-13 relative.
inline bool real_on_interval_probe(const Expr& e, int n_probe = 64) {
  if (n_probe < 8) throw InvalidParameter("real_on_interval_probe needs n_probe >= 8");
  for (int j = 0; j < n_probe; ++j) {
    const double x = (j + 0.5) / n_probe;
    const Complex v = eval_expr(e, x);
    if (std::abs(v.imag()) > 1e-13 * (1.0 + std::abs(v))) return false;
  }
  return true;
}

/// Wraps an expression as an Integrand with unknown singularities; the
/// real-on-[0,1] flag comes from the probe (false if probing fails).
inline Integrand make_integrand(const Expr& e) {
  bool real = false;
  try {
    real = real_on_interval_probe(e);
  } catch (const Error&) {
    real = false;
  }
  return Integrand([e](Complex z) { return eval_expr(e, z); }, real);
}

}  // namespace fpquad::expr
