#include "causal/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

namespace causal {

ParseError::ParseError(std::size_t offset, const std::string& what)
    : ExprError("syntax error at offset " + std::to_string(offset) + ": " + what), offset_(offset) {}

UnknownIdentifier::UnknownIdentifier(std::string name)
    : ExprError("unknown identifier '" + name + "'"), name_(std::move(name)) {}

DomainError::DomainError(std::string subexpr, const std::string& what)
    : ExprError(what + " in '" + subexpr + "'"), subexpr_(std::move(subexpr)) {}

namespace {

struct FuncName {
  std::string_view name;
  Func func;
};

constexpr std::array<FuncName, 10> kFunctions{{
    {"sin", Func::Sin},
    {"cos", Func::Cos},
    {"tan", Func::Tan},
    {"sinh", Func::Sinh},
    {"cosh", Func::Cosh},
    {"tanh", Func::Tanh},
    {"exp", Func::Exp},
    {"log", Func::Log},
    {"sqrt", Func::Sqrt},
    {"abs", Func::Abs},
}};

std::optional<Func> lookup_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return f.func;
  return std::nullopt;
}

std::string_view function_name(Func f) {
  for (const auto& e : kFunctions)
    if (e.func == f) return e.name;
  return "?";
}

NodePtr make_leaf_number(double v) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Number;
  n->number = v;
  return n;
}

NodePtr make_unary(Op op, NodePtr a) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->lhs = std::move(a);
  return n;
}

// Literals are non-negative so the printed form re-parses to the same tree.
NodePtr make_number(double v) {
  if (v < 0.0 || (v == 0.0 && std::signbit(v))) return make_unary(Op::Neg, make_leaf_number(-v));
  return make_leaf_number(v);
}

NodePtr make_symbol(std::size_t slot) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Symbol;
  n->slot = slot;
  return n;
}

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

NodePtr make_call(Func f, NodePtr a) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Call;
  n->func = f;
  n->lhs = std::move(a);
  return n;
}

// ---------------------------------------------------------------------------
// Parser: recursive descent.
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := '-' unary | power
//   power := primary ('^' unary)?
//   primary := number | 'pi' | ident | func '(' expr ')' | '(' expr ')'

class Parser {
 public:
  Parser(std::string_view text, const SymbolList& symbols) : text_(text), symbols_(symbols) {}

  NodePtr parse() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(pos_, "empty expression");
    NodePtr e = expr();
    skip_ws();
    if (pos_ < text_.size()) throw ParseError(pos_, std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r' || text_[pos_] == '\n'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make_binary(Op::Add, lhs, term());
      else if (accept('-'))
        lhs = make_binary(Op::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make_binary(Op::Mul, lhs, unary());
      else if (accept('/'))
        lhs = make_binary(Op::Div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_unary(Op::Neg, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make_binary(Op::Pow, base, unary());
    return base;
  }

  static bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
  static bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
  static bool digit(char c) { return c >= '0' && c <= '9'; }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(pos_, "unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) throw ParseError(pos_, "expected ')'");
      return e;
    }
    if (digit(c) || c == '.') return number();
    if (ident_start(c)) return identifier();
    throw ParseError(pos_, std::string("unexpected '") + c + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && digit(text_[pos_])) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && digit(text_[pos_])) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && digit(text_[p])) {
        pos_ = p;
        while (pos_ < text_.size() && digit(text_[pos_])) ++pos_;
      }
    }
    double v = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) throw ParseError(start, "malformed number");
    return make_leaf_number(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (auto f = lookup_function(name)) {
      if (!accept('(')) throw ParseError(pos_, "expected '(' after function " + std::string(name));
      NodePtr arg = expr();
      if (!accept(')')) throw ParseError(pos_, "expected ')'");
      return make_call(*f, arg);
    }
    if (name == "pi") {
      auto n = std::make_shared<ExprNode>();
      n->op = Op::Pi;
      return n;
    }
    for (std::size_t i = 0; i < symbols_.size(); ++i)
      if (symbols_[i] == name) return make_symbol(i);
    throw UnknownIdentifier(std::string(name));
  }

  std::string_view text_;
  const SymbolList& symbols_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printing

int precedence(const ExprNode& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

void print(const ExprNode& n, const SymbolList& syms, std::string& out);

void print_child(const ExprNode& child, bool parens, const SymbolList& syms, std::string& out) {
  if (parens) out += '(';
  print(child, syms, out);
  if (parens) out += ')';
}

void print(const ExprNode& n, const SymbolList& syms, std::string& out) {
  switch (n.op) {
    case Op::Number: {
      std::array<char, 64> buf{};
      auto res = std::to_chars(buf.data(), buf.data() + buf.size(), n.number);
      out.append(buf.data(), res.ptr);
      return;
    }
    case Op::Pi: out += "pi"; return;
    case Op::Symbol: out += syms.at(n.slot); return;
    case Op::Neg:
      out += '-';
      print_child(*n.lhs, precedence(*n.lhs) < 3, syms, out);
      return;
    case Op::Call:
      out += function_name(n.func);
      out += '(';
      print(*n.lhs, syms, out);
      out += ')';
      return;
    case Op::Pow:
      print_child(*n.lhs, precedence(*n.lhs) <= 4, syms, out);
      out += '^';
      print_child(*n.rhs, precedence(*n.rhs) < 3, syms, out);
      return;
    default: {
      const int p = precedence(n);
      const char sym = n.op == Op::Add ? '+' : n.op == Op::Sub ? '-' : n.op == Op::Mul ? '*' : '/';
      print_child(*n.lhs, precedence(*n.lhs) < p, syms, out);
      out += ' ';
      out += sym;
      out += ' ';
      print_child(*n.rhs, precedence(*n.rhs) <= p, syms, out);
      return;
    }
  }
}

std::string node_text(const ExprNode& n, const SymbolList& syms) {
  std::string s;
  print(n, syms, s);
  return s;
}

// ---------------------------------------------------------------------------
// Evaluation. One template serves double and Dual; the scalar traits provide
// the elementary functions with their derivatives.

struct RealOps {
  using T = double;
  static double value(double x) { return x; }
  static double lift(double v, const double&) { return v; }
  static double apply(double x, double fx, double) { (void)x; return fx; }
};

struct DualOps {
  using T = Dual;
  static double value(const Dual& x) { return x.value(); }
  static Dual lift(double v, const Dual&) { return Dual(v); }
  static Dual apply(const Dual& x, double fx, double slope) { return x.chain(fx, slope); }
};

template <class Ops>
typename Ops::T eval_node(const ExprNode& n, std::span<const typename Ops::T> vals, const SymbolList& syms) {
  using T = typename Ops::T;
  auto fail = [&](const char* what) -> T { throw DomainError(node_text(n, syms), what); };
  switch (n.op) {
    case Op::Number: return T(n.number);
    case Op::Pi: return T(std::numbers::pi);
    case Op::Symbol:
      if (n.slot >= vals.size()) throw UnknownIdentifier(syms.at(n.slot));
      return vals[n.slot];
    case Op::Neg: return -eval_node<Ops>(*n.lhs, vals, syms);
    case Op::Add: return eval_node<Ops>(*n.lhs, vals, syms) + eval_node<Ops>(*n.rhs, vals, syms);
    case Op::Sub: return eval_node<Ops>(*n.lhs, vals, syms) - eval_node<Ops>(*n.rhs, vals, syms);
    case Op::Mul: return eval_node<Ops>(*n.lhs, vals, syms) * eval_node<Ops>(*n.rhs, vals, syms);
    case Op::Div: {
      T a = eval_node<Ops>(*n.lhs, vals, syms);
      T b = eval_node<Ops>(*n.rhs, vals, syms);
      if (Ops::value(b) == 0.0) return fail("division by zero");
      return a / b;
    }
    case Op::Pow: {
      T a = eval_node<Ops>(*n.lhs, vals, syms);
      T b = eval_node<Ops>(*n.rhs, vals, syms);
      const double av = Ops::value(a);
      const double bv = Ops::value(b);
      const double r = std::pow(av, bv);
      if (!std::isfinite(r) && std::isfinite(av) && std::isfinite(bv)) {
        if (av == 0.0) return fail("zero to a negative power");
        return fail("non-real power");
      }
      if (std::isnan(r)) return fail("non-real power");
      if constexpr (std::is_same_v<T, Dual>) {
        // d(a^b) = b a^(b-1) da + a^b ln(a) db
        const bool const_exp = b.is_constant();
        const bool const_base = a.is_constant();
        const double da = const_exp || av != 0.0 ? bv * std::pow(av, bv - 1.0) : 0.0;
        double db = 0.0;
        if (!const_exp) {
          if (av <= 0.0) return fail("non-positive base with variable exponent");
          db = r * std::log(av);
        }
        Dual out = a.chain(r, const_base ? 0.0 : da);
        if (!const_exp) out = out + b.chain(0.0, db);
        return out;
      } else {
        return r;
      }
    }
    case Op::Call: {
      T a = eval_node<Ops>(*n.lhs, vals, syms);
      const double x = Ops::value(a);
      switch (n.func) {
        case Func::Sin: return Ops::apply(a, std::sin(x), std::cos(x));
        case Func::Cos: return Ops::apply(a, std::cos(x), -std::sin(x));
        case Func::Tan: {
          const double c = std::cos(x);
          if (c == 0.0) return fail("tan pole");
          return Ops::apply(a, std::tan(x), 1.0 / (c * c));
        }
        case Func::Sinh: return Ops::apply(a, std::sinh(x), std::cosh(x));
        case Func::Cosh: return Ops::apply(a, std::cosh(x), std::sinh(x));
        case Func::Tanh: {
          const double t = std::tanh(x);
          return Ops::apply(a, t, 1.0 - t * t);
        }
        case Func::Exp: {
          const double e = std::exp(x);
          return Ops::apply(a, e, e);
        }
        case Func::Log:
          if (!(x > 0.0)) return fail("log of non-positive value");
          return Ops::apply(a, std::log(x), 1.0 / x);
        case Func::Sqrt: {
          if (x < 0.0) return fail("sqrt of negative value");
          const double s = std::sqrt(x);
          return Ops::apply(a, s, s > 0.0 ? 0.5 / s : 0.0);
        }
        case Func::Abs: return Ops::apply(a, std::abs(x), x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0));
      }
      break;
    }
  }
  throw ExprError("corrupt expression tree");
}

bool nodes_equal(const ExprNode& a, const SymbolList& sa, const ExprNode& b, const SymbolList& sb) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case Op::Number: return a.number == b.number;
    case Op::Pi: return true;
    case Op::Symbol: return sa.at(a.slot) == sb.at(b.slot);
    case Op::Neg: return nodes_equal(*a.lhs, sa, *b.lhs, sb);
    case Op::Call: return a.func == b.func && nodes_equal(*a.lhs, sa, *b.lhs, sb);
    default: return nodes_equal(*a.lhs, sa, *b.lhs, sb) && nodes_equal(*a.rhs, sa, *b.rhs, sb);
  }
}

bool node_depends(const ExprNode& n, std::size_t slot) {
  switch (n.op) {
    case Op::Number:
    case Op::Pi: return false;
    case Op::Symbol: return n.slot == slot;
    case Op::Neg:
    case Op::Call: return node_depends(*n.lhs, slot);
    default: return node_depends(*n.lhs, slot) || node_depends(*n.rhs, slot);
  }
}

NodePtr subst_node(const NodePtr& n, std::span<const Expr> repl) {
  switch (n->op) {
    case Op::Number:
    case Op::Pi: return n;
    case Op::Symbol: return repl[n->slot].root_ptr();
    case Op::Neg: return make_unary(Op::Neg, subst_node(n->lhs, repl));
    case Op::Call: return make_call(n->func, subst_node(n->lhs, repl));
    default: return make_binary(n->op, subst_node(n->lhs, repl), subst_node(n->rhs, repl));
  }
}

// Constant folding for the derivative builder.
std::optional<double> as_number(const NodePtr& n) {
  if (n->op == Op::Number) return n->number;
  if (n->op == Op::Neg && n->lhs->op == Op::Number) return -n->lhs->number;
  return std::nullopt;
}

NodePtr add(NodePtr a, NodePtr b) {
  auto x = as_number(a), y = as_number(b);
  if (x && y) return make_number(*x + *y);
  if (x && *x == 0.0) return b;
  if (y && *y == 0.0) return a;
  return make_binary(Op::Add, a, b);
}

NodePtr sub(NodePtr a, NodePtr b) {
  auto x = as_number(a), y = as_number(b);
  if (x && y) return make_number(*x - *y);
  if (y && *y == 0.0) return a;
  if (x && *x == 0.0) return make_unary(Op::Neg, b);
  return make_binary(Op::Sub, a, b);
}

NodePtr mul(NodePtr a, NodePtr b) {
  auto x = as_number(a), y = as_number(b);
  if (x && y) return make_number(*x * *y);
  if ((x && *x == 0.0) || (y && *y == 0.0)) return make_number(0.0);
  if (x && *x == 1.0) return b;
  if (y && *y == 1.0) return a;
  return make_binary(Op::Mul, a, b);
}

NodePtr div(NodePtr a, NodePtr b) {
  auto x = as_number(a);
  auto y = as_number(b);
  if (x && *x == 0.0) return make_number(0.0);
  if (y && *y == 1.0) return a;
  return make_binary(Op::Div, a, b);
}

NodePtr neg(NodePtr a) {
  if (auto x = as_number(a)) return make_number(-*x);
  return make_unary(Op::Neg, a);
}

NodePtr deriv(const NodePtr& n, std::size_t slot) {
  switch (n->op) {
    case Op::Number:
    case Op::Pi: return make_number(0.0);
    case Op::Symbol: return make_number(n->slot == slot ? 1.0 : 0.0);
    case Op::Neg: return neg(deriv(n->lhs, slot));
    case Op::Add: return add(deriv(n->lhs, slot), deriv(n->rhs, slot));
    case Op::Sub: return sub(deriv(n->lhs, slot), deriv(n->rhs, slot));
    case Op::Mul: return add(mul(deriv(n->lhs, slot), n->rhs), mul(n->lhs, deriv(n->rhs, slot)));
    case Op::Div: {
      // (a'b - ab') / b^2
      NodePtr num = sub(mul(deriv(n->lhs, slot), n->rhs), mul(n->lhs, deriv(n->rhs, slot)));
      return div(num, make_binary(Op::Pow, n->rhs, make_number(2.0)));
    }
    case Op::Pow: {
      NodePtr da = deriv(n->lhs, slot);
      if (!node_depends(*n->rhs, slot)) {
        // b a^(b-1) a'
        if (auto y = as_number(n->rhs)) {
          return mul(mul(n->rhs, make_binary(Op::Pow, n->lhs, make_number(*y - 1.0))), da);
        }
        return mul(mul(n->rhs, make_binary(Op::Pow, n->lhs, sub(n->rhs, make_number(1.0)))), da);
      }
      // a^b (b' ln a + b a'/a)
      NodePtr db = deriv(n->rhs, slot);
      NodePtr inner = add(mul(db, make_call(Func::Log, n->lhs)), div(mul(n->rhs, da), n->lhs));
      return mul(n, inner);
    }
    case Op::Call: {
      NodePtr da = deriv(n->lhs, slot);
      if (auto x = as_number(da); x && *x == 0.0) return make_number(0.0);
      const NodePtr& a = n->lhs;
      NodePtr outer;
      switch (n->func) {
        case Func::Sin: outer = make_call(Func::Cos, a); break;
        case Func::Cos: outer = neg(make_call(Func::Sin, a)); break;
        case Func::Tan: outer = div(make_number(1.0), make_binary(Op::Pow, make_call(Func::Cos, a), make_number(2.0))); break;
        case Func::Sinh: outer = make_call(Func::Cosh, a); break;
        case Func::Cosh: outer = make_call(Func::Sinh, a); break;
        case Func::Tanh: outer = sub(make_number(1.0), make_binary(Op::Pow, make_call(Func::Tanh, a), make_number(2.0))); break;
        case Func::Exp: outer = n; break;
        case Func::Log: outer = div(make_number(1.0), a); break;
        case Func::Sqrt: outer = div(make_number(0.5), n); break;
        case Func::Abs: outer = div(a, n); break;  // sign(a), undefined at 0
      }
      return mul(outer, da);
    }
  }
  throw ExprError("corrupt expression tree");
}

}  // namespace

Expr Expr::constant(double v, std::shared_ptr<const SymbolList> symbols) { return Expr(make_number(v), std::move(symbols)); }

bool Expr::depends_on(std::size_t slot) const { return root_ && node_depends(*root_, slot); }

bool operator==(const Expr& a, const Expr& b) {
  if (a.empty() || b.empty()) return a.empty() == b.empty();
  return nodes_equal(*a.root_, *a.symbols_, *b.root_, *b.symbols_);
}

bool is_reserved_name(std::string_view name) { return name == "pi" || lookup_function(name).has_value(); }

Expr parse_expr(std::string_view text, std::shared_ptr<const SymbolList> symbols) {
  Parser p(text, *symbols);
  NodePtr root = p.parse();
  return Expr(std::move(root), std::move(symbols));
}

Expr parse_expr(std::string_view text, const SymbolList& symbols) {
  return parse_expr(text, std::make_shared<const SymbolList>(symbols));
}

std::string to_string(const Expr& e) { return e.empty() ? std::string() : node_text(e.root(), e.symbols()); }

double eval(const Expr& e, std::span<const double> values) { return eval_node<RealOps>(e.root(), values, e.symbols()); }

namespace {
template <class T>
std::vector<T> bind_by_name(const Expr& e, const std::map<std::string, T>& bindings) {
  std::vector<T> vals;
  vals.reserve(e.symbols().size());
  for (std::size_t i = 0; i < e.symbols().size(); ++i) {
    auto it = bindings.find(e.symbols()[i]);
    if (it != bindings.end()) {
      vals.push_back(it->second);
    } else if (e.depends_on(i)) {
      throw UnknownIdentifier(e.symbols()[i]);
    } else {
      vals.push_back(T(0.0));
    }
  }
  return vals;
}
}  // namespace

double eval(const Expr& e, const std::map<std::string, double>& bindings) {
  const auto vals = bind_by_name(e, bindings);
  return eval(e, std::span<const double>(vals));
}

Dual eval_dual(const Expr& e, std::span<const Dual> values) {
  std::size_t seeds = 0;
  for (const Dual& v : values) {
    if (v.seeds() == 0) continue;
    if (seeds != 0 && v.seeds() != seeds) throw std::invalid_argument("eval_dual: mixed seed lengths");
    seeds = v.seeds();
  }
  Dual r = eval_node<DualOps>(e.root(), values, e.symbols());
  if (r.seeds() == 0 && seeds != 0) r = Dual(r.value(), std::vector<double>(seeds, 0.0));
  return r;
}

Dual eval_dual(const Expr& e, const std::map<std::string, Dual>& bindings) {
  const auto vals = bind_by_name(e, bindings);
  return eval_dual(e, std::span<const Dual>(vals));
}

Expr substitute(const Expr& e, std::span<const Expr> replacements) {
  if (replacements.size() != e.symbols().size())
    throw std::invalid_argument("substitute: need one replacement per symbol");
  std::shared_ptr<const SymbolList> target;
  for (const Expr& r : replacements) {
    if (r.empty()) throw std::invalid_argument("substitute: empty replacement");
    if (!target)
      target = r.symbols_ptr();
    else if (*target != r.symbols())
      throw std::invalid_argument("substitute: replacements use different symbol lists");
  }
  if (!target) target = std::make_shared<const SymbolList>();
  return Expr(subst_node(e.root_ptr(), replacements), target);
}

Expr differentiate(const Expr& e, std::size_t slot) { return Expr(deriv(e.root_ptr(), slot), e.symbols_ptr()); }

}  // namespace causal
