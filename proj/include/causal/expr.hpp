#pragma once

#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "causal/dual.hpp"

namespace causal {

class ExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input; `offset` is the byte offset of the offending token.
class ParseError : public ExprError {
 public:
  ParseError(std::size_t offset, const std::string& what);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifier : public ExprError {
 public:
  explicit UnknownIdentifier(std::string name);
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// log of non-positive, sqrt of negative, division by zero, non-real power.
class DomainError : public ExprError {
 public:
  explicit DomainError(std::string subexpr, const std::string& what);
  const std::string& subexpression() const { return subexpr_; }

 private:
  std::string subexpr_;
};

enum class Op { Number, Pi, Symbol, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Sin, Cos, Tan, Sinh, Cosh, Tanh, Exp, Log, Sqrt, Abs };

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  Op op = Op::Number;
  double number = 0.0;    // Op::Number
  std::size_t slot = 0;   // Op::Symbol
  Func func = Func::Sin;  // Op::Call
  NodePtr lhs;            // unary operand / call argument / left operand
  NodePtr rhs;
};

using SymbolList = std::vector<std::string>;

/// Immutable scalar expression over an ordered symbol list.
///
/// Symbols are resolved to slots at parse time, so evaluation takes a value
/// vector aligned with symbols(). Copies share the tree.
class Expr {
 public:
  Expr() = default;
  Expr(NodePtr root, std::shared_ptr<const SymbolList> symbols)
      : root_(std::move(root)), symbols_(std::move(symbols)) {}

  static Expr constant(double v, std::shared_ptr<const SymbolList> symbols);

  const ExprNode& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }
  const SymbolList& symbols() const { return *symbols_; }
  const std::shared_ptr<const SymbolList>& symbols_ptr() const { return symbols_; }
  bool empty() const { return !root_; }

  /// True when the tree references symbol `slot`.
  bool depends_on(std::size_t slot) const;

  /// Structural equality of trees (symbols compared by name).
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  NodePtr root_;
  std::shared_ptr<const SymbolList> symbols_;
};

Expr parse_expr(std::string_view text, std::shared_ptr<const SymbolList> symbols);
Expr parse_expr(std::string_view text, const SymbolList& symbols);

/// Round-trippable text form: parse_expr(to_string(e)) == e.
std::string to_string(const Expr& e);

double eval(const Expr& e, std::span<const double> values);
double eval(const Expr& e, const std::map<std::string, double>& bindings);

Dual eval_dual(const Expr& e, std::span<const Dual> values);
Dual eval_dual(const Expr& e, const std::map<std::string, Dual>& bindings);

/// Replaces symbol i by replacements[i]; all replacements must share one
/// symbol list, which becomes the result's.
Expr substitute(const Expr& e, std::span<const Expr> replacements);

/// Symbolic partial derivative w.r.t. symbol `slot` with constant folding
/// only (no simplification).
Expr differentiate(const Expr& e, std::size_t slot);

/// Symbol names that are reserved by the grammar.
bool is_reserved_name(std::string_view name);

}  // namespace causal
