#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "parasphere/errors.hpp"

namespace parasphere {

using Complex = std::complex<double>;

/// Whitelisted unary functions. All of them are holomorphic on their domains,
/// so any expression built from these nodes is holomorphic by construction.
enum class UnaryFn { Exp, Log, Sin, Cos, Sinh, Cosh, Sqrt };

std::string_view to_string(UnaryFn f);

struct ExprNode {
  enum class Kind { Add, Sub, Mul, Div, Neg, Pow, Var, Literal, Call };

  Kind kind;
  std::vector<std::shared_ptr<const ExprNode>> args;  // 2 for binary ops, 1 for Neg/Pow/Call
  int var = 0;         // Var: 0-based variable index
  Complex value{};     // Literal
  int exponent = 0;    // Pow: integer exponent (may be negative)
  UnaryFn fn{};        // Call
};

/// Parsed expression in n complex variables z1..zn. Immutable after
/// construction; cheap to copy and safe to share across threads.
class Expr {
 public:
  Expr() = default;

  int arity() const { return arity_; }
  bool empty() const { return root_ == nullptr; }
  const ExprNode& root() const { return *root_; }
  std::shared_ptr<const ExprNode> root_ptr() const { return root_; }

  static Expr from_root(std::shared_ptr<const ExprNode> root, int arity) {
    Expr e;
    e.root_ = std::move(root);
    e.arity_ = arity;
    return e;
  }

 private:
  std::shared_ptr<const ExprNode> root_;
  int arity_ = 0;
};

/// Parse expression text into an AST over variables z1..zn.
///
/// Grammar, precedence from lowest to highest:
///   addition/subtraction  a+b, a-b        (left associative)
///   multiplication/division  a*b, a/b     (left associative)
///   unary minus  -a
///   integer power  a^k, a^-k, a^(-k)      (exponent must be an integer literal)
///   function application  f(a)            (exp, log, sin, cos, sinh, cosh, sqrt)
///   parenthesization  (a)
/// The imaginary unit is spelled `i`; numeric literals are decimal reals.
///
/// Throws SyntaxError, UnknownIdentifier, VariableOutOfRange, NonIntegerExponent.
Expr parse(std::string_view source, int n);

/// Evaluate at a point, principal branches for log and sqrt.
/// Throws DomainError when a primitive is evaluated at a singularity.
Complex eval_complex(const Expr& e, std::span<const Complex> point);

/// Render the AST back to parseable text (minimal parentheses).
std::string pretty_print(const Expr& e);
std::string pretty_print(const ExprNode& node);

/// Node-by-node structural equality (kinds, indices, exponents, literal values).
bool structurally_equal(const Expr& a, const Expr& b);

}  // namespace parasphere
