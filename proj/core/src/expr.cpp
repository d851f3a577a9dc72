#include "parasphere/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <utility>

namespace parasphere {

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_binary(ExprNode::Kind k, NodePtr a, NodePtr b) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->args = {std::move(a), std::move(b)};
  return n;
}

NodePtr make_unary(ExprNode::Kind k, NodePtr a) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->args = {std::move(a)};
  return n;
}

NodePtr make_literal(Complex v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Literal;
  n->value = v;
  return n;
}

struct Token {
  enum class Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
  Kind kind;
  std::size_t pos;
  std::string text;  // Number/Ident payload
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
    std::size_t start = i_;
    if (i_ >= src_.size()) {
      tok_ = {Token::Kind::End, start, ""};
      return;
    }
    char c = src_[i_];
    auto single = [&](Token::Kind k) {
      ++i_;
      tok_ = {k, start, std::string(1, c)};
    };
    switch (c) {
      case '+': return single(Token::Kind::Plus);
      case '-': return single(Token::Kind::Minus);
      case '*': return single(Token::Kind::Star);
      case '/': return single(Token::Kind::Slash);
      case '^': return single(Token::Kind::Caret);
      case '(': return single(Token::Kind::LParen);
      case ')': return single(Token::Kind::RParen);
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
      std::size_t j = i_;
      while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
      if (j < src_.size() && src_[j] == '.') {
        ++j;
        while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
      }
      if (j < src_.size() && (src_[j] == 'e' || src_[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
        if (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) {
          while (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) ++k;
          j = k;
        }
      }
      tok_ = {Token::Kind::Number, start, std::string(src_.substr(i_, j - i_))};
      i_ = j;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'))
        ++j;
      tok_ = {Token::Kind::Ident, start, std::string(src_.substr(i_, j - i_))};
      i_ = j;
      return;
    }
    throw SyntaxError("unexpected character '" + std::string(1, c) + "' at offset " +
                          std::to_string(start),
                      start, "token");
  }

  std::string_view src_;
  std::size_t i_ = 0;
  Token tok_{Token::Kind::End, 0, ""};
};

std::optional<UnaryFn> lookup_function(std::string_view name) {
  if (name == "exp") return UnaryFn::Exp;
  if (name == "log") return UnaryFn::Log;
  if (name == "sin") return UnaryFn::Sin;
  if (name == "cos") return UnaryFn::Cos;
  if (name == "sinh") return UnaryFn::Sinh;
  if (name == "cosh") return UnaryFn::Cosh;
  if (name == "sqrt") return UnaryFn::Sqrt;
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::string_view src, int arity) : lex_(src), arity_(arity) {}

  NodePtr parse_all() {
    NodePtr e = parse_sum();
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::End)
      throw SyntaxError("unexpected trailing input at offset " + std::to_string(t.pos), t.pos,
                        "end of input or binary operator");
    return e;
  }

 private:
  [[noreturn]] void fail(const Token& t, const std::string& expected) {
    throw SyntaxError("unexpected token '" + (t.text.empty() ? "<end>" : t.text) +
                          "' at offset " + std::to_string(t.pos) + ", expected " + expected,
                      t.pos, expected);
  }

  void expect(Token::Kind k, const char* what) {
    const Token& t = lex_.peek();
    if (t.kind != k) fail(t, what);
    lex_.next();
  }

  NodePtr parse_sum() {
    NodePtr e = parse_term();
    for (;;) {
      Token::Kind k = lex_.peek().kind;
      if (k == Token::Kind::Plus || k == Token::Kind::Minus) {
        lex_.next();
        NodePtr rhs = parse_term();
        e = make_binary(k == Token::Kind::Plus ? ExprNode::Kind::Add : ExprNode::Kind::Sub,
                        std::move(e), std::move(rhs));
      } else {
        return e;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr e = parse_unary();
    for (;;) {
      Token::Kind k = lex_.peek().kind;
      if (k == Token::Kind::Star || k == Token::Kind::Slash) {
        lex_.next();
        NodePtr rhs = parse_unary();
        e = make_binary(k == Token::Kind::Star ? ExprNode::Kind::Mul : ExprNode::Kind::Div,
                        std::move(e), std::move(rhs));
      } else {
        return e;
      }
    }
  }

  NodePtr parse_unary() {
    if (lex_.peek().kind == Token::Kind::Minus) {
      lex_.next();
      return make_unary(ExprNode::Kind::Neg, parse_unary());
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    while (lex_.peek().kind == Token::Kind::Caret) {
      lex_.next();
      int k = parse_exponent();
      auto n = std::make_shared<ExprNode>();
      n->kind = ExprNode::Kind::Pow;
      n->args = {std::move(base)};
      n->exponent = k;
      base = std::move(n);
    }
    return base;
  }

  int parse_exponent() {
    bool paren = false;
    if (lex_.peek().kind == Token::Kind::LParen) {
      paren = true;
      lex_.next();
    }
    bool neg = false;
    if (lex_.peek().kind == Token::Kind::Minus) {
      neg = true;
      lex_.next();
    }
    Token t = lex_.peek();
    if (t.kind != Token::Kind::Number) throw NonIntegerExponent(t.pos);
    for (char c : t.text)
      if (!std::isdigit(static_cast<unsigned char>(c))) throw NonIntegerExponent(t.pos);
    lex_.next();
    long long v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{} || v > 1000000)
      throw SyntaxError("integer exponent out of range at offset " + std::to_string(t.pos),
                        t.pos, "integer exponent with |k| <= 1000000");
    if (paren) expect(Token::Kind::RParen, "')'");
    return neg ? -static_cast<int>(v) : static_cast<int>(v);
  }

  NodePtr parse_primary() {
    Token t = lex_.peek();
    switch (t.kind) {
      case Token::Kind::Number: {
        lex_.next();
        double v = std::strtod(t.text.c_str(), nullptr);
        return make_literal(Complex(v, 0.0));
      }
      case Token::Kind::LParen: {
        lex_.next();
        NodePtr e = parse_sum();
        expect(Token::Kind::RParen, "')'");
        return e;
      }
      case Token::Kind::Ident: {
        lex_.next();
        if (t.text == "i") return make_literal(Complex(0.0, 1.0));
        if (auto fn = lookup_function(t.text)) {
          expect(Token::Kind::LParen, "'(' after function name");
          NodePtr arg = parse_sum();
          expect(Token::Kind::RParen, "')'");
          auto n = std::make_shared<ExprNode>();
          n->kind = ExprNode::Kind::Call;
          n->fn = *fn;
          n->args = {std::move(arg)};
          return n;
        }
        if (t.text.size() > 1 && t.text[0] == 'z') {
          bool digits = true;
          for (std::size_t k = 1; k < t.text.size(); ++k)
            if (!std::isdigit(static_cast<unsigned char>(t.text[k]))) digits = false;
          if (digits) {
            long long idx = 0;
            std::from_chars(t.text.data() + 1, t.text.data() + t.text.size(), idx);
            if (idx < 1 || idx > arity_)
              throw VariableOutOfRange(static_cast<int>(idx), arity_, t.pos);
            auto n = std::make_shared<ExprNode>();
            n->kind = ExprNode::Kind::Var;
            n->var = static_cast<int>(idx - 1);
            return n;
          }
        }
        throw UnknownIdentifier(t.text, t.pos);
      }
      default:
        fail(t, "number, variable, function call, or '('");
    }
  }

  Lexer lex_;
  int arity_;
};

int precedence(const ExprNode& n) {
  switch (n.kind) {
    case ExprNode::Kind::Add:
    case ExprNode::Kind::Sub: return 1;
    case ExprNode::Kind::Mul:
    case ExprNode::Kind::Div: return 2;
    case ExprNode::Kind::Neg: return 3;
    case ExprNode::Kind::Pow: return 4;
    default: return 5;
  }
}

std::string format_double(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

void print_node(const ExprNode& n, std::string& out) {
  auto child = [&](const ExprNode& c, int min_prec) {
    bool paren = precedence(c) < min_prec;
    if (paren) out += '(';
    print_node(c, out);
    if (paren) out += ')';
  };
  switch (n.kind) {
    case ExprNode::Kind::Add:
      child(*n.args[0], 1);
      out += " + ";
      child(*n.args[1], 2);
      break;
    case ExprNode::Kind::Sub:
      child(*n.args[0], 1);
      out += " - ";
      child(*n.args[1], 2);
      break;
    case ExprNode::Kind::Mul:
      child(*n.args[0], 2);
      out += "*";
      child(*n.args[1], 3);
      break;
    case ExprNode::Kind::Div:
      child(*n.args[0], 2);
      out += "/";
      child(*n.args[1], 3);
      break;
    case ExprNode::Kind::Neg:
      out += "-";
      child(*n.args[0], 3);
      break;
    case ExprNode::Kind::Pow:
      child(*n.args[0], 5);
      out += "^";
      if (n.exponent < 0) {
        out += "(" + std::to_string(n.exponent) + ")";
      } else {
        out += std::to_string(n.exponent);
      }
      break;
    case ExprNode::Kind::Var:
      out += "z" + std::to_string(n.var + 1);
      break;
    case ExprNode::Kind::Literal:
      if (n.value.imag() == 0.0) {
        out += format_double(n.value.real());
      } else if (n.value.real() == 0.0 && n.value.imag() == 1.0) {
        out += "i";
      } else {
        out += "(" + format_double(n.value.real()) + " + " + format_double(n.value.imag()) +
               "*i)";
      }
      break;
    case ExprNode::Kind::Call:
      out += to_string(n.fn);
      out += "(";
      print_node(*n.args[0], out);
      out += ")";
      break;
  }
}

Complex eval_node(const ExprNode& n, std::span<const Complex> pt) {
  switch (n.kind) {
    case ExprNode::Kind::Add: return eval_node(*n.args[0], pt) + eval_node(*n.args[1], pt);
    case ExprNode::Kind::Sub: return eval_node(*n.args[0], pt) - eval_node(*n.args[1], pt);
    case ExprNode::Kind::Mul: return eval_node(*n.args[0], pt) * eval_node(*n.args[1], pt);
    case ExprNode::Kind::Div: {
      Complex a = eval_node(*n.args[0], pt);
      Complex b = eval_node(*n.args[1], pt);
      if (b == Complex{}) throw DomainError("division by zero", pretty_print(n));
      return a / b;
    }
    case ExprNode::Kind::Neg: return -eval_node(*n.args[0], pt);
    case ExprNode::Kind::Pow: {
      Complex b = eval_node(*n.args[0], pt);
      int k = n.exponent;
      if (k == 0) return Complex(1.0, 0.0);
      if (b == Complex{} && k < 0)
        throw DomainError("zero raised to a negative power", pretty_print(n));
      Complex r(1.0, 0.0);
      Complex base = k > 0 ? b : 1.0 / b;
      for (int m = std::abs(k); m > 0; m >>= 1) {
        if (m & 1) r *= base;
        if (m > 1) base *= base;
      }
      return r;
    }
    case ExprNode::Kind::Var: return pt[static_cast<std::size_t>(n.var)];
    case ExprNode::Kind::Literal: return n.value;
    case ExprNode::Kind::Call: {
      Complex a = eval_node(*n.args[0], pt);
      switch (n.fn) {
        case UnaryFn::Exp: return std::exp(a);
        case UnaryFn::Log:
          if (a == Complex{}) throw DomainError("log of zero", pretty_print(n));
          return std::log(a);
        case UnaryFn::Sin: return std::sin(a);
        case UnaryFn::Cos: return std::cos(a);
        case UnaryFn::Sinh: return std::sinh(a);
        case UnaryFn::Cosh: return std::cosh(a);
        case UnaryFn::Sqrt: return std::sqrt(a);
      }
      throw Error("unreachable");
    }
  }
  throw Error("unreachable");
}

bool equal_node(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case ExprNode::Kind::Var:
      if (a.var != b.var) return false;
      break;
    case ExprNode::Kind::Literal:
      if (a.value != b.value) return false;
      break;
    case ExprNode::Kind::Pow:
      if (a.exponent != b.exponent) return false;
      break;
    case ExprNode::Kind::Call:
      if (a.fn != b.fn) return false;
      break;
    default: break;
  }
  for (std::size_t k = 0; k < a.args.size(); ++k)
    if (!equal_node(*a.args[k], *b.args[k])) return false;
  return true;
}

}  // namespace

std::string_view to_string(UnaryFn f) {
  switch (f) {
    case UnaryFn::Exp: return "exp";
    case UnaryFn::Log: return "log";
    case UnaryFn::Sin: return "sin";
    case UnaryFn::Cos: return "cos";
    case UnaryFn::Sinh: return "sinh";
    case UnaryFn::Cosh: return "cosh";
    case UnaryFn::Sqrt: return "sqrt";
  }
  return "?";
}

Expr parse(std::string_view source, int n) {
  if (n < 1) throw ArityError("arity must be >= 1, got " + std::to_string(n));
  Parser p(source, n);
  return Expr::from_root(p.parse_all(), n);
}

Complex eval_complex(const Expr& e, std::span<const Complex> point) {
  if (static_cast<int>(point.size()) != e.arity())
    throw ArityError("point has " + std::to_string(point.size()) +
                     " coordinates, expression has arity " + std::to_string(e.arity()));
  return eval_node(e.root(), point);
}

std::string pretty_print(const ExprNode& node) {
  std::string out;
  print_node(node, out);
  return out;
}

std::string pretty_print(const Expr& e) { return pretty_print(e.root()); }

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.arity() != b.arity()) return false;
  if (a.empty() || b.empty()) return a.empty() == b.empty();
  return equal_node(a.root(), b.root());
}

}  // namespace parasphere
