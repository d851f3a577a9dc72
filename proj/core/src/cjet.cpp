#include "parasphere/cjet.hpp"

#include <cmath>
#include <stdexcept>

namespace parasphere {

namespace {

void check_same_arity(const CJet& a, const CJet& b) {
  if (a.arity() != b.arity())
    throw ArityError("jet arity mismatch: " + std::to_string(a.arity()) + " vs " +
                     std::to_string(b.arity()));
}

Complex ipow(Complex b, int k) {
  Complex r(1.0, 0.0);
  for (int m = k; m > 0; m >>= 1) {
    if (m & 1) r *= b;
    if (m > 1) b *= b;
  }
  return r;
}

/// Scalar derivative chain (f, f', f'', f''') of a unary primitive at v.
std::array<Complex, 4> derivative_chain(UnaryFn f, Complex v) {
  switch (f) {
    case UnaryFn::Exp: {
      Complex e = std::exp(v);
      return {e, e, e, e};
    }
    case UnaryFn::Log: {
      if (v == Complex{}) throw DomainError("log of zero", "log(...)");
      Complex inv = 1.0 / v;
      return {std::log(v), inv, -inv * inv, 2.0 * inv * inv * inv};
    }
    case UnaryFn::Sin: {
      Complex s = std::sin(v), c = std::cos(v);
      return {s, c, -s, -c};
    }
    case UnaryFn::Cos: {
      Complex s = std::sin(v), c = std::cos(v);
      return {c, -s, -c, s};
    }
    case UnaryFn::Sinh: {
      Complex s = std::sinh(v), c = std::cosh(v);
      return {s, c, s, c};
    }
    case UnaryFn::Cosh: {
      Complex s = std::sinh(v), c = std::cosh(v);
      return {c, s, c, s};
    }
    case UnaryFn::Sqrt: {
      if (v == Complex{})
        throw DomainError("sqrt branch point (derivatives singular at 0)", "sqrt(...)");
      Complex s = std::sqrt(v);
      Complex d1 = 0.5 / s;
      Complex d2 = -0.25 / (s * v);
      Complex d3 = 0.375 / (s * v * v);
      return {s, d1, d2, d3};
    }
  }
  throw Error("unreachable");
}

/// Composition f(g) through order 3 given the scalar chain of f at g.val().
CJet compose(const CJet& g, const std::array<Complex, 4>& c) {
  int n = g.arity();
  CJet r(n);
  r.val() = c[0];
  for (int i = 0; i < n; ++i) r.grad(i) = c[1] * g.grad(i);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i)
      r.hess(i, j) = c[1] * g.hess(i, j) + c[2] * g.grad(i) * g.grad(j);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j <= k; ++j)
      for (int i = 0; i <= j; ++i)
        r.third(i, j, k) = c[1] * g.third(i, j, k) +
                           c[2] * (g.grad(i) * g.hess(j, k) + g.grad(j) * g.hess(i, k) +
                                   g.grad(k) * g.hess(i, j)) +
                           c[3] * g.grad(i) * g.grad(j) * g.grad(k);
  return r;
}

CJet reciprocal(const CJet& b) {
  if (b.val() == Complex{}) throw DomainError("division by zero", "1/(...)");
  Complex inv = 1.0 / b.val();
  Complex inv2 = inv * inv;
  return compose(b, {inv, -inv2, 2.0 * inv2 * inv, -6.0 * inv2 * inv2});
}

CJet jet_node(const ExprNode& node, std::span<const Complex> pt) {
  int n = static_cast<int>(pt.size());
  switch (node.kind) {
    case ExprNode::Kind::Add:
      return jet_node(*node.args[0], pt) + jet_node(*node.args[1], pt);
    case ExprNode::Kind::Sub:
      return jet_node(*node.args[0], pt) - jet_node(*node.args[1], pt);
    case ExprNode::Kind::Mul:
      return jet_node(*node.args[0], pt) * jet_node(*node.args[1], pt);
    case ExprNode::Kind::Div: {
      CJet a = jet_node(*node.args[0], pt);
      CJet b = jet_node(*node.args[1], pt);
      if (b.val() == Complex{}) throw DomainError("division by zero", pretty_print(node));
      return a * reciprocal(b);
    }
    case ExprNode::Kind::Neg: return -jet_node(*node.args[0], pt);
    case ExprNode::Kind::Pow: {
      CJet a = jet_node(*node.args[0], pt);
      if (a.val() == Complex{} && node.exponent < 0)
        throw DomainError("zero raised to a negative power", pretty_print(node));
      return pow_int(a, node.exponent);
    }
    case ExprNode::Kind::Var: return CJet::variable(n, node.var, pt[node.var]);
    case ExprNode::Kind::Literal: return CJet::constant(n, node.value);
    case ExprNode::Kind::Call: {
      CJet a = jet_node(*node.args[0], pt);
      try {
        return apply(node.fn, a);
      } catch (const DomainError& e) {
        throw DomainError(e.what(), pretty_print(node));
      }
    }
  }
  throw Error("unreachable");
}

}  // namespace

CJet operator+(const CJet& a, const CJet& b) {
  check_same_arity(a, b);
  CJet r(a.n_);
  r.val_ = a.val_ + b.val_;
  for (std::size_t i = 0; i < a.grad_.size(); ++i) r.grad_[i] = a.grad_[i] + b.grad_[i];
  for (std::size_t i = 0; i < a.hess_.size(); ++i) r.hess_[i] = a.hess_[i] + b.hess_[i];
  auto ra = a.third_.packed(), rb = b.third_.packed();
  auto rr = r.third_.packed();
  for (std::size_t i = 0; i < rr.size(); ++i) rr[i] = ra[i] + rb[i];
  return r;
}

CJet operator-(const CJet& a, const CJet& b) {
  check_same_arity(a, b);
  CJet r(a.n_);
  r.val_ = a.val_ - b.val_;
  for (std::size_t i = 0; i < a.grad_.size(); ++i) r.grad_[i] = a.grad_[i] - b.grad_[i];
  for (std::size_t i = 0; i < a.hess_.size(); ++i) r.hess_[i] = a.hess_[i] - b.hess_[i];
  auto ra = a.third_.packed(), rb = b.third_.packed();
  auto rr = r.third_.packed();
  for (std::size_t i = 0; i < rr.size(); ++i) rr[i] = ra[i] - rb[i];
  return r;
}

CJet operator-(const CJet& a) {
  CJet r(a.n_);
  r.val_ = -a.val_;
  for (std::size_t i = 0; i < a.grad_.size(); ++i) r.grad_[i] = -a.grad_[i];
  for (std::size_t i = 0; i < a.hess_.size(); ++i) r.hess_[i] = -a.hess_[i];
  auto ra = a.third_.packed();
  auto rr = r.third_.packed();
  for (std::size_t i = 0; i < rr.size(); ++i) rr[i] = -ra[i];
  return r;
}

CJet operator*(const CJet& a, const CJet& b) {
  check_same_arity(a, b);
  int n = a.n_;
  CJet r(n);
  r.val_ = a.val_ * b.val_;
  for (int i = 0; i < n; ++i) r.grad(i) = a.grad(i) * b.val_ + a.val_ * b.grad(i);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i)
      r.hess(i, j) = a.hess(i, j) * b.val_ + a.grad(i) * b.grad(j) + a.grad(j) * b.grad(i) +
                     a.val_ * b.hess(i, j);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j <= k; ++j)
      for (int i = 0; i <= j; ++i)
        r.third(i, j, k) =
            a.third(i, j, k) * b.val_ + a.val_ * b.third(i, j, k) +
            a.hess(i, j) * b.grad(k) + a.hess(i, k) * b.grad(j) + a.hess(j, k) * b.grad(i) +
            a.grad(i) * b.hess(j, k) + a.grad(j) * b.hess(i, k) + a.grad(k) * b.hess(i, j);
  return r;
}

CJet operator/(const CJet& a, const CJet& b) {
  check_same_arity(a, b);
  return a * reciprocal(b);
}

CJet pow_int(const CJet& a, int k) {
  int n = a.arity();
  if (k == 0) return CJet::constant(n, Complex(1.0, 0.0));
  if (k < 0) return reciprocal(pow_int(a, -k));
  Complex v = a.val();
  auto coeff_pow = [&](double c, int e) -> Complex {
    if (c == 0.0) return Complex{};
    if (e < 0 && v == Complex{})
      throw DomainError("zero raised to a negative power", "(...)^" + std::to_string(k));
    return (e >= 0) ? c * ipow(v, e) : c / ipow(v, -e);
  };
  double dk = static_cast<double>(k);
  std::array<Complex, 4> chain = {
      ipow(v, k),
      coeff_pow(dk, k - 1),
      coeff_pow(dk * (k - 1), k - 2),
      coeff_pow(dk * (k - 1) * (k - 2), k - 3),
  };
  return compose(a, chain);
}

CJet apply(UnaryFn f, const CJet& a) { return compose(a, derivative_chain(f, a.val())); }

CJet jet_eval(const Expr& e, std::span<const Complex> point) {
  if (static_cast<int>(point.size()) != e.arity())
    throw ArityError("point has " + std::to_string(point.size()) +
                     " coordinates, expression has arity " + std::to_string(e.arity()));
  return jet_node(e.root(), point);
}

CJet fd_oracle(const Expr& e, std::span<const Complex> point, double h) {
  if (!(h > 0.0)) throw Error("finite-difference step must be positive");
  int n = e.arity();
  if (static_cast<int>(point.size()) != n)
    throw ArityError("point arity mismatch in fd_oracle");

  CJet out(n);
  std::vector<Complex> zp(point.begin(), point.end());
  std::vector<Complex> zm(point.begin(), point.end());
  out.val() = eval_complex(e, point);

  // Accumulators for the third tensor: each sorted triple receives one
  // estimate per distinct axis placement (3 for distinct indices, fewer on
  // the diagonals).
  SymTensor3 acc(n);
  std::vector<int> cnt(SymTensor3::packed_size(n), 0);

  for (int k = 0; k < n; ++k) {
    double xk = point[k].real();
    zp[k] = Complex(xk + h, point[k].imag());
    zm[k] = Complex(xk - h, point[k].imag());
    double span = zp[k].real() - zm[k].real();  // actual representable step

    out.grad(k) = (eval_complex(e, zp) - eval_complex(e, zm)) / span;

    CJet jp = jet_eval(e, zp);
    CJet jm = jet_eval(e, zm);
    for (int i = 0; i < n; ++i) {
      Complex est = (jp.grad(i) - jm.grad(i)) / span;
      if (i <= k)
        out.hess(i, k) = (i == k) ? est : 0.5 * (est + out.hess(i, k));
      else
        out.hess(k, i) = est;  // first of the two estimates; averaged when i <= k comes up
    }
    for (int j = 0; j < n; ++j)
      for (int i = 0; i <= j; ++i) {
        acc(i, j, k) += (jp.hess(i, j) - jm.hess(i, j)) / span;
        ++cnt[acc.index(i, j, k)];
      }

    zp[k] = point[k];
    zm[k] = point[k];
  }

  for (int k = 0; k < n; ++k)
    for (int j = 0; j <= k; ++j)
      for (int i = 0; i <= j; ++i)
        out.third(i, j, k) = acc(i, j, k) / static_cast<double>(cnt[acc.index(i, j, k)]);
  return out;
}

}  // namespace parasphere
