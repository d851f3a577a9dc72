#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "parasphere/expr.hpp"

namespace parasphere {

/// Fully symmetric complex rank-3 tensor, stored once per sorted index
/// triple i <= j <= k. Accessors accept indices in any order, so the
/// six-fold permutation symmetry holds exactly by construction.
class SymTensor3 {
 public:
  SymTensor3() = default;
  explicit SymTensor3(int n) : n_(n), a_(packed_size(n)) {}

  int dim() const { return n_; }
  Complex operator()(int i, int j, int k) const { return a_[index(i, j, k)]; }
  Complex& operator()(int i, int j, int k) { return a_[index(i, j, k)]; }

  std::span<const Complex> packed() const { return a_; }
  std::span<Complex> packed() { return a_; }

  static std::size_t packed_size(int n) {
    return static_cast<std::size_t>(n) * (n + 1) * (n + 2) / 6;
  }

  std::size_t index(int i, int j, int k) const {
    if (i > j) std::swap(i, j);
    if (j > k) std::swap(j, k);
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(k) * (k + 1) * (k + 2) / 6 +
           static_cast<std::size_t>(j) * (j + 1) / 2 + static_cast<std::size_t>(i);
  }

 private:
  int n_ = 0;
  std::vector<Complex> a_;
};

/// Truncated complex Taylor expansion of a holomorphic function at a point:
/// value, gradient, Hessian, and third derivatives. The Hessian is stored as
/// a packed upper triangle and the third-order tensor per sorted triple, so
/// both symmetries are structural.
class CJet {
 public:
  CJet() = default;
  explicit CJet(int n)
      : n_(n), grad_(static_cast<std::size_t>(n)),
        hess_(static_cast<std::size_t>(n) * (n + 1) / 2), third_(n) {}

  static CJet constant(int n, Complex c) {
    CJet j(n);
    j.val_ = c;
    return j;
  }

  /// Seed jet of the coordinate function z_k (0-based) at the given value.
  static CJet variable(int n, int k, Complex value) {
    CJet j(n);
    j.val_ = value;
    j.grad_[static_cast<std::size_t>(k)] = Complex(1.0, 0.0);
    return j;
  }

  int arity() const { return n_; }

  Complex val() const { return val_; }
  Complex& val() { return val_; }

  Complex grad(int i) const { return grad_[static_cast<std::size_t>(i)]; }
  Complex& grad(int i) { return grad_[static_cast<std::size_t>(i)]; }

  Complex hess(int i, int j) const { return hess_[hess_index(i, j)]; }
  Complex& hess(int i, int j) { return hess_[hess_index(i, j)]; }

  Complex third(int i, int j, int k) const { return third_(i, j, k); }
  Complex& third(int i, int j, int k) { return third_(i, j, k); }
  const SymTensor3& third_tensor() const { return third_; }

  friend CJet operator+(const CJet& a, const CJet& b);
  friend CJet operator-(const CJet& a, const CJet& b);
  friend CJet operator-(const CJet& a);
  friend CJet operator*(const CJet& a, const CJet& b);
  friend CJet operator/(const CJet& a, const CJet& b);

  /// Integer power (negative exponents require a nonzero value).
  friend CJet pow_int(const CJet& a, int k);
  /// Apply one of the whitelisted unary functions.
  friend CJet apply(UnaryFn f, const CJet& a);

 private:
  std::size_t hess_index(int i, int j) const {
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(j) * (j + 1) / 2 + static_cast<std::size_t>(i);
  }

  int n_ = 0;
  Complex val_{};
  std::vector<Complex> grad_;
  std::vector<Complex> hess_;  // packed upper triangle, i <= j
  SymTensor3 third_;
};

/// Derivatives of F up to order 3 by propagating truncated Taylor
/// arithmetic through the AST. Exact to roundoff.
CJet jet_eval(const Expr& e, std::span<const Complex> point);

/// Finite-difference oracle for jet_eval: the gradient comes from central
/// differences of plain values, the Hessian from central differences of
/// one-order-lower jet gradients, the third tensor from jet Hessians.
/// Each order is therefore checked through a different arithmetic path
/// than the one that produces it. Error is O(h^2) per component.
CJet fd_oracle(const Expr& e, std::span<const Complex> point, double h);

}  // namespace parasphere
