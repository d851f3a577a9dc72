#include "parasphere/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace parasphere {

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

Nondegeneracy gate(const PointData& p) {
  Nondegeneracy nd = nondegeneracy(p.tau);
  if (!nd.ok) throw DegenerateMetric(nd.min_sv, nd.threshold);
  return nd;
}

/// Complex representation of the chart-frame basis vector with index a:
/// d/dx^a for a < n, d/du^(a-n) for a >= n.
Eigen::VectorXcd basis_rep(int n, int a) {
  Eigen::VectorXcd zeta = Eigen::VectorXcd::Zero(n);
  if (a < n)
    zeta(a) = Complex(1.0, 0.0);
  else
    zeta(a - n) = Complex(0.0, 1.0);
  return zeta;
}

std::vector<Complex> to_std(const Eigen::VectorXcd& z) {
  return std::vector<Complex>(z.data(), z.data() + z.size());
}

/// f and the full immersion at a chart point, from one jet evaluation.
PointData point_from_jet(const Eigen::VectorXcd& z, const CJet& jet) {
  int n = static_cast<int>(z.size());
  PointData p;
  p.z = z;
  p.w.resize(n);
  p.tau.resize(n, n);
  for (int i = 0; i < n; ++i) {
    p.w(i) = jet.grad(i);
    for (int j = 0; j < n; ++j) p.tau(i, j) = jet.hess(i, j);
  }
  p.sigma = jet.third_tensor();
  p.x = p.z.real();
  p.u = p.z.imag();
  p.y = p.w.real();
  p.v = p.w.imag();
  p.f = 2.0 * jet.val().imag() - 2.0 * p.y.dot(p.u);
  p.imm.resize(2 * n + 1);
  p.imm << p.x, p.y, p.f;
  return p;
}

struct AffineStencil {
  // Second derivatives of a vector-valued function of the affine
  // coordinates by central differences; each stencil evaluation solves the
  // chart inversion first.
  const Expr& e;
  const PointData& base;
  double h;
  NewtonOptions newton;

  Eigen::VectorXd eval_imm(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys) const {
    Eigen::VectorXcd zs = invert_chart(e, xs, ys, base.z, newton);
    CJet jet = jet_eval(e, to_std(zs));
    return point_from_jet(zs, jet).imm;
  }

  /// hessians[c](a, b) = d^2 imm_c / dq_a dq_b over q = (x, y).
  std::vector<Eigen::MatrixXd> component_hessians() const {
    int n = base.n();
    int m = 2 * n;
    auto shift = [&](int a, double s, Eigen::VectorXd& xs, Eigen::VectorXd& ys) {
      if (a < n)
        xs(a) += s;
      else
        ys(a - n) += s;
    };
    auto at = [&](int a, double sa, int b, double sb) {
      Eigen::VectorXd xs = base.x, ys = base.y;
      shift(a, sa, xs, ys);
      if (b >= 0) shift(b, sb, xs, ys);
      return eval_imm(xs, ys);
    };

    std::vector<Eigen::MatrixXd> hess(static_cast<std::size_t>(m + 1),
                                      Eigen::MatrixXd::Zero(m, m));
    const Eigen::VectorXd f0 = base.imm;
    for (int a = 0; a < m; ++a) {
      Eigen::VectorXd fp = at(a, h, -1, 0), fm = at(a, -h, -1, 0);
      Eigen::VectorXd d2 = (fp - 2.0 * f0 + fm) / (h * h);
      for (int c = 0; c <= m; ++c) hess[static_cast<std::size_t>(c)](a, a) = d2(c);
    }
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) {
        Eigen::VectorXd fpp = at(a, h, b, h), fpm = at(a, h, b, -h);
        Eigen::VectorXd fmp = at(a, -h, b, h), fmm = at(a, -h, b, -h);
        Eigen::VectorXd d2 = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
        for (int c = 0; c <= m; ++c) {
          hess[static_cast<std::size_t>(c)](a, b) = d2(c);
          hess[static_cast<std::size_t>(c)](b, a) = d2(c);
        }
      }
    return hess;
  }
};

}  // namespace

double ChartIdentityResiduals::max() const {
  return std::max({r1, r2, r3, r4, r5, r6});
}

PointData eval_point(const Expr& e, const Eigen::VectorXcd& z) {
  if (static_cast<int>(z.size()) != e.arity())
    throw ArityError("point has " + std::to_string(z.size()) +
                     " coordinates, expression has arity " + std::to_string(e.arity()));
  CJet jet = jet_eval(e, to_std(z));
  return point_from_jet(z, jet);
}

Nondegeneracy nondegeneracy(const Eigen::MatrixXcd& tau, double rel_threshold) {
  Nondegeneracy nd;
  Eigen::MatrixXd T = tau.imag();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  const auto& ev = es.eigenvalues();
  nd.min_sv = ev.cwiseAbs().minCoeff();
  double scale = tau.cwiseAbs().maxCoeff();
  nd.threshold = rel_threshold * scale;
  nd.ok = nd.min_sv > nd.threshold;
  int pos = 0, neg = 0;
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) > nd.threshold) ++pos;
    if (ev(i) < -nd.threshold) ++neg;
  }
  nd.signature = {pos, neg};
  return nd;
}

Eigen::MatrixXd metric_g(const PointData& p) {
  gate(p);
  int n = p.n();
  Eigen::MatrixXcd T = p.tau.imag().cast<Complex>();
  Eigen::MatrixXd g(2 * n, 2 * n);
  for (int a = 0; a < 2 * n; ++a) {
    Eigen::VectorXcd za = basis_rep(n, a);
    for (int b = 0; b < 2 * n; ++b) {
      Eigen::VectorXcd zb = basis_rep(n, b);
      Complex val = 2.0 * (za.transpose() * T * zb.conjugate())(0);
      g(a, b) = val.real();
    }
  }
  return g;
}

Eigen::MatrixXd frame_change_to_affine(const PointData& p, const Eigen::MatrixXd& m_xu) {
  gate(p);
  int n = p.n();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  jac.topLeftCorner(n, n).setIdentity();
  jac.bottomLeftCorner(n, n) = p.tau.real();
  jac.bottomRightCorner(n, n) = -p.tau.imag();
  Eigen::MatrixXd jinv = jac.partialPivLu().solve(Eigen::MatrixXd::Identity(2 * n, 2 * n));
  return jinv.transpose() * m_xu * jinv;
}

UvPartials uv_partials(const PointData& p) {
  gate(p);
  int n = p.n();
  Eigen::MatrixXd R = p.tau.real();
  Eigen::MatrixXd T = p.tau.imag();
  auto lu = T.partialPivLu();
  UvPartials out;
  out.u_x = lu.solve(R);
  out.u_y = -lu.solve(Eigen::MatrixXd::Identity(n, n));
  out.v_x = T + R * out.u_x;
  out.v_y = R * out.u_y;
  return out;
}

ChartIdentityResiduals chart_identity_residuals(const PointData& p) {
  UvPartials P = uv_partials(p);
  int n = p.n();
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  ChartIdentityResiduals r;
  Eigen::MatrixXd m1 = P.u_x.transpose() * P.v_y - P.v_x.transpose() * P.u_y;
  r.r1 = max_abs(m1 - I);
  Eigen::MatrixXd m2 = P.u_x.transpose() * P.v_x;
  r.r2 = max_abs(m2 - m2.transpose());
  Eigen::MatrixXd m3 = P.u_y.transpose() * P.v_y;
  r.r3 = max_abs(m3 - m3.transpose());
  r.r4 = max_abs(P.u_x + P.v_y.transpose());
  r.r5 = max_abs(P.u_y - P.u_y.transpose());
  r.r6 = max_abs(P.v_x - P.v_x.transpose());
  return r;
}

Eigen::MatrixXd graph_hessian(const PointData& p) {
  UvPartials P = uv_partials(p);
  int n = p.n();
  Eigen::MatrixXd G(2 * n, 2 * n);
  G.topLeftCorner(n, n) = 2.0 * P.v_x;
  G.topRightCorner(n, n) = -2.0 * P.u_x.transpose();
  G.bottomLeftCorner(n, n) = -2.0 * P.u_x;
  G.bottomRightCorner(n, n) = -2.0 * P.u_y;
  double defect = max_abs(G - G.transpose());
  double tol = 1e-7 * (1.0 + max_abs(G));
  if (defect > tol) throw AsymmetryError(defect, tol);
  return 0.5 * (G + G.transpose());
}

Eigen::MatrixXd fd_graph_hessian(const Expr& e, const PointData& p, double h,
                                 const NewtonOptions& newton) {
  gate(p);
  if (!(h > 0.0)) throw Error("finite-difference step must be positive");
  AffineStencil st{e, p, h, newton};
  auto hess = st.component_hessians();
  return hess.back();  // height component
}

Eigen::MatrixXd inverse_metric(const PointData& p) {
  UvPartials P = uv_partials(p);
  int n = p.n();
  Eigen::MatrixXd G(2 * n, 2 * n);
  G.topLeftCorner(n, n) = -0.5 * P.u_y;
  G.topRightCorner(n, n) = 0.5 * P.u_x;
  G.bottomLeftCorner(n, n) = 0.5 * P.u_x.transpose();
  G.bottomRightCorner(n, n) = 0.5 * P.v_x;
  return 0.5 * (G + G.transpose());
}

Eigen::MatrixXd kahler_form(const PointData& p) {
  gate(p);
  int n = p.n();
  Eigen::MatrixXcd T = p.tau.imag().cast<Complex>();
  Eigen::MatrixXd om(2 * n, 2 * n);
  for (int a = 0; a < 2 * n; ++a) {
    Eigen::VectorXcd za = basis_rep(n, a);
    for (int b = 0; b < 2 * n; ++b) {
      Eigen::VectorXcd zb = basis_rep(n, b);
      Complex val = 2.0 * (za.transpose() * T * zb.conjugate())(0);
      om(a, b) = val.imag();  // omega(X, Y) = g(X, JY) = Im of the Hermitian form
    }
  }
  return frame_change_to_affine(p, om);
}

VolumeCheck volume_check(const PointData& p) {
  Eigen::MatrixXd g_xy = frame_change_to_affine(p, metric_g(p));
  VolumeCheck out;
  out.det_gxy = g_xy.determinant();
  out.residual = std::abs(std::abs(out.det_gxy) - std::pow(4.0, p.n()));
  return out;
}

double gauss_weingarten_residual(const Expr& e, const PointData& p, double h,
                                 const NewtonOptions& newton) {
  gate(p);
  if (!(h > 0.0)) throw Error("finite-difference step must be positive");
  Eigen::MatrixXd g_ref = graph_hessian(p);
  AffineStencil st{e, p, h, newton};
  auto hess = st.component_hessians();
  int m = 2 * p.n();
  double res = 0.0;
  for (int c = 0; c < m; ++c) res = std::max(res, max_abs(hess[static_cast<std::size_t>(c)]));
  res = std::max(res, max_abs(hess[static_cast<std::size_t>(m)] - g_ref));
  return res;
}

Eigen::VectorXcd invert_chart(const Expr& e, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& y, const Eigen::VectorXcd& seed,
                              const NewtonOptions& newton) {
  int n = e.arity();
  if (x.size() != n || y.size() != n || seed.size() != n)
    throw ArityError("invert_chart dimension mismatch");
  Eigen::VectorXd u = seed.imag();
  Eigen::VectorXcd z(n);
  for (int it = 0; it <= newton.max_iter; ++it) {
    for (int k = 0; k < n; ++k) z(k) = Complex(x(k), u(k));
    CJet jet = jet_eval(e, to_std(z));
    Eigen::VectorXd G(n);
    Eigen::MatrixXd T(n, n);
    for (int i = 0; i < n; ++i) {
      G(i) = jet.grad(i).real() - y(i);
      for (int j = 0; j < n; ++j) T(i, j) = jet.hess(i, j).imag();
    }
    if (!G.allFinite()) break;
    if (G.cwiseAbs().maxCoeff() <= newton.tol) return z;
    u += T.partialPivLu().solve(G);
    if (!u.allFinite()) break;
  }
  std::ostringstream msg;
  msg << "chart inversion did not converge at x = [" << x.transpose() << "], y = ["
      << y.transpose() << "]";
  throw NewtonDivergence(msg.str());
}

MetricBundle metric_bundle(const PointData& p) {
  gate(p);
  int n = p.n();
  MetricBundle b;
  b.g_xu = metric_g(p);
  b.g_xy = frame_change_to_affine(p, b.g_xu);
  b.gv_xy = graph_hessian(p);
  b.ginv_xy = inverse_metric(p);
  b.omega_xy = kahler_form(p);
  b.jac = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  b.jac.topLeftCorner(n, n).setIdentity();
  b.jac.bottomLeftCorner(n, n) = p.tau.real();
  b.jac.bottomRightCorner(n, n) = -p.tau.imag();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.g_xy);
  int pos = 0, neg = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > 0) ++pos;
    if (es.eigenvalues()(i) < 0) ++neg;
  }
  b.signature = {pos, neg};
  return b;
}

}  // namespace parasphere
