#pragma once

#include <Eigen/Dense>
#include <utility>

#include "parasphere/cjet.hpp"
#include "parasphere/expr.hpp"

namespace parasphere {

// Conventions used throughout this module.
//
// A holomorphic F in n variables defines the graph immersion
//   phi(z) = (x, y, f) in R^{2n+1},
//   x = Re z,  y = Re F_z,  f = 2 Im F - 2 sum_k y_k u^k,
// with u = Im z and v = Im F_z. Two real frames appear:
//   * the chart frame (x, u): coordinates of z itself,
//   * the affine frame (x, y): flat coordinates of the induced connection,
//     valid wherever Im(d^2 F) is invertible.
// Real 2n x 2n matrices are indexed with the x-block first. The Kaehler
// form is taken as omega = g(., J.), the sign that makes omega constant
// equal to 2 sum dx^i ^ dy_i in the affine frame.

/// Relative cutoff for invertibility of Im(d^2 F): the smallest singular
/// value must exceed this factor times the largest |entry| of d^2 F.
inline constexpr double kNondegeneracyRelThreshold = 1e-8;

/// Everything the geometry needs at one chart point.
struct PointData {
  Eigen::VectorXcd z;   // chart point
  Eigen::VectorXcd w;   // F_z
  Eigen::VectorXd x, u; // Re z, Im z
  Eigen::VectorXd y, v; // Re F_z, Im F_z
  Eigen::MatrixXcd tau; // holomorphic Hessian d^2 F
  SymTensor3 sigma;     // third derivatives d^3 F
  double f = 0.0;       // graph height, 2 Im F - 2 y.u
  Eigen::VectorXd imm;  // immersion point (x, y, f)

  int n() const { return static_cast<int>(z.size()); }
};

struct Nondegeneracy {
  bool ok = false;
  double min_sv = 0.0;                 // smallest singular value of Im tau
  std::pair<int, int> signature{0, 0}; // (positive, negative) eigenvalues of Im tau
  double threshold = 0.0;              // absolute cutoff used for ok
};

/// Partial derivatives of (u, v) with respect to the affine coordinates
/// (x, y); block (i, j) of u_x is du^i/dx^j, etc.
struct UvPartials {
  Eigen::MatrixXd u_x, u_y, v_x, v_y;
};

/// Max-abs residuals of the six relations satisfied by the (u, v) partials
/// in the affine frame, a consequence of the vanishing pullback of the
/// canonical complex symplectic form:
///   r1: sum_k (u^k_xi v_k,yj - u^k_yj v_k,xi) = delta_ij
///   r2: sum_k u^k_xi v_k,xj symmetric in (i, j)
///   r3: sum_k u^k_yi v_k,yj symmetric in (i, j)
///   r4: u^i_xj = -v_j,yi
///   r5: u^i_yj symmetric
///   r6: v_i,xj symmetric
struct ChartIdentityResiduals {
  double r1 = 0, r2 = 0, r3 = 0, r4 = 0, r5 = 0, r6 = 0;
  double max() const;
};

struct MetricBundle {
  Eigen::MatrixXd g_xu;     // metric in the chart frame
  Eigen::MatrixXd g_xy;     // metric pushed to the affine frame
  Eigen::MatrixXd gv_xy;    // Hessian of the graph height in the affine frame
  Eigen::MatrixXd ginv_xy;  // inverse metric from the closed-form blocks
  Eigen::MatrixXd omega_xy; // Kaehler form in the affine frame
  Eigen::MatrixXd jac;      // d(x, y)/d(x, u) = [[I, 0], [Re tau, -Im tau]]
  std::pair<int, int> signature{0, 0};  // signature of g
};

struct NewtonOptions {
  double tol = 1e-12;  // max-norm of Re F_z - y at acceptance
  int max_iter = 50;
};

struct VolumeCheck {
  double det_gxy = 0.0;
  double residual = 0.0;  // | |det g_xy| - 4^n |
};

/// Evaluate F and assemble all per-point data from a single jet.
PointData eval_point(const Expr& e, const Eigen::VectorXcd& z);

/// Invertibility gate for Im(d^2 F). Degenerate input is a result, not an error.
Nondegeneracy nondegeneracy(const Eigen::MatrixXcd& tau,
                            double rel_threshold = kNondegeneracyRelThreshold);

/// Metric in the chart frame: the real part of the Hermitian form
/// 2 zeta1^T Im(tau) conj(zeta2) evaluated on the basis (d/dx^k, d/du^k).
/// Throws DegenerateMetric when the gate fails.
Eigen::MatrixXd metric_g(const PointData& p);

/// Congruence transform of a bilinear form from the chart frame to the
/// affine frame, m -> jac^{-T} m jac^{-1}.
Eigen::MatrixXd frame_change_to_affine(const PointData& p, const Eigen::MatrixXd& m_xu);

/// Blocks of d(u, v)/d(x, y) by the implicit function theorem:
///   u_x = T^{-1} R,  u_y = -T^{-1},  v_x = T + R u_x,  v_y = R u_y
/// with R = Re tau, T = Im tau.
UvPartials uv_partials(const PointData& p);

ChartIdentityResiduals chart_identity_residuals(const PointData& p);

/// Hessian of the graph height over the affine coordinates, assembled from
/// the closed forms: xx block 2 v_x, xy block -2 u_x^T, yy block -2 u_y.
/// Throws AsymmetryError when the assembled matrix is not symmetric to
/// roundoff scale (an assembly bug, not bad input).
Eigen::MatrixXd graph_hessian(const PointData& p);

/// Finite-difference Hessian of the graph height as a function of the
/// affine coordinates. Every stencil point is mapped back to the chart by
/// Newton inversion seeded at p.z.
Eigen::MatrixXd fd_graph_hessian(const Expr& e, const PointData& p, double h,
                                 const NewtonOptions& newton = {});

/// Inverse metric in the affine coframe from the closed-form blocks:
/// (dx,dx) -> -u_y/2, (dx,dy) -> u_x/2, (dy,dy) -> v_x/2.
Eigen::MatrixXd inverse_metric(const PointData& p);

/// Kaehler form omega = g(., J.) computed in the chart frame and pushed to
/// the affine frame. For valid input this equals 2 [[0, I], [-I, 0]].
Eigen::MatrixXd kahler_form(const PointData& p);

/// |det g_xy| must equal 4^n: the Monge-Ampere volume condition in the
/// affine frame.
VolumeCheck volume_check(const PointData& p);

/// Finite-difference second derivatives of the full immersion over the
/// affine coordinates: the first 2n components must be affine (second
/// derivatives zero) and the height component's Hessian must equal the
/// metric. Returns the max-abs deviation across all components.
double gauss_weingarten_residual(const Expr& e, const PointData& p, double h,
                                 const NewtonOptions& newton = {});

/// Solve Re z = x, Re F_z(z) = y for z by Newton iteration in Im z.
Eigen::VectorXcd invert_chart(const Expr& e, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& y, const Eigen::VectorXcd& seed,
                              const NewtonOptions& newton = {});

/// Assemble every frame/metric quantity at once.
MetricBundle metric_bundle(const PointData& p);

}  // namespace parasphere
