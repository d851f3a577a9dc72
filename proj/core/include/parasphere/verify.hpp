#pragma once

#include <string>
#include <vector>

#include "parasphere/geometry.hpp"

namespace parasphere {

enum class SampleStrategy { UniformGrid, QuasiRandom };

/// Axis-aligned box in the chart: axes are (Re z_1..Re z_n, Im z_1..Im z_n).
struct ChartWindow {
  int n = 1;
  Eigen::VectorXd lo, hi;  // size 2n each
  std::vector<int> grid;   // per-axis counts; a single entry is replicated
  long samples = 0;        // total count for QuasiRandom
  SampleStrategy strategy = SampleStrategy::UniformGrid;
  unsigned seed = 0;       // offsets the low-discrepancy sequence

  void validate() const;
  std::vector<int> axis_counts() const;  // grid expanded to 2n entries
  std::size_t sample_count() const;
};

/// Deterministic sample sequence: row-major grid traversal (last axis
/// fastest) or a Halton sequence offset by the seed. Identical across runs.
std::vector<Eigen::VectorXcd> sample(const ChartWindow& w);

/// Per-check acceptance thresholds on the residuals defined in run_suite.
struct Tolerances {
  double metric_equality = 1e-9;
  double chart_identities = 1e-9;
  double inverse_metric = 1e-9;
  double kahler_form = 1e-9;
  double monge_ampere = 1e-9;
  double hessian_oracle = 1e-5;
  double gauss_weingarten = 1e-5;
  double jet_oracle = 1e-5;
};

struct OracleConfig {
  double h = 1e-3;          // stencil step in the affine coordinates
  int subsample = 25;       // max points for the finite-difference checks
  bool jet_oracle = false;  // also compare jets against fd_oracle
  double jet_h = 1e-4;
  NewtonOptions newton{};
};

struct CheckStats {
  std::string name;
  double tolerance = 0.0;
  std::size_t count = 0;         // points contributing to this check
  double max_residual = 0.0;
  double mean_residual = 0.0;
  long worst_index = -1;         // sample index of the worst residual
  Eigen::VectorXcd worst_point;
  bool pass = true;
};

struct VerificationReport {
  std::string expr_text;
  int n = 0;
  ChartWindow window;
  std::size_t n_points = 0;
  std::size_t n_degenerate = 0;
  std::vector<CheckStats> checks;
  Tolerances tolerances;
  OracleConfig oracle;
  std::string omega_convention;  // sign convention used for the Kaehler form
  bool pass = false;

  const CheckStats* find(const std::string& name) const;
};

/// Evaluate every certified identity over the window samples.
///
/// Degenerate samples are counted and skipped, never extrapolated. At each
/// nondegenerate point the algebraic residuals are
///   metric_equality:  |g_xy - gv|_max / (1 + |g_xy|_max)
///   chart_identities: max residual / (1 + |Im(tau)^-1|_max)
///   inverse_metric:   |ginv * gv - I|_max
///   kahler_form:      |omega - 2[[0,I],[-I,0]]|_max
///   monge_ampere:     | |det g_xy| - 4^n | / 4^n
/// and on an evenly spaced subsample the finite-difference residuals
///   hessian_fd_oracle, gauss_weingarten (absolute), plus jet_fd_oracle
///   when enabled (relative to the largest jet component).
///
/// Aggregation is keyed by sample index, so the report is byte-identical
/// across repeated runs and thread counts. Throws AllPointsDegenerate when
/// no sample passes the nondegeneracy gate.
VerificationReport run_suite(const Expr& e, const ChartWindow& w, const Tolerances& tol = {},
                             const OracleConfig& oracle = {}, int threads = 0);

/// Serialize the report as a single JSON document (fixed field order).
std::string to_json_string(const VerificationReport& r, int indent = 2);

}  // namespace parasphere
