// Command-line surface: evaluate one point, certify a window, export
// meshes and point clouds.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <parasphere/export_io.hpp>
#include <parasphere/verify.hpp>

namespace {

using namespace parasphere;
using json = nlohmann::ordered_json;

Expr load_expr(const std::string& inline_text, const std::string& file, int n) {
  if (!inline_text.empty() && !file.empty())
    throw Error("give either --expr or --expr-file, not both");
  std::string src = inline_text;
  if (src.empty()) {
    if (file.empty()) throw Error("an expression is required (--expr or --expr-file)");
    std::ifstream ifs(file, std::ios::binary);
    if (!ifs) throw IoError("cannot read expression file '" + file + "'");
    std::stringstream ss;
    ss << ifs.rdbuf();
    src = ss.str();
  }
  return parse(src, n);
}

ChartWindow make_window(int n, const std::vector<double>& bounds, const std::vector<int>& grid,
                        long samples, unsigned seed) {
  ChartWindow w;
  w.n = n;
  if (static_cast<int>(bounds.size()) != 4 * n)
    throw Error("--window needs 4n values: lo hi per axis, Re z1..zn axes then Im z1..zn axes");
  w.lo.resize(2 * n);
  w.hi.resize(2 * n);
  for (int a = 0; a < 2 * n; ++a) {
    w.lo(a) = bounds[static_cast<std::size_t>(2 * a)];
    w.hi(a) = bounds[static_cast<std::size_t>(2 * a + 1)];
  }
  if (samples > 0) {
    w.strategy = SampleStrategy::QuasiRandom;
    w.samples = samples;
    w.seed = seed;
  } else {
    w.strategy = SampleStrategy::UniformGrid;
    w.grid = grid;
  }
  w.validate();
  return w;
}

json complex_vector_json(const Eigen::VectorXcd& z) {
  json a = json::array();
  for (int i = 0; i < z.size(); ++i) a.push_back(json::array({z(i).real(), z(i).imag()}));
  return a;
}

json real_vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

std::string real_vector_text(const Eigen::VectorXd& v) {
  std::ostringstream os;
  for (int i = 0; i < v.size(); ++i) {
    if (i) os << " ";
    os << v(i);
  }
  return os.str();
}

std::string complex_vector_text(const Eigen::VectorXcd& z) {
  std::ostringstream os;
  for (int i = 0; i < z.size(); ++i) {
    if (i) os << "  ";
    os << "(" << z(i).real() << ", " << z(i).imag() << ")";
  }
  return os.str();
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream ofs(out_path, std::ios::binary);
  if (!ofs) throw IoError("cannot open '" + out_path + "' for writing");
  ofs << text;
  if (!ofs) throw IoError("failed writing '" + out_path + "'");
}

struct EvalArgs {
  int n = 1;
  std::string expr, expr_file;
  std::vector<double> at;
  bool with_metric = false;
  bool as_json = false;
};

int cmd_eval(const EvalArgs& a) {
  Expr e = load_expr(a.expr, a.expr_file, a.n);
  if (static_cast<int>(a.at.size()) != 2 * a.n)
    throw Error("--at needs 2n values: x1..xn then u1..un");
  Eigen::VectorXcd z(a.n);
  for (int k = 0; k < a.n; ++k)
    z(k) = Complex(a.at[static_cast<std::size_t>(k)], a.at[static_cast<std::size_t>(a.n + k)]);

  PointData p = eval_point(e, z);
  Nondegeneracy nd = nondegeneracy(p.tau);

  if (a.as_json) {
    json j;
    j["expr"] = pretty_print(e);
    j["n"] = a.n;
    j["z"] = complex_vector_json(p.z);
    j["w"] = complex_vector_json(p.w);
    j["f"] = p.f;
    j["imm"] = real_vector_json(p.imm);
    j["nondegenerate"] = nd.ok;
    j["min_sv"] = nd.min_sv;
    j["signature_imtau"] = json::array({nd.signature.first, nd.signature.second});
    if (nd.ok) {
      MetricBundle b = metric_bundle(p);
      ChartIdentityResiduals r = chart_identity_residuals(p);
      j["det_gxy"] = b.g_xy.determinant();
      j["signature_g"] = json::array({b.signature.first, b.signature.second});
      j["chart_identity_residuals"] =
          json::array({r.r1, r.r2, r.r3, r.r4, r.r5, r.r6});
      if (a.with_metric) {
        j["g_xu"] = matrix_json(b.g_xu);
        j["g_xy"] = matrix_json(b.g_xy);
        j["gv_xy"] = matrix_json(b.gv_xy);
        j["ginv_xy"] = matrix_json(b.ginv_xy);
        j["omega_xy"] = matrix_json(b.omega_xy);
        j["jac"] = matrix_json(b.jac);
      }
    }
    std::cout << j.dump(2) << "\n";
    return nd.ok ? 0 : 2;
  }

  std::cout << "expr = " << pretty_print(e) << "\n";
  std::cout << "z    = " << complex_vector_text(p.z) << "\n";
  std::cout << "w    = " << complex_vector_text(p.w) << "\n";
  std::cout << "imm  = " << real_vector_text(p.imm) << "\n";
  if (!nd.ok) {
    std::cout << "degenerate point: min singular value of Im(d^2 F) = " << nd.min_sv
              << " (threshold " << nd.threshold << "); no metric quantities here\n";
    return 2;
  }
  MetricBundle b = metric_bundle(p);
  ChartIdentityResiduals r = chart_identity_residuals(p);
  std::cout << "min_sv(Im tau) = " << nd.min_sv << ", signature Im tau = ("
            << nd.signature.first << "," << nd.signature.second << ")\n";
  std::cout << "det g_xy = " << b.g_xy.determinant() << ", signature g = ("
            << b.signature.first << "," << b.signature.second << ")\n";
  std::cout << "chart identity residuals: " << r.r1 << " " << r.r2 << " " << r.r3 << " "
            << r.r4 << " " << r.r5 << " " << r.r6 << "\n";
  if (a.with_metric) {
    Eigen::IOFormat fmt(Eigen::StreamPrecision, 0, "  ", "\n", "  ");
    std::cout << "g_xu =\n" << b.g_xu.format(fmt) << "\n";
    std::cout << "g_xy =\n" << b.g_xy.format(fmt) << "\n";
    std::cout << "gv_xy =\n" << b.gv_xy.format(fmt) << "\n";
    std::cout << "ginv_xy =\n" << b.ginv_xy.format(fmt) << "\n";
    std::cout << "omega_xy =\n" << b.omega_xy.format(fmt) << "\n";
    std::cout << "jac =\n" << b.jac.format(fmt) << "\n";
  }
  return 0;
}

struct CheckArgs {
  int n = 1;
  std::string expr, expr_file, out;
  std::vector<double> window;
  std::vector<int> grid{11};
  long samples = 0;
  unsigned seed = 0;
  double tol_algebraic = 1e-9;
  double tol_oracle = 1e-5;
  double h = 1e-3;
  int subsample = 25;
  bool jet_oracle = false;
  double jet_h = 1e-4;
  int threads = 0;
};

int cmd_check(const CheckArgs& a) {
  Expr e = load_expr(a.expr, a.expr_file, a.n);
  ChartWindow w = make_window(a.n, a.window, a.grid, a.samples, a.seed);
  Tolerances tol;
  tol.metric_equality = tol.chart_identities = tol.inverse_metric = tol.kahler_form =
      tol.monge_ampere = a.tol_algebraic;
  tol.hessian_oracle = tol.gauss_weingarten = tol.jet_oracle = a.tol_oracle;
  OracleConfig oc;
  oc.h = a.h;
  oc.subsample = a.subsample;
  oc.jet_oracle = a.jet_oracle;
  oc.jet_h = a.jet_h;
  VerificationReport rep = run_suite(e, w, tol, oc, a.threads);
  write_output(to_json_string(rep), a.out);
  return rep.pass ? 0 : 2;
}

struct ExportArgs {
  int n = 1;
  std::string expr, expr_file, out;
  std::vector<double> window;
  std::vector<int> grid{64};
  long samples = 0;
  unsigned seed = 0;
};

int cmd_mesh(const ExportArgs& a) {
  Expr e = load_expr(a.expr, a.expr_file, a.n);
  if (a.n != 1) throw ArityError("mesh export is defined for one complex variable only");
  ChartWindow w = make_window(a.n, a.window, a.grid, a.samples, a.seed);
  MeshData m = build_mesh(e, w);
  write_obj(m, a.out);
  std::cout << "wrote " << m.vertices.size() << " vertices, " << m.faces.size() << " faces ("
            << m.n_degenerate_vertices << " degenerate vertices, " << m.n_dropped_cells
            << " dropped cells) to " << a.out << "\n";
  return 0;
}

int cmd_csv(const ExportArgs& a) {
  Expr e = load_expr(a.expr, a.expr_file, a.n);
  ChartWindow w = make_window(a.n, a.window, a.grid, a.samples, a.seed);
  auto pts = sample(w);
  std::vector<PointData> data;
  data.reserve(pts.size());
  std::size_t degenerate = 0;
  for (const auto& z : pts) {
    data.push_back(eval_point(e, z));
    if (!nondegeneracy(data.back().tau).ok) ++degenerate;
  }
  if (degenerate == data.size())
    throw AllPointsDegenerate("all " + std::to_string(data.size()) +
                              " samples lie in the degenerate locus");
  write_csv(data, a.out);
  std::cout << "wrote " << (data.size() - degenerate) << " rows (" << degenerate
            << " degenerate samples skipped) to " << a.out << "\n";
  return 0;
}

void add_expr_flags(CLI::App* cmd, int& n, std::string& expr, std::string& expr_file) {
  cmd->add_option("-n,--arity", n, "number of complex variables")->required();
  cmd->add_option("-F,--expr", expr, "expression text, e.g. \"i*z1^2/2\"");
  cmd->add_option("--expr-file", expr_file, "UTF-8 file containing the expression");
}

void add_window_flags(CLI::App* cmd, ExportArgs& a) {
  cmd->add_option("--window", a.window,
                  "axis bounds: lo hi per axis, Re z1..zn axes then Im z1..zn axes")
      ->expected(-1)
      ->required();
  cmd->add_option("--grid", a.grid, "grid samples per axis (one value or one per axis)")
      ->expected(-1);
  cmd->add_option("--samples", a.samples, "total quasi-random samples (switches off the grid)");
  cmd->add_option("--seed", a.seed, "offset for the quasi-random sequence");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geometry of holomorphic graph immersions in affine (2n+1)-space"};
  app.require_subcommand(1);

  EvalArgs ea;
  CLI::App* eval = app.add_subcommand("eval", "evaluate the immersion at one chart point");
  add_expr_flags(eval, ea.n, ea.expr, ea.expr_file);
  eval->add_option("--at", ea.at, "chart point: x1..xn then u1..un")->expected(-1)->required();
  eval->add_flag("--metric", ea.with_metric, "also print the metric bundle");
  eval->add_flag("--json", ea.as_json, "JSON output");

  CheckArgs ca;
  CLI::App* check = app.add_subcommand("check", "certify all identities over a window");
  add_expr_flags(check, ca.n, ca.expr, ca.expr_file);
  check->add_option("--window", ca.window,
                    "axis bounds: lo hi per axis, Re z1..zn axes then Im z1..zn axes")
      ->expected(-1)
      ->required();
  check->add_option("--grid", ca.grid, "grid samples per axis (one value or one per axis)")
      ->expected(-1);
  check->add_option("--samples", ca.samples,
                    "total quasi-random samples (switches off the grid)");
  check->add_option("--seed", ca.seed, "offset for the quasi-random sequence");
  check->add_option("--tol-algebraic", ca.tol_algebraic,
                    "tolerance for the roundoff-level identity checks");
  check->add_option("--tol-oracle", ca.tol_oracle,
                    "tolerance for the finite-difference oracle checks");
  check->add_option("--step", ca.h, "finite-difference step in the affine coordinates");
  check->add_option("--subsample", ca.subsample, "points for the finite-difference checks");
  check->add_flag("--oracle", ca.jet_oracle, "also compare jets against the FD oracle");
  check->add_option("--jet-h", ca.jet_h, "step for the jet FD oracle");
  check->add_option("--threads", ca.threads, "worker threads (0 = machine parallelism)");
  check->add_option("-o,--out", ca.out, "write the JSON report here instead of stdout");

  ExportArgs ma;
  CLI::App* mesh = app.add_subcommand("mesh", "export the n=1 graph surface as Wavefront OBJ");
  add_expr_flags(mesh, ma.n, ma.expr, ma.expr_file);
  add_window_flags(mesh, ma);
  mesh->add_option("-o,--out", ma.out, "output OBJ path")->required();

  ExportArgs xa;
  CLI::App* csv = app.add_subcommand("csv", "export sampled immersion points as CSV");
  add_expr_flags(csv, xa.n, xa.expr, xa.expr_file);
  add_window_flags(csv, xa);
  csv->add_option("-o,--out", xa.out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*eval) return cmd_eval(ea);
    if (*check) return cmd_check(ca);
    if (*mesh) return cmd_mesh(ma);
    if (*csv) return cmd_csv(xa);
  } catch (const AllPointsDegenerate& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const DegenerateMetric& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
