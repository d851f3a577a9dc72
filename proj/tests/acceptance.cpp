// Acceptance suite: end-to-end checks of everything the library certifies,
// one pass/fail line per criterion. Usage: acceptance_tests <path-to-cli>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <parasphere/export_io.hpp>
#include <parasphere/verify.hpp>

#include "support.hpp"

using namespace parasphere;
namespace fs = std::filesystem;

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// ---------------------------------------------------------------------------
// Corpus: nondegenerate functions spanning one to three variables, with
// windows chosen inside their nondegeneracy domains.

struct CorpusEntry {
  const char* text;
  int n;
  std::vector<double> lo, hi;  // 2n axis bounds (Re axes then Im axes)
  int grid;
};

const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> c = {
      {"i*z1^2/2", 1, {-1, -1}, {1, 1}, 11},
      {"z1^3/6", 1, {-1, 0.8}, {1, 1.6}, 11},
      {"i*exp(z1)", 1, {-0.7, -0.4}, {0.7, 0.4}, 11},
      {"1/z1 + i*z1^2/2", 1, {2, 0.2}, {3, 0.9}, 11},
      {"i*(z1^2+z2^2)/2 + z1*z2", 2, {-1, -1, -1, -1}, {1, 1, 1, 1}, 4},
      {"i*(z1^2+z2^2)/2 + z1^2*z2/4", 2, {-0.5, -0.5, -0.5, -0.5}, {0.5, 0.5, 0.5, 0.5}, 4},
      {"i*(z1^2+z2^2+z3^2)/2 + z1*z2*z3", 3, {-0.2, -0.2, -0.2, -0.2, -0.2, -0.2},
       {0.2, 0.2, 0.2, 0.2, 0.2, 0.2}, 3},
  };
  return c;
}

ChartWindow corpus_window(const CorpusEntry& e) {
  ChartWindow w;
  w.n = e.n;
  w.lo = Eigen::Map<const Eigen::VectorXd>(e.lo.data(), static_cast<long>(e.lo.size()));
  w.hi = Eigen::Map<const Eigen::VectorXd>(e.hi.data(), static_cast<long>(e.hi.size()));
  w.grid = {e.grid};
  return w;
}

struct CorpusResiduals {
  std::string text;
  int n = 0;
  std::size_t points = 0;
  double metric_equality = 0;   // max over points, normalized by 1 + |g|
  double chart_identities = 0;  // normalized by 1 + |Im(tau)^-1|
  double kahler = 0;            // absolute
  double monge_ampere = 0;      // normalized by 4^n
};

struct Context {
  std::string cli;
  fs::path work;
  std::optional<std::vector<CorpusResiduals>> cached;
  double corpus_seconds = 0;

  const std::vector<CorpusResiduals>& corpus_residuals() {
    if (cached) return *cached;
    Timer t;
    std::vector<CorpusResiduals> all;
    for (const CorpusEntry& entry : corpus()) {
      Expr e = parse(entry.text, entry.n);
      auto pts = sample(corpus_window(entry));
      CorpusResiduals r;
      r.text = entry.text;
      r.n = entry.n;
      Eigen::MatrixXd omega0 = Eigen::MatrixXd::Zero(2 * entry.n, 2 * entry.n);
      omega0.topRightCorner(entry.n, entry.n) =
          2.0 * Eigen::MatrixXd::Identity(entry.n, entry.n);
      omega0.bottomLeftCorner(entry.n, entry.n) =
          -2.0 * Eigen::MatrixXd::Identity(entry.n, entry.n);
      double vol = std::pow(4.0, entry.n);
      for (const auto& z : pts) {
        PointData p = eval_point(e, z);
        require(nondegeneracy(p.tau).ok,
                std::string(entry.text) + ": corpus window touches the degenerate locus");
        Eigen::MatrixXd g_xy = frame_change_to_affine(p, metric_g(p));
        Eigen::MatrixXd gv = graph_hessian(p);
        r.metric_equality = std::max(
            r.metric_equality, max_abs(g_xy - gv) / (1.0 + max_abs(g_xy)));
        UvPartials P = uv_partials(p);
        r.chart_identities =
            std::max(r.chart_identities,
                     chart_identity_residuals(p).max() / (1.0 + max_abs(P.u_y)));
        r.kahler = std::max(r.kahler, max_abs(kahler_form(p) - omega0));
        r.monge_ampere = std::max(r.monge_ampere, volume_check(p).residual / vol);
        ++r.points;
      }
      all.push_back(std::move(r));
    }
    corpus_seconds = t.seconds();
    cached = std::move(all);
    return *cached;
  }
};

// ---------------------------------------------------------------------------
// Criteria.

std::string criterion_paraboloid(Context&) {
  Timer t;
  Expr e = parse("i*z1^2/2", 1);
  ChartWindow w;
  w.n = 1;
  w.lo = Eigen::Vector2d(-1, -1);
  w.hi = Eigen::Vector2d(1, 1);
  w.grid = {100};  // 10^4 points
  auto pts = sample(w);
  double max_imm = 0, max_det = 0;
  for (const auto& z : pts) {
    PointData p = eval_point(e, z);
    double x = z(0).real(), u = z(0).imag();
    Eigen::Vector3d expected(x, -u, x * x + u * u);
    max_imm = std::max(max_imm, (p.imm - expected).cwiseAbs().maxCoeff());
    max_det = std::max(max_det, std::abs(volume_check(p).det_gxy - 4.0));
  }
  double sec = t.seconds();
  require(pts.size() == 10000, "expected 10^4 grid points");
  require(max_imm <= 1e-12, "immersion deviates from (x, y, x^2+y^2) by " + fmt(max_imm));
  require(max_det <= 1e-12, "det g_xy deviates from 4 by " + fmt(max_det));
  require(sec < 1.0, "took " + fmt(sec) + " s, limit 1 s");
  return "10000 points, imm err " + fmt(max_imm) + ", det err " + fmt(max_det) + ", " +
         fmt(sec) + " s";
}

std::string criterion_metric_equality(Context& ctx) {
  const auto& rs = ctx.corpus_residuals();
  require(rs.size() >= 6, "corpus must span at least 6 functions");
  bool n1 = false, n2 = false, n3 = false;
  double worst = 0;
  for (const auto& r : rs) {
    require(r.points >= 100, r.text + ": needs >= 100 points");
    require(r.metric_equality <= 1e-10,
            r.text + ": metric equality residual " + fmt(r.metric_equality));
    worst = std::max(worst, r.metric_equality);
    n1 |= r.n == 1;
    n2 |= r.n == 2;
    n3 |= r.n == 3;
  }
  require(n1 && n2 && n3, "corpus must span n in {1,2,3}");
  require(ctx.corpus_seconds < 10.0,
          "corpus pass took " + fmt(ctx.corpus_seconds) + " s, limit 10 s");
  return std::to_string(rs.size()) + " functions, worst residual " + fmt(worst) + ", " +
         fmt(ctx.corpus_seconds) + " s";
}

std::string criterion_chart_identities(Context& ctx) {
  double worst = 0;
  for (const auto& r : ctx.corpus_residuals()) {
    require(r.chart_identities <= 1e-11,
            r.text + ": identity residual " + fmt(r.chart_identities));
    worst = std::max(worst, r.chart_identities);
  }
  return "worst residual " + fmt(worst);
}

std::string criterion_kahler_form(Context& ctx) {
  double worst = 0;
  for (const auto& r : ctx.corpus_residuals()) {
    require(r.kahler <= 1e-11, r.text + ": Kaehler form residual " + fmt(r.kahler));
    worst = std::max(worst, r.kahler);
  }
  return "worst residual " + fmt(worst);
}

std::string criterion_monge_ampere(Context& ctx) {
  double worst = 0;
  for (const auto& r : ctx.corpus_residuals()) {
    require(r.monge_ampere <= 1e-9,
            r.text + ": |det g| residual " + fmt(r.monge_ampere) + " of 4^n");
    worst = std::max(worst, r.monge_ampere);
  }
  return "worst residual " + fmt(worst) + " of 4^n";
}

std::string criterion_gauss_weingarten(Context&) {
  Timer t;
  double worst = 0;
  for (const CorpusEntry& entry : corpus()) {
    Expr e = parse(entry.text, entry.n);
    auto pts = sample(corpus_window(entry));
    std::size_t want = 25;
    require(pts.size() >= want, "window too small for 25 oracle points");
    for (std::size_t k = 0; k < want; ++k) {
      const auto& z = pts[k * pts.size() / want];
      PointData p = eval_point(e, z);
      double res = gauss_weingarten_residual(e, p, 1e-3);
      require(res <= 1e-5,
              std::string(entry.text) + ": Gauss-Weingarten residual " + fmt(res));
      worst = std::max(worst, res);
    }
  }
  double sec = t.seconds();
  require(sec < 30.0, "took " + fmt(sec) + " s, limit 30 s");
  return "25 points x " + std::to_string(corpus().size()) + " functions, worst " +
         fmt(worst) + ", " + fmt(sec) + " s";
}

std::string criterion_jet_convergence(Context&) {
  std::mt19937 rng(424242);
  double worst_ratio = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto pair = testsupport::draw_pair(rng);
    CJet jet = jet_eval(pair.expr, pair.point);
    auto scales = testsupport::jet_scales(jet);
    auto e3 = testsupport::jet_diffs(jet, fd_oracle(pair.expr, pair.point, 1e-3));
    auto e4 = testsupport::jet_diffs(jet, fd_oracle(pair.expr, pair.point, 1e-4));
    for (int order = 1; order <= 3; ++order) {
      double scale = 1.0 + scales[static_cast<std::size_t>(order)];
      double floor = 1e-10 * scale;
      double a3 = e3[static_cast<std::size_t>(order)];
      double a4 = e4[static_cast<std::size_t>(order)];
      // an O(h^2) law: shrinking h by 10 divides the error by ~100 until
      // the roundoff floor
      require(a4 <= std::max(0.04 * a3, floor),
              pretty_print(pair.expr) + ": order " + std::to_string(order) +
                  " errors " + fmt(a3) + " -> " + fmt(a4) + " are not O(h^2)");
      require(a3 <= 5e-2 * scale,
              pretty_print(pair.expr) + ": error at h=1e-3 is implausibly large");
      if (a3 > floor) worst_ratio = std::max(worst_ratio, a4 / a3);
    }
  }
  return "100 expression/point pairs, worst step ratio " + fmt(worst_ratio);
}

std::string criterion_degeneracy_gating(Context& ctx) {
  // flat case: gate refuses every point, CLI exits 3
  Expr flat = parse("z1^2/2", 1);
  ChartWindow w;
  w.n = 1;
  w.lo = Eigen::Vector2d(-1, -1);
  w.hi = Eigen::Vector2d(1, 1);
  w.grid = {5};
  for (const auto& z : sample(w)) {
    std::vector<Complex> pt{z(0)};
    Eigen::MatrixXcd tau(1, 1);
    tau(0, 0) = jet_eval(flat, pt).hess(0, 0);
    require(!nondegeneracy(tau).ok, "z1^2/2 must be degenerate everywhere");
  }
  bool threw = false;
  try {
    run_suite(flat, w);
  } catch (const AllPointsDegenerate&) {
    threw = true;
  }
  require(threw, "run_suite must raise when every sample is degenerate");
  auto r = testsupport::run_cli(ctx.cli, "check -n 1 -F 'z1^2/2' --window -1 1 -1 1 --grid 5",
                                ctx.work);
  require(r.exit_code == 3, "check must exit 3, got " + std::to_string(r.exit_code));

  // mixed case: a window crossing Im z = 0 excludes exactly the gated samples
  Expr cubic = parse("z1^3/6", 1);
  ChartWindow wc;
  wc.n = 1;
  wc.lo = Eigen::Vector2d(-1, -1.6);
  wc.hi = Eigen::Vector2d(1, 1.6);
  wc.grid = {11, 5};  // Im rows at 0, +-0.8, +-1.6
  auto pts = sample(wc);
  std::size_t expected = 0;
  for (const auto& z : pts) {
    Eigen::MatrixXcd tau(1, 1);
    tau(0, 0) = z(0);  // d^2(z^3/6) = z
    if (!nondegeneracy(tau).ok) ++expected;
  }
  VerificationReport rep = run_suite(cubic, wc);
  require(expected > 0, "window must actually cross the degenerate locus");
  require(rep.n_degenerate == expected,
          "excluded " + std::to_string(rep.n_degenerate) + " samples, expected " +
              std::to_string(expected));
  require(rep.pass, "suite must pass on the nondegenerate remainder");
  return "flat case exits 3; mixed window excludes exactly " + std::to_string(expected) +
         "/" + std::to_string(pts.size()) + " samples and passes";
}

std::string criterion_determinism(Context& ctx) {
  std::string check_args =
      "check -n 1 -F 'z1^3/6' --window -1 1 0.8 1.6 --grid 9 --oracle";
  auto a = testsupport::run_cli(ctx.cli, check_args, ctx.work);
  auto b = testsupport::run_cli(ctx.cli, check_args, ctx.work);
  require(a.exit_code == 0 && b.exit_code == 0, "check runs must pass");
  require(!a.out.empty(), "check must print a report");
  require(a.out == b.out, "consecutive check reports differ");

  fs::path m1 = ctx.work / "det1.obj", m2 = ctx.work / "det2.obj";
  std::string mesh_args = "mesh -n 1 -F 'i*z1^2/2' --window -1 1 -1 1 --grid 33 -o ";
  auto c = testsupport::run_cli(ctx.cli, mesh_args + "'" + m1.string() + "'", ctx.work);
  auto d = testsupport::run_cli(ctx.cli, mesh_args + "'" + m2.string() + "'", ctx.work);
  require(c.exit_code == 0 && d.exit_code == 0, "mesh runs must pass");
  std::string obj1 = testsupport::slurp(m1), obj2 = testsupport::slurp(m2);
  require(!obj1.empty() && obj1 == obj2, "consecutive OBJ exports differ");
  return "byte-identical JSON report (" + std::to_string(a.out.size()) +
         " bytes) and OBJ (" + std::to_string(obj1.size()) + " bytes)";
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  if (argc > 1) ctx.cli = argv[1];
  if (ctx.cli.empty()) {
    const char* env = std::getenv("PARASPHERE_CLI");
    if (env) ctx.cli = env;
  }
  ctx.work = fs::temp_directory_path() / "parasphere_acceptance";
  std::error_code ec;
  fs::remove_all(ctx.work, ec);
  fs::create_directories(ctx.work);

  struct Criterion {
    int id;
    const char* name;
    std::function<std::string(Context&)> fn;
  };
  std::vector<Criterion> criteria = {
      {1, "paraboloid ground truth", criterion_paraboloid},
      {2, "metric equals graph Hessian on the corpus", criterion_metric_equality},
      {3, "chart identity suite", criterion_chart_identities},
      {4, "Kaehler form closed form", criterion_kahler_form},
      {5, "Monge-Ampere volume condition", criterion_monge_ampere},
      {6, "Gauss-Weingarten oracle", criterion_gauss_weingarten},
      {7, "jet derivatives converge at O(h^2)", criterion_jet_convergence},
      {8, "degeneracy gating", criterion_degeneracy_gating},
      {9, "deterministic reports and meshes", criterion_determinism},
  };

  int failures = 0;
  for (auto& c : criteria) {
    try {
      std::string note = c.fn(ctx);
      std::printf("[PASS] %d %s: %s\n", c.id, c.name, note.c_str());
    } catch (const std::exception& e) {
      ++failures;
      std::printf("[FAIL] %d %s: %s\n", c.id, c.name, e.what());
    }
    std::fflush(stdout);
  }
  std::printf("%d/%zu acceptance criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
