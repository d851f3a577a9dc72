#include "parasphere/verify.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

namespace parasphere {

namespace {

constexpr const char* kOmegaConvention = "omega(X,Y) = g(X,JY)";

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

constexpr int kPrimes[16] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(unsigned long long i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % static_cast<unsigned long long>(base));
    i /= static_cast<unsigned long long>(base);
  }
  return r;
}

/// Run fn(i) for i in [0, count) on up to `threads` workers. The first
/// exception (by lowest index) is rethrown on the caller thread.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  if (count == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  if (threads <= 0) threads = hw > 0 ? static_cast<int>(hw) : 1;
  threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::size_t err_index = count;
  std::exception_ptr err;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

struct PointResult {
  bool degenerate = false;
  double metric_equality = 0;
  double chart_identities = 0;
  double inverse_metric = 0;
  double kahler_form = 0;
  double monge_ampere = 0;
};

struct OracleResult {
  double hessian = 0;
  double gauss_weingarten = 0;
  double jet = 0;
};

double jet_oracle_residual(const Expr& e, const Eigen::VectorXcd& z, double h) {
  std::vector<Complex> pt(z.data(), z.data() + z.size());
  CJet a = jet_eval(e, pt);
  CJet b = fd_oracle(e, pt, h);
  int n = a.arity();
  double scale = std::abs(a.val());
  double diff = std::abs(a.val() - b.val());
  for (int i = 0; i < n; ++i) {
    scale = std::max(scale, std::abs(a.grad(i)));
    diff = std::max(diff, std::abs(a.grad(i) - b.grad(i)));
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) {
      scale = std::max(scale, std::abs(a.hess(i, j)));
      diff = std::max(diff, std::abs(a.hess(i, j) - b.hess(i, j)));
    }
  for (int k = 0; k < n; ++k)
    for (int j = 0; j <= k; ++j)
      for (int i = 0; i <= j; ++i) {
        scale = std::max(scale, std::abs(a.third(i, j, k)));
        diff = std::max(diff, std::abs(a.third(i, j, k) - b.third(i, j, k)));
      }
  return diff / (1.0 + scale);
}

struct Aggregator {
  CheckStats stats;
  double sum = 0;

  explicit Aggregator(std::string name, double tol) {
    stats.name = std::move(name);
    stats.tolerance = tol;
  }

  void add(std::size_t index, const Eigen::VectorXcd& z, double residual) {
    ++stats.count;
    sum += residual;
    if (residual > stats.max_residual || stats.worst_index < 0) {
      stats.max_residual = residual;
      stats.worst_index = static_cast<long>(index);
      stats.worst_point = z;
    }
  }

  CheckStats finish() {
    if (stats.count > 0) stats.mean_residual = sum / static_cast<double>(stats.count);
    stats.pass = stats.max_residual <= stats.tolerance;
    return stats;
  }
};

nlohmann::ordered_json point_to_json(const Eigen::VectorXcd& z) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (int i = 0; i < z.size(); ++i)
    a.push_back(nlohmann::ordered_json::array({z(i).real(), z(i).imag()}));
  return a;
}

}  // namespace

void ChartWindow::validate() const {
  if (n < 1) throw Error("window arity must be >= 1");
  if (lo.size() != 2 * n || hi.size() != 2 * n)
    throw Error("window bounds must have 2n entries (Re axes then Im axes)");
  auto counts = axis_counts();
  for (int a = 0; a < 2 * n; ++a) {
    if (!(lo(a) <= hi(a))) throw Error("window axis " + std::to_string(a) + " has lo > hi");
    bool needs_extent = strategy == SampleStrategy::UniformGrid && counts[a] > 1;
    if (needs_extent && !(lo(a) < hi(a)))
      throw Error("window axis " + std::to_string(a) + " has zero extent but several samples");
  }
  if (strategy == SampleStrategy::UniformGrid) {
    for (int c : counts)
      if (c < 1) throw Error("grid counts must be positive");
  } else {
    if (samples < 1) throw Error("sample count must be positive");
  }
  if (sample_count() > 100000000ull) throw Error("window requests too many samples");
}

std::vector<int> ChartWindow::axis_counts() const {
  if (strategy != SampleStrategy::UniformGrid) return {};
  if (grid.empty()) throw Error("grid counts missing");
  if (grid.size() == 1) return std::vector<int>(static_cast<std::size_t>(2 * n), grid[0]);
  if (grid.size() != static_cast<std::size_t>(2 * n))
    throw Error("grid must have one count or one per axis");
  return grid;
}

std::size_t ChartWindow::sample_count() const {
  if (strategy == SampleStrategy::QuasiRandom) return static_cast<std::size_t>(samples);
  std::size_t total = 1;
  for (int c : axis_counts()) total *= static_cast<std::size_t>(c);
  return total;
}

std::vector<Eigen::VectorXcd> sample(const ChartWindow& w) {
  w.validate();
  std::size_t total = w.sample_count();
  std::vector<Eigen::VectorXcd> pts;
  pts.reserve(total);
  int axes = 2 * w.n;
  if (w.strategy == SampleStrategy::UniformGrid) {
    auto counts = w.axis_counts();
    std::vector<double> coord(static_cast<std::size_t>(axes));
    for (std::size_t t = 0; t < total; ++t) {
      std::size_t rem = t;
      for (int a = axes - 1; a >= 0; --a) {  // last axis fastest: row-major
        std::size_t k = static_cast<std::size_t>(counts[static_cast<std::size_t>(a)]);
        std::size_t idx = rem % k;
        rem /= k;
        coord[static_cast<std::size_t>(a)] =
            k == 1 ? 0.5 * (w.lo(a) + w.hi(a))
                   : w.lo(a) + static_cast<double>(idx) * (w.hi(a) - w.lo(a)) /
                                   static_cast<double>(k - 1);
      }
      Eigen::VectorXcd z(w.n);
      for (int j = 0; j < w.n; ++j)
        z(j) = Complex(coord[static_cast<std::size_t>(j)],
                       coord[static_cast<std::size_t>(w.n + j)]);
      pts.push_back(std::move(z));
    }
  } else {
    for (std::size_t t = 0; t < total; ++t) {
      Eigen::VectorXcd z(w.n);
      for (int j = 0; j < w.n; ++j) {
        unsigned long long idx = static_cast<unsigned long long>(w.seed) + 1 + t;
        double re = w.lo(j) + radical_inverse(idx, kPrimes[j]) * (w.hi(j) - w.lo(j));
        double im = w.lo(w.n + j) +
                    radical_inverse(idx, kPrimes[w.n + j]) * (w.hi(w.n + j) - w.lo(w.n + j));
        z(j) = Complex(re, im);
      }
      pts.push_back(std::move(z));
    }
  }
  return pts;
}

const CheckStats* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

VerificationReport run_suite(const Expr& e, const ChartWindow& w, const Tolerances& tol,
                             const OracleConfig& oracle, int threads) {
  if (e.arity() != w.n)
    throw ArityError("window arity " + std::to_string(w.n) + " does not match expression arity " +
                     std::to_string(e.arity()));
  auto pts = sample(w);
  std::size_t total = pts.size();

  std::vector<PointResult> results(total);
  Eigen::MatrixXd omega0;  // constant target for the Kaehler form
  {
    int n = w.n;
    omega0 = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    omega0.topRightCorner(n, n) = 2.0 * Eigen::MatrixXd::Identity(n, n);
    omega0.bottomLeftCorner(n, n) = -2.0 * Eigen::MatrixXd::Identity(n, n);
  }
  double vol_target = std::pow(4.0, w.n);

  parallel_for(total, threads, [&](std::size_t i) {
    PointData p = eval_point(e, pts[i]);
    Nondegeneracy nd = nondegeneracy(p.tau);
    PointResult& r = results[i];
    if (!nd.ok) {
      r.degenerate = true;
      return;
    }
    Eigen::MatrixXd g_xy = frame_change_to_affine(p, metric_g(p));
    Eigen::MatrixXd gv = graph_hessian(p);
    r.metric_equality = max_abs(g_xy - gv) / (1.0 + max_abs(g_xy));
    UvPartials P = uv_partials(p);
    r.chart_identities = chart_identity_residuals(p).max() / (1.0 + max_abs(P.u_y));
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2 * w.n, 2 * w.n);
    r.inverse_metric = max_abs(inverse_metric(p) * gv - I);
    r.kahler_form = max_abs(kahler_form(p) - omega0);
    r.monge_ampere = volume_check(p).residual / vol_target;
  });

  std::vector<std::size_t> nondeg;
  nondeg.reserve(total);
  for (std::size_t i = 0; i < total; ++i)
    if (!results[i].degenerate) nondeg.push_back(i);
  if (nondeg.empty())
    throw AllPointsDegenerate("all " + std::to_string(total) +
                              " samples lie in the degenerate locus of Im(d^2 F)");

  // Evenly spaced subsample of the nondegenerate points for the expensive
  // finite-difference checks.
  std::size_t want = std::min<std::size_t>(
      nondeg.size(), static_cast<std::size_t>(std::max(oracle.subsample, 1)));
  std::vector<std::size_t> orc_idx(want);
  for (std::size_t k = 0; k < want; ++k) orc_idx[k] = nondeg[k * nondeg.size() / want];

  std::vector<OracleResult> orc(want);
  parallel_for(want, threads, [&](std::size_t k) {
    std::size_t i = orc_idx[k];
    PointData p = eval_point(e, pts[i]);
    Eigen::MatrixXd gv = graph_hessian(p);
    orc[k].hessian = max_abs(fd_graph_hessian(e, p, oracle.h, oracle.newton) - gv);
    orc[k].gauss_weingarten = gauss_weingarten_residual(e, p, oracle.h, oracle.newton);
    if (oracle.jet_oracle) orc[k].jet = jet_oracle_residual(e, pts[i], oracle.jet_h);
  });

  VerificationReport rep;
  rep.expr_text = pretty_print(e);
  rep.n = w.n;
  rep.window = w;
  rep.n_points = total;
  rep.n_degenerate = total - nondeg.size();
  rep.tolerances = tol;
  rep.oracle = oracle;
  rep.omega_convention = kOmegaConvention;

  Aggregator metric("metric_equality", tol.metric_equality);
  Aggregator chart("chart_identities", tol.chart_identities);
  Aggregator inverse("inverse_metric", tol.inverse_metric);
  Aggregator kahler("kahler_form", tol.kahler_form);
  Aggregator monge("monge_ampere", tol.monge_ampere);
  for (std::size_t i : nondeg) {
    const PointResult& r = results[i];
    metric.add(i, pts[i], r.metric_equality);
    chart.add(i, pts[i], r.chart_identities);
    inverse.add(i, pts[i], r.inverse_metric);
    kahler.add(i, pts[i], r.kahler_form);
    monge.add(i, pts[i], r.monge_ampere);
  }
  Aggregator hess("hessian_fd_oracle", tol.hessian_oracle);
  Aggregator gw("gauss_weingarten", tol.gauss_weingarten);
  Aggregator jet("jet_fd_oracle", tol.jet_oracle);
  for (std::size_t k = 0; k < want; ++k) {
    std::size_t i = orc_idx[k];
    hess.add(i, pts[i], orc[k].hessian);
    gw.add(i, pts[i], orc[k].gauss_weingarten);
    if (oracle.jet_oracle) jet.add(i, pts[i], orc[k].jet);
  }

  rep.checks.push_back(metric.finish());
  rep.checks.push_back(chart.finish());
  rep.checks.push_back(inverse.finish());
  rep.checks.push_back(kahler.finish());
  rep.checks.push_back(monge.finish());
  rep.checks.push_back(hess.finish());
  rep.checks.push_back(gw.finish());
  if (oracle.jet_oracle) rep.checks.push_back(jet.finish());

  rep.pass = true;
  for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
  return rep;
}

std::string to_json_string(const VerificationReport& r, int indent) {
  using json = nlohmann::ordered_json;
  json j;
  j["tool"] = "parasphere";
  j["expr"] = r.expr_text;
  j["n"] = r.n;
  json win;
  win["lo"] = std::vector<double>(r.window.lo.data(), r.window.lo.data() + r.window.lo.size());
  win["hi"] = std::vector<double>(r.window.hi.data(), r.window.hi.data() + r.window.hi.size());
  if (r.window.strategy == SampleStrategy::UniformGrid) {
    win["strategy"] = "grid";
    win["grid"] = r.window.axis_counts();
  } else {
    win["strategy"] = "quasi-random";
    win["samples"] = r.window.samples;
    win["seed"] = r.window.seed;
  }
  j["window"] = win;
  j["n_points"] = r.n_points;
  j["n_degenerate"] = r.n_degenerate;
  json tols;
  tols["metric_equality"] = r.tolerances.metric_equality;
  tols["chart_identities"] = r.tolerances.chart_identities;
  tols["inverse_metric"] = r.tolerances.inverse_metric;
  tols["kahler_form"] = r.tolerances.kahler_form;
  tols["monge_ampere"] = r.tolerances.monge_ampere;
  tols["hessian_fd_oracle"] = r.tolerances.hessian_oracle;
  tols["gauss_weingarten"] = r.tolerances.gauss_weingarten;
  if (r.oracle.jet_oracle) tols["jet_fd_oracle"] = r.tolerances.jet_oracle;
  j["tolerances"] = tols;
  json orc;
  orc["h"] = r.oracle.h;
  orc["subsample"] = r.oracle.subsample;
  orc["jet_oracle"] = r.oracle.jet_oracle;
  if (r.oracle.jet_oracle) orc["jet_h"] = r.oracle.jet_h;
  orc["newton_tol"] = r.oracle.newton.tol;
  orc["newton_max_iter"] = r.oracle.newton.max_iter;
  j["oracle"] = orc;
  j["convention"] = {{"omega", r.omega_convention}};
  json checks;
  for (const auto& c : r.checks) {
    json jc;
    jc["max_residual"] = c.max_residual;
    jc["mean_residual"] = c.mean_residual;
    jc["tolerance"] = c.tolerance;
    jc["count"] = c.count;
    jc["pass"] = c.pass;
    if (c.worst_index >= 0) {
      jc["worst"] = {{"index", c.worst_index}, {"z", point_to_json(c.worst_point)}};
    }
    checks[c.name] = jc;
  }
  j["checks"] = checks;
  j["pass"] = r.pass;
  return j.dump(indent) + "\n";
}

}  // namespace parasphere
