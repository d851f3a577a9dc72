#include <benchmark/benchmark.h>

#include <parasphere/verify.hpp>

using namespace parasphere;

namespace {

const Expr& expr_n1() {
  static Expr e = parse("1/z1 + i*exp(z1)", 1);
  return e;
}

const Expr& expr_n2() {
  static Expr e = parse("i*(z1^2+z2^2)/2 + z1^2*z2/4", 2);
  return e;
}

const Expr& expr_n3() {
  static Expr e = parse("i*(z1^2+z2^2+z3^2)/2 + z1*z2*z3", 3);
  return e;
}

std::vector<Complex> point(int n) {
  std::vector<Complex> p(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) p[static_cast<std::size_t>(k)] = Complex(2.0 + 0.1 * k, 0.3);
  return p;
}

Eigen::VectorXcd epoint(int n) {
  auto p = point(n);
  return Eigen::Map<const Eigen::VectorXcd>(p.data(), n);
}

const Expr& expr_for(int n) { return n == 1 ? expr_n1() : n == 2 ? expr_n2() : expr_n3(); }

void BM_parse(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(parse("i*(z1^2+z2^2)/2 + z1^2*z2/4 + exp(z1)", 2));
}
BENCHMARK(BM_parse);

void BM_eval_complex(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  auto p = point(n);
  for (auto _ : state) benchmark::DoNotOptimize(eval_complex(expr_for(n), p));
}
BENCHMARK(BM_eval_complex)->Arg(1)->Arg(2)->Arg(3);

void BM_jet_eval(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  auto p = point(n);
  for (auto _ : state) benchmark::DoNotOptimize(jet_eval(expr_for(n), p));
}
BENCHMARK(BM_jet_eval)->Arg(1)->Arg(2)->Arg(3);

void BM_eval_point(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Eigen::VectorXcd z = epoint(n);
  for (auto _ : state) benchmark::DoNotOptimize(eval_point(expr_for(n), z));
}
BENCHMARK(BM_eval_point)->Arg(1)->Arg(2)->Arg(3);

// the full algebraic residual set computed per sample in a verification run
void BM_point_checks(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  const Expr& e = expr_for(n);
  Eigen::VectorXcd z = epoint(n);
  for (auto _ : state) {
    PointData p = eval_point(e, z);
    Eigen::MatrixXd g_xy = frame_change_to_affine(p, metric_g(p));
    Eigen::MatrixXd gv = graph_hessian(p);
    benchmark::DoNotOptimize((g_xy - gv).cwiseAbs().maxCoeff());
    benchmark::DoNotOptimize(chart_identity_residuals(p).max());
    benchmark::DoNotOptimize(inverse_metric(p));
    benchmark::DoNotOptimize(kahler_form(p));
    benchmark::DoNotOptimize(volume_check(p).residual);
  }
}
BENCHMARK(BM_point_checks)->Arg(1)->Arg(2)->Arg(3);

void BM_invert_chart(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  const Expr& e = expr_for(n);
  PointData p = eval_point(e, epoint(n));
  Eigen::VectorXd x = p.x, y = p.y;
  x(0) += 1e-3;
  y(0) -= 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(invert_chart(e, x, y, p.z));
}
BENCHMARK(BM_invert_chart)->Arg(1)->Arg(2)->Arg(3);

void BM_gauss_weingarten(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  const Expr& e = expr_for(n);
  PointData p = eval_point(e, epoint(n));
  for (auto _ : state)
    benchmark::DoNotOptimize(gauss_weingarten_residual(e, p, 1e-3));
}
BENCHMARK(BM_gauss_weingarten)->Arg(1)->Arg(3);

void BM_run_suite(benchmark::State& state) {
  Expr e = parse("z1^3/6", 1);
  ChartWindow w;
  w.n = 1;
  w.lo = Eigen::Vector2d(-1.0, 0.2);
  w.hi = Eigen::Vector2d(1.0, 1.0);
  w.grid = {static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(run_suite(e, w));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(w.sample_count()));
}
BENCHMARK(BM_run_suite)->Arg(9)->Arg(17)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
