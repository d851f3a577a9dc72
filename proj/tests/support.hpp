#pragma once

// Shared helpers for the unit and acceptance suites: a deterministic random
// expression generator, a subprocess runner for CLI tests, and minimal
// parsers for the exported artifacts.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <parasphere/cjet.hpp>
#include <parasphere/expr.hpp>

namespace testsupport {

inline std::string format_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

/// Random expression text over z1..zn. Denominators, log and sqrt arguments
/// are shifted away from the origin so most draws evaluate cleanly on
/// [-0.9, 0.9]^{2n}; callers still reject pathological draws.
inline std::string random_expr_text(std::mt19937& rng, int n, int depth) {
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto leaf = [&]() -> std::string {
    int c = pick(0, 9);
    if (c < 6) return "z" + std::to_string(1 + pick(0, n - 1));
    if (c < 9) return format_short(std::uniform_real_distribution<double>(0.2, 3.0)(rng));
    return "i";
  };
  if (depth <= 0) return leaf();
  auto sub = [&] { return random_expr_text(rng, n, depth - 1); };
  switch (pick(0, 11)) {
    case 0:
    case 1: return "(" + sub() + " + " + sub() + ")";
    case 2: return "(" + sub() + " - " + sub() + ")";
    case 3:
    case 4: return "(" + sub() + ")*(" + sub() + ")";
    case 5: return "(" + sub() + ")/(" + sub() + " + 4)";
    case 6: return "(" + sub() + ")^" + std::to_string(pick(2, 4));
    case 7: return "(" + sub() + " + 4)^(-" + std::to_string(pick(1, 2)) + ")";
    case 8: return "-(" + sub() + ")";
    case 9: {
      static const char* fns[] = {"exp", "sin", "cos", "sinh", "cosh"};
      return std::string(fns[pick(0, 4)]) + "((" + sub() + ")/4)";
    }
    case 10: return std::string(pick(0, 1) ? "log" : "sqrt") + "(" + sub() + " + 4)";
    default: return leaf();
  }
}

inline std::vector<parasphere::Complex> random_point(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> box(-0.9, 0.9);
  std::vector<parasphere::Complex> pt(static_cast<std::size_t>(n));
  for (auto& z : pt) z = parasphere::Complex(box(rng), box(rng));
  return pt;
}

/// Largest |component| of a jet, per derivative order 0..3.
inline std::array<double, 4> jet_scales(const parasphere::CJet& j) {
  int n = j.arity();
  std::array<double, 4> s{std::abs(j.val()), 0.0, 0.0, 0.0};
  for (int i = 0; i < n; ++i) s[1] = std::max(s[1], std::abs(j.grad(i)));
  for (int q = 0; q < n; ++q)
    for (int p = 0; p <= q; ++p) s[2] = std::max(s[2], std::abs(j.hess(p, q)));
  for (int r = 0; r < n; ++r)
    for (int q = 0; q <= r; ++q)
      for (int p = 0; p <= q; ++p) s[3] = std::max(s[3], std::abs(j.third(p, q, r)));
  return s;
}

/// Largest |difference| between two jets, per derivative order 0..3.
inline std::array<double, 4> jet_diffs(const parasphere::CJet& a, const parasphere::CJet& b) {
  int n = a.arity();
  std::array<double, 4> d{std::abs(a.val() - b.val()), 0.0, 0.0, 0.0};
  for (int i = 0; i < n; ++i) d[1] = std::max(d[1], std::abs(a.grad(i) - b.grad(i)));
  for (int q = 0; q < n; ++q)
    for (int p = 0; p <= q; ++p) d[2] = std::max(d[2], std::abs(a.hess(p, q) - b.hess(p, q)));
  for (int r = 0; r < n; ++r)
    for (int q = 0; q <= r; ++q)
      for (int p = 0; p <= q; ++p)
        d[3] = std::max(d[3], std::abs(a.third(p, q, r) - b.third(p, q, r)));
  return d;
}

/// Draw (expression, point) pairs that evaluate to moderate values, so
/// finite-difference stencils stay away from singularities.
struct RandomPair {
  parasphere::Expr expr;
  std::vector<parasphere::Complex> point;
};

inline RandomPair draw_pair(std::mt19937& rng, int max_arity = 3) {
  using namespace parasphere;
  for (;;) {
    int n = std::uniform_int_distribution<int>(1, max_arity)(rng);
    std::string text = random_expr_text(rng, n, std::uniform_int_distribution<int>(1, 3)(rng));
    auto pt = random_point(rng, n);
    try {
      Expr e = parse(text, n);
      CJet j = jet_eval(e, pt);
      auto s = jet_scales(j);
      double m = std::max(std::max(s[0], s[1]), std::max(s[2], s[3]));
      if (!(m < 100.0)) continue;
      (void)fd_oracle(e, pt, 1e-3);  // all stencil points must evaluate
      return {e, pt};
    } catch (const Error&) {
      continue;
    }
  }
}

// ---------------------------------------------------------------------------
// Subprocess runner (POSIX).

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream ifs(p, std::ios::binary);
  std::stringstream ss;
  ss << ifs.rdbuf();
  return ss.str();
}

/// Run `cli` with the given argument string, capturing stdout/stderr.
inline RunResult run_cli(const std::string& cli, const std::string& args,
                         const std::filesystem::path& workdir) {
  static int counter = 0;
  std::filesystem::create_directories(workdir);
  auto out = workdir / ("out" + std::to_string(counter) + ".txt");
  auto err = workdir / ("err" + std::to_string(counter) + ".txt");
  ++counter;
  std::string cmd = "'" + cli + "' " + args + " > '" + out.string() + "' 2> '" +
                    err.string() + "'";
  int status = std::system(cmd.c_str());
  RunResult r;
  if (status != -1 && WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

// ---------------------------------------------------------------------------
// Minimal readers for exported artifacts.

struct ObjData {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<int, 3>> faces;  // 1-based as written
};

inline ObjData read_obj(const std::filesystem::path& p) {
  ObjData d;
  std::ifstream ifs(p);
  std::string line;
  while (std::getline(ifs, line)) {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "v") {
      std::array<double, 3> v{};
      ss >> v[0] >> v[1] >> v[2];
      d.vertices.push_back(v);
    } else if (tag == "f") {
      std::array<int, 3> f{};
      ss >> f[0] >> f[1] >> f[2];
      d.faces.push_back(f);
    }
  }
  return d;
}

inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream ifs(p);
  std::string line;
  while (std::getline(ifs, line)) {
    std::vector<std::string> row;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) row.push_back(field);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace testsupport
