#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <vector>

#include "parasphere/verify.hpp"

namespace parasphere {

/// Triangulated graph surface for n = 1: vertices are immersion points
/// (x, y, f) over a grid window, two triangles per quad cell. Cells touching
/// a degenerate sample carry no faces. Per-vertex diagnostics are kept
/// alongside (NaN / 0 on degenerate vertices).
struct MeshData {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<int, 3>> faces;  // 0-based here, 1-based in OBJ
  std::vector<double> det_residual;       // | |det g_xy| - 4 |
  std::vector<double> min_sv;             // smallest singular value of Im tau
  std::vector<int> signature_flag;        // +1 pos. definite, -1 neg. definite, 0 otherwise
  std::size_t n_degenerate_vertices = 0;
  std::size_t n_dropped_cells = 0;
};

/// Sample the window grid and triangulate. Requires arity 1 and a
/// UniformGrid window. Throws ArityError otherwise and AllPointsDegenerate
/// when no vertex passes the nondegeneracy gate.
MeshData build_mesh(const Expr& e, const ChartWindow& w);

/// Wavefront OBJ: one `v x y z` line per vertex (9 significant digits,
/// locale independent) then 1-indexed `f a b c` lines. Deterministic bytes.
void write_obj(const MeshData& m, const std::filesystem::path& path);

/// CSV point cloud with header x1..xn,y1..yn,f,det_gxy,min_sv and one row
/// per nondegenerate point; degenerate points are skipped.
void write_csv(std::span<const PointData> points, const std::filesystem::path& path);

}  // namespace parasphere
