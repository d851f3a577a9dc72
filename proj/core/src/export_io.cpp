#include "parasphere/export_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

namespace parasphere {

namespace {

/// Locale-independent formatting; `digits` significant digits, or shortest
/// round-trip form when digits <= 0.
std::string format_double(double v, int digits) {
  char buf[48];
  std::to_chars_result res =
      digits > 0 ? std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits)
                 : std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream ofs(path, std::ios::binary);
  if (!ofs) throw IoError("cannot open '" + path.string() + "' for writing");
  return ofs;
}

}  // namespace

MeshData build_mesh(const Expr& e, const ChartWindow& w) {
  if (e.arity() != 1 || w.n != 1)
    throw ArityError("mesh export is defined for one complex variable only");
  if (w.strategy != SampleStrategy::UniformGrid)
    throw Error("mesh export requires a uniform grid window");
  w.validate();

  auto counts = w.axis_counts();
  int kx = counts[0], ku = counts[1];
  auto pts = sample(w);  // row-major, Im axis fastest

  MeshData m;
  std::size_t total = pts.size();
  m.vertices.reserve(total);
  std::vector<char> degenerate(total, 0);
  for (std::size_t i = 0; i < total; ++i) {
    PointData p = eval_point(e, pts[i]);
    m.vertices.push_back({p.imm(0), p.imm(1), p.imm(2)});
    Nondegeneracy nd = nondegeneracy(p.tau);
    m.min_sv.push_back(nd.min_sv);
    if (nd.ok) {
      m.det_residual.push_back(volume_check(p).residual);
      m.signature_flag.push_back(nd.signature.first == 1 ? 1 : -1);
    } else {
      degenerate[i] = 1;
      ++m.n_degenerate_vertices;
      m.det_residual.push_back(std::numeric_limits<double>::quiet_NaN());
      m.signature_flag.push_back(0);
    }
  }
  if (m.n_degenerate_vertices == total)
    throw AllPointsDegenerate("all " + std::to_string(total) +
                              " mesh samples lie in the degenerate locus");

  auto vid = [&](int ix, int iu) { return ix * ku + iu; };
  for (int ix = 0; ix + 1 < kx; ++ix)
    for (int iu = 0; iu + 1 < ku; ++iu) {
      int v00 = vid(ix, iu), v01 = vid(ix, iu + 1);
      int v10 = vid(ix + 1, iu), v11 = vid(ix + 1, iu + 1);
      if (degenerate[static_cast<std::size_t>(v00)] || degenerate[static_cast<std::size_t>(v01)] ||
          degenerate[static_cast<std::size_t>(v10)] || degenerate[static_cast<std::size_t>(v11)]) {
        ++m.n_dropped_cells;
        continue;
      }
      m.faces.push_back({v00, v10, v11});
      m.faces.push_back({v00, v11, v01});
    }
  return m;
}

void write_obj(const MeshData& m, const std::filesystem::path& path) {
  std::ofstream ofs = open_for_write(path);
  std::string line;
  for (const auto& v : m.vertices) {
    line = "v ";
    line += format_double(v[0], 9);
    line += ' ';
    line += format_double(v[1], 9);
    line += ' ';
    line += format_double(v[2], 9);
    line += '\n';
    ofs << line;
  }
  for (const auto& f : m.faces) {
    line = "f " + std::to_string(f[0] + 1) + ' ' + std::to_string(f[1] + 1) + ' ' +
           std::to_string(f[2] + 1) + '\n';
    ofs << line;
  }
  ofs.flush();
  if (!ofs) throw IoError("failed writing '" + path.string() + "'");
}

void write_csv(std::span<const PointData> points, const std::filesystem::path& path) {
  if (points.empty()) throw Error("no points to export");
  int n = points.front().n();
  std::ofstream ofs = open_for_write(path);
  std::string header;
  for (int i = 0; i < n; ++i) header += "x" + std::to_string(i + 1) + ",";
  for (int i = 0; i < n; ++i) header += "y" + std::to_string(i + 1) + ",";
  header += "f,det_gxy,min_sv\n";
  ofs << header;
  for (const PointData& p : points) {
    Nondegeneracy nd = nondegeneracy(p.tau);
    if (!nd.ok) continue;
    VolumeCheck vc = volume_check(p);
    std::string row;
    for (int i = 0; i < n; ++i) row += csv_field(format_double(p.x(i), 0)) + ",";
    for (int i = 0; i < n; ++i) row += csv_field(format_double(p.y(i), 0)) + ",";
    row += csv_field(format_double(p.f, 0)) + ",";
    row += csv_field(format_double(vc.det_gxy, 0)) + ",";
    row += csv_field(format_double(nd.min_sv, 0)) + "\n";
    ofs << row;
  }
  ofs.flush();
  if (!ofs) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace parasphere
