#include "upress/artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace upress {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string grid_csv(const PressureEstimate& est, const std::string& config_hash,
                     const std::string& version) {
  std::ostringstream os;
  os << "# config_hash=" << config_hash << " version=" << version << "\n";
  os << "base_index,eps,n,offset,log_sum_sep,log_sum_span\n";
  for (const GridRow& row : est.grid) {
    os << row.base_index << ',' << format_g17(row.eps) << ',' << row.n << ',' << row.offset << ','
       << format_g17(row.log_sum_sep) << ',' << format_g17(row.log_sum_span) << "\n";
  }
  return os.str();
}

std::string derivative_csv(const DerivativeProbe& probe, const std::string& config_hash,
                           const std::string& version) {
  std::ostringstream os;
  os << "# config_hash=" << config_hash << " version=" << version << "\n";
  os << "t,P_value,spread\n";
  for (std::size_t i = 0; i < probe.t_grid.size(); ++i) {
    os << format_g17(probe.t_grid[i]) << ',' << format_g17(probe.values[i]) << ','
       << format_g17(probe.spreads[i]) << "\n";
  }
  return os.str();
}

std::string leaf_svg(const LeafSegment& leaf) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\" width=\"640\" "
        "height=\"640\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"1\" height=\"1\" fill=\"white\" stroke=\"#888\" "
        "stroke-width=\"0.002\"/>\n";

  auto emit_polyline = [&os](const std::vector<Vec2>& run) {
    if (run.size() < 2) return;
    os << "<polyline fill=\"none\" stroke=\"#b03030\" stroke-width=\"0.003\" points=\"";
    for (const Vec2& p : run) os << p[0] << ',' << 1.0 - p[1] << ' ';
    os << "\"/>\n";
  };

  std::vector<Vec2> run;
  Vec2 prev{0.0, 0.0};
  for (std::size_t i = 0; i < leaf.points.size(); ++i) {
    Vec2 w{wrap_unit(leaf.points[i][0]), wrap_unit(leaf.points[i][1])};
    if (!run.empty() &&
        (std::fabs(w[0] - prev[0]) > 0.5 || std::fabs(w[1] - prev[1]) > 0.5)) {
      emit_polyline(run);
      run.clear();
    }
    run.push_back(w);
    prev = w;
  }
  emit_polyline(run);

  const Vec2 b{wrap_unit(leaf.base[0]), wrap_unit(leaf.base[1])};
  os << "<circle cx=\"" << b[0] << "\" cy=\"" << 1.0 - b[1]
     << "\" r=\"0.006\" fill=\"#2040a0\"/>\n";
  os << "</svg>\n";
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace upress
