#include "covnav/bench/replay_svg.hpp"

#include <sstream>

namespace covnav::bench {

namespace {
const char* kAgentColors[] = {"#d62728", "#2ca02c", "#9467bd", "#8c564b",
                              "#e377c2", "#17becf"};
}

std::string render_svg(const TrajectoryLog& log, const scene::Arena& arena) {
  const double scale = 24.0;  // pixels per meter
  const double w = arena.width * scale;
  const double h = arena.height * scale;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
    << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  s << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"#fafafa\"/>\n";

  // obstacle cells, merged into horizontal runs per row
  s << "<g fill=\"#37474f\">\n";
  for (int iy = 0; iy < arena.ny; ++iy) {
    int run_start = -1;
    for (int ix = 0; ix <= arena.nx; ++ix) {
      const bool occ = ix < arena.nx && arena.occupied(ix, iy);
      if (occ && run_start < 0) run_start = ix;
      if (!occ && run_start >= 0) {
        const double x = run_start * arena.cell_size * scale;
        const double y = (arena.ny - 1 - iy) * arena.cell_size * scale;
        const double rw = (ix - run_start) * arena.cell_size * scale;
        s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << rw
          << "\" height=\"" << arena.cell_size * scale << "\"/>\n";
        run_start = -1;
      }
    }
  }
  s << "</g>\n";

  const auto px = [&](double x) { return x * scale; };
  const auto py = [&](double y) { return (arena.height - y) * scale; };

  for (size_t i = 0; i < log.agents.size(); ++i) {
    const char* color = kAgentColors[i % (sizeof(kAgentColors) / sizeof(char*))];
    s << "<polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"2\" stroke-opacity=\"0.85\" points=\"";
    for (const auto& p : log.agents[i].poses) s << px(p.x) << ',' << py(p.y) << ' ';
    s << "\"/>\n";
  }
  for (const auto& g : log.goals) {
    s << "<circle cx=\"" << px(g.x) << "\" cy=\"" << py(g.y)
      << "\" r=\"8\" fill=\"#ff9800\" fill-opacity=\"0.9\"/>\n";
  }
  for (const auto& st : log.starts) {
    s << "<circle cx=\"" << px(st.x) << "\" cy=\"" << py(st.y)
      << "\" r=\"6\" fill=\"#1976d2\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace covnav::bench
