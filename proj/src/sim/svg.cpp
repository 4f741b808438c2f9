#include <algorithm>
#include <cmath>
#include <sstream>

#include "sim/sim.hpp"

namespace ioc {

// Phase portrait of the first two states with the minimizer set of the
// running cost overlaid (grid points where L < 1e-6).
std::string phase_svg(const SynthesisResult& res, const Problem& p, const Trajectory& traj) {
  const double W = 640.0, H = 640.0, M = 50.0;
  double xlo = p.domain.bounds[0].lo, xhi = p.domain.bounds[0].hi;
  double ylo = p.domain.bounds[1].lo, yhi = p.domain.bounds[1].hi;
  for (const auto& x : traj.x) {
    xlo = std::min(xlo, x[0]);
    xhi = std::max(xhi, x[0]);
    ylo = std::min(ylo, x[1]);
    yhi = std::max(yhi, x[1]);
  }
  auto px = [&](double x) { return M + (x - xlo) / (xhi - xlo) * (W - 2 * M); };
  auto py = [&](double y) { return H - M - (y - ylo) / (yhi - ylo) * (H - 2 * M); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes through the origin when visible
  out << "<g stroke=\"#cccccc\" stroke-width=\"1\">\n";
  if (xlo < 0 && xhi > 0)
    out << "<line x1=\"" << px(0) << "\" y1=\"" << py(ylo) << "\" x2=\"" << px(0) << "\" y2=\""
        << py(yhi) << "\"/>\n";
  if (ylo < 0 && yhi > 0)
    out << "<line x1=\"" << px(xlo) << "\" y1=\"" << py(0) << "\" x2=\"" << px(xhi)
        << "\" y2=\"" << py(0) << "\"/>\n";
  out << "</g>\n";

  // minimizer set of the running cost: L(x) < 1e-6 on a coarse grid; for
  // third-order systems the remaining state is held at zero
  Expr L = res.running_cost();
  out << "<g fill=\"#2a9d2a\" fill-opacity=\"0.6\">\n";
  const int per = 61;
  for (int i = 0; i < per; ++i) {
    for (int j = 0; j < per; ++j) {
      std::array<double, 3> x{xlo + (xhi - xlo) * i / (per - 1),
                              ylo + (yhi - ylo) * j / (per - 1), 0.0};
      double v;
      try {
        v = L.eval(x);
      } catch (const EvalError&) {
        continue;
      }
      if (v < 1e-6)
        out << "<circle cx=\"" << px(x[0]) << "\" cy=\"" << py(x[1]) << "\" r=\"3\"/>\n";
    }
  }
  out << "</g>\n";

  // trajectory polyline (subsampled to at most ~2000 points)
  std::size_t step = std::max<std::size_t>(1, traj.x.size() / 2000);
  out << "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.5\" points=\"";
  for (std::size_t k = 0; k < traj.x.size(); k += step)
    out << px(traj.x[k][0]) << ',' << py(traj.x[k][1]) << ' ';
  out << px(traj.x.back()[0]) << ',' << py(traj.x.back()[1]);
  out << "\"/>\n";

  out << "<circle cx=\"" << px(traj.x.front()[0]) << "\" cy=\"" << py(traj.x.front()[1])
      << "\" r=\"5\" fill=\"#1f5fbf\"/>\n";
  out << "<circle cx=\"" << px(traj.x.back()[0]) << "\" cy=\"" << py(traj.x.back()[1])
      << "\" r=\"4\" fill=\"none\" stroke=\"#bf1f1f\" stroke-width=\"2\"/>\n";

  out << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">x1</text>\n";
  out << "<text x=\"14\" y=\"" << H / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
         "transform=\"rotate(-90 14 "
      << H / 2 << ")\">x2</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace ioc
