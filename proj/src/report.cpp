#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "sfem/benchmarks.hpp"

namespace sfem {

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string convergence_csv_header() { return "method,problem,level,ndof,h,L2,H1\n"; }

std::string convergence_csv_row(const ConvergenceReport& report, const LevelResult& r) {
  std::ostringstream os;
  os << to_string(report.method) << ',' << to_string(report.problem) << ',' << r.level << ',' << r.ndof << ','
     << shortest(r.h) << ',' << shortest(r.l2) << ',' << shortest(r.h1) << '\n';
  return os.str();
}

std::string convergence_csv(const std::vector<ConvergenceReport>& reports) {
  std::string out = convergence_csv_header();
  std::size_t rows = 0;
  for (const auto& r : reports) rows = std::max(rows, r.levels.size());
  // Level-major so that methods interleave level by level.
  for (std::size_t level = 0; level < rows; ++level) {
    for (const auto& r : reports) {
      if (level < r.levels.size()) out += convergence_csv_row(r, r.levels[level]);
    }
  }
  return out;
}

std::string convergence_svg(const std::vector<ConvergenceReport>& reports) {
  const double width = 640, height = 480, left = 80, right = 220, top = 30, bottom = 60;
  double hmin = std::numeric_limits<double>::max(), hmax = 0.0;
  double emin = std::numeric_limits<double>::max(), emax = 0.0;
  for (const auto& r : reports) {
    for (const auto& l : r.levels) {
      hmin = std::min(hmin, l.h);
      hmax = std::max(hmax, l.h);
      for (double e : {l.l2, l.h1}) {
        if (e > 0.0) {
          emin = std::min(emin, e);
          emax = std::max(emax, e);
        }
      }
    }
  }
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (hmax <= 0.0 || emax <= 0.0) {
    os << "</svg>\n";
    return os.str();
  }
  const double lx0 = std::floor(std::log10(hmin) * 4.0) / 4.0 - 0.05, lx1 = std::ceil(std::log10(hmax) * 4.0) / 4.0 + 0.05;
  const double ly0 = std::floor(std::log10(emin)), ly1 = std::ceil(std::log10(emax));
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double h) { return left + (std::log10(h) - lx0) / (lx1 - lx0) * pw; };
  auto py = [&](double e) { return top + (ly1 - std::log10(e)) / std::max(ly1 - ly0, 1.0) * ph; };

  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double d = ly0; d <= ly1; d += 1.0) {
    const double y = py(std::pow(10.0, d));
    os << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << y << "\" y2=\"" << y
       << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << y + 4 << "\" font-size=\"11\" text-anchor=\"end\">1e"
       << static_cast<int>(d) << "</text>\n";
  }
  for (const auto& r : reports) {
    for (const auto& l : r.levels) {
      os << "<text x=\"" << px(l.h) << "\" y=\"" << top + ph + 16 << "\" font-size=\"10\" text-anchor=\"middle\">"
         << fixed(l.h, 3) << "</text>\n";
    }
    break;
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15 << "\" font-size=\"13\" text-anchor=\"middle\">"
     << "mesh size h</text>\n";
  os << "<text x=\"20\" y=\"" << top + ph / 2 << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
     << top + ph / 2 << ")\">relative error</text>\n";

  const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  int series = 0;
  for (const auto& r : reports) {
    for (int norm = 0; norm < 2; ++norm, ++series) {
      const char* colour = colours[series % 4];
      std::ostringstream pts;
      for (const auto& l : r.levels) {
        const double e = norm == 0 ? l.l2 : l.h1;
        if (e > 0.0) pts << px(l.h) << ',' << py(e) << ' ';
      }
      os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\""
         << (norm == 1 ? " stroke-dasharray=\"6,3\"" : "") << " points=\"" << pts.str() << "\"/>\n";
      for (const auto& l : r.levels) {
        const double e = norm == 0 ? l.l2 : l.h1;
        if (e > 0.0) os << "<circle cx=\"" << px(l.h) << "\" cy=\"" << py(e) << "\" r=\"3\" fill=\"" << colour << "\"/>\n";
      }
      const auto& rate = norm == 0 ? r.l2_rate : r.h1_rate;
      const double ly = top + 16 + 20 * series;
      os << "<line x1=\"" << left + pw + 12 << "\" x2=\"" << left + pw + 36 << "\" y1=\"" << ly - 4 << "\" y2=\"" << ly - 4
         << "\" stroke=\"" << colour << "\" stroke-width=\"2\"" << (norm == 1 ? " stroke-dasharray=\"6,3\"" : "")
         << "/>\n";
      os << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly << "\" font-size=\"12\">" << to_string(r.method) << ' '
         << (norm == 0 ? "L2" : "H1") << " slope " << fixed(rate.slope, 2) << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace sfem
