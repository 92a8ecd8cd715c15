#include "qc1d/svg.hpp"
#include "qc1d/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace qc1d {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

} // namespace

void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series) {
  const double width = 640, height = 480;
  const double ml = 70, mr = 20, mt = 40, mb = 55;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (xmin > xmax) { // nothing plottable
    xmin = 1.0;
    xmax = 10.0;
    ymin = 1.0;
    ymax = 10.0;
  }
  double lx0 = std::floor(std::log10(xmin));
  double lx1 = std::ceil(std::log10(xmax));
  double ly0 = std::floor(std::log10(ymin));
  double ly1 = std::ceil(std::log10(ymax));
  if (lx1 <= lx0) lx1 = lx0 + 1;
  if (ly1 <= ly0) ly1 = ly0 + 1;

  auto px = [&](double x) { return ml + (std::log10(x) - lx0) / (lx1 - lx0) * (width - ml - mr); };
  auto py = [&](double y) {
    return height - mb - (std::log10(y) - ly0) / (ly1 - ly0) * (height - mt - mb);
  };

  std::ofstream os(path);
  if (!os) throw ValidationError("write_loglog_svg: cannot open " + path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
     << "</text>\n";

  // Axes box.
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << width - ml - mr << "\" height=\""
     << height - mt - mb << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double d = lx0; d <= lx1 + 0.5; d += 1.0) {
    const double x = px(std::pow(10.0, d));
    os << "<line x1=\"" << x << "\" y1=\"" << mt << "\" x2=\"" << x << "\" y2=\"" << height - mb
       << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << x << "\" y=\"" << height - mb + 18
       << "\" text-anchor=\"middle\" font-size=\"11\">1e" << static_cast<int>(d) << "</text>\n";
  }
  for (double d = ly0; d <= ly1 + 0.5; d += 1.0) {
    const double y = py(std::pow(10.0, d));
    os << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << width - mr << "\" y2=\"" << y
       << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << ml - 6 << "\" y=\"" << y + 4
       << "\" text-anchor=\"end\" font-size=\"11\">1e" << static_cast<int>(d) << "</text>\n";
  }
  os << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
     << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
  os << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
     << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
     << (mt + height - mb) / 2 << ")\">" << y_label << "</text>\n";

  int ci = 0;
  for (const auto& s : series) {
    const char* color = kColors[ci % 6];
    std::ostringstream pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      pts << fmt(px(s.x[i])) << "," << fmt(py(s.y[i])) << " ";
    }
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\""
       << pts.str() << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      os << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i]))
         << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double lyp = mt + 16 + 16 * ci;
    os << "<line x1=\"" << width - mr - 130 << "\" y1=\"" << lyp << "\" x2=\"" << width - mr - 105
       << "\" y2=\"" << lyp << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << width - mr - 100 << "\" y=\"" << lyp + 4 << "\" font-size=\"12\">"
       << s.label << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
}

} // namespace qc1d
