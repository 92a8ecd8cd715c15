#ifndef QC1D_SVG_HPP
#define QC1D_SVG_HPP

#include <string>
#include <vector>

namespace qc1d {

/// One curve of a log-log plot.
struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Writes a self-contained log-log SVG line plot with decade ticks and a
/// legend. Nonpositive samples are dropped (log scale).
void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series);

} // namespace qc1d

#endif
