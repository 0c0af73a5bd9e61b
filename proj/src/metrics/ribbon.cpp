#include "mtms/metrics/ribbon.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "mtms/num/errors.hpp"

namespace mtms::metrics {

namespace {

constexpr double kLeft = 140.0;
constexpr double kPlotWidth = 1000.0;
constexpr double kRowHeight = 28.0;
constexpr double kRowGap = 10.0;
constexpr double kTop = 20.0;
constexpr double kLegendRow = 18.0;
constexpr int kLegendColumns = 4;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

const std::vector<std::string>& ribbon_palette() {
  static const std::vector<std::string> palette{
      "#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c", "#98df8a", "#d62728",
      "#ff9896", "#9467bd", "#c5b0d5", "#8c564b", "#c49c94", "#e377c2", "#f7b6d2",
      "#7f7f7f", "#c7c7c7", "#bcbd22", "#dbdb8d", "#17becf", "#9edae5"};
  return palette;
}

const std::string& ribbon_color(int class_id) {
  const auto& p = ribbon_palette();
  return p[static_cast<std::size_t>(class_id) % p.size()];
}

std::string export_ribbon(const LabelSequence& gt, const std::vector<RibbonRow>& models,
                          const std::vector<std::string>& class_names, const std::string& out_path,
                          const std::string& description) {
  if (gt.empty()) throw InvalidArgument("export_ribbon: empty ground truth");
  std::vector<RibbonRow> rows{{"GT", gt}};
  for (const auto& m : models) {
    if (m.labels.size() != gt.size()) {
      throw InvalidArgument("export_ribbon: row '" + m.name + "' has " + std::to_string(m.labels.size()) +
                            " frames, ground truth has " + std::to_string(gt.size()));
    }
    rows.push_back(m);
  }
  std::set<int> used;
  for (const auto& r : rows) {
    for (int y : r.labels) {
      if (y < 0) throw InvalidArgument("export_ribbon: negative label");
      used.insert(y);
    }
  }

  const double frames = static_cast<double>(gt.size());
  const double scale = kPlotWidth / frames;
  const double rows_bottom = kTop + static_cast<double>(rows.size()) * (kRowHeight + kRowGap);
  const double axis_y = rows_bottom + 4.0;
  const double legend_top = axis_y + 36.0;
  const double legend_rows = static_cast<double>((used.size() + kLegendColumns - 1) / kLegendColumns);
  const double height = legend_top + legend_rows * kLegendRow + 10.0;
  const double width = kLeft + kPlotWidth + 20.0;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
      << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  if (!description.empty()) svg << "<desc>" << escape(description) << "</desc>\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << fmt(width) << "\" height=\"" << fmt(height) << "\" fill=\"#ffffff\"/>\n";

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double y = kTop + static_cast<double>(r) * (kRowHeight + kRowGap);
    svg << "<g class=\"row\" data-name=\"" << escape(rows[r].name) << "\">\n";
    svg << "<text x=\"" << fmt(kLeft - 8.0) << "\" y=\"" << fmt(y + kRowHeight * 0.65)
        << "\" text-anchor=\"end\">" << escape(rows[r].name) << "</text>\n";
    const auto& labels = rows[r].labels;
    std::size_t start = 0;
    for (std::size_t t = 1; t <= labels.size(); ++t) {
      if (t < labels.size() && labels[t] == labels[start]) continue;
      svg << "<rect x=\"" << fmt(kLeft + static_cast<double>(start) * scale) << "\" y=\"" << fmt(y)
          << "\" width=\"" << fmt(static_cast<double>(t - start) * scale) << "\" height=\"" << fmt(kRowHeight)
          << "\" fill=\"" << ribbon_color(labels[start]) << "\" data-class=\"" << labels[start] << "\"/>\n";
      start = t;
    }
    svg << "</g>\n";
  }

  svg << "<g class=\"axis\">\n";
  svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(axis_y) << "\" x2=\"" << fmt(kLeft + kPlotWidth)
      << "\" y2=\"" << fmt(axis_y) << "\" stroke=\"#000000\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double frame = std::floor(frames * i / 4.0);
    const double x = kLeft + frame * scale;
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(axis_y) << "\" x2=\"" << fmt(x) << "\" y2=\""
        << fmt(axis_y + 5.0) << "\" stroke=\"#000000\"/>\n";
    svg << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(axis_y + 18.0) << "\" text-anchor=\"middle\">"
        << static_cast<long>(frame) << "</text>\n";
  }
  svg << "<text x=\"" << fmt(kLeft - 8.0) << "\" y=\"" << fmt(axis_y + 18.0) << "\" text-anchor=\"end\">frame</text>\n";
  svg << "</g>\n";

  svg << "<g class=\"legend\">\n";
  std::size_t i = 0;
  for (int c : used) {
    const double x = kLeft + static_cast<double>(i % kLegendColumns) * (kPlotWidth / kLegendColumns);
    const double y = legend_top + static_cast<double>(i / kLegendColumns) * kLegendRow;
    const std::string name = c < static_cast<int>(class_names.size()) ? class_names[static_cast<std::size_t>(c)]
                                                                       : std::to_string(c);
    svg << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y - 10.0) << "\" width=\"12.000\" height=\"12.000\" fill=\""
        << ribbon_color(c) << "\"/>\n";
    svg << "<text x=\"" << fmt(x + 18.0) << "\" y=\"" << fmt(y) << "\">" << escape(name) << "</text>\n";
    ++i;
  }
  svg << "</g>\n</svg>\n";

  std::string doc = svg.str();
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write ribbon " + out_path);
    out << doc;
    if (!out) throw IoError("failed writing ribbon " + out_path);
  }
  return doc;
}

}  // namespace mtms::metrics
