#include "infodemic/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace infodemic::svg {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 60;

// Fixed precision keeps the files diffable.
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
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
      default: out.push_back(c);
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void header(std::ostringstream& os, const Axes& axes) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(axes.title) << "</text>\n";
  os << "<text x=\"" << num(kLeft + (kWidth - kLeft - kRight) / 2) << "\" y=\"" << num(kHeight - 15)
     << "\" text-anchor=\"middle\">" << escape(axes.x_label) << "</text>\n";
  os << "<text x=\"18\" y=\"" << num(kTop + (kHeight - kTop - kBottom) / 2)
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << num(kTop + (kHeight - kTop - kBottom) / 2)
     << ")\">" << escape(axes.y_label) << "</text>\n";
}

void frame_axes(std::ostringstream& os, const Frame& f, bool x_ticks) {
  os << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(kWidth - kLeft - kRight)
     << "\" height=\"" << num(kHeight - kTop - kBottom) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double y = f.y0 + (f.y1 - f.y0) * i / 4.0;
    os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(f.py(y) + 4) << "\" text-anchor=\"end\">" << tick(y)
       << "</text>\n";
    if (x_ticks) {
      const double x = f.x0 + (f.x1 - f.x0) * i / 4.0;
      os << "<text x=\"" << num(f.px(x)) << "\" y=\"" << num(kHeight - kBottom + 16)
         << "\" text-anchor=\"middle\">" << tick(x) << "</text>\n";
    }
  }
}

void legend(std::ostringstream& os, const std::vector<std::pair<std::string, std::string>>& entries) {
  double y = kTop + 10;
  for (const auto& [label, color] : entries) {
    os << "<rect x=\"" << num(kWidth - kRight + 12) << "\" y=\"" << num(y - 9) << "\" width=\"12\" height=\"10\" fill=\""
       << color << "\"/>\n";
    os << "<text x=\"" << num(kWidth - kRight + 30) << "\" y=\"" << num(y) << "\">" << escape(label) << "</text>\n";
    y += 18;
  }
}

}  // namespace

std::string line_plot(const Axes& axes, const std::vector<Line>& lines) {
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y0 = x0;
  double y1 = -x0;
  for (const auto& l : lines) {
    for (std::size_t i = 0; i < l.x.size() && i < l.y.size(); ++i) {
      if (std::isnan(l.y[i])) continue;
      x0 = std::min(x0, l.x[i]);
      x1 = std::max(x1, l.x[i]);
      y0 = std::min(y0, l.y[i]);
      y1 = std::max(y1, l.y[i]);
    }
  }
  if (!std::isfinite(x0)) {
    x0 = 0;
    x1 = 1;
    y0 = 0;
    y1 = 1;
  }
  if (axes.y_min) y0 = *axes.y_min;
  if (axes.y_max) y1 = *axes.y_max;
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  const Frame f{x0, x1, y0, y1};

  std::ostringstream os;
  header(os, axes);
  frame_axes(os, f, true);
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& l : lines) {
    std::string points;
    auto flush = [&] {
      if (!points.empty()) {
        os << "<polyline fill=\"none\" stroke=\"" << l.color << "\" stroke-width=\"1.5\""
           << (l.dashed ? " stroke-dasharray=\"5,4\"" : "") << " points=\"" << points << "\"/>\n";
      }
      points.clear();
    };
    for (std::size_t i = 0; i < l.x.size() && i < l.y.size(); ++i) {
      if (std::isnan(l.y[i])) {
        flush();
        continue;
      }
      if (!points.empty()) points.push_back(' ');
      points += num(f.px(l.x[i])) + "," + num(f.py(std::clamp(l.y[i], y0, y1)));
    }
    flush();
    if (!l.label.empty()) entries.emplace_back(l.label, l.color);
  }
  legend(os, entries);
  os << "</svg>\n";
  return os.str();
}

std::string bar_chart(const Axes& axes, const std::vector<std::string>& series_labels,
                      const std::vector<std::string>& colors, const std::vector<BarGroup>& groups,
                      std::optional<double> reference) {
  double y1 = reference.value_or(0.0);
  for (const auto& g : groups) {
    for (double v : g.values) {
      if (!std::isnan(v)) y1 = std::max(y1, v);
    }
  }
  if (axes.y_max) y1 = *axes.y_max;
  if (y1 <= 0) y1 = 1;
  const double y0 = axes.y_min.value_or(0.0);
  const Frame f{0, static_cast<double>(std::max<std::size_t>(groups.size(), 1)), y0, y1 * 1.05};

  std::ostringstream os;
  header(os, axes);
  frame_axes(os, f, false);
  const double slot = (kWidth - kLeft - kRight) / static_cast<double>(std::max<std::size_t>(groups.size(), 1));
  const double n_series = static_cast<double>(std::max<std::size_t>(series_labels.size(), 1));
  const double bar = slot * 0.8 / n_series;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double base = kLeft + slot * static_cast<double>(g) + slot * 0.1;
    for (std::size_t s = 0; s < groups[g].values.size(); ++s) {
      const double v = groups[g].values[s];
      if (std::isnan(v)) continue;
      const double top = f.py(std::min(v, f.y1));
      os << "<rect x=\"" << num(base + bar * static_cast<double>(s)) << "\" y=\"" << num(top) << "\" width=\""
         << num(bar * 0.9) << "\" height=\"" << num(f.py(y0) - top) << "\" fill=\""
         << colors[s % colors.size()] << "\"/>\n";
    }
    os << "<text x=\"" << num(base + slot * 0.4) << "\" y=\"" << num(kHeight - kBottom + 16)
       << "\" text-anchor=\"middle\" font-size=\"10\">" << escape(groups[g].label) << "</text>\n";
  }
  if (reference) {
    os << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kWidth - kRight) << "\" y1=\"" << num(f.py(*reference))
       << "\" y2=\"" << num(f.py(*reference)) << "\" stroke=\"black\" stroke-dasharray=\"5,4\"/>\n";
  }
  std::vector<std::pair<std::string, std::string>> entries;
  for (std::size_t s = 0; s < series_labels.size(); ++s) entries.emplace_back(series_labels[s], colors[s % colors.size()]);
  legend(os, entries);
  os << "</svg>\n";
  return os.str();
}

}  // namespace infodemic::svg
