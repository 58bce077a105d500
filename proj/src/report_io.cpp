#include "antiplane/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "antiplane/types.hpp"

namespace antiplane {

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
  if (header.empty()) throw InvalidInput("CSV header must not be empty");
  for (std::size_t k = 0; k < header.size(); ++k) text_ += (k ? "," : "") + header[k];
  text_ += '\n';
}

CsvTable& CsvTable::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw InvalidInput("CSV row width does not match the header");
  for (std::size_t k = 0; k < cells.size(); ++k) text_ += (k ? "," : "") + cells[k];
  text_ += '\n';
  ++rows_;
  return *this;
}

std::string CsvTable::str() const { return text_; }

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + temp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + temp.string());
  }
  std::filesystem::rename(temp, path);
}

namespace {

std::string escape_xml(const std::string& s) {
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

std::string fixed(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

}  // namespace

std::string loglog_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series) {
  constexpr double width = 640, height = 440, left = 80, right = 160, top = 40, bottom = 60;
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo, y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (!(s.x[k] > 0.0) || !(s.y[k] > 0.0)) continue;
      x_lo = std::min(x_lo, std::log10(s.x[k]));
      x_hi = std::max(x_hi, std::log10(s.x[k]));
      y_lo = std::min(y_lo, std::log10(s.y[k]));
      y_hi = std::max(y_hi, std::log10(s.y[k]));
    }
  }
  if (!std::isfinite(x_lo)) x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  x_lo = std::floor(x_lo), x_hi = std::max(std::ceil(x_hi), x_lo + 1);
  y_lo = std::floor(y_lo), y_hi = std::max(std::ceil(y_hi), y_lo + 1);
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  auto px = [&](double lx) { return left + (lx - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double ly) { return top + (y_hi - ly) / (y_hi - y_lo) * plot_h; };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << escape_xml(title)
      << "</text>\n"
      << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(x_lo); e <= static_cast<int>(x_hi); ++e) {
    const double x = px(e);
    svg << "<line x1=\"" << fixed(x) << "\" y1=\"" << top << "\" x2=\"" << fixed(x) << "\" y2=\"" << top + plot_h
        << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << fixed(x) << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\" font-size=\"12\">1e"
        << e << "</text>\n";
  }
  for (int e = static_cast<int>(y_lo); e <= static_cast<int>(y_hi); ++e) {
    const double y = py(e);
    svg << "<line x1=\"" << left << "\" y1=\"" << fixed(y) << "\" x2=\"" << left + plot_w << "\" y2=\"" << fixed(y)
        << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << left - 8 << "\" y=\"" << fixed(y + 4) << "\" text-anchor=\"end\" font-size=\"12\">1e" << e
        << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 16 << "\" text-anchor=\"middle\" font-size=\"14\">"
      << escape_xml(x_label) << "</text>\n"
      << "<text x=\"20\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 "
      << top + plot_h / 2 << ")\">" << escape_xml(y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % 5];
    std::string points;
    for (std::size_t k = 0; k < series[s].x.size() && k < series[s].y.size(); ++k) {
      if (!(series[s].x[k] > 0.0) || !(series[s].y[k] > 0.0)) continue;
      points += fixed(px(std::log10(series[s].x[k]))) + "," + fixed(py(std::log10(series[s].y[k]))) + " ";
    }
    if (!points.empty()) points.pop_back();
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n"
        << "<text x=\"" << left + plot_w + 10 << "\" y=\"" << top + 16 + 18 * s << "\" font-size=\"12\" fill=\"" << color
        << "\">" << escape_xml(series[s].label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace antiplane
