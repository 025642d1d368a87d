#include "dfx/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "dfx/error.hpp"

namespace dfx {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 440;
constexpr double kLeft = 70;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 60;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void open_svg(std::ostringstream& svg, const std::string& title) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
      << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
      << "</text>\n";
}

void axes(std::ostringstream& svg, const std::string& xlabel, const std::string& ylabel) {
  const double x0 = kLeft;
  const double y0 = kHeight - kBottom;
  const double x1 = kWidth - kRight;
  svg << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y0)
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << num(x0) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y0)
      << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 18) << "\" text-anchor=\"middle\">"
      << escape(xlabel) << "</text>\n"
      << "<text x=\"18\" y=\"" << num((kTop + y0) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << num((kTop + y0) / 2) << ")\">" << escape(ylabel) << "</text>\n";
}

}  // namespace

std::string render_accuracy_plot(const ResultTable& table, const std::string& dataset) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& r : table) {
    if (r.dataset != dataset) continue;
    const std::string key = r.tree_size ? r.model + " size " + std::to_string(r.tree_size) : r.model;
    if (!series.count(key)) order.push_back(key);
    series[key].emplace_back(static_cast<double>(std::max<std::size_t>(r.total_leaves, 1)), r.test_accuracy);
  }
  if (order.empty()) throw Error(Errc::EmptyTable, "no result rows for dataset '" + dataset + "'");

  double xmin = INFINITY, xmax = 0, ymin = 1, ymax = 0;
  for (auto& [key, pts] : series) {
    std::stable_sort(pts.begin(), pts.end());
    for (auto [x, y] : pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  const double lx0 = std::floor(std::log10(xmin));
  const double lx1 = std::max(lx0 + 1, std::ceil(std::log10(xmax)));
  ymin = std::floor(ymin * 10) / 10;
  ymax = std::max(ymin + 0.1, std::ceil(ymax * 10) / 10);
  auto px = [&](double x) { return kLeft + (std::log10(x) - lx0) / (lx1 - lx0) * (kWidth - kRight - kLeft); };
  auto py = [&](double y) { return kHeight - kBottom - (y - ymin) / (ymax - ymin) * (kHeight - kBottom - kTop); };

  std::ostringstream svg;
  open_svg(svg, "test accuracy vs total leaves, " + dataset);
  axes(svg, "total leaves", "test accuracy");
  for (double e = lx0; e <= lx1; e += 1) {
    const double x = px(std::pow(10.0, e));
    svg << "<text x=\"" << num(x) << "\" y=\"" << num(kHeight - kBottom + 16) << "\" text-anchor=\"middle\">1e"
        << static_cast<int>(e) << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double y = ymin + (ymax - ymin) * i / 5.0;
    svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(y) + 4) << "\" text-anchor=\"end\">" << num(y)
        << "</text>\n";
  }
  for (std::size_t s = 0; s < order.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : series[order[s]]) svg << num(px(x)) << ',' << num(py(y)) << ' ';
    svg << "\"/>\n";
    const double ly = kTop + 16.0 * static_cast<double>(s);
    svg << "<line x1=\"" << num(kWidth - kRight + 12) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(kWidth - kRight + 32)
        << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << num(kWidth - kRight + 38) << "\" y=\"" << num(ly + 4) << "\">" << escape(order[s])
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_gain_bars(const GainMap& map, const std::string& title) {
  if (map.entries.empty()) throw Error(Errc::EmptyTable, "gain map has no candidate splits");
  double top = 0;
  for (const auto& e : map.entries) top = std::max(top, e.value());
  if (top <= 0) top = 1;
  std::ostringstream svg;
  open_svg(svg, "Gini gain, " + title);
  axes(svg, "feature / cut", "gain");
  const double span = kWidth - kRight - kLeft;
  const double slot = span / static_cast<double>(map.entries.size());
  for (std::size_t i = 0; i < map.entries.size(); ++i) {
    const auto& e = map.entries[i];
    const double h = std::max(0.0, e.value()) / top * (kHeight - kBottom - kTop);
    const double x = kLeft + slot * static_cast<double>(i) + slot * 0.15;
    const char* color = kPalette[static_cast<std::size_t>(e.feature - 1) % std::size(kPalette)];
    svg << "<rect class=\"bar\" x=\"" << num(x) << "\" y=\"" << num(kHeight - kBottom - h) << "\" width=\"" << num(slot * 0.7)
        << "\" height=\"" << num(h) << "\" fill=\"" << color << "\"/>\n"
        << "<text x=\"" << num(x + slot * 0.35) << "\" y=\"" << num(kHeight - kBottom + 16)
        << "\" text-anchor=\"middle\" font-size=\"10\">x" << e.feature << "&lt;=" << e.cut << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(kTop + 4) << "\" text-anchor=\"end\">" << num(top)
      << "</text>\n</svg>\n";
  return svg.str();
}

}  // namespace dfx
