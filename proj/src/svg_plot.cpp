#include "gaitpipe/svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace gaitpipe {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
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

std::string render_distance_svg(const StepDetectionResult& r, const PlotOptions& opt) {
  const auto& raw = r.signal.raw;
  const auto& sm = r.signal.smoothed;
  const double w = opt.width_px;
  const double h = opt.height_px;
  const double left = 50, right = 10, top = 24, bottom = 30;
  const double pw = w - left - right;
  const double ph = h - top - bottom;

  double lo = 0.0, hi = 1.0;
  if (!raw.empty()) {
    lo = std::min(*std::min_element(raw.begin(), raw.end()), *std::min_element(sm.begin(), sm.end()));
    hi = std::max(*std::max_element(raw.begin(), raw.end()), *std::max_element(sm.begin(), sm.end()));
  }
  if (hi - lo < 1e-9) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double n = raw.size() > 1 ? static_cast<double>(raw.size() - 1) : 1.0;
  auto px = [&](std::size_t i) { return left + pw * static_cast<double>(i) / n; };
  auto py = [&](double v) { return top + ph * (1.0 - (v - lo) / (hi - lo)); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width_px << "\" height=\"" << opt.height_px
    << "\" viewBox=\"0 0 " << opt.width_px << ' ' << opt.height_px << "\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << opt.width_px << "\" height=\"" << opt.height_px << "\" fill=\"white\"/>\n";
  if (!opt.title.empty()) {
    o << "<text x=\"" << fmt(left) << "\" y=\"16\" font-family=\"sans-serif\" font-size=\"13\">" << escape(opt.title)
      << "</text>\n";
  }
  o << "<g stroke=\"#999\" stroke-width=\"1\">\n";
  o << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(left + pw) << "\" y2=\""
    << fmt(top + ph) << "\"/>\n";
  o << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(left) << "\" y2=\"" << fmt(top + ph)
    << "\"/>\n";
  o << "</g>\n";
  o << "<g font-family=\"sans-serif\" font-size=\"10\">\n";
  o << "<text x=\"4\" y=\"" << fmt(py(hi) + 4) << "\">" << fmt(hi) << " m</text>\n";
  o << "<text x=\"4\" y=\"" << fmt(py(lo)) << "\">" << fmt(lo) << " m</text>\n";
  o << "<text x=\"" << fmt(left + pw - 60) << "\" y=\"" << fmt(h - 8) << "\">frame " << raw.size() << "</text>\n";
  o << "</g>\n";

  auto polyline = [&](const std::vector<double>& v, const char* colour, const char* cls) {
    o << "<polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) o << ' ';
      o << fmt(px(i)) << ',' << fmt(py(v[i]));
    }
    o << "\"/>\n";
  };
  polyline(raw, "#bbbbbb", "raw");
  polyline(sm, "#1f5fa8", "smoothed");

  for (const auto& e : r.extrema) {
    const double x = px(e.frame), y = py(e.smoothed_value);
    if (e.kind == ExtremumKind::Max) {
      o << "<circle class=\"max\" cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"3.5\" fill=\"#c0392b\"/>\n";
    } else {
      o << "<rect class=\"min\" x=\"" << fmt(x - 3) << "\" y=\"" << fmt(y - 3)
        << "\" width=\"6\" height=\"6\" fill=\"#27ae60\"/>\n";
    }
  }
  if (r.dropped_first) {
    const double x = px(r.dropped_first->frame), y = py(r.dropped_first->smoothed_value);
    o << "<circle class=\"dropped\" cx=\"" << fmt(x) << "\" cy=\"" << fmt(y)
      << "\" r=\"4\" fill=\"none\" stroke=\"#555\" stroke-width=\"1.2\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace gaitpipe
