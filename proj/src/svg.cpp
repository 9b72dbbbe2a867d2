#include "aerogrid/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "aerogrid/io.hpp"

namespace aerogrid::svg {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};
constexpr int kPaletteSize = 6;

std::string num(double v) {
  // two decimals are plenty for coordinates and keep files small
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string open_svg(int width, int height) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\" viewBox=\"0 0 " + std::to_string(width) + " " +
         std::to_string(height) +
         "\" font-family=\"sans-serif\">\n"
         "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
}

std::string text(double x, double y, const std::string& s, int size,
                 const char* anchor = "start") {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
         std::to_string(size) + "\" text-anchor=\"" + anchor + "\">" +
         escape(s) + "</text>\n";
}

// Three-stop blue -> pale yellow -> red ramp over t in [0, 1].
std::string ramp_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  auto lerp = [](int a, int b, double u) {
    return static_cast<int>(std::lround(a + (b - a) * u));
  };
  int r, g, b;
  if (t < 0.5) {
    double u = t * 2.0;
    r = lerp(0x2c, 0xff, u);
    g = lerp(0x7b, 0xff, u);
    b = lerp(0xb6, 0xbf, u);
  } else {
    double u = (t - 0.5) * 2.0;
    r = lerp(0xff, 0xd7, u);
    g = lerp(0xff, 0x19, u);
    b = lerp(0xbf, 0x1c, u);
  }
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string line_chart(const std::vector<Series>& series,
                       const std::string& title, const std::string& x_label,
                       const std::string& y_label) {
  const int width = 720;
  const int height = 420;
  const double left = 60, right = 20, top = 40, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t n = 0;
  for (const Series& s : series) {
    n = std::max(n, s.values.size());
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (n == 0) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi <= lo) {
    hi = lo + 1.0;
    lo -= 1.0;
  }

  std::string out = open_svg(width, height);
  out += text(width / 2.0, 22, title, 15, "middle");
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" +
         num(plot_w) + "\" height=\"" + num(plot_h) +
         "\" fill=\"none\" stroke=\"#444444\"/>\n";
  out += text(width / 2.0, height - 12, x_label, 12, "middle");
  out += "<g transform=\"translate(16," + num(top + plot_h / 2.0) +
         ") rotate(-90)\">" + text(0, 0, y_label, 12, "middle") + "</g>\n";
  out += text(left - 6, top + plot_h + 4, io::fmt_double(lo), 10, "end");
  out += text(left - 6, top + 10, io::fmt_double(hi), 10, "end");
  if (n > 0) {
    out += text(left, top + plot_h + 16, "0", 10, "middle");
    out += text(left + plot_w, top + plot_h + 16, std::to_string(n - 1), 10,
                "middle");
  }

  for (std::size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    if (s.values.empty()) continue;
    const char* color = kPalette[si % kPaletteSize];
    std::string pts;
    double denom = s.values.size() > 1
                       ? static_cast<double>(s.values.size() - 1)
                       : 1.0;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      double x = left + plot_w * static_cast<double>(i) / denom;
      double y = top + plot_h * (1.0 - (s.values[i] - lo) / (hi - lo));
      pts += num(x) + "," + num(y) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    double ly = top + 14 + 14 * static_cast<double>(si);
    out += "<rect x=\"" + num(left + plot_w - 130) + "\" y=\"" + num(ly - 9) +
           "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
    out += text(left + plot_w - 116, ly, s.name, 11);
  }
  out += "</svg>\n";
  return out;
}

std::string heatmap(const ScalarField& field, const std::string& title,
                    const booth::Placement* placement) {
  const GridSpec& spec = field.spec();
  int px = std::max(4, 480 / std::max(spec.width, spec.height));
  int plot_w = px * spec.width;
  int plot_h = px * spec.height;
  const int left = 20, top = 40;
  int width = plot_w + 2 * left;
  int height = plot_h + top + 40;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spec.cell_count(); ++i) {
    lo = std::min(lo, field.at_flat(i));
    hi = std::max(hi, field.at_flat(i));
  }
  double range = hi > lo ? hi - lo : 1.0;

  std::string out = open_svg(width, height);
  out += text(width / 2.0, 22, title, 15, "middle");
  for (int x = 0; x < spec.height; ++x) {
    for (int y = 0; y < spec.width; ++y) {
      double v = field.at(CellIndex{x, y});
      out += "<rect x=\"" + std::to_string(left + y * px) + "\" y=\"" +
             std::to_string(top + x * px) + "\" width=\"" +
             std::to_string(px) + "\" height=\"" + std::to_string(px) +
             "\" fill=\"" + ramp_color((v - lo) / range) + "\"/>\n";
    }
  }
  if (placement != nullptr) {
    for (CellIndex cell : placement->cells) {
      double cx = left + (cell.y + 0.5) * px;
      double cy = top + (cell.x + 0.5) * px;
      out += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" +
             num(px * 0.35) +
             "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";
    }
  }
  out += text(left, top + plot_h + 18,
              "min " + io::fmt_double(lo) + "  max " + io::fmt_double(hi), 11);
  out += "</svg>\n";
  return out;
}

std::string radar_chart(const metrics::RadarData& data,
                        const std::string& title) {
  const int width = 640;
  const int height = 520;
  const double cx = width / 2.0;
  const double cy = 260.0;
  const double radius = 170.0;
  const double pi = 3.14159265358979323846;

  std::string out = open_svg(width, height);
  out += text(cx, 24, title, 15, "middle");
  std::size_t n = data.metrics.size();
  if (n == 0) {
    out += text(cx, cy, "no shared metrics", 13, "middle");
    out += "</svg>\n";
    return out;
  }

  auto point = [&](std::size_t axis, double r01) {
    double ang = -pi / 2.0 + 2.0 * pi * static_cast<double>(axis) /
                                 static_cast<double>(n);
    return std::make_pair(cx + radius * r01 * std::cos(ang),
                          cy + radius * r01 * std::sin(ang));
  };

  for (double ring : {0.25, 0.5, 0.75, 1.0}) {
    std::string pts;
    for (std::size_t i = 0; i < n; ++i) {
      auto [x, y] = point(i, ring);
      pts += num(x) + "," + num(y) + " ";
    }
    out += "<polygon fill=\"none\" stroke=\"#cccccc\" points=\"" + pts +
           "\"/>\n";
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto [x, y] = point(i, 1.0);
    out += "<line x1=\"" + num(cx) + "\" y1=\"" + num(cy) + "\" x2=\"" +
           num(x) + "\" y2=\"" + num(y) + "\" stroke=\"#cccccc\"/>\n";
    auto [lx, ly] = point(i, 1.14);
    const char* anchor =
        lx < cx - 1.0 ? "end" : (lx > cx + 1.0 ? "start" : "middle");
    out += text(lx, ly, data.metrics[i], 10, anchor);
  }

  for (std::size_t si = 0; si < data.strategies.size(); ++si) {
    if (si >= data.values.size() || data.values[si].size() != n) continue;
    const char* color = kPalette[si % kPaletteSize];
    std::string pts;
    for (std::size_t i = 0; i < n; ++i) {
      auto [x, y] = point(i, data.values[si][i]);
      pts += num(x) + "," + num(y) + " ";
    }
    out += "<polygon fill=\"" + std::string(color) +
           "\" fill-opacity=\"0.15\" stroke=\"" + color +
           "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    double ly2 = height - 42 + 14 * static_cast<double>(si);
    out += "<rect x=\"24\" y=\"" + num(ly2 - 9) +
           "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
    out += text(40, ly2, data.strategies[si], 11);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace aerogrid::svg
