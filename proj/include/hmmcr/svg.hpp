#ifndef HMMCR_SVG_HPP
#define HMMCR_SVG_HPP

// Minimal standalone SVG plotting: line series, histogram bars, points,
// vertical reference lines and labels on a single pair of linear axes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace hmmcr::svg {

class Plot {
 public:
  Plot(std::string title, std::string xlabel, std::string ylabel)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

  void line(const std::vector<double>& x, const std::vector<double>& y, std::string color,
            std::string label = {}) {
    series_.push_back({x, y, std::move(color), std::move(label), Kind::Line, 0.0});
    extend(x, y);
  }

  void points(const std::vector<double>& x, const std::vector<double>& y, std::string color) {
    series_.push_back({x, y, std::move(color), {}, Kind::Points, 0.0});
    extend(x, y);
  }

  // Bars of equal width centred on x.
  void bars(const std::vector<double>& x, const std::vector<double>& h, double width,
            std::string color) {
    series_.push_back({x, h, std::move(color), {}, Kind::Bars, width});
    extend({x.front() - width / 2, x.back() + width / 2}, {0.0});
    extend(x, h);
  }

  void vline(double x, std::string color, bool dashed = true) {
    vlines_.push_back({x, std::move(color), dashed});
    extend({x}, {});
  }

  void note(std::string text) { notes_.push_back(std::move(text)); }

  std::string render() const {
    std::ostringstream o;
    double x0 = xmin_, x1 = xmax_, y0 = ymin_, y1 = ymax_;
    if (!(x1 > x0)) { x0 -= 0.5; x1 += 0.5; }
    if (!(y1 > y0)) { y0 -= 0.5; y1 += 0.5; }
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); };
    auto py = [&](double y) { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); };

    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << kWidth / 2 << "\" y=\"16\" text-anchor=\"middle\" font-size=\"13\">"
      << escape(title_) << "</text>\n";
    o << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight
      << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kHeight - kBottom << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double xv = x0 + (x1 - x0) * i / 4.0;
      const double yv = y0 + (y1 - y0) * i / 4.0;
      o << "<text x=\"" << px(xv) << "\" y=\"" << kHeight - kBottom + 14
        << "\" text-anchor=\"middle\">" << tick(xv) << "</text>\n";
      o << "<text x=\"" << kLeft - 4 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
        << tick(yv) << "</text>\n";
    }
    o << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 6 << "\" text-anchor=\"middle\">"
      << escape(xlabel_) << "</text>\n";
    o << "<text x=\"12\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 12 " << kHeight / 2
      << ")\" text-anchor=\"middle\">" << escape(ylabel_) << "</text>\n";

    int legend = 0;
    for (const auto& s : series_) {
      switch (s.kind) {
        case Kind::Line: {
          o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1\" points=\"";
          for (std::size_t i = 0; i < s.x.size(); ++i) o << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
          o << "\"/>\n";
          break;
        }
        case Kind::Points:
          for (std::size_t i = 0; i < s.x.size(); ++i) {
            o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\""
              << s.color << "\"/>\n";
          }
          break;
        case Kind::Bars:
          for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double left = px(s.x[i] - s.width / 2);
            const double right = px(s.x[i] + s.width / 2);
            o << "<rect x=\"" << left << "\" y=\"" << py(s.y[i]) << "\" width=\""
              << std::max(0.0, right - left) << "\" height=\"" << py(0.0) - py(s.y[i])
              << "\" fill=\"" << s.color << "\" fill-opacity=\"0.5\"/>\n";
          }
          break;
      }
      if (!s.label.empty()) {
        o << "<text x=\"" << kWidth - kRight - 4 << "\" y=\"" << kTop + 12 + 14 * legend++
          << "\" text-anchor=\"end\" fill=\"" << s.color << "\">" << escape(s.label) << "</text>\n";
      }
    }
    for (const auto& v : vlines_) {
      o << "<line x1=\"" << px(v.x) << "\" y1=\"" << kTop << "\" x2=\"" << px(v.x) << "\" y2=\""
        << kHeight - kBottom << "\" stroke=\"" << v.color << "\""
        << (v.dashed ? " stroke-dasharray=\"5,4\"" : "") << "/>\n";
    }
    for (std::size_t i = 0; i < notes_.size(); ++i) {
      o << "<text x=\"" << kLeft + 6 << "\" y=\"" << kTop + 12 + 14 * i << "\">" << escape(notes_[i])
        << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
  }

 private:
  enum class Kind { Line, Points, Bars };
  struct Series {
    std::vector<double> x, y;
    std::string color, label;
    Kind kind;
    double width;
  };
  struct VLine {
    double x;
    std::string color;
    bool dashed;
  };

  static constexpr int kWidth = 640, kHeight = 400, kLeft = 60, kRight = 20, kTop = 28,
                       kBottom = 40;

  void extend(const std::vector<double>& x, const std::vector<double>& y) {
    for (double v : x) {
      if (std::isfinite(v)) { xmin_ = std::min(xmin_, v); xmax_ = std::max(xmax_, v); }
    }
    for (double v : y) {
      if (std::isfinite(v)) { ymin_ = std::min(ymin_, v); ymax_ = std::max(ymax_, v); }
    }
  }

  static std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }

  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
      }
    }
    return out;
  }

  std::string title_, xlabel_, ylabel_;
  std::vector<Series> series_;
  std::vector<VLine> vlines_;
  std::vector<std::string> notes_;
  double xmin_ = std::numeric_limits<double>::infinity();
  double xmax_ = -std::numeric_limits<double>::infinity();
  double ymin_ = std::numeric_limits<double>::infinity();
  double ymax_ = -std::numeric_limits<double>::infinity();
};

}  // namespace hmmcr::svg

#endif  // HMMCR_SVG_HPP
