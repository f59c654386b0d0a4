#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lighttrap/format.hpp"

namespace lighttrap::cli {

namespace {

void attr(std::string& out, const char* name, double v) {
  out += ' ';
  out += name;
  out += "=\"";
  lighttrap::append_double(out, v);
  out += '"';
}

void attr(std::string& out, const char* name, const std::string& v) {
  out += ' ';
  out += name;
  out += "=\"";
  out += v;
  out += '"';
}

}  // namespace

SvgBuilder::SvgBuilder(double width, double height)
    : width_(width), height_(height) {}

void SvgBuilder::rect(double x, double y, double w, double h,
                      const std::string& fill) {
  body_ += "<rect";
  attr(body_, "x", x);
  attr(body_, "y", y);
  attr(body_, "width", w);
  attr(body_, "height", h);
  attr(body_, "fill", fill);
  body_ += "/>\n";
}

void SvgBuilder::circle(double cx, double cy, double r, const std::string& fill,
                        const std::string& stroke, double stroke_width) {
  body_ += "<circle";
  attr(body_, "cx", cx);
  attr(body_, "cy", cy);
  attr(body_, "r", r);
  attr(body_, "fill", fill);
  if (stroke != "none") {
    attr(body_, "stroke", stroke);
    attr(body_, "stroke-width", stroke_width);
  }
  body_ += "/>\n";
}

void SvgBuilder::line(double x1, double y1, double x2, double y2,
                      const std::string& stroke, double width) {
  body_ += "<line";
  attr(body_, "x1", x1);
  attr(body_, "y1", y1);
  attr(body_, "x2", x2);
  attr(body_, "y2", y2);
  attr(body_, "stroke", stroke);
  attr(body_, "stroke-width", width);
  body_ += "/>\n";
}

void SvgBuilder::polyline(const std::vector<double>& xs,
                          const std::vector<double>& ys,
                          const std::string& stroke, double width) {
  body_ += "<polyline points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) body_ += ' ';
    lighttrap::append_double(body_, xs[i]);
    body_ += ',';
    lighttrap::append_double(body_, ys[i]);
  }
  body_ += '"';
  attr(body_, "fill", "none");
  attr(body_, "stroke", stroke);
  attr(body_, "stroke-width", width);
  body_ += "/>\n";
}

void SvgBuilder::text(double x, double y, const std::string& s, double size,
                      const std::string& anchor, const std::string& fill) {
  body_ += "<text";
  attr(body_, "x", x);
  attr(body_, "y", y);
  attr(body_, "font-size", size);
  attr(body_, "text-anchor", anchor);
  attr(body_, "fill", fill);
  attr(body_, "font-family", "monospace");
  body_ += '>';
  body_ += s;
  body_ += "</text>\n";
}

std::string SvgBuilder::str() const {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg";
  attr(out, "xmlns", "http://www.w3.org/2000/svg");
  attr(out, "width", width_);
  attr(out, "height", height_);
  std::string view = "0 0 ";
  lighttrap::append_double(view, width_);
  view += ' ';
  lighttrap::append_double(view, height_);
  attr(out, "viewBox", view);
  out += ">\n";
  out += body_;
  out += "</svg>\n";
  return out;
}

std::string grey_shade(double t) {
  t = std::clamp(t, 0.0, 1.0);
  // light (far field) to dark (index peak)
  const int v = static_cast<int>(std::lround(235.0 - t * 185.0));
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", v, v, v);
  return buf;
}

}  // namespace lighttrap::cli
