#pragma once

#include <string>
#include <vector>

namespace lighttrap::cli {

/// Minimal self-contained SVG writer. Output is deterministic: coordinates
/// are rendered with shortest round-trip formatting, elements appear in call
/// order, and nothing depends on locale or environment.
class SvgBuilder {
 public:
  SvgBuilder(double width, double height);

  void rect(double x, double y, double w, double h, const std::string& fill);
  void circle(double cx, double cy, double r, const std::string& fill,
              const std::string& stroke = "none", double stroke_width = 0.0);
  void line(double x1, double y1, double x2, double y2,
            const std::string& stroke, double width = 1.0);
  void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& stroke, double width = 1.0);
  void text(double x, double y, const std::string& s, double size = 11.0,
            const std::string& anchor = "start", const std::string& fill = "#333");

  std::string str() const;

 private:
  double width_, height_;
  std::string body_;
};

/// 8-bit grey "#rrggbb" between two luminances, t in [0, 1].
std::string grey_shade(double t);

}  // namespace lighttrap::cli
