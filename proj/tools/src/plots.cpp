#include "plots.hpp"

#include <algorithm>
#include <cmath>

#include "lighttrap/format.hpp"
#include "svg.hpp"

namespace lighttrap::cli {

namespace {

struct Panel {
  double x, y, w, h;        // canvas placement
  double lo_x, hi_x, lo_y, hi_y;  // data window

  double px(double v) const { return x + (v - lo_x) / (hi_x - lo_x) * w; }
  double py(double v) const { return y + h - (v - lo_y) / (hi_y - lo_y) * h; }
};

void draw_frame(SvgBuilder& svg, const Panel& p, const std::string& title) {
  svg.line(p.x, p.y, p.x, p.y + p.h, "#555", 1.0);
  svg.line(p.x, p.y + p.h, p.x + p.w, p.y + p.h, "#555", 1.0);
  svg.text(p.x + 4, p.y + 12, title, 11.0);
  svg.text(p.x, p.y + p.h + 14, format_double(p.lo_x), 9.0);
  svg.text(p.x + p.w, p.y + p.h + 14, format_double(p.hi_x), 9.0, "end");
  svg.text(p.x - 4, p.y + p.h, format_double(p.lo_y), 9.0, "end");
  svg.text(p.x - 4, p.y + 10, format_double(p.hi_y), 9.0, "end");
}

void draw_series(SvgBuilder& svg, const Panel& p, const std::vector<double>& x,
                 const std::vector<double>& y, const std::string& color,
                 bool markers) {
  std::vector<double> px(x.size()), py(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    px[i] = p.px(x[i]);
    py[i] = p.py(y[i]);
  }
  svg.polyline(px, py, color, 1.5);
  if (markers) {
    for (std::size_t i = 0; i < px.size(); ++i) {
      svg.circle(px[i], py[i], 2.5, color);
    }
  }
}

void pad_window(double& lo, double& hi) {
  if (!(hi > lo)) {
    const double bump = std::max(1e-9, std::abs(hi) * 1e-3 + 1e-9);
    lo -= bump;
    hi += bump;
  }
  const double pad = 0.06 * (hi - lo);
  lo -= pad;
  hi += pad;
}

}  // namespace

std::string trace_figure(const Trajectory& traj, const IndexField& field) {
  SvgBuilder svg(900, 460);
  svg.rect(0, 0, 900, 460, "#ffffff");

  // left: x-y path over index shading rings
  double extent = 0.0;
  for (const TrajectorySample& s : traj.samples) {
    extent = std::max(extent, s.state.r);
  }
  extent *= 1.12;
  const double cx = 235, cy = 235, half = 205;
  const double scale = half / extent;

  const double n0 = field.sample(0.0, 0.0, 0.0, 0.0).n;
  double n_floor = n0;
  for (int k = 1; k <= 16; ++k) {
    n_floor = std::min(n_floor,
                       field.sample(extent * k / 16.0, 0.0, 0.0, 0.0).n);
  }
  // rings painted outside-in so inner (higher-index) shades sit on top
  for (int k = 16; k >= 1; --k) {
    const double r = extent * k / 16.0;
    const double n = field.sample(r, 0.0, 0.0, 0.0).n;
    const double t = (n0 > n_floor) ? (n - n_floor) / (n0 - n_floor) : 0.0;
    svg.circle(cx, cy, r * scale, grey_shade(t));
  }

  std::vector<double> xs, ys, taus, drs, dphis;
  xs.reserve(traj.samples.size());
  for (const TrajectorySample& s : traj.samples) {
    xs.push_back(cx + scale * s.state.r * std::cos(s.state.phi));
    ys.push_back(cy - scale * s.state.r * std::sin(s.state.phi));
    taus.push_back(s.state.tau);
    drs.push_back(s.state.dr);
    dphis.push_back(s.state.dphi);
  }
  svg.polyline(xs, ys, "#1f6fb2", 1.4);
  svg.circle(xs.front(), ys.front(), 4.0, "#d04a35");
  svg.text(20, 450, "x-y path over n(r) shading", 11.0);

  // right: velocity component panels
  const auto window = [](const std::vector<double>& v, double& lo, double& hi) {
    lo = *std::min_element(v.begin(), v.end());
    hi = *std::max_element(v.begin(), v.end());
    pad_window(lo, hi);
  };
  Panel top{520, 30, 340, 180, taus.front(), taus.back(), 0, 0};
  window(drs, top.lo_y, top.hi_y);
  draw_frame(svg, top, "dr/dtau");
  draw_series(svg, top, taus, drs, "#1f6fb2", false);

  Panel bot{520, 260, 340, 180, taus.front(), taus.back(), 0, 0};
  window(dphis, bot.lo_y, bot.hi_y);
  draw_frame(svg, bot, "dphi/dtau");
  draw_series(svg, bot, taus, dphis, "#35883b", false);

  return svg.str();
}

std::string sweep_figure(const std::vector<SweepRow>& rows,
                         const std::string& parameter) {
  SvgBuilder svg(640, 420);
  svg.rect(0, 0, 640, 420, "#ffffff");

  std::vector<double> xs, rmins, wos;
  for (const SweepRow& r : rows) {
    if (!std::isfinite(r.r_min)) continue;  // no-trap rows carry no point
    xs.push_back(parameter == "n_c" ? r.n_c
                 : parameter == "sigma" ? r.sigma
                                        : r.b);
    rmins.push_back(r.r_min);
    wos.push_back(r.w_o);
  }
  if (xs.empty()) {
    svg.text(20, 40, "no trapped points in the sweep", 12.0);
    return svg.str();
  }

  Panel p{70, 40, 520, 330, 0, 0, 0, 0};
  p.lo_x = *std::min_element(xs.begin(), xs.end());
  p.hi_x = *std::max_element(xs.begin(), xs.end());
  pad_window(p.lo_x, p.hi_x);
  double lo_y = std::min(*std::min_element(rmins.begin(), rmins.end()),
                         *std::min_element(wos.begin(), wos.end()));
  double hi_y = std::max(*std::max_element(rmins.begin(), rmins.end()),
                         *std::max_element(wos.begin(), wos.end()));
  pad_window(lo_y, hi_y);
  p.lo_y = lo_y;
  p.hi_y = hi_y;

  draw_frame(svg, p, "trap geometry vs " + parameter);
  draw_series(svg, p, xs, rmins, "#1f6fb2", true);
  draw_series(svg, p, xs, wos, "#d04a35", true);
  svg.text(590, 55, "r_min", 11.0, "end", "#1f6fb2");
  svg.text(590, 70, "w_o", 11.0, "end", "#d04a35");
  return svg.str();
}

std::string perturb_figure(const ScanTable& table) {
  SvgBuilder svg(640, 420);
  svg.rect(0, 0, 640, 420, "#ffffff");

  std::vector<double> xs, ys;
  for (const ScanRow& row : table.rows) {
    if (!row.ok) continue;
    xs.push_back(row.amplitude);
    ys.push_back(table.base_w_o > 0.0
                     ? std::abs(row.report.delta_w_o) / table.base_w_o
                     : 0.0);
  }
  if (xs.empty()) {
    svg.text(20, 40, "no successful scan rows", 12.0);
    return svg.str();
  }

  Panel p{70, 40, 520, 330, 0, 0, 0, 0};
  p.lo_x = *std::min_element(xs.begin(), xs.end());
  p.hi_x = *std::max_element(xs.begin(), xs.end());
  pad_window(p.lo_x, p.hi_x);
  p.lo_y = 0.0;
  p.hi_y = std::max(1.0, *std::max_element(ys.begin(), ys.end()));
  pad_window(p.lo_y, p.hi_y);

  draw_frame(svg, p, "|delta w_o| / w_o vs perturbation amplitude");
  draw_series(svg, p, xs, ys, "#1f6fb2", true);
  // the "modified entirely" bar
  svg.line(p.px(p.lo_x), p.py(0.5), p.px(p.hi_x), p.py(0.5), "#999", 0.8);
  svg.text(p.px(p.hi_x), p.py(0.5) - 4, "0.5", 9.0, "end", "#999");
  if (table.threshold_amplitude) {
    const double tx = p.px(*table.threshold_amplitude);
    svg.line(tx, p.y, tx, p.y + p.h, "#d04a35", 1.0);
    svg.text(tx + 4, p.y + 24, "threshold", 10.0, "start", "#d04a35");
  }
  return svg.str();
}

std::string sweep_rows_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "n_a,n_c,sigma,b,r_min,r_max,w_o,classification\n";
  for (const SweepRow& r : rows) {
    append_double(out, r.n_a);
    out.push_back(',');
    append_double(out, r.n_c);
    out.push_back(',');
    append_double(out, r.sigma);
    out.push_back(',');
    append_double(out, r.b);
    out.push_back(',');
    append_double(out, r.r_min);
    out.push_back(',');
    append_double(out, r.r_max);
    out.push_back(',');
    append_double(out, r.w_o);
    out.push_back(',');
    out += r.classification;
    out.push_back('\n');
  }
  return out;
}

}  // namespace lighttrap::cli
