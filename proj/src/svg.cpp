#include <mslab/svg.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mslab {

namespace {

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

SvgCanvas::SvgCanvas(Box2 world, int size_px) : world_(world), size_(size_px) {
  const double span = std::max(world.width(), world.height());
  if (span <= 0.0) throw std::invalid_argument("svg: empty world box");
  scale_ = size_ / span;
}

Vec2 SvgCanvas::to_px(Vec2 w) const {
  // y flipped: world up is pixel up.
  return {(w.x - world_.x0) * scale_, size_ - (w.y - world_.y0) * scale_};
}

void SvgCanvas::polyline(const Polyline2& pts, const std::string& stroke,
                         double width_px, double opacity) {
  if (pts.empty()) return;
  if (pts.size() == 1) {  // degenerate path: draw its single vertex as a dot
    dot(pts[0], std::max(width_px, 2.0), stroke);
    return;
  }
  body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
           px(width_px) + "\"";
  if (opacity != 1.0) body_ += " stroke-opacity=\"" + px(opacity) + "\"";
  body_ += " points=\"";
  for (size_t i = 0; i < pts.size(); ++i) {
    const Vec2 p = to_px(pts[i]);
    if (i) body_ += ' ';
    body_ += px(p.x) + "," + px(p.y);
  }
  body_ += "\"/>\n";
}

void SvgCanvas::dot(Vec2 center, double radius_px, const std::string& fill) {
  const Vec2 p = to_px(center);
  body_ += "<circle cx=\"" + px(p.x) + "\" cy=\"" + px(p.y) + "\" r=\"" +
           px(radius_px) + "\" fill=\"" + fill + "\"/>\n";
}

void SvgCanvas::circle(Vec2 center, double radius_world,
                       const std::string& stroke, double width_px) {
  const Vec2 p = to_px(center);
  body_ += "<circle cx=\"" + px(p.x) + "\" cy=\"" + px(p.y) + "\" r=\"" +
           px(radius_world * scale_) + "\" fill=\"none\" stroke=\"" + stroke +
           "\" stroke-width=\"" + px(width_px) + "\"/>\n";
}

void SvgCanvas::text(Vec2 anchor, const std::string& s, int font_px,
                     const std::string& fill) {
  const Vec2 p = to_px(anchor);
  body_ += "<text x=\"" + px(p.x) + "\" y=\"" + px(p.y) + "\" font-size=\"" +
           std::to_string(font_px) +
           "\" font-family=\"sans-serif\" fill=\"" + fill + "\">" + s +
           "</text>\n";
}

std::string SvgCanvas::finish() const {
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " +
         std::to_string(size_) + " " + std::to_string(size_) +
         "\" width=\"" + std::to_string(size_) + "\" height=\"" +
         std::to_string(size_) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += body_;
  out += "</svg>\n";
  return out;
}

FanFigure figure_fan(const SpaceHandle& space, Vec2 source, int targets,
                     double circle_radius, double h, int stencil,
                     const Vec2* single, bool control) {
  if (targets < 1) throw std::invalid_argument("figure: need at least one target");
  if (h <= 0.0) throw std::invalid_argument("figure: h must be positive");
  FanFigure fan;
  fan.source = source;
  fan.circle_radius = circle_radius;
  fan.h = h;
  fan.control = control;
  if (single) {
    fan.targets = {*single};
  } else {
    for (int k = 0; k < targets; ++k) {
      const double a = 2.0 * M_PI * k / targets;
      fan.targets.push_back(
          {circle_radius * std::cos(a), circle_radius * std::sin(a)});
    }
  }

  if (control) {
    for (const Vec2& t : fan.targets) {
      PathResult pr;
      if ((t - source).norm() == 0.0) {
        pr.path = {source};
      } else {
        pr.path = {source, t};
        pr.length = segment_length(space.weight, source, t);
      }
      fan.paths.push_back(std::move(pr));
    }
  } else {
    // Snap the half-width to a whole number of cells so the origin — the
    // point the fan's passage claim is judged against — is an exact node.
    const double reach = std::ceil((circle_radius * 1.12 + 0.05) / h) * h;
    Box2 box{std::max(space.domain.x0, -reach), std::max(space.domain.y0, -reach),
             std::min(space.domain.x1, reach), std::min(space.domain.y1, reach)};
    GridGraph g = build_grid(space, box, h, stencil);
    fan.paths = geodesic_fan(g, source, fan.targets);
  }

  // Worst case over the upper-left targets of each path's closest approach
  // to the origin, so one number certifies that EVERY geodesic into the
  // (90, 180) degree sector passes near the puncture.
  double worst = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < fan.targets.size(); ++i) {
    const Vec2 t = fan.targets[i];
    const double ang = std::atan2(t.y, t.x) * 180.0 / M_PI;
    if (!(ang > 90.0 && ang < 180.0)) continue;
    double closest = std::numeric_limits<double>::infinity();
    for (const Vec2& v : fan.paths[i].path) closest = std::min(closest, v.norm());
    worst = std::max(worst, closest);
  }
  fan.min_origin_dist_upper_left =
      std::isfinite(worst) ? worst : std::numeric_limits<double>::infinity();
  return fan;
}

std::string fan_svg(const FanFigure& fan) {
  const double half = fan.circle_radius * 1.15 + 0.02;
  SvgCanvas canvas({-half, -half, half, half});
  canvas.circle({0.0, 0.0}, fan.circle_radius, "#cccccc", 1.0);
  for (const auto& pr : fan.paths) canvas.polyline(pr.path, "#1f77b4", 1.5);
  for (const Vec2& t : fan.targets) canvas.dot(t, 2.5, "#555555");
  canvas.dot({0.0, 0.0}, 4.0, "#000000");
  canvas.dot(fan.source, 4.0, "#d62728");
  char caption[160];
  std::snprintf(caption, sizeof caption,
                "geodesic fan from (%.6g, %.6g), %d target(s), h = %.6g%s",
                fan.source.x, fan.source.y, (int)fan.targets.size(), fan.h,
                fan.control ? " (straight-segment control)" : "");
  canvas.text({-half * 0.98, -half * 0.96}, caption, 16, "#333333");
  return canvas.finish();
}

}  // namespace mslab
