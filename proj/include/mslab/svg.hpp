#pragma once

#include <mslab/geodesics.hpp>
#include <mslab/spaces.hpp>

#include <string>
#include <vector>

namespace mslab {

// ---------------------------------------------------------------------------
// Dependency-light SVG emission: a fixed square viewBox, a linear world-to-
// pixel map (y flipped), and hand-printed polyline/circle/text elements with
// two-decimal coordinates.  Output is a pure function of the draw calls, so
// figures re-render byte-identically.
// ---------------------------------------------------------------------------

class SvgCanvas {
 public:
  explicit SvgCanvas(Box2 world, int size_px = 800);

  Vec2 to_px(Vec2 world) const;

  void polyline(const Polyline2& pts, const std::string& stroke,
                double width_px, double opacity = 1.0);
  // Marker dot with a pixel radius.
  void dot(Vec2 center, double radius_px, const std::string& fill);
  // World-radius circle outline.
  void circle(Vec2 center, double radius_world, const std::string& stroke,
              double width_px);
  void text(Vec2 anchor, const std::string& s, int font_px,
            const std::string& fill);

  std::string finish() const;

 private:
  Box2 world_;
  int size_ = 800;
  double scale_ = 1.0;
  std::string body_;
};

// ---------------------------------------------------------------------------
// Geodesic fan figure: shortest grid paths from a source to targets spread
// uniformly on a circle, drawn over the target circle.  With the exponential
// weight every geodesic to the far side detours through the metric puncture
// at the origin; `min_origin_dist_upper_left` certifies that: per target with
// polar angle strictly inside (90, 180) degrees, take the path's closest
// vertex distance to the origin, then keep the WORST such target, so a small
// value means every upper-left geodesic passes near the puncture.
// ---------------------------------------------------------------------------

struct FanFigure {
  Vec2 source;
  double circle_radius = 1.0;
  double h = 0.0;
  std::vector<Vec2> targets;
  std::vector<PathResult> paths;          // straight chords when control=true
  double min_origin_dist_upper_left = 0.0;
  bool control = false;                   // Euclidean straight-segment variant
};

// Computes the fan on `space` (single Dijkstra).  `targets` points are taken
// on the circle of radius `circle_radius` about the origin at uniform angles
// starting at angle 0.  When `single` is non-null the fan collapses to that
// one target (a target equal to the source yields a one-vertex path).  When
// `control` is set paths are straight chords and no grid is built.
FanFigure figure_fan(const SpaceHandle& space, Vec2 source, int targets,
                     double circle_radius, double h, int stencil,
                     const Vec2* single = nullptr, bool control = false);

// Renders the fan: target circle, the paths, a source marker, an origin
// marker, and a one-line caption.
std::string fan_svg(const FanFigure& fan);

}  // namespace mslab
