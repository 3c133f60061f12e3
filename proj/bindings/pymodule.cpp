// Python bindings for the main laboratory operations: distances, ball
// measures, the cover-content length, moduli, and the condition checkers.
// Reports cross the boundary as JSON strings (same serialization as the CLI).

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <mslab/checkers.hpp>
#include <mslab/geodesics.hpp>
#include <mslab/measures.hpp>
#include <mslab/modulus.hpp>
#include <mslab/reports.hpp>
#include <mslab/spaces.hpp>

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace py = pybind11;
using namespace mslab;

namespace {

using Pair = std::pair<double, double>;

Vec2 vec2(const Pair& p) { return {p.first, p.second}; }

Box2 corridor_box(const SpaceHandle& s, Vec2 a, Vec2 b) {
  Box2 box{std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x),
           std::max(a.y, b.y)};
  const double diag = std::hypot(box.width(), box.height());
  const double m = std::max(0.3 * diag, 0.15);
  box = {box.x0 - m, box.y0 - m, box.x1 + m, box.y1 + m};
  return {std::max(box.x0, s.domain.x0), std::max(box.y0, s.domain.y0),
          std::min(box.x1, s.domain.x1), std::min(box.y1, s.domain.y1)};
}

ModulusParams params_with(double h) {
  ModulusParams p;
  if (h > 0.0) p.h = h;
  return p;
}

double modulus_value(const std::string& space, const std::string& kind,
                     const CurveFamilySpec& spec, const std::string& method,
                     double h) {
  const SpaceHandle s = make_example(space);
  const ModulusParams p = params_with(h);
  if (method == "harmonic")
    return (kind == "ring" ? modulus_ring(s, spec, p)
                           : modulus_quadrilateral(s, spec, p))
        .value;
  if (method == "density") return modulus_density(s, spec, p).value;
  if (method == "mu") return mu_modulus(s, spec, p).value;
  throw std::invalid_argument("method must be harmonic, density, or mu");
}

}  // namespace

PYBIND11_MODULE(_mslab, m) {
  m.doc() =
      "Numerical laboratory for weighted plane metrics and spike surfaces: "
      "geodesic distances, ball measures, conformal modulus, and the "
      "metric-condition checkers, over five built-in example spaces.";

  m.def("example_ids", [] {
    return std::vector<std::string>{"euclidean", "exp-weight", "grushin-glued",
                                    "spikes-cones", "spikes-cylinders"};
  }, "Registry ids accepted by every `space` argument.");

  m.def("descriptor", [](const std::string& space) {
    return make_example(space).descriptor_json();
  }, py::arg("space"), "JSON descriptor of an example space.");

  m.def("dist",
        [](const std::string& space, const Pair& src, const Pair& dst, double h,
           int stencil) {
          const SpaceHandle s = make_example(space);
          const Vec2 a = vec2(src), b = vec2(dst);
          GridGraph g = build_grid(s, corridor_box(s, a, b), h, stencil);
          return shortest_path(g, a, b).length;
        },
        py::arg("space"), py::arg("src"), py::arg("dst"),
        py::arg("h") = 1.0 / 256.0, py::arg("stencil") = 16,
        "Grid-geodesic distance between two plane points.");

  m.def("geodesic",
        [](const std::string& space, const Pair& src, const Pair& dst, double h,
           int stencil) {
          const SpaceHandle s = make_example(space);
          const Vec2 a = vec2(src), b = vec2(dst);
          GridGraph g = build_grid(s, corridor_box(s, a, b), h, stencil);
          const PathResult pr = shortest_path(g, a, b);
          std::vector<Pair> out;
          out.reserve(pr.path.size());
          for (const Vec2& v : pr.path) out.emplace_back(v.x, v.y);
          return out;
        },
        py::arg("space"), py::arg("src"), py::arg("dst"),
        py::arg("h") = 1.0 / 256.0, py::arg("stencil") = 16,
        "Vertex list of the grid geodesic between two plane points.");

  m.def("ball_areas",
        [](const std::string& space, const std::vector<double>& center,
           const std::vector<double>& radii) {
          if (center.size() != 3)
            throw std::invalid_argument("center must have 3 coordinates");
          const SpaceHandle s = make_example(space);
          const BallMeasureTable t = ball_measure_table(
              s, {center[0], center[1], center[2]}, radii);
          std::vector<Pair> out;
          for (size_t i = 0; i < t.radii.size(); ++i)
            out.emplace_back(t.radii[i], t.values[i]);
          return out;
        },
        py::arg("space"), py::arg("center"), py::arg("radii"),
        "(r, mu(B_d(x, r))) pairs, radii sorted ascending.");

  m.def("q_dist",
        [](const std::string& space, const Pair& src, const Pair& dst, double h,
           int stencil) {
          const SpaceHandle s = make_example(space);
          const Vec2 a = vec2(src), b = vec2(dst);
          GridGraph g = build_grid(s, corridor_box(s, a, b), h, stencil);
          return q_distance(s, g, a, b);
        },
        py::arg("space"), py::arg("src"), py::arg("dst"),
        py::arg("h") = 1.0 / 128.0, py::arg("stencil") = 16,
        "Ball-gauge path metric between two plane points.");

  m.def("mu_length",
        [](const std::string& space, const std::vector<Pair>& polyline,
           const std::vector<double>& deltas) {
          const SpaceHandle s = make_example(space);
          Polyline2 c;
          c.reserve(polyline.size());
          for (const Pair& p : polyline) c.push_back(vec2(p));
          const MuLengthEstimate e = mslab::mu_length(s, c, deltas);
          py::dict out;
          out["deltas"] = e.deltas;
          out["contents"] = e.contents;
          out["extrapolated"] = e.extrapolated;
          return out;
        },
        py::arg("space"), py::arg("polyline"), py::arg("deltas"),
        "Cover-content length of a polyline with Richardson extrapolation.");

  m.def("modulus_ring",
        [](const std::string& space, const Pair& center, double r, double R,
           const std::string& method, double h) {
          return modulus_value(space, "ring",
                               ring_annulus(vec2(center), r, R, "ring"), method,
                               h);
        },
        py::arg("space"), py::arg("center"), py::arg("r"), py::arg("R"),
        py::arg("method") = "harmonic", py::arg("h") = 0.0,
        "Modulus of the family connecting the r-disk to the R-complement.");

  m.def("modulus_quad",
        [](const std::string& space, const std::vector<double>& box,
           bool vertical, const std::string& method, double h) {
          if (box.size() != 4)
            throw std::invalid_argument("box must be [x0, y0, x1, y1]");
          return modulus_value(
              space, "quad",
              quad_box({box[0], box[1], box[2], box[3]}, vertical, "quad"),
              method, h);
        },
        py::arg("space"), py::arg("box"), py::arg("vertical") = true,
        py::arg("method") = "harmonic", py::arg("h") = 0.0,
        "Modulus of the side-to-side family of an axis-aligned quadrilateral.");

  m.def("check",
        [](const std::string& space, const std::string& name) {
          const SpaceHandle s = make_example(space);
          if (name == "imm") return dump_json(to_json(check_imm(s, 2.0)));
          if (name == "upper-reg")
            return dump_json(to_json(check_upper_regularity(s)));
          if (name == "llc") {
            double lo, hi;
            if (!s.is_plane()) {
              lo = 0.06; hi = 0.25;
            } else if (s.weight.kind == WeightKind::ExpRadial) {
              lo = 0.002; hi = 0.2;
            } else {
              lo = 0.02; hi = 0.6;
            }
            return dump_json(to_json(check_llc(s, {1.25, 1.5, 2.0, 3.0}, lo, hi)));
          }
          if (name == "loewner") {
            std::vector<double> scales;
            if (!s.is_plane()) {
              scales = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
            } else {
              const double rx = s.cover_radius({0.0, 0.0});
              scales = {rx / 10.0, rx / 20.0};
            }
            return dump_json(to_json(estimate_loewner(s, {0, 0}, {1.0}, scales)));
          }
          if (name == "reciprocal")
            return dump_json(to_json(check_reciprocality_decay(
                s, {0, 0}, 0.5, {0.125, 0.0625, 0.03125})));
          if (name == "distortion")
            return dump_json(to_json(distortion_ratio(
                s, {0, 0}, {0.25, 0.125, 0.0625, 0.03125, 0.015625})));
          throw std::invalid_argument(
              "check name must be one of: imm, llc, loewner, upper-reg, "
              "reciprocal, distortion");
        },
        py::arg("space"), py::arg("name"),
        "Run a condition checker with its default probes; returns the JSON "
        "report.");
}
