#include <mslab/spaces.hpp>

#include <mslab/quadrature.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mslab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Distance from point p to the segment a-b in the meridian half-plane.
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.norm2();
  double s = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  s = std::max(0.0, std::min(1.0, s));
  return (p - (a + ab * s)).norm();
}

// Angular measure of {theta in [0, 2pi): A + B cos(theta) + C sin(theta) < R2}.
double theta_sublevel_measure(double A, double B, double C, double R2) {
  const double D = std::hypot(B, C);
  if (D < 1e-300) return A < R2 ? 2.0 * kPi : 0.0;
  const double cstar = (R2 - A) / D;  // need cos(psi) < cstar
  if (cstar >= 1.0) return 2.0 * kPi;
  if (cstar <= -1.0) return 0.0;
  return 2.0 * (kPi - std::acos(cstar));
}

}  // namespace

// ---------------------------------------------------------------------------
// WeightField
// ---------------------------------------------------------------------------

double WeightField::at(Vec2 p) const {
  switch (kind) {
    case WeightKind::Unit:
      return 1.0;
    case WeightKind::ExpRadial: {
      const double t = p.norm();
      if (t == 0.0) return 0.0;
      return std::exp(-1.0 / t) / (t * t);
    }
    case WeightKind::Grushin:
      return p.x > 0.0 ? std::pow(p.x, -beta) : 1.0;
  }
  return 1.0;
}

double WeightField::at2(Vec2 p) const {
  switch (kind) {
    case WeightKind::Unit:
      return 1.0;
    case WeightKind::ExpRadial: {
      const double t = p.norm();
      if (t == 0.0) return 0.0;
      const double t2 = t * t;
      return std::exp(-2.0 / t) / (t2 * t2);
    }
    case WeightKind::Grushin:
      return p.x > 0.0 ? std::pow(p.x, -2.0 * beta) : 1.0;
  }
  return 1.0;
}

Symmetry WeightField::symmetry() const {
  switch (kind) {
    case WeightKind::Unit:
    case WeightKind::ExpRadial:
      return Symmetry::Radial;
    case WeightKind::Grushin:
      return Symmetry::VerticalLines;
  }
  return Symmetry::None;
}

double WeightField::profile(double t) const {
  if (symmetry() != Symmetry::Radial)
    throw std::logic_error("WeightField::profile: field is not radial");
  if (kind == WeightKind::Unit) return 1.0;
  if (t == 0.0) return 0.0;
  return std::exp(-1.0 / t) / (t * t);
}

double WeightField::radial_primitive(double t) const {
  if (symmetry() != Symmetry::Radial)
    throw std::logic_error("WeightField::radial_primitive: field is not radial");
  if (t < 0.0) throw std::invalid_argument("radial_primitive: negative radius");
  if (kind == WeightKind::Unit) return t;
  return t == 0.0 ? 0.0 : std::exp(-1.0 / t);
}

double WeightField::horizontal_primitive(double x1) const {
  if (kind != WeightKind::Grushin)
    throw std::logic_error("horizontal_primitive: Grushin fields only");
  if (x1 <= 0.0) return x1;
  return std::pow(x1, 1.0 - beta) / (1.0 - beta);
}

double WeightField::horizontal_primitive2(double x1) const {
  if (kind != WeightKind::Grushin)
    throw std::logic_error("horizontal_primitive2: Grushin fields only");
  if (x1 <= 0.0) return x1;
  return std::pow(x1, 1.0 - 2.0 * beta) / (1.0 - 2.0 * beta);
}

std::vector<Vec2> WeightField::singular_points() const {
  if (kind == WeightKind::ExpRadial) return {Vec2{0.0, 0.0}};
  return {};
}

bool WeightField::unbounded_on_vertical_axis() const {
  return kind == WeightKind::Grushin;
}

// ---------------------------------------------------------------------------
// SpikeSurface
// ---------------------------------------------------------------------------

namespace {
void check_spike_index(const SpikeSurface& s, int n) {
  if (n < 1 || n > s.truncation)
    throw std::out_of_range("spike index outside [1, truncation]");
}
}  // namespace

double SpikeSurface::t(int n) const {
  check_spike_index(*this, n);
  return std::exp2(-static_cast<double>(n));
}

double SpikeSurface::h(int n) const {
  check_spike_index(*this, n);
  if (kind == SurfaceKind::Cones) return std::exp2(-0.5 * n);
  return std::exp2(-static_cast<double>(n));
}

double SpikeSurface::r(int n) const {
  check_spike_index(*this, n);
  if (kind == SurfaceKind::Cones) return std::exp2(-2.0 - 1.5 * n);
  return std::exp2(-2.0 - 2.0 * n);
}

double SpikeSurface::piece_area(int n) const {
  const double rn = r(n), hn = h(n);
  if (kind == SurfaceKind::Cones) return kPi * rn * std::sqrt(hn * hn + rn * rn);
  return 2.0 * kPi * rn * hn + kPi * rn * rn;
}

double SpikeSurface::removed_disk_area(int n) const {
  const double rn = r(n);
  return kPi * rn * rn;
}

double SpikeSurface::tail_area_bound() const {
  // Sum the omitted pieces directly; terms decay geometrically (ratio <= 1/2),
  // so a couple hundred terms exhaust double precision.
  double sum = 0.0;
  for (int m = 1; m <= 200; ++m) {
    const double tn = std::exp2(-static_cast<double>(truncation + m));
    double hn, rn;
    if (kind == SurfaceKind::Cones) {
      hn = std::exp2(-0.5 * (truncation + m));
      rn = std::exp2(-2.0 - 1.5 * (truncation + m));
    } else {
      hn = tn;
      rn = std::exp2(-2.0 - 2.0 * (truncation + m));
    }
    const double piece = kind == SurfaceKind::Cones
                             ? kPi * rn * (hn + rn)  // >= pi r sqrt(h^2+r^2)
                             : 2.0 * kPi * rn * hn + kPi * rn * rn;
    sum += piece;
    if (piece < 1e-300) break;
  }
  return sum;
}

double SpikeSurface::surface_offset(Vec3 p) const {
  const Vec2 xy{p.x, p.y};
  // Plane part = {(x, y, 0) : (x, y) outside every open removed disk}.  If the
  // horizontal projection falls inside a removed disk the nearest plane-part
  // point sits on that disk's rim, not directly below.
  double plane_dist = std::abs(p.z);
  for (int n = 1; n <= truncation; ++n) {
    const double rho = (xy - Vec2{t(n), 0.0}).norm();
    if (rho < r(n)) {
      plane_dist = std::hypot(r(n) - rho, p.z);
      break;  // disks are pairwise disjoint
    }
  }
  double best = plane_dist;
  // Spike pieces, reduced to the meridian half-plane (rho, z) of each spike.
  for (int n = 1; n <= truncation; ++n) {
    const double rn = r(n), hn = h(n);
    const double rho = (xy - Vec2{t(n), 0.0}).norm();
    const Vec2 m{rho, p.z};
    double spike;
    if (kind == SurfaceKind::Cones) {
      spike = point_segment_distance(m, Vec2{rn, 0.0}, Vec2{0.0, hn});
    } else {
      const double side = point_segment_distance(m, Vec2{rn, 0.0}, Vec2{rn, hn});
      const double cap = std::hypot(std::max(rho - rn, 0.0), p.z - hn);
      spike = std::min(side, cap);
    }
    best = std::min(best, spike);
  }
  return best;
}

bool SpikeSurface::on_surface(Vec3 p, double tol) const {
  return surface_offset(p) <= tol;
}

double SpikeSurface::piece_area_in_ball(int n, Vec3 c, double R) const {
  check_spike_index(*this, n);
  if (!(R > 0.0)) throw std::invalid_argument("piece_area_in_ball: R must be > 0");
  const double T = t(n), rn = r(n), hn = h(n);
  const double R2 = R * R;
  const QuadTol tol{1e-14, 1e-9};

  // Point at meridian radius rho, height z, angle theta around (T, 0, z):
  // |p - c|^2 = A(rho, z) + B(rho) cos(theta) + C(rho) sin(theta).
  auto A = [&](double rho, double z) {
    const double dx = T - c.x, dz = z - c.z;
    return dx * dx + c.y * c.y + rho * rho + dz * dz;
  };
  auto B = [&](double rho) { return 2.0 * (T - c.x) * rho; };
  auto C = [&](double rho) { return -2.0 * c.y * rho; };

  // Every surface point at height z has |p - c| >= |z - c.z|, so the
  // meridian integrand vanishes outside [c.z - R, c.z + R]; clipping keeps
  // small balls visible to the adaptive quadrature.
  const double z_lo = std::max(0.0, c.z - R), z_hi = std::min(hn, c.z + R);

  if (kind == SurfaceKind::Cones) {
    if (z_lo >= z_hi) return 0.0;
    const double slant = std::sqrt(1.0 + (rn / hn) * (rn / hn));
    auto f = [&](double z) {
      const double rho = rn * (1.0 - z / hn);
      return rho * theta_sublevel_measure(A(rho, z), B(rho), C(rho), R2);
    };
    return slant * integrate(f, z_lo, z_hi, tol);
  }
  auto tube = [&](double z) {
    return theta_sublevel_measure(A(rn, z), B(rn), C(rn), R2);
  };
  auto cap = [&](double rho) {
    return rho * theta_sublevel_measure(A(rho, hn), B(rho), C(rho), R2);
  };
  double area = z_lo < z_hi ? rn * integrate(tube, z_lo, z_hi, tol) : 0.0;
  // Cap points have |p - c| >= hypot(rho - rho_c, hn - c.z) with rho_c the
  // axis distance of c's footprint.
  const double dzc = hn - c.z;
  if (R2 > dzc * dzc) {
    const double rxy = std::sqrt(R2 - dzc * dzc);
    const double rho_c = std::hypot(c.x - T, c.y);
    const double r_lo = std::max(0.0, rho_c - rxy), r_hi = std::min(rn, rho_c + rxy);
    if (r_lo < r_hi) area += integrate(cap, r_lo, r_hi, tol);
  }
  return area;
}

// ---------------------------------------------------------------------------
// SpaceHandle + registry
// ---------------------------------------------------------------------------

double SpaceHandle::cover_radius(Vec2 x) const {
  if (geometry == GeometryKind::Surface) return 0.5;
  switch (weight.kind) {
    case WeightKind::Unit:
      return 1.0;
    case WeightKind::ExpRadial: {
      const double t = x.norm();
      return t == 0.0 ? 0.1 : std::min(0.5 * t, 0.1);
    }
    case WeightKind::Grushin:
      return 0.5;
  }
  return 1.0;
}

double SpaceHandle::cover_radius3(Vec3 x) const {
  (void)x;
  return 0.5;
}

std::string SpaceHandle::descriptor_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["params"] = params;
  j["geometry"] = geometry == GeometryKind::Plane ? "plane" : "surface";
  switch (measure) {
    case MeasureKind::Lebesgue: j["measure"] = "lebesgue"; break;
    case MeasureKind::WeightedArea: j["measure"] = "weighted-area"; break;
    case MeasureKind::SurfaceHausdorff2: j["measure"] = "hausdorff2"; break;
  }
  j["domain"] = {domain.x0, domain.y0, domain.x1, domain.y1};
  if (surface) {
    j["truncation"] = surface->truncation;
    j["tail_area_bound"] = surface->tail_area_bound();
  }
  if (weight.kind == WeightKind::Grushin) j["beta"] = weight.beta;
  return j.dump();
}

namespace {

struct ParsedId {
  std::string name;
  std::vector<std::pair<std::string, std::string>> kv;
};

ParsedId parse_id(const std::string& id) {
  ParsedId out;
  const auto colon = id.find(':');
  out.name = id.substr(0, colon);
  if (colon == std::string::npos) return out;
  std::string rest = id.substr(colon + 1);
  size_t pos = 0;
  while (pos < rest.size()) {
    auto comma = rest.find(',', pos);
    if (comma == std::string::npos) comma = rest.size();
    const std::string item = rest.substr(pos, comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("make_example: malformed parameter '" + item + "'");
    out.kv.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    pos = comma + 1;
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("make_example: parameter " + key + "=" + value +
                                " is not a number");
  }
  if (used != value.size())
    throw std::invalid_argument("make_example: parameter " + key + "=" + value +
                                " is not a number");
  return v;
}

}  // namespace

SpaceHandle make_example(const std::string& id) {
  const ParsedId parsed = parse_id(id);
  SpaceHandle s;
  s.name = parsed.name;

  auto reject_unknown = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : parsed.kv) {
      bool ok = false;
      for (const char* a : allowed)
        if (k == a) ok = true;
      if (!ok)
        throw std::invalid_argument("make_example: unknown parameter '" + k +
                                    "' for " + parsed.name);
      (void)v;
    }
  };

  if (parsed.name == "euclidean") {
    reject_unknown({});
    s.geometry = GeometryKind::Plane;
    s.weight.kind = WeightKind::Unit;
    s.measure = MeasureKind::Lebesgue;
    // Wide enough for the annulus fixtures with outer radius e^2.
    s.domain = Box2{-8.0, -8.0, 8.0, 8.0};
    s.weight.domain = s.domain;
    return s;
  }

  if (parsed.name == "exp-weight") {
    reject_unknown({});
    s.geometry = GeometryKind::Plane;
    s.weight.kind = WeightKind::ExpRadial;
    s.measure = MeasureKind::WeightedArea;
    // Largest centered box inscribed in the chart |x| <= 2.
    const double half = 2.0 / std::sqrt(2.0);
    s.domain = Box2{-half, -half, half, half};
    s.weight.domain = s.domain;
    return s;
  }

  if (parsed.name == "grushin-glued") {
    reject_unknown({"beta"});
    double beta = 0.25;
    for (const auto& [k, v] : parsed.kv)
      if (k == "beta") beta = parse_double(k, v);
    if (!(beta > 0.0 && beta < 0.5))
      throw std::invalid_argument("make_example: grushin-glued requires beta in (0, 1/2)");
    s.geometry = GeometryKind::Plane;
    s.weight.kind = WeightKind::Grushin;
    s.weight.beta = beta;
    s.measure = MeasureKind::WeightedArea;
    s.domain = Box2{-4.0, -4.0, 4.0, 4.0};
    s.weight.domain = s.domain;
    char buf[64];
    std::snprintf(buf, sizeof buf, "beta=%.12g", beta);
    s.params = buf;
    return s;
  }

  if (parsed.name == "spikes-cones" || parsed.name == "spikes-cylinders") {
    reject_unknown({"N"});
    int N = 12;
    for (const auto& [k, v] : parsed.kv)
      if (k == "N") N = static_cast<int>(parse_double(k, v));
    if (N < 1) throw std::invalid_argument("make_example: truncation N must be >= 1");
    auto surf = std::make_shared<SpikeSurface>();
    surf->kind = parsed.name == "spikes-cones" ? SurfaceKind::Cones
                                               : SurfaceKind::Cylinders;
    surf->truncation = N;
    s.geometry = GeometryKind::Surface;
    s.surface = std::move(surf);
    s.measure = MeasureKind::SurfaceHausdorff2;
    s.domain = Box2{-1.5, -1.5, 1.5, 1.5};
    char buf[32];
    std::snprintf(buf, sizeof buf, "N=%d", N);
    s.params = buf;
    return s;
  }

  throw std::invalid_argument("make_example: unknown example '" + parsed.name + "'");
}

double weight_at(const SpaceHandle& space, Vec2 x) {
  if (space.geometry != GeometryKind::Plane)
    throw std::invalid_argument("weight_at: space has no planar weight field");
  if (!space.domain.contains(x))
    throw std::domain_error("weight_at: point outside the numerical domain");
  return space.weight.at(x);
}

double ambient_distance(const SpikeSurface& s, Vec3 p, Vec3 q, double tol) {
  const double op = s.surface_offset(p), oq = s.surface_offset(q);
  if (op > tol || oq > tol) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "ambient_distance: point off surface (offsets %.3g, %.3g, tol %.3g)",
                  op, oq, tol);
    throw std::domain_error(buf);
  }
  return (p - q).norm();
}

}  // namespace mslab
