#pragma once

#include <mslab/geodesics.hpp>
#include <mslab/measures.hpp>
#include <mslab/spaces.hpp>
#include <mslab/surface_mesh.hpp>

#include <functional>
#include <string>
#include <vector>

namespace mslab {

// ---------------------------------------------------------------------------
// Curve families and their modulus
//     Mod Gamma = inf { integral rho^2 dmeasure :
//                       integral_C rho dlength >= 1 for all C in Gamma }
// computed two ways on a lattice over `bounds`:
//   harmonic-energy — weighted 5-point Laplace solve, potential 0 on one
//     plate and 1 on the other, no-flux elsewhere; the Dirichlet energy is
//     the modulus of the connecting family.  The conductance of an edge is
//     mu(edge-centered cell) / s_e^2 with s_e the d-length of the edge and
//     the cell clipped only transversally, so conformal weights cancel (the
//     scheme inherits the invariance of the continuum modulus) and the
//     unit-square modulus is exactly 1.
//   density-qp — constraint generation over discrete admissible curves
//     (stencil paths), quadratic program solved by dual coordinate ascent.
// Discrete paths under-represent the curve family, so density-qp is biased
// low while harmonic-energy is biased high; the pair brackets the value.
// ---------------------------------------------------------------------------

// SpanningRing is reserved for the family of separating curves of a ring;
// no solver currently accepts it.
enum class FamilyKind { Quadrilateral, Ring, SpanningRing };

// Membership predicates receive the query point and the lattice spacing h so
// thin sets (segments, circles) can thicken themselves to grid resolution.
using RegionPred = std::function<bool(Vec2, double)>;

struct CurveFamilySpec {
  FamilyKind kind = FamilyKind::Ring;
  std::string label;
  Box2 bounds;              // lattice window (within the space domain)
  RegionPred in_domain;     // region mask; null = all of bounds
  RegionPred in_E, in_F;    // ring kind: the two plates
  RegionPred zeta[4];       // quadrilateral kind: boundary arcs, cyclic order
};

// The four sides of a box as cyclic arcs (left, bottom, right, top);
// the Dirichlet pair is left/right when dirichlet_vertical, else bottom/top.
CurveFamilySpec quad_box(Box2 box, bool dirichlet_vertical, std::string label);
// Round annulus: E = closed disk of radius r, F = everything at radius >= R.
CurveFamilySpec ring_annulus(Vec2 center, double r, double R, std::string label);
// Connecting family between two segments inside a window.
CurveFamilySpec ring_segments(Box2 bounds, Vec2 e0, Vec2 e1, Vec2 f0, Vec2 f1,
                              std::string label);

enum class ModulusMethod { HarmonicEnergy, DensityQp };
const char* to_string(ModulusMethod m);

struct ModulusResult {
  double value = 0.0;
  ModulusMethod method = ModulusMethod::HarmonicEnergy;
  // harmonic: final CG relative residual; density: final admissibility slack
  double residual = 0.0;
  int iterations = 0;  // CG iterations / generated constraints
  // Mod = +infinity: E and F share a lattice point, so the constant curve
  // (zero length) joins them and no density is admissible.
  bool admissible_impossible = false;
  // optional density snapshot over the solve lattice (row-major, -1 off-mask)
  std::vector<double> density;
  int nx = 0, ny = 0;
  Box2 grid_box;
  double h = 0.0;
};

// Same shape; masses are mu(cell) and curve integrals use the ball gauge
// 2 pi^{-1/2} mu(B_d(mid, s/2))^{1/2} instead of d-arclength.
using MuModulusResult = ModulusResult;

struct ModulusParams {
  double h = 1.0 / 128.0;
  int path_stencil = 16;      // stencil for admissible-path generation
  double tol = 1e-3;          // constraint-generation tolerance on rho-length
  int max_constraints = 10000;
  double cg_tol = 1e-8;       // harmonic CG relative residual
  int rays = 12;              // star-quadrature rays for mu edge gauges
  bool keep_density = false;  // retain the density snapshot
};

ModulusResult modulus_quadrilateral(const SpaceHandle& space,
                                    const CurveFamilySpec& spec,
                                    const ModulusParams& p = {});
ModulusResult modulus_ring(const SpaceHandle& space, const CurveFamilySpec& spec,
                           const ModulusParams& p = {});
ModulusResult modulus_density(const SpaceHandle& space, const CurveFamilySpec& spec,
                              const ModulusParams& p = {});
MuModulusResult mu_modulus(const SpaceHandle& space, const CurveFamilySpec& spec,
                           const ModulusParams& p = {});

// mu-modulus on a spike-surface mesh: the admissible curves are mesh paths,
// edge costs are ball gauges of the ambient metric, masses are the lumped
// H^2 node masses.  E and F are ambient-coordinate node predicates.
MuModulusResult mu_modulus_mesh(const SurfaceMesh& m,
                                const std::function<bool(Vec3)>& in_E,
                                const std::function<bool(Vec3)>& in_F,
                                const ModulusParams& p = {});

// Conductance-network dual of the same connecting problem: each mesh edge
// carries mu-mass split from its endpoint cells and conductance mass/s_e^2,
// plates are held at potentials 0/1, and the value is the dissipated energy.
// Agrees with mu_modulus_mesh where both resolve, and scales to much finer
// meshes (conjugate gradients instead of constraint generation).
MuModulusResult mu_modulus_mesh_dual(const SurfaceMesh& m,
                                     const std::function<bool(Vec3)>& in_E,
                                     const std::function<bool(Vec3)>& in_F,
                                     const ModulusParams& p = {});

// 2 pi / log(R / r); throws unless 0 < r < R.
double analytic_annulus(double r, double R);

// Upper bound for the connecting family between the negative axis and the
// segment [r_t, R_t] x {0} in the exponential metric, via the surrounding
// Teichmueller-style annulus:
//     r_t = -1/log(t/2),  R_t = -1/log(t),  bound = 2 pi / log(r_t/(R_t-r_t)).
// Valid for t in (0, 1/2), which is exactly where R_t < 2 r_t.
double teichmuller_upper_bound(double t);

}  // namespace mslab
