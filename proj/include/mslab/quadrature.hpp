#pragma once

#include <functional>

#include "mslab/geometry.hpp"

namespace mslab {

// Tolerance policy for the 1-d integrator. The committed accuracy is the
// looser of the absolute and relative targets, so tiny integrals (e.g.
// conformal lengths deep inside an exponential well) keep relative accuracy
// instead of collapsing into the absolute floor.
struct QuadTol {
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
};

// Adaptive Simpson on [a,b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 QuadTol tol = {});

// Adaptive Simpson with interior split points (singularity or kink markers).
double integrate_split(const std::function<double(double)>& f, double a, double b,
                       const std::vector<double>& splits, QuadTol tol = {});

// Adaptive 2-d tensor integration over a box.
double integrate_box(const std::function<double(double, double)>& f, const Box2& box,
                     QuadTol tol = {});

// Bisection for the smallest root of g on [lo,hi]; g(lo) and g(hi) must bracket.
double bisect_root(const std::function<double(double)>& g, double lo, double hi,
                   double xtol = 1e-13, int max_iter = 200);

}  // namespace mslab
