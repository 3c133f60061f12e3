#include "mslab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mslab {

namespace {

struct Simpson {
  const std::function<double(double)>& f;
  double abs_tol;
  double rel_tol;

  double recurse(double a, double b, double fa, double fm, double fb, double whole,
                 double eps, int depth) const {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * eps) {
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
  }

  double run(double a, double b) const {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double eps = std::max(abs_tol, rel_tol * std::fabs(whole));
    eps = std::max(eps, 1e-300);
    return recurse(a, b, fa, fm, fb, whole, eps, 48);
  }
};

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, QuadTol tol) {
  Simpson s{f, tol.abs_tol, tol.rel_tol};
  return s.run(a, b);
}

double integrate_split(const std::function<double(double)>& f, double a, double b,
                       const std::vector<double>& splits, QuadTol tol) {
  std::vector<double> knots;
  knots.push_back(a);
  for (double t : splits) {
    if (t > a && t < b) knots.push_back(t);
  }
  knots.push_back(b);
  std::sort(knots.begin(), knots.end());
  double total = 0.0;
  for (size_t i = 1; i < knots.size(); ++i) total += integrate(f, knots[i - 1], knots[i], tol);
  return total;
}

double integrate_box(const std::function<double(double, double)>& f, const Box2& box,
                     QuadTol tol) {
  // Outer integral in y of the inner x-integral; the inner pass runs with a
  // tightened tolerance so its error stays below the outer one.
  QuadTol inner{tol.abs_tol * 0.1, tol.rel_tol * 0.1};
  auto row = [&](double y) {
    return integrate([&](double x) { return f(x, y); }, box.x0, box.x1, inner);
  };
  return integrate(row, box.y0, box.y1, tol);
}

double bisect_root(const std::function<double(double)>& g, double lo, double hi, double xtol,
                   int max_iter) {
  double glo = g(lo), ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo > 0) == (ghi > 0)) throw std::invalid_argument("bisect_root: no sign change");
  for (int i = 0; i < max_iter && hi - lo > xtol * std::max(1.0, std::fabs(hi)); ++i) {
    double mid = 0.5 * (lo + hi);
    double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm > 0) == (glo > 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace mslab
