// Adaptive Gauss-Kronrod (7-15) quadrature on finite intervals.
#pragma once

#include <functional>
#include <vector>

namespace perthull {

struct QuadResult {
    double value = 0.0;
    double abserr = 0.0;
    long evals = 0;
    bool converged = false;
};

// Integrate f over [a, b] by adaptive bisection with a GK15 rule per panel.
// Stops when the summed error estimate drops below
// max(abs_tol, rel_tol * |integral|).
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-12, double rel_tol = 1e-10,
                     int max_depth = 52);

// Same, but the interval is pre-split at the given interior breakpoints
// (kinks of piecewise integrands).
QuadResult integrate_with_breakpoints(const std::function<double(double)>& f,
                                      double a, double b,
                                      const std::vector<double>& breakpoints,
                                      double abs_tol = 1e-12, double rel_tol = 1e-10,
                                      int max_depth = 52);

}  // namespace perthull
