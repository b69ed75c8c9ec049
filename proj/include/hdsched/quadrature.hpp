#pragma once

#include <functional>

namespace hdsched {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_subdivisions = 100000;
  // Equal-width seed segments.  A single seed panel can land every node on a
  // stretch where the integrand vanishes and report a spurious zero, so the
  // interval is pre-split before adapting.
  int initial_segments = 16;
};

// Globally adaptive Gauss-Kronrod (G7, K15) integration of f over [a, b].
// The interval with the largest error estimate is split until the summed
// estimate drops below abs_tol.  Throws quadrature_error (message contains
// `name`) if the budget runs out first.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opt = {}, const char* name = "integrand");

}  // namespace hdsched
