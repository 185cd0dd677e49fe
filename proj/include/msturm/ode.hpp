#pragma once

#include <functional>
#include <vector>

#include "msturm/forms.hpp"

namespace msturm {

/// Right-hand side y' = f(t, y).
using OdeRhs = std::function<Vector(double, const Vector&)>;

struct OdeOptions {
  int grid_size = 2048;  ///< uniform master grid on [t0, t1]
  double tol = 1e-10;    ///< per-substep local error target (mixed abs/rel)
  bool adaptive = true;  ///< false: exactly one Dormand-Prince step per master cell
  int max_substeps_per_cell = 1 << 16;
};

struct OdeSolution {
  std::vector<double> t;
  std::vector<Vector> y;
  double max_error_estimate = 0;  ///< largest embedded-pair estimate of an accepted step
  long substeps = 0;
};

/// Dormand-Prince 5(4) on a fixed master grid. Inside each master cell the
/// step is subdivided until the embedded estimate meets `tol`; only master
/// grid states are returned. Throws IntegrationFailure when step control
/// collapses or the state stops being finite.
OdeSolution integrate_dopri(const OdeRhs& f, double t0, double t1, const Vector& y0, const OdeOptions& opts);

}  // namespace msturm
