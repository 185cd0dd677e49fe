#include "msturm/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msturm/errors.hpp"

namespace msturm {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Step {
  Vector y;
  double err;
};

Step dopri_step(const OdeRhs& f, double t, const Vector& y, double h) {
  const Vector k1 = f(t, y);
  const Vector k2 = f(t + c2 * h, y + h * (a21 * k1));
  const Vector k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
  const Vector k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const Vector k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const Vector k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  Vector y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const Vector k7 = f(t + h, y5);
  const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  double worst = 0;
  for (Eigen::Index i = 0; i < err.size(); ++i)
    worst = std::max(worst, std::abs(err[i]) / std::max(1.0, std::max(std::abs(y[i]), std::abs(y5[i]))));
  return {std::move(y5), worst};
}

}  // namespace

OdeSolution integrate_dopri(const OdeRhs& f, double t0, double t1, const Vector& y0, const OdeOptions& opts) {
  if (opts.grid_size < 1) throw PreconditionError("integrate: grid_size must be >= 1");
  if (opts.adaptive && !(opts.tol > 0)) throw PreconditionError("integrate: tol must be positive");
  const int N = opts.grid_size;
  OdeSolution sol;
  sol.t.reserve(static_cast<std::size_t>(N) + 1);
  sol.y.reserve(static_cast<std::size_t>(N) + 1);
  sol.t.push_back(t0);
  sol.y.push_back(y0);
  Vector y = y0;
  const double H = (t1 - t0) / N;
  double h_try = H;

  for (int i = 0; i < N; ++i) {
    const double a = t0 + i * H;
    const double b = (i + 1 == N) ? t1 : t0 + (i + 1) * H;
    if (!opts.adaptive) {
      Step s = dopri_step(f, a, y, b - a);
      sol.max_error_estimate = std::max(sol.max_error_estimate, s.err);
      y = std::move(s.y);
      ++sol.substeps;
    } else {
      double t = a;
      double h = std::min(h_try, b - a);
      int count = 0;
      while (t < b) {
        if (++count > opts.max_substeps_per_cell)
          throw IntegrationFailure("step control collapsed near t=" + std::to_string(t));
        const bool last = (t + h >= b - 1e-14 * std::abs(H));
        const double step = last ? b - t : h;
        Step s = dopri_step(f, t, y, step);
        if (!std::isfinite(s.err) || !s.y.allFinite()) {
          h = 0.25 * step;
          if (h < 1e-14 * std::abs(H)) throw IntegrationFailure("non-finite state near t=" + std::to_string(t));
          continue;
        }
        if (s.err <= opts.tol) {
          t = last ? b : t + step;
          y = std::move(s.y);
          sol.max_error_estimate = std::max(sol.max_error_estimate, s.err);
          ++sol.substeps;
          const double grow = s.err == 0 ? 5.0 : std::min(5.0, 0.9 * std::pow(opts.tol / s.err, 0.2));
          h = std::min(step * grow, H);
          if (!last) h_try = h;
        } else {
          h = step * std::max(0.1, 0.9 * std::pow(opts.tol / s.err, 0.2));
          if (h < 1e-14 * std::abs(H)) throw IntegrationFailure("step size underflow near t=" + std::to_string(t));
        }
      }
      h_try = std::min(h, H);
    }
    if (!y.allFinite()) throw IntegrationFailure("non-finite state at t=" + std::to_string(b));
    sol.t.push_back(b);
    sol.y.push_back(y);
  }
  return sol;
}

}  // namespace msturm
