#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "msturm/forms.hpp"
#include "msturm/problem.hpp"
#include "msturm/sturm_solver.hpp"

namespace msturm {

/// Metric in a single coordinate chart.
struct MetricChart {
  std::string name;
  int dim = 0;
  std::function<Matrix(const Vector&)> g_at;
  /// Optional coordinate partials: dg_at(x)[c] = d g / d x^c.
  std::function<std::vector<Matrix>(const Vector&)> dg_at;
  /// Optional domain test; points outside raise LeftChart.
  std::function<bool(const Vector&)> contains;
  double h_fd = 1e-5;
};

/// Built-ins: minkowski2, minkowski3, conformal_exp_t2 (e^{t^2}(dx^2 - dt^2)
/// in coordinates (x, t)).
MetricChart builtin_chart(const std::string& name);
std::vector<std::string> builtin_chart_names();

struct GeodesicSeed {
  Vector x0;
  Vector v0;
  double T = 1;  ///< parameter length; output is rescaled to [0, 1]
};

struct SubmanifoldGerm {
  Matrix tangent_basis;       ///< n x k, chart components at gamma(0)
  Matrix second_fundamental;  ///< k x k shape operator in that basis, direction v0
};

/// Christoffel symbols Gamma[a](b, c) at x.
std::vector<Matrix> christoffel(const MetricChart& chart, const Vector& x);

struct GeodesicPath {
  std::vector<double> grid;  ///< rescaled parameter u in [0, 1]
  std::vector<Vector> x;
  std::vector<Vector> xdot;  ///< d x / d u = T * d x / d s
  double T = 1;
  double energy_drift = 0;   ///< max relative change of g(xdot, xdot)
};

GeodesicPath integrate_geodesic(const MetricChart& chart, const GeodesicSeed& seed, const SolveOptions& opts = {});

struct ParallelFrame {
  std::vector<double> grid;
  std::vector<Matrix> E;  ///< columns are the frame vectors in chart components
  Matrix gram;            ///< g(E_i, E_j) at u = 0
  double gram_drift = 0;  ///< max entrywise change of the Gram matrix
};

/// Parallel transport of a frame that is g-orthonormal at gamma(0)
/// (Gram-Schmidt on the coordinate basis).
ParallelFrame parallel_frame(const MetricChart& chart, const GeodesicPath& geodesic, const SolveOptions& opts = {});

/// R(xdot, v) xdot in chart components, as a matrix acting on v.
Matrix curvature_operator(const MetricChart& chart, const Vector& x, const Vector& xdot);

struct TrivializeOptions {
  double symmetry_tol = 1e-6;
  std::optional<WitnessSeed> witness;  ///< chart components at gamma(0)
};

/// Morse-Sturm data of the geodesic in the parallel frame. Throws
/// CurvatureAsymmetry if the frame coefficient fails the g-symmetry check.
MorseSturmProblem trivialize(const MetricChart& chart, const GeodesicPath& geodesic, const ParallelFrame& frame,
                             const SubmanifoldGerm& germ, const TrivializeOptions& opts = {});

}  // namespace msturm
