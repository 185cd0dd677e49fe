#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "msturm/forms.hpp"
#include "msturm/problem.hpp"

namespace msturm {

struct SolveOptions {
  double ode_tol = 1e-10;
  int grid_size = 2048;
  bool adaptive = true;  ///< false: one Runge-Kutta step per grid cell (order studies)
};

/// Matrix solution of J'' = R J sampled on a uniform grid of [0, 1], with
/// cubic Hermite dense output (C^1 in t).
struct FundamentalSolution {
  std::vector<double> grid;
  std::vector<Matrix> M;
  std::vector<Matrix> Mp;
  std::vector<Matrix> Mpp;  ///< R(t) M(t) at the grid nodes, slopes for Mp
  int k = 0;                ///< leading columns that start in P
  double max_error_estimate = 0;

  int n() const { return static_cast<int>(M.front().rows()); }
  /// (M(t), M'(t)) for any t in [0, 1].
  std::pair<Matrix, Matrix> evaluate(double t) const;
};

/// Solution along one timelike candidate Y.
struct TimelikeWitness {
  std::vector<double> grid;
  std::vector<Vector> Y;
  std::vector<Vector> Yp;
  std::vector<Vector> Ypp;
  double min_margin = 0;  ///< min over [0,1] of -g(Y, Y)
  double argmin = 0;

  std::pair<Vector, Vector> evaluate(double t) const;
};

/// Initial matrices of the (P, S)-family: first the P basis with J'(0) = -S p,
/// then an orthonormalized basis of P^perp with J(0) = 0.
std::pair<Matrix, Matrix> initial_conditions(const MorseSturmProblem& problem);

/// Integrates the family from explicit initial matrices (n x c).
FundamentalSolution solve_fundamental(const MorseSturmProblem& problem, const Matrix& M0, const Matrix& Mp0,
                                      const SolveOptions& opts = {});

/// Integrates the (P, S)-solution family. Does not validate the problem.
FundamentalSolution solve_fundamental(const MorseSturmProblem& problem, const SolveOptions& opts = {});

/// Integrates the timelike witness from problem.y_seed and certifies it.
/// Throws MissingSeed, PreconditionError (n_-(g) != 1) or NotTimelike.
TimelikeWitness solve_witness(const MorseSturmProblem& problem, const SolveOptions& opts = {},
                              int margin_samples = 512);

/// Max over grid nodes of |g(J_i', J_j) - g(J_i, J_j')|.
double wronskian_drift(const FundamentalSolution& fund, const MetricForm& g);

/// CSV with columns t, M00, M01, ..., Mp00, ... (row-major entries).
void write_csv(std::ostream& out, const FundamentalSolution& fund);

}  // namespace msturm
