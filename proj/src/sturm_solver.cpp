#include "msturm/sturm_solver.hpp"

#include <cmath>
#include <ostream>

#include <boost/math/tools/minima.hpp>

#include "hermite.hpp"
#include "msturm/errors.hpp"
#include "msturm/ode.hpp"

namespace msturm {

using detail::cell_of;
using detail::hermite;

std::pair<Matrix, Matrix> FundamentalSolution::evaluate(double t) const {
  if (!(t >= grid.front() - 1e-12 && t <= grid.back() + 1e-12))
    throw PreconditionError("evaluate: t outside [0, 1]");
  const std::size_t i = cell_of(grid, t);
  const double a = grid[i], b = grid[i + 1];
  return {hermite(t, a, b, M[i], Mp[i], M[i + 1], Mp[i + 1]),
          hermite(t, a, b, Mp[i], Mpp[i], Mp[i + 1], Mpp[i + 1])};
}

std::pair<Vector, Vector> TimelikeWitness::evaluate(double t) const {
  const std::size_t i = cell_of(grid, t);
  const double a = grid[i], b = grid[i + 1];
  return {hermite(t, a, b, Y[i], Yp[i], Y[i + 1], Yp[i + 1]),
          hermite(t, a, b, Yp[i], Ypp[i], Yp[i + 1], Ypp[i + 1])};
}

std::pair<Matrix, Matrix> initial_conditions(const MorseSturmProblem& problem) {
  const int n = problem.n();
  const Matrix& B = problem.boundary.P.basis();
  const int k = static_cast<int>(B.cols());
  const Matrix W = g_orthogonal_complement(problem.g, problem.boundary.P).basis();
  Matrix M0 = Matrix::Zero(n, n), Mp0 = Matrix::Zero(n, n);
  if (k > 0) {
    M0.leftCols(k) = B;
    Mp0.leftCols(k) = -B * problem.boundary.S;
  }
  Mp0.rightCols(n - k) = W;
  return {M0, Mp0};
}

namespace {

// State layout: [vec(M); vec(Mp)], column-major.
OdeSolution integrate_matrix(const CoefficientPath& R, const Matrix& M0, const Matrix& Mp0, const SolveOptions& opts) {
  const Eigen::Index rows = M0.rows(), cols = M0.cols(), block = rows * cols;
  Vector y0(2 * block);
  y0.head(block) = Eigen::Map<const Vector>(M0.data(), block);
  y0.tail(block) = Eigen::Map<const Vector>(Mp0.data(), block);
  OdeRhs f = [&R, rows, cols, block](double t, const Vector& y) {
    Vector dy(2 * block);
    Eigen::Map<const Matrix> M(y.data(), rows, cols);
    dy.head(block) = y.tail(block);
    Eigen::Map<Matrix>(dy.data() + block, rows, cols) = R(t) * M;
    return dy;
  };
  return integrate_dopri(f, 0.0, 1.0, y0, OdeOptions{opts.grid_size, opts.ode_tol, opts.adaptive});
}

}  // namespace

FundamentalSolution solve_fundamental(const MorseSturmProblem& problem, const Matrix& M0, const Matrix& Mp0,
                                      const SolveOptions& opts) {
  const int n = problem.n();
  if (M0.rows() != n || Mp0.rows() != n || M0.cols() != Mp0.cols())
    throw PreconditionError("solve_fundamental: initial matrices have the wrong shape");
  if (problem.R.n() != n) throw PreconditionError("solve_fundamental: R has the wrong dimension");
  const OdeSolution sol = integrate_matrix(problem.R, M0, Mp0, opts);
  const Eigen::Index cols = M0.cols(), block = n * cols;
  FundamentalSolution out;
  out.grid = sol.t;
  out.k = problem.boundary.P.dim();
  out.max_error_estimate = sol.max_error_estimate;
  out.M.reserve(sol.t.size());
  out.Mp.reserve(sol.t.size());
  out.Mpp.reserve(sol.t.size());
  for (std::size_t i = 0; i < sol.t.size(); ++i) {
    Matrix M = Eigen::Map<const Matrix>(sol.y[i].data(), n, cols);
    Matrix Mp = Eigen::Map<const Matrix>(sol.y[i].data() + block, n, cols);
    out.Mpp.push_back(problem.R(sol.t[i]) * M);
    out.M.push_back(std::move(M));
    out.Mp.push_back(std::move(Mp));
  }
  return out;
}

FundamentalSolution solve_fundamental(const MorseSturmProblem& problem, const SolveOptions& opts) {
  const auto [M0, Mp0] = initial_conditions(problem);
  return solve_fundamental(problem, M0, Mp0, opts);
}

TimelikeWitness solve_witness(const MorseSturmProblem& problem, const SolveOptions& opts, int margin_samples) {
  if (!problem.y_seed) throw MissingSeed("problem has no timelike witness seed (y_seed)");
  if (problem.g.inertia().n_minus != 1)
    throw PreconditionError("a timelike witness needs a Lorentzian metric (n_-(g) = 1)");
  const int n = problem.n();
  const Vector& y0 = problem.y_seed->value;
  const Vector& v0 = problem.y_seed->velocity;
  if (y0.size() != n || v0.size() != n) throw PreconditionError("y_seed has the wrong dimension");
  if (-problem.g(y0, y0) <= 0)
    throw NotTimelike("witness seed is not timelike at t=0: g(Y,Y) = " + std::to_string(problem.g(y0, y0)));

  const OdeSolution sol = integrate_matrix(problem.R, y0, v0, opts);
  TimelikeWitness w;
  w.grid = sol.t;
  for (std::size_t i = 0; i < sol.t.size(); ++i) {
    w.Y.push_back(sol.y[i].head(n));
    w.Yp.push_back(sol.y[i].tail(n));
    w.Ypp.push_back(problem.R(sol.t[i]) * w.Y.back());
  }

  auto margin = [&](double t) {
    const Vector y = w.evaluate(t).first;
    return -problem.g(y, y);
  };
  const int N = std::max(margin_samples, 512);
  std::vector<double> vals(static_cast<std::size_t>(N) + 1);
  for (int i = 0; i <= N; ++i) vals[i] = margin(static_cast<double>(i) / N);
  w.min_margin = vals[0];
  w.argmin = 0;
  for (int i = 0; i <= N; ++i) {
    if (vals[i] < w.min_margin) {
      w.min_margin = vals[i];
      w.argmin = static_cast<double>(i) / N;
    }
    const bool local_min = (i == 0 || vals[i] <= vals[i - 1]) && (i == N || vals[i] <= vals[i + 1]);
    if (!local_min || i == 0 || i == N) continue;
    const auto [t, v] = boost::math::tools::brent_find_minima(
        margin, static_cast<double>(i - 1) / N, static_cast<double>(i + 1) / N, 50);
    if (v < w.min_margin) {
      w.min_margin = v;
      w.argmin = t;
    }
  }
  if (!(w.min_margin > 0))
    throw NotTimelike("witness leaves the timelike cone near t=" + std::to_string(w.argmin) +
                      " (min -g(Y,Y) = " + std::to_string(w.min_margin) + ")");
  return w;
}

double wronskian_drift(const FundamentalSolution& fund, const MetricForm& g) {
  const Matrix& G = g.entries();
  double worst = 0;
  for (std::size_t i = 0; i < fund.grid.size(); ++i) {
    const Matrix W = fund.Mp[i].transpose() * G * fund.M[i] - fund.M[i].transpose() * G * fund.Mp[i];
    worst = std::max(worst, W.cwiseAbs().maxCoeff());
  }
  return worst;
}

void write_csv(std::ostream& out, const FundamentalSolution& fund) {
  const Eigen::Index rows = fund.M.front().rows(), cols = fund.M.front().cols();
  out << "t";
  for (const char* name : {"M", "Mp"})
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) out << ',' << name << r << c;
  out << '\n';
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < fund.grid.size(); ++i) {
    out << fund.grid[i];
    for (const Matrix* m : {&fund.M[i], &fund.Mp[i]})
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) out << ',' << (*m)(r, c);
    out << '\n';
  }
  out.precision(old);
}

}  // namespace msturm
