#include "msturm/geometry.hpp"

#include <cmath>

#include "msturm/errors.hpp"
#include "msturm/ode.hpp"

namespace msturm {

namespace {

std::vector<Matrix> metric_partials(const MetricChart& chart, const Vector& x) {
  if (chart.dg_at) return chart.dg_at(x);
  std::vector<Matrix> dg;
  for (int c = 0; c < chart.dim; ++c) {
    Vector xp = x, xm = x;
    xp[c] += chart.h_fd;
    xm[c] -= chart.h_fd;
    dg.push_back((chart.g_at(xp) - chart.g_at(xm)) / (2 * chart.h_fd));
  }
  return dg;
}

void check_inside(const MetricChart& chart, const Vector& x) {
  if (!x.allFinite() || (chart.contains && !chart.contains(x)))
    throw LeftChart("path left the domain of chart '" + chart.name + "'");
}

// Contraction -Gamma^a_{bc} u^b w^c.
Vector connection_term(const std::vector<Matrix>& gamma, const Vector& u, const Vector& w) {
  Vector out(static_cast<Eigen::Index>(gamma.size()));
  for (std::size_t a = 0; a < gamma.size(); ++a) out[static_cast<Eigen::Index>(a)] = -u.dot(gamma[a] * w);
  return out;
}

Matrix flat_metric(const std::vector<double>& diag) {
  Matrix g = Matrix::Zero(static_cast<Eigen::Index>(diag.size()), static_cast<Eigen::Index>(diag.size()));
  for (std::size_t i = 0; i < diag.size(); ++i) g(i, i) = diag[i];
  return g;
}

}  // namespace

MetricChart builtin_chart(const std::string& name) {
  MetricChart c;
  c.name = name;
  if (name == "minkowski2" || name == "minkowski3") {
    c.dim = name == "minkowski2" ? 2 : 3;
    const Matrix g = c.dim == 2 ? flat_metric({1, -1}) : flat_metric({1, 1, -1});
    c.g_at = [g](const Vector&) { return g; };
    const int n = c.dim;
    c.dg_at = [n](const Vector&) { return std::vector<Matrix>(n, Matrix::Zero(n, n)); };
    return c;
  }
  if (name == "conformal_exp_t2") {
    c.dim = 2;
    const Matrix eta = flat_metric({1, -1});
    c.g_at = [eta](const Vector& x) { return Matrix(std::exp(x[1] * x[1]) * eta); };
    c.dg_at = [eta](const Vector& x) {
      return std::vector<Matrix>{Matrix::Zero(2, 2), Matrix(2 * x[1] * std::exp(x[1] * x[1]) * eta)};
    };
    return c;
  }
  throw PreconditionError("unknown chart '" + name + "'");
}

std::vector<std::string> builtin_chart_names() { return {"minkowski2", "minkowski3", "conformal_exp_t2"}; }

std::vector<Matrix> christoffel(const MetricChart& chart, const Vector& x) {
  const int n = chart.dim;
  const Matrix g = chart.g_at(x);
  const Matrix ginv = g.inverse();
  const std::vector<Matrix> dg = metric_partials(chart, x);
  // Lowered symbols L_d(b, c) = (d_b g_dc + d_c g_db - d_d g_bc) / 2.
  std::vector<Matrix> lowered(n, Matrix::Zero(n, n));
  for (int d = 0; d < n; ++d)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) lowered[d](b, c) = 0.5 * (dg[b](d, c) + dg[c](d, b) - dg[d](b, c));
  std::vector<Matrix> gamma(n, Matrix::Zero(n, n));
  for (int a = 0; a < n; ++a)
    for (int d = 0; d < n; ++d) gamma[a] += ginv(a, d) * lowered[d];
  return gamma;
}

Matrix curvature_operator(const MetricChart& chart, const Vector& x, const Vector& xdot) {
  const int n = chart.dim;
  const std::vector<Matrix> gamma = christoffel(chart, x);
  // dgamma[c][a] = d_c Gamma^a, central differences.
  std::vector<std::vector<Matrix>> dgamma;
  for (int c = 0; c < n; ++c) {
    Vector xp = x, xm = x;
    xp[c] += chart.h_fd;
    xm[c] -= chart.h_fd;
    const auto gp = christoffel(chart, xp), gm = christoffel(chart, xm);
    std::vector<Matrix> d(n);
    for (int a = 0; a < n; ++a) d[a] = (gp[a] - gm[a]) / (2 * chart.h_fd);
    dgamma.push_back(std::move(d));
  }
  // R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb},
  // contracted with xdot^b xdot^c.
  Vector gx(n);  // gx[e] = xdot^T Gamma^e xdot
  for (int e = 0; e < n; ++e) gx[e] = xdot.dot(gamma[e] * xdot);
  Matrix out = Matrix::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    Matrix directional = Matrix::Zero(n, n);
    for (int c = 0; c < n; ++c) directional += xdot[c] * dgamma[c][a];
    const Vector row_a = gamma[a].transpose() * xdot;  // (xdot^T Gamma^a)_e
    for (int d = 0; d < n; ++d) {
      double v = (directional * xdot)[d] - xdot.dot(dgamma[d][a] * xdot);
      for (int e = 0; e < n; ++e) v += row_a[e] * (gamma[e] * xdot)[d] - gamma[a](d, e) * gx[e];
      out(a, d) = v;
    }
  }
  return out;
}

GeodesicPath integrate_geodesic(const MetricChart& chart, const GeodesicSeed& seed, const SolveOptions& opts) {
  const int n = chart.dim;
  if (seed.x0.size() != n || seed.v0.size() != n) throw PreconditionError("geodesic seed has the wrong dimension");
  if (!(seed.T > 0)) throw PreconditionError("geodesic parameter length T must be positive");
  check_inside(chart, seed.x0);
  Vector y0(2 * n);
  y0 << seed.x0, seed.T * seed.v0;
  OdeRhs f = [&chart, n](double, const Vector& y) {
    const Vector x = y.head(n), v = y.tail(n);
    check_inside(chart, x);
    Vector dy(2 * n);
    dy << v, connection_term(christoffel(chart, x), v, v);
    return dy;
  };
  const OdeSolution sol = integrate_dopri(f, 0.0, 1.0, y0, OdeOptions{opts.grid_size, opts.ode_tol, opts.adaptive});
  GeodesicPath path;
  path.T = seed.T;
  path.grid = sol.t;
  const double e0 = y0.tail(n).dot(chart.g_at(seed.x0) * y0.tail(n));
  for (const auto& y : sol.y) {
    path.x.push_back(y.head(n));
    path.xdot.push_back(y.tail(n));
    const double e = y.tail(n).dot(chart.g_at(y.head(n)) * y.tail(n));
    path.energy_drift = std::max(path.energy_drift, std::abs(e - e0) / std::max(std::abs(e0), 1e-300));
  }
  if (e0 == 0) path.energy_drift = 0;
  return path;
}

ParallelFrame parallel_frame(const MetricChart& chart, const GeodesicPath& geodesic, const SolveOptions& opts) {
  const int n = chart.dim;
  const Vector x0 = geodesic.x.front();
  const Matrix g0 = chart.g_at(x0);
  // Gram-Schmidt on the coordinate basis; a null pivot borrows the next vector.
  Matrix E0(n, n);
  int filled = 0;
  for (int i = 0; filled < n && i < 2 * n; ++i) {
    Vector v = Vector::Unit(n, i % n);
    if (i >= n) v += Vector::Unit(n, (i + 1) % n);
    for (int j = 0; j < filled; ++j) {
      const double ej = E0.col(j).dot(g0 * E0.col(j));
      v -= (v.dot(g0 * E0.col(j)) / ej) * E0.col(j);
    }
    const double q = v.dot(g0 * v);
    if (std::abs(q) < 1e-10 * std::max(1.0, v.squaredNorm())) continue;
    E0.col(filled++) = v / std::sqrt(std::abs(q));
  }
  if (filled < n) throw DegenerateMetric("cannot build a g-orthonormal frame at gamma(0)");

  const Eigen::Index block = static_cast<Eigen::Index>(n) * n;
  Vector y0(2 * n + block);
  y0 << x0, geodesic.xdot.front(), Eigen::Map<const Vector>(E0.data(), block);
  OdeRhs f = [&chart, n, block](double, const Vector& y) {
    const Vector x = y.head(n), v = y.segment(n, n);
    check_inside(chart, x);
    const auto gamma = christoffel(chart, x);
    Vector dy(2 * n + block);
    dy.head(n) = v;
    dy.segment(n, n) = connection_term(gamma, v, v);
    Eigen::Map<const Matrix> E(y.data() + 2 * n, n, n);
    for (int i = 0; i < n; ++i) dy.segment(2 * n + i * n, n) = connection_term(gamma, v, E.col(i));
    return dy;
  };
  const OdeSolution sol = integrate_dopri(f, 0.0, 1.0, y0, OdeOptions{opts.grid_size, opts.ode_tol, opts.adaptive});
  ParallelFrame frame;
  frame.grid = sol.t;
  frame.gram = E0.transpose() * g0 * E0;
  for (const auto& y : sol.y) {
    Matrix E = Eigen::Map<const Matrix>(y.data() + 2 * n, n, n);
    const Matrix gram = E.transpose() * chart.g_at(y.head(n)) * E;
    frame.gram_drift = std::max(frame.gram_drift, (gram - frame.gram).cwiseAbs().maxCoeff());
    frame.E.push_back(std::move(E));
  }
  return frame;
}

MorseSturmProblem trivialize(const MetricChart& chart, const GeodesicPath& geodesic, const ParallelFrame& frame,
                             const SubmanifoldGerm& germ, const TrivializeOptions& opts) {
  const int n = chart.dim;
  if (frame.grid.size() != geodesic.grid.size()) throw PreconditionError("trivialize: frame and geodesic grids differ");
  const MetricForm g(frame.gram);
  const Matrix g0 = chart.g_at(geodesic.x.front());
  const Matrix& tb = germ.tangent_basis;
  const int k = static_cast<int>(tb.cols());
  if (k > 0 && tb.rows() != n) throw PreconditionError("germ tangent basis has the wrong dimension");
  if (germ.second_fundamental.rows() != k || germ.second_fundamental.cols() != k)
    throw PreconditionError("germ second fundamental form must be k x k");
  const Vector v0 = geodesic.xdot.front() / geodesic.T;
  for (int i = 0; i < k; ++i) {
    const double ip = tb.col(i).dot(g0 * v0);
    if (std::abs(ip) > 1e-8 * std::max(1.0, tb.col(i).norm() * v0.norm()))
      throw PreconditionError("germ tangent vectors must be g-orthogonal to the initial velocity");
  }

  std::vector<Matrix> values;
  const Matrix& G = g.entries();
  for (std::size_t i = 0; i < geodesic.grid.size(); ++i) {
    const Matrix& E = frame.E[i];
    const Matrix Rc = curvature_operator(chart, geodesic.x[i], geodesic.xdot[i]);
    Matrix R = E.partialPivLu().solve(Rc * E);
    if (g_asymmetry(g, R) > opts.symmetry_tol && (G * R).norm() > 1e-12)
      throw CurvatureAsymmetry("curvature operator fails the g-symmetry check at u=" +
                               std::to_string(geodesic.grid[i]) + " (asymmetry " +
                               std::to_string(g_asymmetry(g, R)) + ")");
    R = 0.5 * (R + G.inverse() * R.transpose() * G);
    values.push_back(std::move(R));
  }

  const Matrix E0inv = frame.E.front().inverse();
  Matrix P = k > 0 ? Matrix(E0inv * tb) : Matrix(n, 0);
  Matrix S = geodesic.T * germ.second_fundamental;
  std::optional<WitnessSeed> seed;
  if (opts.witness) seed = WitnessSeed{E0inv * opts.witness->value, geodesic.T * (E0inv * opts.witness->velocity)};
  nlohmann::json meta = {{"chart", chart.name}, {"T", geodesic.T}};
  meta["x0"] = std::vector<double>(geodesic.x.front().data(), geodesic.x.front().data() + n);
  meta["v0"] = std::vector<double>(v0.data(), v0.data() + n);
  return MorseSturmProblem{g, CoefficientPath::sampled(geodesic.grid, std::move(values)), BoundaryData{Subspace(n, P), S},
                           seed, meta};
}

}  // namespace msturm
