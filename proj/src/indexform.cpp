#include "msturm/indexform.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Sparse>

namespace msturm {

Mesh::Mesh(int elements) : m(elements) {
  if (elements < 2) throw PreconditionError("mesh needs at least 2 elements");
  nodes.resize(static_cast<std::size_t>(m) + 1);
  for (int j = 0; j <= m; ++j) nodes[j] = static_cast<double>(j) / m;
  const double d = 0.5 / std::sqrt(3.0);
  abscissae = {0.5 - d, 0.5 + d};
  weights = {0.5, 0.5};
}

const char* to_string(SpaceTag tag) {
  switch (tag) {
    case SpaceTag::H1PFull:
      return "H1_P-full";
    case SpaceTag::KConstrained:
      return "K-constrained";
    case SpaceTag::C0Limit:
      return "C0-limit";
  }
  return "?";
}

FieldSpace::FieldSpace(const MorseSturmProblem& problem, const Mesh& mesh)
    : n_(problem.n()), k_(problem.boundary.P.dim()), m_(mesh.m), mesh_(mesh), B_(problem.boundary.P.basis()) {
  E_ = Matrix::Zero(n_ * (m_ + 1), dim());
  if (k_ > 0) E_.block(0, 0, n_, k_) = B_;
  for (int j = 1; j < m_; ++j) E_.block(n_ * j, k_ + n_ * (j - 1), n_, n_).setIdentity();
}

Matrix FieldSpace::nodal(const Vector& coeffs) const {
  if (coeffs.size() != dim()) throw PreconditionError("FieldSpace::nodal: wrong coefficient count");
  const Vector stacked = E_ * coeffs;
  return Eigen::Map<const Matrix>(stacked.data(), n_, m_ + 1);
}

Vector FieldSpace::coefficients(const Matrix& nodal) const {
  if (nodal.rows() != n_ || nodal.cols() != m_ + 1) throw PreconditionError("FieldSpace::coefficients: wrong shape");
  Vector c(dim());
  if (k_ > 0) c.head(k_) = B_.colPivHouseholderQr().solve(nodal.col(0));
  for (int j = 1; j < m_; ++j) c.segment(k_ + n_ * (j - 1), n_) = nodal.col(j);
  return c;
}

namespace {

// Adds a 2n x 2n element matrix (nodes e, e+1) into the free-coefficient matrix.
class Scatter {
 public:
  Scatter(const MorseSturmProblem& problem, int m)
      : n_(problem.n()), k_(problem.boundary.P.dim()), m_(m), B_(problem.boundary.P.basis()) {}

  int dim() const { return k_ + n_ * (m_ - 1); }

  // Map from local node values (n) to free coefficients: returns (offset, T)
  // with node value = T * coeffs[offset .. offset + cols(T)), or cols = 0 if pinned.
  std::pair<int, Matrix> node_map(int j) const {
    if (j == 0) return {0, B_};
    if (j == m_) return {0, Matrix(n_, 0)};
    return {k_ + n_ * (j - 1), Matrix::Identity(n_, n_)};
  }

  void add(Matrix& A, int e, const Matrix& local) const {
    const std::pair<int, Matrix> maps[2] = {node_map(e), node_map(e + 1)};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const auto& [oa, Ta] = maps[a];
        const auto& [ob, Tb] = maps[b];
        if (Ta.cols() == 0 || Tb.cols() == 0) continue;
        A.block(oa, ob, Ta.cols(), Tb.cols()) += Ta.transpose() * local.block(a * n_, b * n_, n_, n_) * Tb;
      }
  }

  void add_row(Matrix& C, int row, int j, const Eigen::RowVectorXd& local) const {
    const auto [o, T] = node_map(j);
    if (T.cols() == 0) return;
    C.block(row, o, 1, T.cols()) += local * T;
  }

 private:
  int n_, k_, m_;
  Matrix B_;
};

Matrix sym(const Matrix& a) { return 0.5 * (a + a.transpose()); }

// a * int g(V', W') + b * int g(R(s u) V, W) - c * g(S V(0), W(0)) on the
// reference mesh of [0, 1].
Matrix assemble_scaled(const MorseSturmProblem& problem, const Mesh& mesh, double a, double b, double s, double c) {
  const int n = problem.n();
  const Matrix& G = problem.g.entries();
  const Scatter scatter(problem, mesh.m);
  Matrix A = Matrix::Zero(scatter.dim(), scatter.dim());
  const double h = mesh.h();
  Matrix local(2 * n, 2 * n);
  for (int e = 0; e < mesh.m; ++e) {
    local.setZero();
    const double k = a / h;
    local.topLeftCorner(n, n) += k * G;
    local.bottomRightCorner(n, n) += k * G;
    local.topRightCorner(n, n) -= k * G;
    local.bottomLeftCorner(n, n) -= k * G;
    if (b != 0) {
      for (int q = 0; q < 2; ++q) {
        const double xi = mesh.abscissae[q];
        const double u = mesh.nodes[e] + h * xi;
        const Matrix GR = sym(G * problem.R(s * u));
        const double N[2] = {1 - xi, xi};
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) local.block(i * n, j * n, n, n) += (b * h * mesh.weights[q] * N[i] * N[j]) * GR;
      }
    }
    scatter.add(A, e, local);
  }
  const int k = problem.boundary.P.dim();
  if (k > 0 && c != 0) A.topLeftCorner(k, k) -= c * boundary_form(problem);
  return sym(A);
}

}  // namespace

DiscreteForm assemble_It_hat(const MorseSturmProblem& problem, const Mesh& mesh, double t) {
  if (!(t > 0 && t <= 1)) throw PreconditionError("assemble_It_hat: t must lie in (0, 1]");
  Matrix A = assemble_scaled(problem, mesh, 1.0 / t, t, t, 1.0);
  return {static_cast<int>(A.rows()), std::move(A), SpaceTag::H1PFull};
}

DiscreteForm assemble_I1(const MorseSturmProblem& problem, const Mesh& mesh) {
  return assemble_It_hat(problem, mesh, 1.0);
}

DiscreteForm assemble_Ct(const MorseSturmProblem& problem, const Mesh& mesh, double t) {
  if (!(t >= 0 && t <= 1)) throw PreconditionError("assemble_Ct: t must lie in [0, 1]");
  Matrix A = assemble_scaled(problem, mesh, 1.0, t * t, t, t);
  return {static_cast<int>(A.rows()), std::move(A), t == 0 ? SpaceTag::C0Limit : SpaceTag::H1PFull};
}

DiscreteForm assemble_It_direct(const MorseSturmProblem& problem, const Mesh& mesh, double t) {
  if (!(t > 0 && t <= 1)) throw PreconditionError("assemble_It_direct: t must lie in (0, 1]");
  const int n = problem.n();
  const Matrix& G = problem.g.entries();
  const Scatter scatter(problem, mesh.m);
  Matrix A = Matrix::Zero(scatter.dim(), scatter.dim());
  const double len = t / mesh.m;
  const double d = 0.5 / std::sqrt(3.0);
  Matrix local(2 * n, 2 * n);
  for (int e = 0; e < mesh.m; ++e) {
    const double s0 = t * mesh.nodes[e], s1 = t * mesh.nodes[e + 1];
    local.setZero();
    // Hat slopes on [s0, s1] are -1/len and +1/len.
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) local.block(i * n, j * n, n, n) += ((i == j ? 1.0 : -1.0) / len) * G;
    for (double x : {0.5 * (s0 + s1) - d * len, 0.5 * (s0 + s1) + d * len}) {
      const Matrix GR = sym(G * problem.R(x));
      const double N[2] = {(s1 - x) / len, (x - s0) / len};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) local.block(i * n, j * n, n, n) += (0.5 * len * N[i] * N[j]) * GR;
    }
    scatter.add(A, e, local);
  }
  const int k = problem.boundary.P.dim();
  if (k > 0) A.topLeftCorner(k, k) -= boundary_form(problem);
  A = sym(A);
  return {static_cast<int>(A.rows()), std::move(A), SpaceTag::H1PFull};
}

Matrix constraint_matrix(const MorseSturmProblem& problem, const TimelikeWitness& witness, const Mesh& mesh,
                         double t) {
  if (!(t >= 0 && t <= 1)) throw PreconditionError("constraint_matrix: t must lie in [0, 1]");
  const int n = problem.n();
  const Matrix& G = problem.g.entries();
  const Scatter scatter(problem, mesh.m);
  const double h = mesh.h();
  // Element means, scaled by h so that entries stay O(1).
  Matrix local_rows = Matrix::Zero(mesh.m, 2 * n);
  for (int e = 0; e < mesh.m; ++e) {
    for (int q = 0; q < 2; ++q) {
      const double xi = mesh.abscissae[q];
      const double u = mesh.nodes[e] + h * xi;
      const auto [Y, Yp] = witness.evaluate(t * u);
      const Vector gy = G * Y, gyp = G * Yp;
      const double w = mesh.weights[q];
      // h * [g(V', Y) - t g(V, Y')] with V' = (v1 - v0)/h and V = (1-xi) v0 + xi v1.
      local_rows.block(e, 0, 1, n) += w * (-gy - t * h * (1 - xi) * gyp).transpose();
      local_rows.block(e, n, 1, n) += w * (gy - t * h * xi * gyp).transpose();
    }
  }
  // Rows in the full nodal space, then subtract the mean row.
  Matrix full = Matrix::Zero(mesh.m, n * (mesh.m + 1));
  for (int e = 0; e < mesh.m; ++e) full.block(e, n * e, 1, 2 * n) = local_rows.row(e);
  const Eigen::RowVectorXd mean = full.colwise().mean();
  full.rowwise() -= mean;
  Matrix C = Matrix::Zero(mesh.m, scatter.dim());
  for (int e = 0; e < mesh.m; ++e)
    for (int j = 0; j <= mesh.m; ++j) scatter.add_row(C, e, j, full.block(e, n * j, 1, n));
  return C;
}

Matrix constraint_kernel(const MorseSturmProblem& problem, const TimelikeWitness& witness, const Mesh& mesh,
                         double t, double tol_rank) {
  const Matrix C = constraint_matrix(problem, witness, mesh, t);
  Matrix Z = null_space(C, tol_rank);
  if (Z.cols() == 0) throw EmptyKernel("discrete constrained space is trivial");
  return Z;
}

IndexCount restricted_index(const Matrix& A, const Matrix& Z, double tol_eig) {
  const Eigen::SparseMatrix<double> As = A.sparseView();
  const Matrix AZ = As * Z;
  const Matrix K = Z.transpose() * AZ;
  const SpectralInertia si = spectral_inertia(K, tol_eig);
  IndexCount out;
  out.inertia = si.inertia;
  out.space_dim = static_cast<int>(Z.cols());
  out.margin = si.margin();
  out.threshold = si.threshold;
  out.near_singular = out.inertia.n_zero > 0 || out.margin < 1e3 * si.threshold;
  return out;
}

namespace {

Matrix form_at(const MorseSturmProblem& problem, const Mesh& mesh, double t) {
  return t == 0 ? assemble_Ct(problem, mesh, 0).A : assemble_It_hat(problem, mesh, t).A;
}

}  // namespace

IndexCount constrained_index(const MorseSturmProblem& problem, const TimelikeWitness& witness, const Mesh& mesh,
                             double t, double tol_eig, double tol_rank) {
  const Matrix Z = constraint_kernel(problem, witness, mesh, t, tol_rank);
  return restricted_index(form_at(problem, mesh, t), Z, tol_eig);
}

IndexCount unconstrained_index(const MorseSturmProblem& problem, const Mesh& mesh, double t, double tol_eig) {
  const SpectralInertia si = spectral_inertia(form_at(problem, mesh, t), tol_eig);
  IndexCount out;
  out.inertia = si.inertia;
  out.space_dim = si.inertia.dim();
  out.margin = si.margin();
  out.threshold = si.threshold;
  out.near_singular = out.inertia.n_zero > 0 || out.margin < 1e3 * si.threshold;
  return out;
}

EvolutionTrace evolution_trace(const MorseSturmProblem& problem, const TimelikeWitness* witness, const Mesh& mesh,
                               const std::vector<double>& t_grid, const FocalScan* scan, double tol_eig,
                               double tol_rank) {
  if (!std::is_sorted(t_grid.begin(), t_grid.end()))
    throw PreconditionError("evolution_trace: t grid must be sorted");
  for (double t : t_grid)
    if (!(t > 0 && t <= 1)) throw PreconditionError("evolution_trace: t grid must lie in (0, 1]");
  EvolutionTrace out;
  out.ts = t_grid;
  out.constrained = witness != nullptr;
  for (double t : t_grid) {
    const IndexCount c = witness ? constrained_index(problem, *witness, mesh, t, tol_eig, tol_rank)
                                 : unconstrained_index(problem, mesh, t, tol_eig);
    out.i_of_t.push_back(c.inertia.n_minus);
  }
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const int d = out.i_of_t[i] - out.i_of_t[i - 1];
    if (d == 0) continue;
    Jump j{t_grid[i - 1], t_grid[i], d, std::nullopt, std::nullopt};
    if (scan) {
      // One grid cell of slack on each side.
      const double lo = i >= 2 ? t_grid[i - 2] : 0.0;
      const double hi = i + 1 < t_grid.size() ? t_grid[i + 1] : 1.0;
      double best = 2;
      for (const auto& f : scan->instants) {
        if (f.t < lo || f.t > hi) continue;
        const double dist = f.t < j.t_lo ? j.t_lo - f.t : (f.t > j.t_hi ? f.t - j.t_hi : 0.0);
        if (dist < best) {
          best = dist;
          j.matched_focal_t = f.t;
          j.matched_signature = f.signature;
        }
      }
    }
    out.jumps.push_back(j);
  }
  return out;
}

nlohmann::json to_json(const FocalInstant& f) {
  return {{"t", f.t},
          {"multiplicity", f.multiplicity},
          {"signature", f.signature},
          {"degenerate", f.degenerate},
          {"jperp_basis", matrix_to_json(f.jperp_basis.transpose())}};
}

nlohmann::json to_json(const IndexReport& r) {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& [m, nk] : r.mesh_history) history.push_back({{"m", m}, {"n_minus_K", nk}});
  nlohmann::json focal = nlohmann::json::array();
  for (const auto& f : r.focal) focal.push_back(to_json(f));
  nlohmann::json doc = {{"format", "msturm-report/1"},
                        {"mode", r.mode},
                        {"n_minus_K", r.n_minus_K},
                        {"n_minus_gP", r.n_minus_gP},
                        {"maslov", r.maslov},
                        {"maslov_method", r.maslov_method},
                        {"endpoint_correction", r.endpoint_correction},
                        {"residual", r.residual},
                        {"stabilized", r.stabilized},
                        {"mesh_history", history},
                        {"focal", focal},
                        {"wronskian_drift", r.wronskian_drift},
                        {"tolerances", to_json(r.tolerances)},
                        {"warnings", r.warnings}};
  doc["witness_margin"] = r.witness_margin ? nlohmann::json(*r.witness_margin) : nlohmann::json(nullptr);
  return doc;
}

IndexReport verify(const MorseSturmProblem& problem, const VerifyOptions& opts) {
  const Tolerances& tol = opts.tol;
  tol.check();
  require_valid(problem);
  IndexReport rep;
  rep.tolerances = tol;

  const Inertia gi = problem.g.inertia(tol.tol_eig);
  const bool riemannian = gi.n_minus == 0;
  rep.mode = riemannian ? "unconstrained" : "constrained";
  const SolveOptions solve{tol.ode_tol, tol.grid_size, true};
  std::optional<TimelikeWitness> witness;
  if (!riemannian) {
    witness = solve_witness(problem, solve, tol.witness_samples);
    rep.witness_margin = witness->min_margin;
  }

  const FundamentalSolution fund = solve_fundamental(problem, solve);
  rep.wronskian_drift = wronskian_drift(fund, problem.g);
  const ScanOptions scan_opts{tol.tol_rank, tol.tol_eig, tol.refine_tol, 1e-6, tol.t_guard};
  const FocalScan scan = scan_focal(fund, problem.g, scan_opts);
  rep.focal = scan.instants;
  rep.warnings = scan.warnings;

  rep.n_minus_gP = inertia(restrict_form(problem.g, problem.boundary.P), tol.tol_eig).n_minus;

  if (!scan.interior_degenerate()) {
    rep.maslov = scan.interior_signature_sum();
    rep.maslov_method = "signature-sum";
  } else {
    rep.maslov = maslov_robust(problem, opts.robust_eps, opts.robust_trials, opts.seed, solve, scan_opts).value;
    rep.maslov_method = "perturbation";
  }

  if (const FocalInstant* end = scan.endpoint()) {
    if (end->degenerate)
      throw DegenerateFocalInstant("g is degenerate on the focal space at t = 1; the endpoint correction is undefined");
    rep.endpoint_correction = end->jperp_inertia.n_minus;
  }

  std::optional<int> previous;
  for (int m : tol.mesh_schedule) {
    const Mesh mesh(m);
    const IndexCount c = witness ? constrained_index(problem, *witness, mesh, 1.0, tol.tol_eig, tol.tol_rank)
                                 : unconstrained_index(problem, mesh, 1.0, tol.tol_eig);
    rep.mesh_history.emplace_back(m, c.inertia.n_minus);
    rep.n_minus_K = c.inertia.n_minus;
    if (c.near_singular)
      rep.warnings.push_back("m=" + std::to_string(m) + ": near-zero eigenvalue (margin " + std::to_string(c.margin) +
                             "); t = 1 is close to a focal instant");
    if (previous && *previous == c.inertia.n_minus) {
      rep.stabilized = true;
      break;
    }
    previous = c.inertia.n_minus;
  }
  rep.residual = rep.n_minus_K - rep.n_minus_gP - rep.maslov + rep.endpoint_correction;
  if (!rep.stabilized) throw NotStabilized("mesh schedule exhausted without two consecutive equal counts", rep);
  return rep;
}

}  // namespace msturm
