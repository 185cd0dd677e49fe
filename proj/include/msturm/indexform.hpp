#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "msturm/errors.hpp"
#include "msturm/focal.hpp"
#include "msturm/forms.hpp"
#include "msturm/problem.hpp"
#include "msturm/sturm_solver.hpp"
#include "msturm/tolerances.hpp"

namespace msturm {

/// Uniform partition of [0, 1] with a 2-point Gauss rule per element.
struct Mesh {
  int m = 0;
  std::vector<double> nodes;
  std::array<double, 2> abscissae{};  ///< on the reference element [0, 1]
  std::array<double, 2> weights{};    ///< sum to 1 on the reference element

  explicit Mesh(int elements);
  double h() const { return 1.0 / m; }
};

enum class SpaceTag { H1PFull, KConstrained, C0Limit };
const char* to_string(SpaceTag tag);

struct DiscreteForm {
  int dim = 0;
  Matrix A;
  SpaceTag space_tag = SpaceTag::H1PFull;
};

/// Piecewise-linear fields V with V(0) in P and V(1) = 0. Free coefficients
/// are ordered as (P coordinates of V(0), V(u_1), ..., V(u_{m-1})).
class FieldSpace {
 public:
  FieldSpace(const MorseSturmProblem& problem, const Mesh& mesh);

  int dim() const { return k_ + n_ * (m_ - 1); }
  int n() const { return n_; }
  int k() const { return k_; }
  const Mesh& mesh() const { return mesh_; }

  /// n x (m+1) nodal values of the field with the given coefficients.
  Matrix nodal(const Vector& coeffs) const;
  /// Coefficients of the interpolant through the given nodal values; V(0) is
  /// projected onto P (least squares) and V(1) is ignored.
  Vector coefficients(const Matrix& nodal) const;
  /// n(m+1) x dim map from coefficients to stacked nodal values.
  const Matrix& prolongation() const { return E_; }

 private:
  int n_, k_, m_;
  Mesh mesh_;
  Matrix B_;  // basis of P
  Matrix E_;
};

/// Galerkin matrix of the reparameterized form on [0, 1]:
///   int (1/t) g(V', W') + t g(R(tu) V, W) du - g(S V(0), W(0)),  t in (0, 1].
DiscreteForm assemble_It_hat(const MorseSturmProblem& problem, const Mesh& mesh, double t);
DiscreteForm assemble_I1(const MorseSturmProblem& problem, const Mesh& mesh);
/// t * (form above); t = 0 gives the limit form int g(V', W').
DiscreteForm assemble_Ct(const MorseSturmProblem& problem, const Mesh& mesh, double t);
/// Index form on [0, t] assembled directly on the physical interval (mesh
/// nodes t * u_j), for comparison with the reparameterized one.
DiscreteForm assemble_It_direct(const MorseSturmProblem& problem, const Mesh& mesh, double t);

/// One row per element: the element mean of
///   g(V'(u), Y(tu)) - t g(V(u), Y'(tu))
/// minus the mean of those values over all elements. Columns follow FieldSpace.
Matrix constraint_matrix(const MorseSturmProblem& problem, const TimelikeWitness& witness, const Mesh& mesh,
                         double t);

/// Orthonormal basis of the discrete constrained space. Throws EmptyKernel.
Matrix constraint_kernel(const MorseSturmProblem& problem, const TimelikeWitness& witness, const Mesh& mesh,
                         double t, double tol_rank = kDefaultTolRank);

struct IndexCount {
  Inertia inertia;
  int space_dim = 0;
  double margin = 0;  ///< smallest |eigenvalue| counted as nonzero
  double threshold = 0;
  bool near_singular = false;  ///< margin within 1e3 of the zero band
};

/// Inertia of Z^T A Z for the reparameterized form at t (t = 0: limit form).
IndexCount constrained_index(const MorseSturmProblem& problem, const TimelikeWitness& witness, const Mesh& mesh,
                             double t, double tol_eig = kDefaultTolEig, double tol_rank = kDefaultTolRank);

/// Inertia of the reparameterized form at t on the full field space.
IndexCount unconstrained_index(const MorseSturmProblem& problem, const Mesh& mesh, double t,
                               double tol_eig = kDefaultTolEig);

/// Negative index of a symmetric form restricted to the span of Z.
IndexCount restricted_index(const Matrix& A, const Matrix& Z, double tol_eig);

struct Jump {
  double t_lo = 0;
  double t_hi = 0;
  int delta = 0;
  std::optional<double> matched_focal_t;
  std::optional<int> matched_signature;
};

struct EvolutionTrace {
  std::vector<double> ts;
  std::vector<int> i_of_t;
  std::vector<Jump> jumps;
  bool constrained = false;
};

/// i(t) on the grid, constrained when a witness is given. Jumps are matched
/// to instants of `scan` lying within one grid cell of the jump.
EvolutionTrace evolution_trace(const MorseSturmProblem& problem, const TimelikeWitness* witness, const Mesh& mesh,
                               const std::vector<double>& t_grid, const FocalScan* scan = nullptr,
                               double tol_eig = kDefaultTolEig, double tol_rank = kDefaultTolRank);

struct IndexReport {
  std::string mode;  ///< "constrained" or "unconstrained"
  int n_minus_K = 0;
  int n_minus_gP = 0;
  int maslov = 0;
  std::string maslov_method;  ///< "signature-sum" or "perturbation"
  int endpoint_correction = 0;
  int residual = 0;
  bool stabilized = false;
  std::vector<std::pair<int, int>> mesh_history;
  std::vector<FocalInstant> focal;
  std::optional<double> witness_margin;
  double wronskian_drift = 0;
  Tolerances tolerances;
  std::vector<std::string> warnings;

  bool ok() const { return stabilized && residual == 0; }
};

nlohmann::json to_json(const IndexReport& report);
nlohmann::json to_json(const FocalInstant& f);

/// Mesh schedule exhausted without two consecutive equal counts.
class NotStabilized : public Error {
 public:
  NotStabilized(const std::string& what, IndexReport partial) : Error(what), report_(std::move(partial)) {}
  const IndexReport& report() const { return report_; }

 private:
  IndexReport report_;
};

struct VerifyOptions {
  Tolerances tol;
  double robust_eps = 1e-4;  ///< used only when an interior instant is degenerate
  int robust_trials = 8;
  std::uint64_t seed = 0;
};

/// Checks n_-(I_1|K) = n_-(g|P) + Maslov - n_-(g|J[1]^perp) along the mesh
/// schedule. Positive-definite g runs unconstrained; otherwise the problem
/// needs a witness seed.
IndexReport verify(const MorseSturmProblem& problem, const VerifyOptions& opts = {});

}  // namespace msturm
