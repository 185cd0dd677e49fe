#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "msturm/forms.hpp"
#include "msturm/problem.hpp"
#include "msturm/sturm_solver.hpp"

namespace msturm {

struct ScanOptions {
  double tol_rank = 1e-7;
  double tol_eig = 1e-9;
  double refine_tol = 1e-10;
  /// Zero band for the degeneracy flag. Looser than tol_eig because a
  /// degenerate crossing pins t only to about sqrt(machine epsilon).
  double tol_degenerate = 1e-6;
  double t_guard = 1e-6;
  std::size_t max_samples = 200000;
};

struct FocalInstant {
  double t = 0;
  int multiplicity = 0;
  int signature = 0;
  bool degenerate = false;
  Matrix kernel_basis;  ///< coefficient vectors c with M(t) c = 0 (orthonormal columns)
  Matrix jperp_basis;   ///< orthonormal basis of {J'(t) : J(t) = 0}
  Inertia jperp_inertia;
  double sigma_min = 0;  ///< detector value at t
};

struct FocalScan {
  std::vector<FocalInstant> instants;
  bool endpoint_focal = false;
  std::vector<std::pair<double, double>> det_trace;        ///< (t, det M(t)) on the solver grid
  std::vector<std::pair<double, double>> sigma_min_trace;  ///< (t, detector) on the solver grid
  std::vector<std::string> warnings;

  const FocalInstant* endpoint() const;
  /// Sum of signatures over instants in (0, 1).
  int interior_signature_sum() const;
  bool interior_degenerate() const;
};

/// Smallest singular value of the upper block of an orthonormal basis of the
/// column space of [M; M'] at t. Zero exactly at focal instants and
/// insensitive to how the solution columns are scaled.
double focal_detector(const FundamentalSolution& fund, double t);

/// Locates every focal instant in (t_guard, 1]. Throws UnresolvedRoot when a
/// sign change of det M cannot be matched to a refined root.
FocalScan scan_focal(const FundamentalSolution& fund, const MetricForm& g, const ScanOptions& opts = {});

/// Signature sum over (0, 1). Throws EndpointFocal or DegenerateFocalInstant.
int maslov_index(const FocalScan& scan);

struct MaslovTrial {
  int trial = 0;
  std::uint64_t seed = 0;
  std::optional<int> interior_sum;  ///< empty when the scan failed
  bool endpoint_focal = false;
  bool degenerate = false;
  std::string note;
  bool usable() const { return interior_sum && !endpoint_focal && !degenerate; }
};

/// Scans n_trials perturbed copies of the problem (seeds seed, seed+1, ...).
std::vector<MaslovTrial> perturbation_trials(const MorseSturmProblem& problem, double eps, int n_trials,
                                             std::uint64_t seed, const SolveOptions& solve = {},
                                             const ScanOptions& scan = {}, PerturbTargets targets = {});

struct RobustMaslov {
  int value = 0;
  std::vector<MaslovTrial> trials;
};

/// Maslov index confirmed on perturbed copies. eps = 0 reduces to
/// maslov_index on the problem itself. Throws EndpointFocal (unperturbed t=1
/// focal), AllTrialsDegenerate or NoAgreement.
RobustMaslov maslov_robust(const MorseSturmProblem& problem, double eps, int n_trials, std::uint64_t seed,
                           const SolveOptions& solve = {}, const ScanOptions& scan = {},
                           PerturbTargets targets = {});

/// Rows "t, multiplicity, signature, degenerate" with t to six decimals.
void write_focal_table(std::ostream& out, const FocalScan& scan);
/// CSV with columns t, det, sigma_min.
void write_trace_csv(std::ostream& out, const FocalScan& scan);

}  // namespace msturm
