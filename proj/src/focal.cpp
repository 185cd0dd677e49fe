#include "msturm/focal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <boost/math/tools/roots.hpp>

#include "msturm/errors.hpp"

namespace msturm {

namespace {

// Orthonormal basis of span [M; M'] and the triangular factor.
struct FrameQR {
  Matrix top;  // n x n upper block of Q
  Matrix r;    // n x n, [M; M'] = Q r
  Matrix M, Mp;
};

FrameQR frame(const FundamentalSolution& fund, double t) {
  auto [M, Mp] = fund.evaluate(t);
  const Eigen::Index n = M.rows(), c = M.cols();
  Matrix A(2 * n, c);
  A << M, Mp;
  Eigen::HouseholderQR<Matrix> qr(A);
  Matrix Q = qr.householderQ() * Matrix::Identity(2 * n, c);
  Matrix r = qr.matrixQR().topRows(c).triangularView<Eigen::Upper>();
  return {Q.topRows(n), r, std::move(M), std::move(Mp)};
}

// Golden-section search for a minimum of f on [a, b] down to width tol.
template <class F>
std::pair<double, double> golden_min(F f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1) / 2;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  double best_t = fc <= fd ? c : d, best = std::min(fc, fd);
  for (double t : {a, b}) {
    const double v = f(t);
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  return {best_t, best};
}

Matrix orthonormalize(const Matrix& a) {
  if (a.cols() == 0) return a;
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

FocalInstant describe(const FundamentalSolution& fund, const MetricForm& g, double t, const ScanOptions& opts) {
  const FrameQR f = frame(fund, t);
  Eigen::JacobiSVD<Matrix> svd(f.top, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  int mu = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] < opts.tol_rank) ++mu;
  FocalInstant out;
  out.t = t;
  out.multiplicity = mu;
  out.sigma_min = sv.size() ? sv.minCoeff() : 0;
  if (mu == 0) return out;
  const Matrix v = svd.matrixV().rightCols(mu);
  out.kernel_basis = orthonormalize(f.r.triangularView<Eigen::Upper>().solve(v));
  out.jperp_basis = orthonormalize(f.Mp * out.kernel_basis);
  const Matrix gram = out.jperp_basis.transpose() * g.entries() * out.jperp_basis;
  out.jperp_inertia = inertia(gram, opts.tol_degenerate);
  out.signature = out.jperp_inertia.signature();
  out.degenerate = out.jperp_inertia.n_zero > 0;
  return out;
}

// Fraction of the kernel of `a` that survives at time t.
double kernel_residual(const FundamentalSolution& fund, const FocalInstant& a, double t) {
  auto [M, Mp] = fund.evaluate(t);
  double worst = 0;
  for (Eigen::Index j = 0; j < a.kernel_basis.cols(); ++j) {
    const Vector c = a.kernel_basis.col(j);
    const double top = (M * c).norm();
    const double full = std::sqrt(top * top + (Mp * c).squaredNorm());
    worst = std::max(worst, full > 0 ? top / full : 1.0);
  }
  return worst;
}

// Midpoint of the zone around t where the detector stays at its floor. At a
// quadratic touch the minimizer is anywhere inside that zone.
template <class F>
double center_root(F detector, double t, double half_width, double refine_tol) {
  const double floor = 16 * std::max(detector(t), 1e-16);
  auto edge = [&](double inside, double outside) {
    if (detector(outside) <= floor) return outside;
    while (std::abs(outside - inside) > 0.01 * refine_tol) {
      const double mid = 0.5 * (inside + outside);
      (detector(mid) <= floor ? inside : outside) = mid;
    }
    return inside;
  };
  const double lo = edge(t, std::max(0.0, t - half_width));
  const double hi = edge(t, std::min(1.0, t + half_width));
  return 0.5 * (lo + hi);
}

}  // namespace

double focal_detector(const FundamentalSolution& fund, double t) {
  const FrameQR f = frame(fund, t);
  return Eigen::JacobiSVD<Matrix>(f.top).singularValues().minCoeff();
}

const FocalInstant* FocalScan::endpoint() const {
  if (!instants.empty() && instants.back().t == 1.0) return &instants.back();
  return nullptr;
}

int FocalScan::interior_signature_sum() const {
  int s = 0;
  for (const auto& f : instants)
    if (f.t < 1.0) s += f.signature;
  return s;
}

bool FocalScan::interior_degenerate() const {
  return std::any_of(instants.begin(), instants.end(), [](const FocalInstant& f) { return f.t < 1.0 && f.degenerate; });
}

FocalScan scan_focal(const FundamentalSolution& fund, const MetricForm& g, const ScanOptions& opts) {
  if (!(opts.tol_rank > 0 && opts.refine_tol > 0)) throw PreconditionError("scan_focal: tolerances must be positive");
  FocalScan scan;
  const auto& grid = fund.grid;
  const std::size_t N = grid.size() - 1;

  // Coarse samples on the solver grid.
  std::vector<std::pair<double, double>> samples;
  samples.reserve(grid.size());
  double slope = 0;
  for (std::size_t i = 0; i <= N; ++i) {
    const double s = focal_detector(fund, grid[i]);
    samples.emplace_back(grid[i], s);
    scan.sigma_min_trace.emplace_back(grid[i], s);
    scan.det_trace.emplace_back(grid[i], fund.M[i].determinant());
    if (i > 0) slope = std::max(slope, std::abs(s - samples[i - 1].second) / (grid[i] - grid[i - 1]));
  }
  const double lipschitz = 4 * std::max(slope, 1.0);

  // Subdivide every cell that could hide a zero of the detector: the coarse
  // pass uses the global slope bound, later passes the slope of nearby cells.
  const double min_width = 50 * opts.refine_tol;
  for (int pass = 0;; ++pass) {
    std::vector<double> cell_slope(samples.size() - 1);
    for (std::size_t i = 0; i + 1 < samples.size(); ++i)
      cell_slope[i] = std::abs(samples[i + 1].second - samples[i].second) / (samples[i + 1].first - samples[i].first);
    std::vector<std::pair<double, double>> next;
    next.reserve(samples.size());
    bool changed = false;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
      next.push_back(samples[i]);
      const auto [a, sa] = samples[i];
      const auto [b, sb] = samples[i + 1];
      const double w = b - a;
      double bound = lipschitz;
      if (pass > 0) {
        bound = cell_slope[i];
        if (i > 0) bound = std::max(bound, cell_slope[i - 1]);
        if (i + 2 < samples.size()) bound = std::max(bound, cell_slope[i + 1]);
        bound *= 4;
      }
      if (b <= opts.t_guard || w <= min_width || sa + sb > bound * w) continue;
      changed = true;
      for (int j = 1; j < 8; ++j) {
        const double t = a + w * j / 8.0;
        next.emplace_back(t, focal_detector(fund, t));
      }
    }
    next.push_back(samples.back());
    samples.swap(next);
    if (samples.size() > opts.max_samples)
      throw UnresolvedRoot("focal scan exceeded its sample budget", grid.front(), grid.back());
    if (!changed) break;
  }

  // Local minima of the refined samples become candidates.
  auto detector = [&](double t) { return focal_detector(fund, t); };
  std::vector<FocalInstant> candidates;
  const std::size_t last = samples.size() - 1;
  for (std::size_t i = 1; i <= last; ++i) {
    const double t = samples[i].first, s = samples[i].second;
    if (t < opts.t_guard) continue;
    if (s > samples[i - 1].second) continue;
    if (i < last && s > samples[i + 1].second) continue;
    if (i < last && s == samples[i + 1].second) continue;  // plateau: keep its right end
    double root;
    if (i == last) {
      auto [tm, sm] = golden_min(detector, samples[i - 1].first, t, opts.refine_tol);
      if (sm >= opts.tol_rank) continue;
      root = tm;
    } else {
      const double lo = std::max(samples[i - 1].first, opts.t_guard);
      auto [tm, sm] = golden_min(detector, lo, samples[i + 1].first, opts.refine_tol);
      if (sm >= opts.tol_rank) continue;
      root = tm;
    }
    const double width = samples[std::min(i + 1, last)].first - samples[i - 1].first;
    root = center_root(detector, root, width, opts.refine_tol);
    if (root >= 1.0 - 2 * opts.refine_tol && detector(1.0) < opts.tol_rank) root = 1.0;
    if (root < opts.t_guard) continue;
    candidates.push_back(describe(fund, g, root, opts));
  }

  if (detector(1.0) < opts.tol_rank) candidates.push_back(describe(fund, g, 1.0, opts));

  // Merge numerically split roots.
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  for (auto& c : candidates) {
    if (!scan.instants.empty()) {
      FocalInstant& prev = scan.instants.back();
      const bool close = c.t - prev.t < 2 * opts.refine_tol;
      const bool same_kernel = c.multiplicity > 0 && prev.multiplicity > 0 &&
                               kernel_residual(fund, prev, c.t) < opts.tol_rank &&
                               kernel_residual(fund, c, prev.t) < opts.tol_rank &&
                               detector(0.5 * (prev.t + c.t)) < opts.tol_rank;
      if (close || same_kernel) {
        double t = c.sigma_min < prev.sigma_min ? c.t : prev.t;
        if (close) t = 0.5 * (prev.t + c.t);
        if (prev.t == 1.0 || c.t == 1.0) t = 1.0;
        FocalInstant merged = describe(fund, g, t, opts);
        if (merged.multiplicity == 0) merged = prev.multiplicity >= c.multiplicity ? prev : c;
        prev = std::move(merged);
        continue;
      }
    }
    if (c.multiplicity > 0) scan.instants.push_back(std::move(c));
  }

  // Cross-check: every sign change of det M must sit next to a found root.
  const double w = grid.size() > 1 ? grid[1] - grid[0] : 1.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double da = scan.det_trace[i].second, db = scan.det_trace[i + 1].second;
    if (!(da * db < 0)) continue;
    const double a = grid[i], b = grid[i + 1];
    if (b <= opts.t_guard) continue;
    const bool matched = std::any_of(scan.instants.begin(), scan.instants.end(),
                                     [&](const FocalInstant& f) { return f.t >= a - w && f.t <= b + w; });
    if (matched) continue;
    auto det_at = [&](double t) { return fund.evaluate(t).first.determinant(); };
    auto tol = [&](double x, double y) { return std::abs(y - x) <= opts.refine_tol; };
    const auto [lo, hi] = boost::math::tools::bisect(det_at, a, b, tol);
    const double t = 0.5 * (lo + hi);
    FocalInstant f = describe(fund, g, t, opts);
    if (f.multiplicity == 0)
      throw UnresolvedRoot("det M changes sign but the detector does not vanish", lo, hi);
    scan.warnings.push_back("root near t=" + std::to_string(t) + " recovered from a det sign change");
    scan.instants.push_back(std::move(f));
    std::sort(scan.instants.begin(), scan.instants.end(), [](const auto& x, const auto& y) { return x.t < y.t; });
  }

  scan.endpoint_focal = scan.endpoint() != nullptr;
  for (const auto& f : scan.instants)
    if (f.degenerate)
      scan.warnings.push_back("degenerate focal instant at t=" + std::to_string(f.t));
  return scan;
}

int maslov_index(const FocalScan& scan) {
  if (scan.endpoint_focal) throw EndpointFocal("t = 1 is a focal instant; the Maslov index is undefined");
  for (const auto& f : scan.instants)
    if (f.degenerate)
      throw DegenerateFocalInstant("g is degenerate on the focal space at t=" + std::to_string(f.t) +
                                   "; use the perturbation-backed count");
  return scan.interior_signature_sum();
}

std::vector<MaslovTrial> perturbation_trials(const MorseSturmProblem& problem, double eps, int n_trials,
                                             std::uint64_t seed, const SolveOptions& solve,
                                             const ScanOptions& scan_opts, PerturbTargets targets) {
  if (n_trials < 1) throw PreconditionError("perturbation trials: n_trials must be >= 1");
  std::vector<MaslovTrial> trials;
  for (int i = 0; i < n_trials; ++i) {
    MaslovTrial trial;
    trial.trial = i;
    trial.seed = seed + static_cast<std::uint64_t>(i);
    try {
      const MorseSturmProblem p = perturb(problem, Perturbation{eps, trial.seed, targets});
      const FocalScan scan = scan_focal(solve_fundamental(p, solve), p.g, scan_opts);
      trial.interior_sum = scan.interior_signature_sum();
      trial.endpoint_focal = scan.endpoint_focal;
      trial.degenerate = scan.interior_degenerate();
      trial.note = std::to_string(scan.instants.size()) + " instants";
    } catch (const Error& e) {
      trial.note = e.what();
    }
    trials.push_back(std::move(trial));
  }
  return trials;
}

RobustMaslov maslov_robust(const MorseSturmProblem& problem, double eps, int n_trials, std::uint64_t seed,
                           const SolveOptions& solve, const ScanOptions& scan_opts, PerturbTargets targets) {
  if (eps < 0) throw PreconditionError("maslov_robust: eps must be >= 0");
  const FocalScan base = scan_focal(solve_fundamental(problem, solve), problem.g, scan_opts);
  if (base.endpoint_focal) throw EndpointFocal("t = 1 is a focal instant of the unperturbed problem");
  RobustMaslov out;
  if (eps == 0) {
    out.value = maslov_index(base);
    return out;
  }
  out.trials = perturbation_trials(problem, eps, n_trials, seed, solve, scan_opts, targets);
  std::optional<int> agreed;
  for (const auto& t : out.trials) {
    if (!t.usable()) continue;
    if (agreed && *agreed != *t.interior_sum)
      throw NoAgreement("perturbed trials disagree: " + std::to_string(*agreed) + " vs " +
                        std::to_string(*t.interior_sum));
    agreed = t.interior_sum;
  }
  if (!agreed) throw AllTrialsDegenerate("no perturbed trial produced a nondegenerate scan");
  out.value = *agreed;
  return out;
}

void write_focal_table(std::ostream& out, const FocalScan& scan) {
  char buf[128];
  for (const auto& f : scan.instants) {
    std::snprintf(buf, sizeof buf, "%.6f, %d, %d, %s\n", f.t, f.multiplicity, f.signature,
                  f.degenerate ? "true" : "false");
    out << buf;
  }
}

void write_trace_csv(std::ostream& out, const FocalScan& scan) {
  out << "t,det,sigma_min\n";
  char buf[128];
  for (std::size_t i = 0; i < scan.det_trace.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10f,%.17g,%.17g\n", scan.det_trace[i].first, scan.det_trace[i].second,
                  scan.sigma_min_trace[i].second);
    out << buf;
  }
}

}  // namespace msturm
