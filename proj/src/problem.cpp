#include "msturm/problem.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "msturm/errors.hpp"

namespace msturm {

const char* to_string(PathKind kind) {
  switch (kind) {
    case PathKind::Constant: return "constant";
    case PathKind::Polynomial: return "polynomial-in-t";
    case PathKind::Trigonometric: return "trigonometric";
    case PathKind::SampledGrid: return "sampled-grid";
  }
  return "?";
}

namespace {

void require_square(const Matrix& m, int n, const char* what) {
  if (m.rows() != n || m.cols() != n)
    throw SchemaError(std::string(what) + ": expected " + std::to_string(n) + "x" + std::to_string(n) +
                      " matrix, got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

}  // namespace

CoefficientPath CoefficientPath::constant(const Matrix& value) {
  CoefficientPath p(PathKind::Constant, static_cast<int>(value.rows()));
  require_square(value, p.n_, "constant coefficient");
  p.matrices_ = {value};
  return p;
}

CoefficientPath CoefficientPath::polynomial(std::vector<Matrix> coeffs) {
  if (coeffs.empty()) throw SchemaError("polynomial coefficient needs at least one matrix");
  CoefficientPath p(PathKind::Polynomial, static_cast<int>(coeffs.front().rows()));
  for (const auto& c : coeffs) require_square(c, p.n_, "polynomial coefficient");
  p.matrices_ = std::move(coeffs);
  return p;
}

CoefficientPath CoefficientPath::trigonometric(const Matrix& constant, std::vector<TrigTerm> terms) {
  CoefficientPath p(PathKind::Trigonometric, static_cast<int>(constant.rows()));
  require_square(constant, p.n_, "trigonometric constant");
  for (const auto& term : terms) {
    require_square(term.cos_coeff, p.n_, "trigonometric cos coefficient");
    require_square(term.sin_coeff, p.n_, "trigonometric sin coefficient");
  }
  p.matrices_ = {constant};
  p.terms_ = std::move(terms);
  return p;
}

CoefficientPath CoefficientPath::sampled(std::vector<double> times, std::vector<Matrix> values) {
  if (times.size() < 2 || times.size() != values.size())
    throw SchemaError("sampled-grid coefficient needs >= 2 instants and one matrix per instant");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw SchemaError("sampled-grid instants must be strictly increasing");
  if (times.front() > 0.0 || times.back() < 1.0) throw SchemaError("sampled-grid instants must cover [0, 1]");
  CoefficientPath p(PathKind::SampledGrid, static_cast<int>(values.front().rows()));
  for (const auto& v : values) require_square(v, p.n_, "sampled-grid value");
  p.times_ = std::move(times);
  p.matrices_ = std::move(values);
  p.build_slopes();
  return p;
}

void CoefficientPath::build_slopes() {
  const std::size_t count = times_.size();
  slopes_.assign(count, Matrix::Zero(n_, n_));
  if (count == 2) {
    slopes_[0] = slopes_[1] = (matrices_[1] - matrices_[0]) / (times_[1] - times_[0]);
    return;
  }
  // Three-point (second-order) differences on a nonuniform grid.
  auto three_point = [&](std::size_t i0, double at) {
    const double x0 = times_[i0], x1 = times_[i0 + 1], x2 = times_[i0 + 2];
    const double c0 = (2 * at - x1 - x2) / ((x0 - x1) * (x0 - x2));
    const double c1 = (2 * at - x0 - x2) / ((x1 - x0) * (x1 - x2));
    const double c2 = (2 * at - x0 - x1) / ((x2 - x0) * (x2 - x1));
    return Matrix(c0 * matrices_[i0] + c1 * matrices_[i0 + 1] + c2 * matrices_[i0 + 2]);
  };
  slopes_[0] = three_point(0, times_[0]);
  for (std::size_t i = 1; i + 1 < count; ++i) slopes_[i] = three_point(i - 1, times_[i]);
  slopes_[count - 1] = three_point(count - 3, times_[count - 1]);
}

std::size_t CoefficientPath::locate(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  return std::min(i, times_.size() - 2);
}

Matrix CoefficientPath::operator()(double t) const {
  switch (kind_) {
    case PathKind::Constant:
      return matrices_.front();
    case PathKind::Polynomial: {
      Matrix acc = matrices_.back();
      for (std::size_t i = matrices_.size() - 1; i-- > 0;) acc = acc * t + matrices_[i];
      return acc;
    }
    case PathKind::Trigonometric: {
      Matrix acc = matrices_.front();
      for (const auto& term : terms_)
        acc += term.cos_coeff * std::cos(term.omega * t) + term.sin_coeff * std::sin(term.omega * t);
      return acc;
    }
    case PathKind::SampledGrid: {
      const std::size_t i = locate(t);
      const double h = times_[i + 1] - times_[i];
      const double s = (t - times_[i]) / h;
      const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
      const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
      return h00 * matrices_[i] + h10 * h * slopes_[i] + h01 * matrices_[i + 1] + h11 * h * slopes_[i + 1];
    }
  }
  return {};
}

Matrix CoefficientPath::derivative(double t) const {
  switch (kind_) {
    case PathKind::Constant:
      return Matrix::Zero(n_, n_);
    case PathKind::Polynomial: {
      Matrix acc = Matrix::Zero(n_, n_);
      for (std::size_t i = matrices_.size() - 1; i >= 1; --i) acc = acc * t + static_cast<double>(i) * matrices_[i];
      return acc;
    }
    case PathKind::Trigonometric: {
      Matrix acc = Matrix::Zero(n_, n_);
      for (const auto& term : terms_)
        acc += term.omega * (-term.cos_coeff * std::sin(term.omega * t) + term.sin_coeff * std::cos(term.omega * t));
      return acc;
    }
    case PathKind::SampledGrid: {
      const std::size_t i = locate(t);
      const double h = times_[i + 1] - times_[i];
      const double s = (t - times_[i]) / h;
      const double d00 = 6 * s * (s - 1), d10 = (1 - s) * (1 - 3 * s);
      const double d01 = -6 * s * (s - 1), d11 = s * (3 * s - 2);
      return (d00 * matrices_[i] + d01 * matrices_[i + 1]) / h + d10 * slopes_[i] + d11 * slopes_[i + 1];
    }
  }
  return {};
}

CoefficientPath CoefficientPath::plus_constant(const Matrix& delta) const {
  require_square(delta, n_, "perturbation");
  CoefficientPath out = *this;
  if (kind_ == PathKind::SampledGrid) {
    for (auto& m : out.matrices_) m += delta;
  } else {
    out.matrices_.front() += delta;
  }
  return out;
}

CoefficientPath CoefficientPath::map_linear(const std::function<Matrix(const Matrix&)>& f) const {
  CoefficientPath out = *this;
  for (auto& m : out.matrices_) m = f(m);
  for (auto& term : out.terms_) {
    term.cos_coeff = f(term.cos_coeff);
    term.sin_coeff = f(term.sin_coeff);
  }
  if (kind_ == PathKind::SampledGrid) out.build_slopes();
  return out;
}

std::vector<double> chebyshev_points(int count) {
  std::vector<double> t(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) t[static_cast<std::size_t>(j)] = 0.5 * (1 - std::cos(M_PI * (j + 0.5) / count));
  return t;
}

// ---------------------------------------------------------------------------

Matrix boundary_form(const MorseSturmProblem& problem) {
  const Matrix& p = problem.boundary.P.basis();
  const Matrix gp = p.transpose() * problem.g.entries() * p;
  const Matrix form = gp * problem.boundary.S;
  return 0.5 * (form + form.transpose());
}

std::vector<Violation> validate(const MorseSturmProblem& problem, double sym_tol, double tol_eig) {
  std::vector<Violation> out;
  const int n = problem.n();
  const auto& g = problem.g;

  if (problem.R.n() != n) {
    out.push_back({"R dimension", static_cast<double>(problem.R.n()),
                   "R is " + std::to_string(problem.R.n()) + "x" + std::to_string(problem.R.n()) + ", g is " +
                       std::to_string(n) + "x" + std::to_string(n)});
  } else {
    double worst = 0, worst_t = 0;
    for (double t : chebyshev_points()) {
      const Matrix r = problem.R(t);
      if (!r.allFinite()) {
        out.push_back({"R finite", t, "R(t) has non-finite entries"});
        break;
      }
      const double a = g_asymmetry(g, r);
      if (a > worst) worst = a, worst_t = t;
    }
    if (worst > sym_tol) {
      std::ostringstream s;
      s << "R not g-symmetric: relative asymmetry " << worst << " at t=" << worst_t;
      out.push_back({"R g-symmetric", worst, s.str()});
    }
  }

  const auto& P = problem.boundary.P;
  const Matrix& S = problem.boundary.S;
  if (P.ambient_dim() != n) {
    out.push_back({"P dimension", static_cast<double>(P.ambient_dim()), "P lives in the wrong ambient space"});
    return out;
  }
  const int k = P.dim();
  if (k > 0) {
    const SpectralInertia gp = spectral_inertia(restrict_form(g, P), tol_eig);
    if (gp.inertia.n_zero > 0) {
      const double m = gp.eigenvalues.cwiseAbs().minCoeff();
      out.push_back({"g nondegenerate on P", m,
                     "g degenerate on P: smallest |eigenvalue| of the Gram matrix is " + std::to_string(m)});
    }
  }
  if (S.rows() != k || S.cols() != k) {
    out.push_back({"S shape", static_cast<double>(S.rows()),
                   "S must be " + std::to_string(k) + "x" + std::to_string(k)});
  } else if (k > 0) {
    const Matrix gs = restrict_form(g, P) * S;
    const double scale = gs.norm();
    const double a = scale == 0 ? 0 : (gs - gs.transpose()).norm() / scale;
    if (a > sym_tol) out.push_back({"S g-symmetric", a, "S not g-symmetric: relative asymmetry " + std::to_string(a)});
  }

  if (problem.y_seed) {
    if (problem.y_seed->value.size() != n || problem.y_seed->velocity.size() != n)
      out.push_back({"y_seed dimension", static_cast<double>(problem.y_seed->value.size()),
                     "witness seed vectors must have length n"});
  }
  return out;
}

void require_valid(const MorseSturmProblem& problem) {
  const auto violations = validate(problem);
  if (violations.empty()) return;
  std::string msg = "problem fails validation:";
  for (const auto& v : violations) msg += "\n  - " + v.detail;
  throw ValidationFailed(msg);
}

// ---------------------------------------------------------------------------

namespace {

/// Projection onto g-symmetric operators: (A + G^{-1} A^T G) / 2.
Matrix g_symmetrize(const Matrix& gram, const Matrix& a) {
  return 0.5 * (a + gram.inverse() * a.transpose() * gram);
}

Matrix uniform_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double eps) {
  std::uniform_real_distribution<double> u(-eps, eps);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

/// Rescale so that the largest entry does not exceed eps.
Matrix clamp_entries(Matrix m, double eps) {
  const double big = m.cwiseAbs().maxCoeff();
  if (big > eps && big > 0) m *= eps / big;
  return m;
}

}  // namespace

MorseSturmProblem perturb(const MorseSturmProblem& problem, const Perturbation& pert) {
  if (!(pert.eps >= 0)) throw PreconditionError("perturb: eps must be nonnegative");
  MorseSturmProblem out = problem;
  if (pert.eps == 0) return out;
  std::mt19937_64 rng(pert.seed);
  const int n = problem.n();
  const Matrix& G = problem.g.entries();

  if (pert.targets.R) {
    const Matrix delta = clamp_entries(g_symmetrize(G, uniform_matrix(rng, n, n, pert.eps)), pert.eps);
    out.R = problem.R.plus_constant(delta);
  }

  const int k = problem.boundary.P.dim();
  if (k == 0) return out;

  Matrix basis = problem.boundary.P.basis();
  Matrix S = problem.boundary.S;
  if (pert.targets.P) {
    basis += uniform_matrix(rng, n, k, pert.eps);
    try {
      out.boundary.P = Subspace(n, basis);
    } catch (const InvalidSubspace& e) {
      throw PerturbationBrokeInvariant(std::string("perturbed P basis: ") + e.what());
    }
  }
  const Matrix gp = restrict_form(problem.g, out.boundary.P);
  const Inertia before = inertia(restrict_form(problem.g, problem.boundary.P));
  const Inertia after = inertia(gp);
  // A change of inertia means the path of subspaces crossed a degenerate one.
  if (after.n_zero > 0 || after != before)
    throw PerturbationBrokeInvariant("g degenerates on the perturbed P (index of g|P " +
                                     std::to_string(before.n_minus) + " -> " + std::to_string(after.n_minus) +
                                     "); eps too large");
  if (pert.targets.S) S += clamp_entries(uniform_matrix(rng, k, k, pert.eps), pert.eps);
  if (pert.targets.S || pert.targets.P) S = g_symmetrize(gp, S);
  out.boundary.S = S;
  return out;
}

}  // namespace msturm
