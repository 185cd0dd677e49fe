#include "msturm/forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msturm/errors.hpp"

namespace msturm {

namespace {

Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

double SpectralInertia::margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double a = std::abs(eigenvalues[i]);
    if (a > threshold) m = std::min(m, a);
  }
  return m;
}

SpectralInertia spectral_inertia(const Matrix& form, double tol_eig) {
  if (form.rows() != form.cols()) throw PreconditionError("inertia: matrix is not square");
  SpectralInertia out;
  if (form.rows() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(form), Eigen::EigenvaluesOnly);
  out.eigenvalues = eig.eigenvalues();
  const double norm = out.eigenvalues.cwiseAbs().maxCoeff();
  out.threshold = tol_eig * std::max(1.0, norm);
  for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i) {
    const double l = out.eigenvalues[i];
    if (l > out.threshold)
      ++out.inertia.n_plus;
    else if (l < -out.threshold)
      ++out.inertia.n_minus;
    else
      ++out.inertia.n_zero;
  }
  return out;
}

Inertia inertia(const Matrix& form, double tol_eig) { return spectral_inertia(form, tol_eig).inertia; }

// ---------------------------------------------------------------------------

MetricForm::MetricForm(const Matrix& entries, double tol_rank) {
  if (entries.rows() == 0 || entries.rows() != entries.cols())
    throw DegenerateMetric("metric must be a nonempty square matrix");
  if (!entries.allFinite()) throw DegenerateMetric("metric has non-finite entries");
  entries_ = symmetrized(entries);
  Eigen::JacobiSVD<Matrix> svd(entries_);
  const auto& s = svd.singularValues();
  if (s.minCoeff() < tol_rank * s.maxCoeff())
    throw DegenerateMetric("metric is degenerate: sigma_min/sigma_max = " +
                           std::to_string(s.minCoeff() / s.maxCoeff()));
}

MetricForm MetricForm::diagonal(const std::vector<double>& diag) {
  Vector d = Eigen::Map<const Vector>(diag.data(), static_cast<Eigen::Index>(diag.size()));
  return MetricForm(d.asDiagonal().toDenseMatrix());
}

MetricForm MetricForm::minkowski(int n) {
  std::vector<double> d(static_cast<std::size_t>(n), 1.0);
  d.back() = -1.0;
  return diagonal(d);
}

// ---------------------------------------------------------------------------

Subspace::Subspace(int ambient_dim, const Matrix& basis, double tol_rank)
    : ambient_dim_(ambient_dim), basis_(basis) {
  if (ambient_dim <= 0) throw InvalidSubspace("ambient dimension must be positive");
  if (basis_.cols() == 0) {
    basis_.resize(ambient_dim, 0);
    return;
  }
  if (basis_.rows() != ambient_dim)
    throw InvalidSubspace("basis vectors have length " + std::to_string(basis_.rows()) +
                          ", expected " + std::to_string(ambient_dim));
  if (!basis_.allFinite()) throw InvalidSubspace("basis has non-finite entries");
  if (numerical_rank(basis_, tol_rank) != basis_.cols())
    throw InvalidSubspace("basis vectors are linearly dependent");
}

Subspace Subspace::zero(int n) { return Subspace(n, Matrix(n, 0)); }
Subspace Subspace::whole(int n) { return Subspace(n, Matrix::Identity(n, n)); }

Matrix Subspace::orthonormal_basis() const {
  if (dim() == 0) return Matrix(ambient_dim_, 0);
  Eigen::HouseholderQR<Matrix> qr(basis_);
  return qr.householderQ() * Matrix::Identity(ambient_dim_, dim());
}

double max_principal_angle(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim()) return M_PI / 2;
  if (a.dim() == 0) return 0.0;
  const Matrix qa = a.orthonormal_basis();
  const Matrix qb = b.orthonormal_basis();
  // sin of the largest angle = norm of the component of qb outside span(qa).
  const Matrix residual = qb - qa * (qa.transpose() * qb);
  Eigen::JacobiSVD<Matrix> svd(residual);
  const double s = std::min(1.0, svd.singularValues().maxCoeff());
  return std::asin(s);
}

bool same_span(const Subspace& a, const Subspace& b, double tol) {
  return a.dim() == b.dim() && max_principal_angle(a, b) < tol;
}

Matrix restrict_form(const MetricForm& g, const Subspace& w) {
  if (w.ambient_dim() != g.n()) throw PreconditionError("restrict: dimension mismatch");
  return symmetrized(w.basis().transpose() * g.entries() * w.basis());
}

Subspace g_orthogonal_complement(const MetricForm& g, const Subspace& w) {
  if (w.ambient_dim() != g.n()) throw PreconditionError("orthogonal complement: dimension mismatch");
  const int n = g.n();
  if (w.dim() == 0) return Subspace::whole(n);
  // Null space of B^T G has dimension exactly n - k since G is invertible.
  const Matrix constraint = w.basis().transpose() * g.entries();
  Eigen::JacobiSVD<Matrix> svd(constraint, Eigen::ComputeFullV);
  const Matrix v = svd.matrixV();
  return Subspace(n, v.rightCols(n - w.dim()));
}

double g_asymmetry(const MetricForm& g, const Matrix& a) {
  const Matrix ga = g.entries() * a;
  const double scale = ga.norm();
  if (scale == 0.0) return 0.0;
  return (ga - ga.transpose()).norm() / scale;
}

bool check_g_symmetric(const MetricForm& g, const Matrix& a, double tol) {
  if (a.rows() != g.n() || a.cols() != g.n()) throw PreconditionError("check_g_symmetric: shape mismatch");
  return g_asymmetry(g, a) <= tol;
}

std::vector<std::pair<double, Inertia>> matrix_curve_inertia(
    const std::vector<std::pair<double, Matrix>>& samples, double tol_eig) {
  std::vector<std::pair<double, Inertia>> out;
  out.reserve(samples.size());
  for (const auto& [t, m] : samples) out.emplace_back(t, inertia(m, tol_eig));
  return out;
}

int numerical_rank(const Matrix& a, double tol_rank) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  if (smax == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > tol_rank * smax) ++r;
  return r;
}

Matrix null_space(const Matrix& a, double tol_rank) {
  const Eigen::Index cols = a.cols();
  if (a.rows() == 0) return Matrix::Identity(cols, cols);
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  Eigen::Index r = 0;
  if (smax > 0)
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s[i] > tol_rank * smax) ++r;
  return svd.matrixV().rightCols(cols - r);
}

}  // namespace msturm
