#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace msturm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultTolEig = 1e-9;
inline constexpr double kDefaultTolRank = 1e-7;

/// Counts of positive, negative and null eigenvalues of a symmetric form.
struct Inertia {
  int n_plus = 0;
  int n_minus = 0;
  int n_zero = 0;

  int signature() const { return n_plus - n_minus; }
  int dim() const { return n_plus + n_minus + n_zero; }
  int rank() const { return n_plus + n_minus; }
  bool operator==(const Inertia&) const = default;
};

/// Inertia of a (symmetrized) matrix. An eigenvalue counts as zero when
/// |lambda| <= tol_eig * max(1, spectral norm).
Inertia inertia(const Matrix& form, double tol_eig = kDefaultTolEig);

/// Inertia together with the eigenvalues it was read from.
struct SpectralInertia {
  Inertia inertia;
  Vector eigenvalues;   // ascending
  double threshold = 0; // absolute zero band actually used
  /// Smallest |lambda| among the eigenvalues counted as nonzero (inf if none).
  double margin() const;
};

SpectralInertia spectral_inertia(const Matrix& form, double tol_eig = kDefaultTolEig);

/// Constant nondegenerate symmetric bilinear form on R^n.
class MetricForm {
 public:
  /// Symmetrizes `entries`; throws DegenerateMetric when the smallest singular
  /// value is below tol_rank times the largest.
  explicit MetricForm(const Matrix& entries, double tol_rank = kDefaultTolRank);

  static MetricForm diagonal(const std::vector<double>& diag);
  static MetricForm minkowski(int n);  // diag(1, ..., 1, -1)

  int n() const { return static_cast<int>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }
  double operator()(const Vector& u, const Vector& v) const { return u.dot(entries_ * v); }

  Inertia inertia(double tol_eig = kDefaultTolEig) const { return msturm::inertia(entries_, tol_eig); }
  bool positive_definite() const { return inertia().n_minus == 0; }
  MetricForm scaled(double c) const { return MetricForm(c * entries_); }

  bool operator==(const MetricForm& other) const { return entries_ == other.entries_; }

 private:
  Matrix entries_;
};

/// Linear subspace of R^n given by a full-column-rank basis matrix.
class Subspace {
 public:
  /// Throws InvalidSubspace if the columns are linearly dependent.
  Subspace(int ambient_dim, const Matrix& basis, double tol_rank = kDefaultTolRank);

  static Subspace zero(int n);
  static Subspace whole(int n);
  static Subspace span(const Matrix& columns) {
    return Subspace(static_cast<int>(columns.rows()), columns);
  }

  int ambient_dim() const { return ambient_dim_; }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const Matrix& basis() const { return basis_; }
  /// Orthonormal (Euclidean) basis of the same span.
  Matrix orthonormal_basis() const;

  bool operator==(const Subspace& other) const {
    return ambient_dim_ == other.ambient_dim_ && basis_ == other.basis_;
  }

 private:
  int ambient_dim_;
  Matrix basis_;
};

/// Largest principal angle between two subspaces (radians); pi/2 if the
/// dimensions differ.
double max_principal_angle(const Subspace& a, const Subspace& b);

/// Equal spans: same dimension and every principal angle below `tol`.
bool same_span(const Subspace& a, const Subspace& b, double tol = 1e-8);

/// Gram matrix of g on the basis of W.
Matrix restrict_form(const MetricForm& g, const Subspace& w);

/// {v : g(v, w) = 0 for all w in W}, orthonormal basis.
Subspace g_orthogonal_complement(const MetricForm& g, const Subspace& w);

/// ||GA - A^T G|| <= tol ||GA|| (Frobenius).
bool check_g_symmetric(const MetricForm& g, const Matrix& a, double tol = 1e-10);

/// Relative asymmetry ||GA - A^T G|| / ||GA||, 0 when GA vanishes.
double g_asymmetry(const MetricForm& g, const Matrix& a);

/// Per-sample inertia of a matrix-valued curve.
std::vector<std::pair<double, Inertia>> matrix_curve_inertia(
    const std::vector<std::pair<double, Matrix>>& samples, double tol_eig = kDefaultTolEig);

/// Numerical rank by SVD: singular values above tol_rank * sigma_max.
int numerical_rank(const Matrix& a, double tol_rank = kDefaultTolRank);

/// Orthonormal basis of the right null space of `a` (relative threshold).
Matrix null_space(const Matrix& a, double tol_rank = kDefaultTolRank);

}  // namespace msturm
