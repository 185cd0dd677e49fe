#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "msturm/forms.hpp"

namespace msturm {

enum class PathKind { Constant, Polynomial, Trigonometric, SampledGrid };

const char* to_string(PathKind kind);

/// One harmonic of a trigonometric coefficient: cos_coeff*cos(omega t) + sin_coeff*sin(omega t).
struct TrigTerm {
  double omega = 0;
  Matrix cos_coeff;
  Matrix sin_coeff;
  bool operator==(const TrigTerm& o) const {
    return omega == o.omega && cos_coeff == o.cos_coeff && sin_coeff == o.sin_coeff;
  }
};

/// Matrix-valued coefficient t -> R(t) on [0, 1].
///
/// Sampled grids are interpolated by cubic Hermite pieces whose slopes come
/// from three-point differences, so the interpolant is C^1.
class CoefficientPath {
 public:
  static CoefficientPath constant(const Matrix& value);
  static CoefficientPath polynomial(std::vector<Matrix> coeffs);
  static CoefficientPath trigonometric(const Matrix& constant, std::vector<TrigTerm> terms);
  static CoefficientPath sampled(std::vector<double> times, std::vector<Matrix> values);

  int n() const { return n_; }
  PathKind kind() const { return kind_; }

  Matrix operator()(double t) const;
  Matrix derivative(double t) const;

  /// Same path plus a constant matrix.
  CoefficientPath plus_constant(const Matrix& delta) const;
  /// Same path with every value mapped through m -> f(m) (sampled and
  /// constant kinds apply f pointwise; other kinds apply f to each coefficient).
  CoefficientPath map_linear(const std::function<Matrix(const Matrix&)>& f) const;

  /// constant: {value}; polynomial: coefficients; trigonometric: {constant}; sampled: values.
  const std::vector<Matrix>& matrices() const { return matrices_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<TrigTerm>& terms() const { return terms_; }

  bool operator==(const CoefficientPath& o) const {
    return kind_ == o.kind_ && n_ == o.n_ && matrices_ == o.matrices_ && times_ == o.times_ &&
           terms_ == o.terms_;
  }

 private:
  CoefficientPath(PathKind kind, int n) : kind_(kind), n_(n) {}
  void build_slopes();
  std::size_t locate(double t) const;

  PathKind kind_;
  int n_;
  std::vector<Matrix> matrices_;
  std::vector<double> times_;
  std::vector<TrigTerm> terms_;
  std::vector<Matrix> slopes_;  // sampled kind only, derived
};

/// The 32 Chebyshev-distributed instants used for the g-symmetry check.
std::vector<double> chebyshev_points(int count = 32);

struct BoundaryData {
  Subspace P;
  Matrix S;  // k x k in the basis of P
  bool operator==(const BoundaryData&) const = default;
};

struct WitnessSeed {
  Vector value;
  Vector velocity;
  bool operator==(const WitnessSeed& o) const { return value == o.value && velocity == o.velocity; }
};

struct MorseSturmProblem {
  MetricForm g;
  CoefficientPath R;
  BoundaryData boundary;
  std::optional<WitnessSeed> y_seed;
  nlohmann::json meta = nlohmann::json::object();

  int n() const { return g.n(); }
  bool operator==(const MorseSturmProblem& o) const {
    return g == o.g && R == o.R && boundary == o.boundary && y_seed == o.y_seed && meta == o.meta;
  }
};

/// A broken invariant and how badly it is broken.
struct Violation {
  std::string invariant;
  double margin = 0;
  std::string detail;
};

/// Empty iff every problem invariant holds.
std::vector<Violation> validate(const MorseSturmProblem& problem, double sym_tol = 1e-9,
                                double tol_eig = kDefaultTolEig);

/// Throws ValidationFailed listing the violations, if any.
void require_valid(const MorseSturmProblem& problem);

/// Matrix of the bilinear form (v, w) -> g(S v, w) on the coordinates of P.
Matrix boundary_form(const MorseSturmProblem& problem);

// ---------------------------------------------------------------------------
// Perturbations

struct PerturbTargets {
  bool R = true;
  bool S = false;
  bool P = false;
};

struct Perturbation {
  double eps = 0;
  std::uint64_t seed = 0;
  PerturbTargets targets;
};

/// C^0-small perturbation: entries drawn uniformly in [-eps, eps], then
/// projected back to g-symmetry. Throws PerturbationBrokeInvariant if g
/// becomes degenerate on the perturbed P.
MorseSturmProblem perturb(const MorseSturmProblem& problem, const Perturbation& pert);

// ---------------------------------------------------------------------------
// Generators

/// Smooth curve in R^2 with its first two derivatives.
struct TimelikePath {
  std::function<Vector(double)> value;
  std::function<Vector(double)> velocity;
  std::function<Vector(double)> acceleration;
};

/// Builds a 2D problem on g = diag(1, -1), P = {0}, whose coefficient admits
/// the given timelike curve as a solution at every sample. Among the
/// g-symmetric R with R Y = Y'' it takes the minimum-Frobenius-norm one plus
/// lambda(t) times the unit kernel direction.
MorseSturmProblem generate_timelike_2d(const TimelikePath& path,
                                       const std::function<double(double)>& lambda = {},
                                       int samples = 513);

TimelikePath random_timelike_path(std::uint64_t seed);

/// Positive-definite g, linear-in-t R tuned to oscillate, random P and S.
MorseSturmProblem random_riemannian_problem(std::uint64_t seed);

/// Lorentzian problem (n_-(g) = 1) with a certified timelike witness seed.
MorseSturmProblem random_lorentzian_problem(std::uint64_t seed);

// ---------------------------------------------------------------------------
// Files

nlohmann::json problem_to_json(const MorseSturmProblem& problem);
/// Throws SchemaError on missing or inconsistent fields.
MorseSturmProblem problem_from_json(const nlohmann::json& doc);

/// Throws ParseError (with line and column) or SchemaError.
MorseSturmProblem load(const std::string& path);
MorseSturmProblem parse_problem(const std::string& text);
void save(const MorseSturmProblem& problem, const std::string& path);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, const std::string& field);

}  // namespace msturm
