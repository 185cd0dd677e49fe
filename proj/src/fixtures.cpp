#include "msturm/fixtures.hpp"

#include <cmath>
#include <sstream>

namespace msturm::fixtures {

namespace {

MorseSturmProblem flat_minkowski_plane(double s, const char* name) {
  Matrix p(2, 1);
  p << 0, 1;
  Matrix S(1, 1);
  S << s;
  Vector y0(2), y1(2);
  y0 << 0, 1;
  y1 << 0, 0;
  return {MetricForm::diagonal({1.0, -1.0}), CoefficientPath::constant(Matrix::Zero(2, 2)),
          BoundaryData{Subspace(2, p), S}, WitnessSeed{y0, y1}, nlohmann::json{{"name", name}}};
}

}  // namespace

MorseSturmProblem exsimple() { return flat_minkowski_plane(0.0, "exsimple"); }
MorseSturmProblem excausal() { return flat_minkowski_plane(1.0, "excausal"); }
MorseSturmProblem excausal_interior() { return flat_minkowski_plane(2.0, "excausal_interior"); }

MorseSturmProblem null_focal_3d(double scale) {
  Matrix p(3, 2);
  p << 0, 0, 1, 0, 0, 1;
  // S(e2 + e3) = e2 + e3 and S(e2 - e3) = 2 e2, in the basis (e2, e3).
  Matrix S(2, 2);
  S << 1.5, -0.5, 0.5, 0.5;
  Vector y0(3), y1(3);
  y0 << 0, 0, 1;
  y1 << 0, 0, 0;
  return {MetricForm::diagonal({1.0, 1.0, -1.0}), CoefficientPath::constant(Matrix::Zero(3, 3)),
          BoundaryData{Subspace(3, p), scale * S}, WitnessSeed{y0, y1},
          nlohmann::json{{"name", "null_focal_3d"}, {"scale", scale}}};
}

MorseSturmProblem harmonic(double k) {
  const double w2 = std::pow(k * M_PI, 2);
  return {MetricForm(Matrix::Identity(2, 2)), CoefficientPath::constant(-w2 * Matrix::Identity(2, 2)),
          BoundaryData{Subspace::zero(2), Matrix(0, 0)}, std::nullopt,
          nlohmann::json{{"name", harmonic_name(k)}, {"k", k}}};
}

std::string harmonic_name(double k) {
  std::ostringstream s;
  s << "harmonic_" << k;
  std::string out = s.str();
  for (auto& c : out)
    if (c == '.') c = 'p';
  return out;
}

Matrix crossing_curve_b1(double t) {
  Matrix m(2, 2);
  m << t * t, t, t, 1 + t;
  return m;
}

Matrix crossing_curve_b2(double t) {
  Matrix m(2, 2);
  m << t * t, 0, 0, 1;
  return m;
}

}  // namespace msturm::fixtures
