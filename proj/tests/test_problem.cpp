#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "msturm/errors.hpp"
#include "msturm/fixtures.hpp"
#include "msturm/focal.hpp"
#include "msturm/problem.hpp"
#include "msturm/sturm_solver.hpp"

using namespace msturm;

namespace {

std::string fixture(const std::string& stem) { return std::string(MSTURM_FIXTURE_DIR) + "/" + stem + ".msp.json"; }

bool has_violation(const std::vector<Violation>& v, const std::string& what) {
  for (const auto& x : v)
    if (x.invariant == what) return true;
  return false;
}

double sup_distance(const CoefficientPath& a, const CoefficientPath& b) {
  double d = 0;
  for (double t : chebyshev_points()) d = std::max(d, (a(t) - b(t)).cwiseAbs().maxCoeff());
  return d;
}

TimelikePath path_of(std::function<Vector(double)> y, std::function<Vector(double)> yp,
                     std::function<Vector(double)> ypp) {
  return TimelikePath{std::move(y), std::move(yp), std::move(ypp)};
}

}  // namespace

TEST_CASE("the parabola problem validates") { CHECK(validate(fixtures::excausal()).empty()); }

TEST_CASE("non g-symmetric S on a mixed plane is reported") {
  MorseSturmProblem p = fixtures::null_focal_3d();
  Matrix P(3, 2);
  P << 1, 0, 0, 0, 0, 1;  // span{e1, e3}: g restricted is diag(1, -1)
  p.boundary.P = Subspace(3, P);
  p.boundary.S = Matrix(2, 2);
  p.boundary.S << 0, 1, 1, 0;
  const auto v = validate(p);
  CHECK(has_violation(v, "S g-symmetric"));
  CHECK_THROWS_AS(require_valid(p), ValidationFailed);
}

TEST_CASE("lightlike P is reported") {
  MorseSturmProblem p = fixtures::exsimple();
  Matrix P(2, 1);
  P << 1, 1;
  p.boundary.P = Subspace(2, P);
  CHECK(has_violation(validate(p), "g nondegenerate on P"));
}

TEST_CASE("non g-symmetric R is reported") {
  MorseSturmProblem p = fixtures::exsimple();
  Matrix r(2, 2);
  r << 0, 1, 1, 0;
  p.R = CoefficientPath::constant(r);
  CHECK(has_violation(validate(p), "R g-symmetric"));
}

TEST_CASE("perturb with eps = 0 is the identity") {
  const auto p = fixtures::excausal();
  CHECK(perturb(p, Perturbation{0.0, 17, {}}) == p);
}

TEST_CASE("perturbation of R is bounded by eps") {
  const auto p = fixtures::excausal();
  const auto q = perturb(p, Perturbation{1e-4, 3, {}});
  CHECK(sup_distance(p.R, q.R) <= 1e-4);
  CHECK(sup_distance(p.R, q.R) > 0);
  CHECK(validate(q).empty());
}

TEST_CASE("ten seeds give ten distinct valid problems") {
  const auto p = fixtures::excausal();
  std::vector<MorseSturmProblem> out;
  for (std::uint64_t s = 0; s < 10; ++s) {
    out.push_back(perturb(p, Perturbation{1e-4, s, {true, true, true}}));
    CHECK(validate(out.back()).empty());
    CHECK(out.back().boundary.S.cwiseAbs().maxCoeff() > 0);
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j) CHECK_FALSE(out[i] == out[j]);
}

TEST_CASE("perturbation shrinks to the identity as eps goes to zero") {
  const auto p = fixtures::harmonic(2.5);
  double prev = 1e300;
  for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const double d = sup_distance(p.R, perturb(p, Perturbation{eps, 9, {}}).R);
    CHECK(d <= eps);
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("perturbing S and P keeps the symmetry invariants") {
  const auto p = fixtures::null_focal_3d(2.0);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto q = perturb(p, Perturbation{1e-3, s, {true, true, true}});
    CHECK(validate(q).empty());
    CHECK((q.boundary.S - p.boundary.S).cwiseAbs().maxCoeff() < 1e-2);
  }
}

TEST_CASE("large perturbation of a nearly null P breaks the invariant") {
  MorseSturmProblem p = fixtures::exsimple();
  Matrix P(2, 1);
  P << 1, 1.001;
  p.boundary.P = Subspace(2, P);
  bool broke = false;
  for (std::uint64_t s = 0; s < 200 && !broke; ++s) {
    try {
      perturb(p, Perturbation{2e-3, s, {false, false, true}});
    } catch (const PerturbationBrokeInvariant&) {
      broke = true;
    }
  }
  CHECK(broke);
}

TEST_CASE("generator: constant witness allows R = 0") {
  const auto p = generate_timelike_2d(path_of([](double) { return Vector(Vector::Unit(2, 1)); },
                                              [](double) { return Vector(Vector::Zero(2)); },
                                              [](double) { return Vector(Vector::Zero(2)); }));
  CHECK(validate(p).empty());
  for (double t : {0.0, 0.3, 1.0}) CHECK(p.R(t).norm() < 1e-14);
}

TEST_CASE("generator: hyperbolic witness") {
  const double a = 0.3;
  const auto p = generate_timelike_2d(
      path_of([a](double t) { return Vector(Eigen::Vector2d(std::sinh(a * t), std::cosh(a * t))); },
              [a](double t) { return Vector(a * Eigen::Vector2d(std::cosh(a * t), std::sinh(a * t))); },
              [a](double t) { return Vector(a * a * Eigen::Vector2d(std::sinh(a * t), std::cosh(a * t))); }));
  CHECK(validate(p).empty());
  for (double t : p.R.times()) {
    const Vector y(Eigen::Vector2d(std::sinh(a * t), std::cosh(a * t)));
    CHECK((p.R(t) * y - 0.09 * y).norm() < 1e-12);
  }
  REQUIRE(p.y_seed);
  CHECK(p.y_seed->value.isApprox(Vector::Unit(2, 1)));
}

TEST_CASE("generator: wobbling witness has no conjugate instants") {
  const auto p = generate_timelike_2d(
      path_of([](double t) { return Vector(Eigen::Vector2d(0.2 * std::sin(t), 1 + 0.1 * t * t)); },
              [](double t) { return Vector(Eigen::Vector2d(0.2 * std::cos(t), 0.2 * t)); },
              [](double t) { return Vector(Eigen::Vector2d(-0.2 * std::sin(t), 0.2)); }));
  CHECK(validate(p).empty());
  for (double t : p.R.times()) {
    const Vector y(Eigen::Vector2d(0.2 * std::sin(t), 1 + 0.1 * t * t));
    const Vector ypp(Eigen::Vector2d(-0.2 * std::sin(t), 0.2));
    CHECK((p.R(t) * y - ypp).norm() < 1e-10);
  }
  CHECK(solve_witness(p).min_margin > 0);
  CHECK(scan_focal(solve_fundamental(p), p.g).instants.empty());
}

TEST_CASE("generator rejects a spacelike path") {
  CHECK_THROWS_AS(generate_timelike_2d(path_of([](double) { return Vector(Vector::Unit(2, 0)); },
                                               [](double) { return Vector(Vector::Zero(2)); },
                                               [](double) { return Vector(Vector::Zero(2)); })),
                  NotTimelike);
}

TEST_CASE("generated problems validate and certify their witness") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto p = generate_timelike_2d(random_timelike_path(s));
    CHECK(validate(p).empty());
    CHECK(solve_witness(p).min_margin > 0);
  }
}

TEST_CASE("save / load round trip is exact") {
  const std::string tmp = "msturm_roundtrip.msp.json";
  std::vector<MorseSturmProblem> problems{fixtures::exsimple(), fixtures::null_focal_3d(), fixtures::harmonic(2.5),
                                          random_lorentzian_problem(4), random_riemannian_problem(7),
                                          generate_timelike_2d(random_timelike_path(2))};
  Matrix c(2, 2), s(2, 2);
  c << 1.0 / 3, 0, 0, 2;
  s << 0.1, 0, 0, -0.7;
  problems.push_back({MetricForm(Matrix::Identity(2, 2)),
                      CoefficientPath::trigonometric(Matrix::Identity(2, 2), {TrigTerm{M_PI, c, s}}),
                      BoundaryData{Subspace::zero(2), Matrix(0, 0)}, std::nullopt, {{"note", "trig"}}});
  for (const auto& p : problems) {
    save(p, tmp);
    CHECK(load(tmp) == p);
  }
  std::remove(tmp.c_str());
}

TEST_CASE("dimension mismatch between g and R is a schema error") {
  auto doc = problem_to_json(fixtures::exsimple());
  doc["R"]["data"] = {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  CHECK_THROWS_AS(problem_from_json(doc), SchemaError);
  auto doc2 = problem_to_json(fixtures::exsimple());
  doc2.erase("g");
  CHECK_THROWS_AS(problem_from_json(doc2), SchemaError);
}

TEST_CASE("syntax errors report a line") {
  try {
    parse_problem("{\n  \"n\": 2,\n  \"g\": [[1, 0], [0, -1]\n}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
}

TEST_CASE("polynomial coefficient evaluates as R0 + t R1") {
  auto doc = problem_to_json(fixtures::harmonic(1.0));
  doc["R"] = {{"kind", "polynomial-in-t"}, {"data", {{{1.0, 0.0}, {0.0, 2.0}}, {{3.0, 0.0}, {0.0, -1.0}}}}};
  const auto p = problem_from_json(doc);
  CHECK(p.R(0.5)(0, 0) == doctest::Approx(2.5));
  CHECK(p.R(0.5)(1, 1) == doctest::Approx(1.5));
  CHECK(p.R.derivative(0.2)(0, 0) == doctest::Approx(3.0));
}

TEST_CASE("sampled coefficients are C1 and interpolate the samples") {
  std::vector<double> ts;
  std::vector<Matrix> vs;
  for (int i = 0; i <= 16; ++i) {
    ts.push_back(i / 16.0);
    vs.push_back(Matrix::Constant(1, 1, std::sin(3 * ts.back())));
  }
  const auto r = CoefficientPath::sampled(ts, vs);
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(r(ts[i])(0, 0) == doctest::Approx(vs[i](0, 0)).epsilon(1e-14));
  for (double t : {0.1, 0.37, 0.81}) CHECK(std::abs(r(t)(0, 0) - std::sin(3 * t)) < 1e-3);
  const double knot = ts[5], h = 1e-7;
  CHECK(std::abs(r.derivative(knot - h)(0, 0) - r.derivative(knot + h)(0, 0)) < 1e-5);
}

TEST_CASE("shipped fixture files match the factories") {
  CHECK(load(fixture("exsimple")) == fixtures::exsimple());
  CHECK(load(fixture("excausal")) == fixtures::excausal());
  CHECK(load(fixture("excausal_interior")) == fixtures::excausal_interior());
  CHECK(load(fixture("null_focal_3d")) == fixtures::null_focal_3d());
  for (double k : {0.5, 1.5, 2.0, 2.5}) CHECK(load(fixture(fixtures::harmonic_name(k))) == fixtures::harmonic(k));
  CHECK(fixtures::harmonic_name(2.5) == "harmonic_2p5");
}

TEST_CASE("random problem generators") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto r = random_riemannian_problem(s);
    CHECK(validate(r).empty());
    CHECK(r.g.positive_definite());
    const auto l = random_lorentzian_problem(s);
    CHECK(validate(l).empty());
    CHECK(l.g.inertia().n_minus == 1);
    CHECK(solve_witness(l).min_margin > 0);
  }
  CHECK(random_lorentzian_problem(3) == random_lorentzian_problem(3));
}
