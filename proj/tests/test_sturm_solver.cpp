#include <doctest.h>

#include <cmath>
#include <sstream>

#include "msturm/errors.hpp"
#include "msturm/fixtures.hpp"
#include "msturm/problem.hpp"
#include "msturm/sturm_solver.hpp"

using namespace msturm;

namespace {

MorseSturmProblem free_particle() {
  return {MetricForm(Matrix::Identity(2, 2)), CoefficientPath::constant(Matrix::Zero(2, 2)),
          BoundaryData{Subspace::zero(2), Matrix(0, 0)}, std::nullopt, {}};
}

// Strongly t-dependent coefficient, g-symmetric for diag(1, -1).
MorseSturmProblem stiff_lorentzian() {
  Matrix r0(2, 2), r1(2, 2), r2(2, 2);
  r0 << 10, 20, -20, -10;
  r1 << -30, 10, -10, 60;
  r2 << 40, -25, 25, 5;
  return {MetricForm::diagonal({1, -1}), CoefficientPath::polynomial({r0, r1, r2}),
          BoundaryData{Subspace::zero(2), Matrix(0, 0)}, std::nullopt, {}};
}

}  // namespace

TEST_CASE("free particle: M = t Id, M' = Id") {
  const auto f = solve_fundamental(free_particle());
  for (double t : {0.0, 0.25, 0.613, 1.0}) {
    const auto [M, Mp] = f.evaluate(t);
    CHECK((M - t * Matrix::Identity(2, 2)).norm() < 1e-13);
    CHECK((Mp - Matrix::Identity(2, 2)).norm() < 1e-13);
  }
}

TEST_CASE("parabola germ: columns (1-t) e2 and t e1") {
  const auto p = fixtures::excausal();
  const auto f = solve_fundamental(p);
  CHECK(f.k == 1);
  for (double t : {0.0, 0.5, 0.9, 1.0}) {
    const auto [M, Mp] = f.evaluate(t);
    CHECK((M.col(0) - (1 - t) * Vector::Unit(2, 1)).norm() < 1e-13);
    // P-perp basis vector is unit length; its sign is not fixed.
    CHECK((M.col(1).cwiseAbs() - t * Vector::Unit(2, 0)).norm() < 1e-13);
  }
}

TEST_CASE("initial conditions are exact") {
  const auto p = fixtures::null_focal_3d(1.5);
  const auto [M0, Mp0] = initial_conditions(p);
  const auto f = solve_fundamental(p);
  CHECK(f.M.front() == M0);
  CHECK(f.Mp.front() == Mp0);
  const Matrix B = p.boundary.P.basis();
  CHECK((M0.leftCols(2) - B).norm() == 0.0);
  CHECK((Mp0.leftCols(2) + B * p.boundary.S).norm() < 1e-15);
  CHECK(M0.rightCols(1).norm() == 0.0);
  Matrix stacked(6, 3);
  stacked << M0, Mp0;
  CHECK(numerical_rank(stacked) == 3);
  // P-perp columns are g-orthogonal to P
  CHECK((B.transpose() * p.g.entries() * Mp0.rightCols(1)).norm() < 1e-14);
}

TEST_CASE("harmonic: M = sin(2 pi t) / (2 pi) Id") {
  const auto f = solve_fundamental(fixtures::harmonic(2.0));
  for (int i = 0; i <= 40; ++i) {
    const double t = i / 40.0 + (i < 40 ? 0.0031 : 0.0);
    const auto [M, Mp] = f.evaluate(t);
    CHECK((M - std::sin(2 * M_PI * t) / (2 * M_PI) * Matrix::Identity(2, 2)).norm() < 1e-8);
  }
}

TEST_CASE("constant witnesses of the flat examples") {
  for (const auto& p : {fixtures::exsimple(), fixtures::excausal()}) {
    const auto w = solve_witness(p);
    CHECK(w.min_margin == doctest::Approx(1.0));
    for (const auto& y : w.Y) CHECK((y - Vector::Unit(2, 1)).norm() < 1e-14);
  }
}

TEST_CASE("spacelike seed is rejected at t = 0") {
  auto p = fixtures::exsimple();
  p.y_seed = WitnessSeed{Vector::Unit(2, 0), Vector::Zero(2)};
  CHECK_THROWS_AS(solve_witness(p), NotTimelike);
}

TEST_CASE("seed that turns spacelike is rejected") {
  auto p = fixtures::exsimple();
  p.y_seed = WitnessSeed{Vector::Unit(2, 1), Eigen::Vector2d(2.0, 0.0)};  // Y = (2t, 1)
  CHECK_THROWS_AS(solve_witness(p), NotTimelike);
}

TEST_CASE("missing seed and Riemannian g") {
  CHECK_THROWS_AS(solve_witness(fixtures::harmonic(1.0)), Error);
  auto p = fixtures::exsimple();
  p.y_seed.reset();
  CHECK_THROWS_AS(solve_witness(p), MissingSeed);
}

TEST_CASE("witness margin is refined between grid points") {
  auto p = fixtures::exsimple();
  // Y = (a t, 1): -g(Y, Y) = 1 - a^2 t^2, minimum 1 - a^2 at t = 1.
  p.y_seed = WitnessSeed{Vector::Unit(2, 1), Eigen::Vector2d(0.6, 0.0)};
  const auto w = solve_witness(p);
  CHECK(w.min_margin == doctest::Approx(1 - 0.36).epsilon(1e-10));
  CHECK(w.argmin == doctest::Approx(1.0));
}

TEST_CASE("Wronskian drift") {
  const auto flat = fixtures::excausal();
  CHECK(wronskian_drift(solve_fundamental(flat), flat.g) < 1e-12);
  const auto h = fixtures::harmonic(2.5);
  CHECK(wronskian_drift(solve_fundamental(h), h.g) < 1e-8);

  MorseSturmProblem bad = fixtures::exsimple();
  Matrix r(2, 2);
  r << 0, 5, 5, 0;  // symmetric but not g-symmetric for diag(1, -1)
  bad.R = CoefficientPath::constant(r);
  bad.boundary = BoundaryData{Subspace::zero(2), Matrix(0, 0)};
  CHECK(wronskian_drift(solve_fundamental(bad), bad.g) > 0.1);
}

TEST_CASE("Wronskian drift scales linearly with ode_tol") {
  const auto p = stiff_lorentzian();
  std::vector<double> drift;
  for (double tol : {1e-6, 1e-7, 1e-8, 1e-9}) {
    drift.push_back(wronskian_drift(solve_fundamental(p, SolveOptions{tol, 2, true}), p.g));
    CHECK(drift.back() < 100 * tol);
    CHECK(drift.back() > 0.1 * tol);
  }
  for (std::size_t i = 1; i < drift.size(); ++i) {
    const double ratio = drift[i - 1] / drift[i];
    CHECK(ratio > 3);
    CHECK(ratio < 30);
  }
}

TEST_CASE("linearity in the initial matrices") {
  const auto p = random_lorentzian_problem(6);
  const auto [M0, Mp0] = initial_conditions(p);
  Matrix C(p.n(), p.n());
  C.setRandom();
  C += 3 * Matrix::Identity(p.n(), p.n());
  const auto a = solve_fundamental(p);
  const auto b = solve_fundamental(p, M0 * C, Mp0 * C);
  double scale = 1;
  for (const auto& m : a.M) scale = std::max(scale, (m * C).norm());
  for (std::size_t i = 0; i < a.grid.size(); i += 64) {
    CHECK((a.M[i] * C - b.M[i]).norm() < 1e-8 * scale);
    CHECK((a.Mp[i] * C - b.Mp[i]).norm() < 1e-8 * scale);
  }
}

TEST_CASE("convergence order at least 4 on the harmonic fixture") {
  const auto h = fixtures::harmonic(2.0);
  auto error = [&](int n) {
    const auto f = solve_fundamental(h, SolveOptions{1e-10, n, false});
    double e = 0;
    for (std::size_t i = 0; i < f.grid.size(); ++i)
      e = std::max(e, std::abs(f.M[i](0, 0) - std::sin(2 * M_PI * f.grid[i]) / (2 * M_PI)));
    return e;
  };
  double prev = error(16);
  for (int n : {32, 64, 128}) {
    const double e = error(n);
    CHECK(std::log2(prev / e) >= 4.0);
    prev = e;
  }
}

TEST_CASE("dense output is C1 across grid nodes") {
  const auto p = random_riemannian_problem(2);
  const auto f = solve_fundamental(p, SolveOptions{1e-10, 64, true});
  const double node = f.grid[17], h = 1e-9;
  const auto [Ml, Mpl] = f.evaluate(node - h);
  const auto [Mr, Mpr] = f.evaluate(node + h);
  CHECK((Ml - Mr).norm() < 1e-7);
  CHECK((Mpl - Mpr).norm() < 1e-6);
}

TEST_CASE("CSV dump header and rows") {
  const auto f = solve_fundamental(fixtures::excausal(), SolveOptions{1e-10, 4, true});
  std::ostringstream out;
  write_csv(out, f);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,M00,M01,M10,M11,Mp00,Mp01,Mp10,Mp11");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("bad options") {
  CHECK_THROWS_AS(solve_fundamental(fixtures::exsimple(), SolveOptions{-1, 16, true}), PreconditionError);
}
