#include <doctest.h>

#include <cmath>
#include <sstream>

#include "msturm/errors.hpp"
#include "msturm/fixtures.hpp"
#include "msturm/focal.hpp"
#include "msturm/problem.hpp"
#include "msturm/sturm_solver.hpp"

using namespace msturm;

namespace {

FocalScan scan(const MorseSturmProblem& p) { return scan_focal(solve_fundamental(p), p.g); }

MorseSturmProblem scaled_metric(MorseSturmProblem p, double c) {
  p.g = p.g.scaled(c);
  return p;
}

}  // namespace

TEST_CASE("parabola germ: single negative instant at the endpoint") {
  const auto s = scan(fixtures::excausal());
  REQUIRE(s.instants.size() == 1);
  const auto& f = s.instants[0];
  CHECK(f.t == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.multiplicity == 1);
  CHECK(f.signature == -1);
  CHECK_FALSE(f.degenerate);
  CHECK(s.endpoint_focal);
  REQUIRE(f.jperp_basis.cols() == 1);
  CHECK(std::abs(std::abs(f.jperp_basis(1, 0)) - 1.0) < 1e-9);
  CHECK(std::abs(f.jperp_basis(0, 0)) < 1e-9);
  CHECK(s.endpoint() == &s.instants[0]);
}

TEST_CASE("flat Minkowski with S = 0 has no focal instants") {
  const auto s = scan(fixtures::exsimple());
  CHECK(s.instants.empty());
  CHECK_FALSE(s.endpoint_focal);
  CHECK(maslov_index(s) == 0);
}

TEST_CASE("harmonic 2: instants at 1/2 and 1 with multiplicity 2") {
  const auto s = scan(fixtures::harmonic(2.0));
  REQUIRE(s.instants.size() == 2);
  CHECK(s.instants[0].t == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(s.instants[1].t == doctest::Approx(1.0).epsilon(1e-9));
  for (const auto& f : s.instants) {
    CHECK(f.multiplicity == 2);
    CHECK(f.signature == 2);
  }
  CHECK(s.endpoint_focal);
  CHECK_THROWS_AS(maslov_index(s), EndpointFocal);
}

TEST_CASE("harmonic 2.5: Maslov index 4") {
  const auto s = scan(fixtures::harmonic(2.5));
  REQUIRE(s.instants.size() == 2);
  CHECK(std::abs(s.instants[0].t - 0.4) < 1e-9);
  CHECK(std::abs(s.instants[1].t - 0.8) < 1e-9);
  CHECK(maslov_index(s) == 4);
}

TEST_CASE("harmonic 1.5: instant at 2/3") {
  const auto s = scan(fixtures::harmonic(1.5));
  REQUIRE(s.instants.size() == 1);
  CHECK(std::abs(s.instants[0].t - 2.0 / 3.0) < 1e-9);
}

TEST_CASE("interior negative instant") {
  const auto s = scan(fixtures::excausal_interior());
  REQUIRE(s.instants.size() == 1);
  CHECK(std::abs(s.instants[0].t - 0.5) < 1e-9);
  CHECK(s.instants[0].signature == -1);
  CHECK(maslov_index(s) == -1);
}

TEST_CASE("null focal instant is flagged degenerate") {
  const auto s = scan(fixtures::null_focal_3d(2.0));
  REQUIRE(s.instants.size() == 1);
  CHECK(std::abs(s.instants[0].t - 0.5) < 1e-6);
  CHECK(s.instants[0].degenerate);
  CHECK(s.instants[0].jperp_inertia.n_zero == 1);
  CHECK(s.interior_degenerate());
  CHECK_FALSE(s.warnings.empty());
  CHECK_THROWS_AS(maslov_index(s), DegenerateFocalInstant);
}

TEST_CASE("positive definite g: signature equals multiplicity") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = random_riemannian_problem(seed);
    const auto s = scan(p);
    int total = 0;
    for (const auto& f : s.instants) {
      CHECK(f.signature == f.multiplicity);
      if (f.t < 1) total += f.multiplicity;
    }
    if (!s.endpoint_focal) CHECK(maslov_index(s) == total);
  }
}

TEST_CASE("instant invariants: ordering, guard, |sgn| <= mu") {
  std::vector<MorseSturmProblem> ps{fixtures::excausal(), fixtures::harmonic(2.5), fixtures::null_focal_3d(3.0)};
  for (std::uint64_t s = 0; s < 10; ++s) ps.push_back(random_lorentzian_problem(s));
  for (std::uint64_t s = 0; s < 10; ++s) ps.push_back(random_riemannian_problem(s));
  for (const auto& p : ps) {
    const auto s = scan(p);
    double prev = 1e-6;
    for (const auto& f : s.instants) {
      CHECK(f.t > prev);
      prev = f.t;
      CHECK(std::abs(f.signature) <= f.multiplicity);
      CHECK(f.multiplicity == f.jperp_basis.cols());
      CHECK(f.multiplicity == f.kernel_basis.cols());
    }
  }
}

TEST_CASE("scaling g leaves multiplicities, signatures and Maslov unchanged") {
  for (const auto& p : {fixtures::excausal_interior(), fixtures::harmonic(2.5), random_lorentzian_problem(3),
                        random_riemannian_problem(5)}) {
    const auto a = scan(p);
    for (double c : {0.01, 3.0, 250.0}) {
      const auto b = scan(scaled_metric(p, c));
      REQUIRE(a.instants.size() == b.instants.size());
      for (std::size_t i = 0; i < a.instants.size(); ++i) {
        CHECK(std::abs(a.instants[i].t - b.instants[i].t) < 1e-8);
        CHECK(a.instants[i].multiplicity == b.instants[i].multiplicity);
        CHECK(a.instants[i].signature == b.instants[i].signature);
      }
    }
  }
}

TEST_CASE("timelike witness in 2D with P = {0}: no conjugate instants") {
  for (std::uint64_t s = 0; s < 15; ++s) {
    const auto p = generate_timelike_2d(random_timelike_path(s));
    CHECK(scan(p).instants.empty());
  }
}

TEST_CASE("running signature sums are nonnegative when a witness exists") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto p = random_lorentzian_problem(s);
    const auto sc = scan(p);
    if (sc.interior_degenerate()) continue;
    int partial = 0;
    for (const auto& f : sc.instants) {
      partial += f.signature;
      CHECK(partial >= 0);
    }
  }
}

TEST_CASE("robust Maslov: flat example is stable") {
  const auto r = maslov_robust(fixtures::exsimple(), 1e-4, 8, 0);
  CHECK(r.value == 0);
  CHECK(r.trials.size() == 8);
  for (const auto& t : r.trials) CHECK(t.usable());
}

TEST_CASE("robust Maslov: harmonic 2.5 is stable") {
  const auto r = maslov_robust(fixtures::harmonic(2.5), 1e-5, 8, 0);
  CHECK(r.value == 4);
  for (const auto& t : r.trials) CHECK(*t.interior_sum == 4);
}

TEST_CASE("robust Maslov with eps = 0 is the plain signature sum") {
  for (const auto& p : {fixtures::exsimple(), fixtures::excausal_interior(), fixtures::harmonic(2.5)})
    CHECK(maslov_robust(p, 0.0, 4, 0).value == maslov_index(scan(p)));
}

TEST_CASE("robust Maslov refuses a focal endpoint") {
  CHECK_THROWS_AS(maslov_robust(fixtures::excausal(), 1e-4, 8, 0), EndpointFocal);
}

TEST_CASE("robust Maslov resolves an interior null crossing") {
  const auto p = fixtures::null_focal_3d(2.0);
  const auto r = maslov_robust(p, 1e-4, 8, 0);
  CHECK(r.value == 0);
}

TEST_CASE("robust Maslov with a huge eps disagrees") {
  CHECK_THROWS_AS(maslov_robust(fixtures::harmonic(2.5), 40.0, 8, 1), NoAgreement);
}

TEST_CASE("perturbation trials are reproducible") {
  const auto a = perturbation_trials(fixtures::harmonic(2.5), 1e-3, 4, 7);
  const auto b = perturbation_trials(fixtures::harmonic(2.5), 1e-3, 4, 7);
  REQUIRE(a.size() == 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].seed == 7 + i);
    CHECK(a[i].interior_sum == b[i].interior_sum);
  }
}

TEST_CASE("detector is invariant under column scaling") {
  const auto p = fixtures::harmonic(1.5);
  const auto [M0, Mp0] = initial_conditions(p);
  Matrix C(2, 2);
  C << 1e3, 1, 0, 1e-3;
  const auto a = solve_fundamental(p);
  const auto b = solve_fundamental(p, M0 * C, Mp0 * C);
  for (double t : {0.2, 0.5, 0.9}) CHECK(focal_detector(a, t) == doctest::Approx(focal_detector(b, t)).epsilon(1e-8));
  CHECK(focal_detector(a, 2.0 / 3.0) < 1e-9);
}

TEST_CASE("table and trace formats") {
  const auto s = scan(fixtures::excausal());
  std::ostringstream table;
  write_focal_table(table, s);
  CHECK(table.str() == "1.000000, 1, -1, false\n");
  std::ostringstream trace;
  write_trace_csv(trace, s);
  CHECK(trace.str().rfind("t,det,sigma_min\n", 0) == 0);
  CHECK(s.det_trace.size() == s.sigma_min_trace.size());
}
