#pragma once

#include <string>
#include <vector>

#include "msturm/problem.hpp"

/// Reference problems with known focal structure.
namespace msturm::fixtures {

/// Flat Minkowski plane, spacelike geodesic, P = the timelike y-axis, S = 0.
/// No focal instants; the constrained index is 1.
MorseSturmProblem exsimple();

/// Same geodesic, P tangent to the parabola y^2 + 2x = 0 (S = [1]).
/// One negative focal instant at t = 1.
MorseSturmProblem excausal();

/// Curvature of the initial curve doubled (S = [2]): the negative focal
/// instant moves to t = 1/2.
MorseSturmProblem excausal_interior();

/// Flat R^3 with g = diag(1, 1, -1), P the yz-plane and S fixing the null
/// vector e2 + e3: a null (degenerate) focal instant at t = 1 / scale.
MorseSturmProblem null_focal_3d(double scale = 1.0);

/// g = Id_2, P = {0}, R = -(k pi)^2 Id: conjugate instants at multiples of 1/k.
MorseSturmProblem harmonic(double k);

/// File stem used for harmonic(k), e.g. harmonic_2p5.
std::string harmonic_name(double k);

/// The two matrix curves whose index jumps differ at a degenerate crossing.
Matrix crossing_curve_b1(double t);
Matrix crossing_curve_b2(double t);

}  // namespace msturm::fixtures
