#pragma once

// Pairing of a discrete constrained field with the interpolant of f * Y,
// used to watch the discrete orthogonality decay under mesh refinement.

#include <cmath>
#include <random>
#include <vector>

#include "msturm/indexform.hpp"

namespace msturm::testing {

struct RandomPair {
  Matrix u_coeffs;  // n x 3, U = (1 - u) B c + sum_j d_j sin(j pi u)
  Vector c;         // P coordinates of U(0)
  Vector f_coeffs;  // f = sum_j e_j sin(j pi u)
};

inline RandomPair random_pair(const MorseSturmProblem& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  RandomPair r;
  r.u_coeffs.resize(p.n(), 3);
  for (Eigen::Index i = 0; i < r.u_coeffs.size(); ++i) r.u_coeffs.data()[i] = u(rng);
  r.c.resize(p.boundary.P.dim());
  for (Eigen::Index i = 0; i < r.c.size(); ++i) r.c[i] = u(rng);
  r.f_coeffs.resize(3);
  for (Eigen::Index i = 0; i < 3; ++i) r.f_coeffs[i] = u(rng);
  return r;
}

/// I_1(V_h, W_h) where V = U + phi Y is the member of the constrained space
/// obtained from U, V_h is the projection of its interpolant onto span Z and
/// W_h is the interpolant of f Y.
inline double orthogonality_pairing(const MorseSturmProblem& p, const TimelikeWitness& w, const RandomPair& r,
                                    int m) {
  const int n = p.n();
  const Matrix B = p.boundary.P.basis();
  const Vector u0 = B.cols() > 0 ? Vector(B * r.c) : Vector::Zero(n);
  auto U = [&](double s) {
    Vector v = (1 - s) * u0;
    for (int j = 0; j < 3; ++j) v += std::sin((j + 1) * M_PI * s) * r.u_coeffs.col(j);
    return v;
  };
  auto Up = [&](double s) {
    Vector v = -u0;
    for (int j = 0; j < 3; ++j) v += (j + 1) * M_PI * std::cos((j + 1) * M_PI * s) * r.u_coeffs.col(j);
    return v;
  };
  auto f = [&](double s) {
    double v = 0;
    for (int j = 0; j < 3; ++j) v += r.f_coeffs[j] * std::sin((j + 1) * M_PI * s);
    return v;
  };
  auto cU = [&](double s) {
    const auto [y, yp] = w.evaluate(s);
    return p.g(Up(s), y) - p.g(U(s), yp);
  };
  auto q = [&](double s) {
    const auto y = w.evaluate(s).first;
    return p.g(y, y);
  };

  // phi' = (C - c_U) / q with phi(0) = phi(1) = 0, by composite Simpson on a
  // grid that contains every mesh node.
  const int fine = 64 * 512;
  const double h = 1.0 / fine;
  std::vector<double> a(fine + 1), b(fine + 1);  // running integrals of c_U/q and 1/q
  std::vector<double> ga(fine + 1), gb(fine + 1);
  for (int i = 0; i <= fine; ++i) {
    const double s = i * h;
    ga[i] = cU(s) / q(s);
    gb[i] = 1.0 / q(s);
  }
  a[0] = b[0] = 0;
  for (int i = 1; i <= fine; ++i) {
    // Simpson on [s_{i-1}, s_i] with the midpoint evaluated directly.
    const double s = (i - 0.5) * h;
    a[i] = a[i - 1] + h / 6 * (ga[i - 1] + 4 * cU(s) / q(s) + ga[i]);
    b[i] = b[i - 1] + h / 6 * (gb[i - 1] + 4 / q(s) + gb[i]);
  }
  const double C = a[fine] / b[fine];
  auto phi = [&](int i) { return C * b[i] - a[i]; };

  const Mesh mesh(m);
  const FieldSpace space(p, mesh);
  Matrix vn(n, m + 1), wn(n, m + 1);
  for (int j = 0; j <= m; ++j) {
    const int i = j * (fine / m);
    const double s = mesh.nodes[j];
    const Vector y = w.evaluate(s).first;
    vn.col(j) = U(s) + phi(i) * y;
    wn.col(j) = f(s) * y;
  }
  const Matrix Z = constraint_kernel(p, w, mesh, 1.0);
  const Vector v = Z * (Z.transpose() * space.coefficients(vn));
  const Vector wv = space.coefficients(wn);
  return v.dot(assemble_I1(p, mesh).A * wv);
}

}  // namespace msturm::testing
