#include <cmath>
#include <random>

#include "msturm/errors.hpp"
#include "msturm/problem.hpp"

namespace msturm {

namespace {

double lorentz_norm2(const Vector& y) { return y[0] * y[0] - y[1] * y[1]; }

Matrix random_symmetric(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = u(rng);
  return m;
}

/// Random P with a comfortably nondegenerate Gram matrix, and a g-symmetric S on it.
BoundaryData random_boundary(std::mt19937_64& rng, const MetricForm& g, double s_scale) {
  const int n = g.n();
  std::uniform_int_distribution<int> kdist(0, n);
  std::normal_distribution<double> normal;
  const int k = kdist(rng);
  if (k == 0) return {Subspace::zero(n), Matrix(0, 0)};
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Matrix basis(n, k);
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < n; ++i) basis(i, j) = normal(rng);
    for (int j = 0; j < k; ++j) basis.col(j).normalize();
    if (numerical_rank(basis, 1e-3) != k) continue;
    const Matrix gp = basis.transpose() * g.entries() * basis;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gp, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().cwiseAbs().minCoeff() < 0.2) continue;
    const Matrix S = gp.inverse() * random_symmetric(rng, k, s_scale);
    return {Subspace(n, basis), S};
  }
  throw PreconditionError("random_boundary: could not draw a nondegenerate subspace");
}

}  // namespace

MorseSturmProblem generate_timelike_2d(const TimelikePath& path, const std::function<double(double)>& lambda,
                                       int samples) {
  if (samples < 2) throw PreconditionError("generate_timelike_2d: need at least two samples");
  const MetricForm g = MetricForm::diagonal({1.0, -1.0});
  const Matrix G = g.entries();
  std::vector<double> times(static_cast<std::size_t>(samples));
  std::vector<Matrix> values;
  values.reserve(times.size());
  for (int i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) / (samples - 1);
    times[static_cast<std::size_t>(i)] = t;
    const Vector y = path.value(t);
    if (!(lorentz_norm2(y) < 0))
      throw NotTimelike("generate_timelike_2d: g(Y,Y) >= 0 at t=" + std::to_string(t));
    const Vector ypp = path.acceleration(t);
    // R = G^{-1} Sigma with Sigma symmetric; Sigma Y = G Y'' is two equations
    // in (s11, s12, s22). Weighted minimum norm realizes min ||R||_F.
    Eigen::Matrix<double, 2, 3> A;
    A << y[0], y[1], 0, 0, y[0], y[1];
    const Eigen::Vector3d winv(1.0, 0.5, 1.0);
    const Eigen::Vector2d rhs = G * ypp;
    const Eigen::Matrix2d normal = A * winv.asDiagonal() * A.transpose();
    const Eigen::Vector3d sigma = winv.asDiagonal() * A.transpose() * normal.ldlt().solve(rhs);
    Matrix Sigma(2, 2);
    Sigma << sigma[0], sigma[1], sigma[1], sigma[2];
    if (lambda) {
      Matrix kernel(2, 2);
      kernel << y[1] * y[1], -y[0] * y[1], -y[0] * y[1], y[0] * y[0];
      Sigma += lambda(t) * kernel / kernel.norm();
    }
    values.push_back(G.inverse() * Sigma);
  }
  MorseSturmProblem p{g, CoefficientPath::sampled(std::move(times), std::move(values)),
                      BoundaryData{Subspace::zero(2), Matrix(0, 0)},
                      WitnessSeed{path.value(0.0), path.velocity(0.0)},
                      nlohmann::json{{"generator", "timelike_2d"}}};
  return p;
}

TimelikePath random_timelike_path(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_real_distribution<double> freq(0.5, 4.0);
  std::uniform_real_distribution<double> phase(0, 2 * M_PI);
  const double a1 = u(rng), w1 = freq(rng), p1 = phase(rng), b1 = 0.5 * u(rng);
  const double a2 = 0.5 * u(rng), w2 = freq(rng), p2 = phase(rng), b2 = 0.5 * u(rng);
  // y2 dominates |y1| on [0, 1] with margin >= 0.3.
  const double c = std::abs(a1) + std::abs(b1) + std::abs(a2) + std::abs(b2) + 0.3 + 0.5 * (u(rng) + 1);
  TimelikePath path;
  path.value = [=](double t) {
    Vector y(2);
    y << a1 * std::sin(w1 * t + p1) + b1 * t, c + a2 * std::cos(w2 * t + p2) + b2 * t * t;
    return y;
  };
  path.velocity = [=](double t) {
    Vector y(2);
    y << a1 * w1 * std::cos(w1 * t + p1) + b1, -a2 * w2 * std::sin(w2 * t + p2) + 2 * b2 * t;
    return y;
  };
  path.acceleration = [=](double t) {
    Vector y(2);
    y << -a1 * w1 * w1 * std::sin(w1 * t + p1), -a2 * w2 * w2 * std::cos(w2 * t + p2) + 2 * b2;
    return y;
  };
  return path;
}

MorseSturmProblem random_riemannian_problem(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  std::uniform_int_distribution<int> ndist(1, 3);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_real_distribution<double> omega(M_PI, 3 * M_PI);
  const int n = ndist(rng);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = u(rng);
  const MetricForm g(a * a.transpose() + 0.5 * Matrix::Identity(n, n));
  const Matrix G = g.entries();
  // Sigma0 = -G^{1/2} diag(w_i^2) G^{1/2}: R0 has eigenvalues -w_i^2.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(G);
  const Matrix root = eig.operatorSqrt();
  Vector w2(n);
  for (int i = 0; i < n; ++i) w2[i] = std::pow(omega(rng), 2);
  const Matrix sigma0 = -root * w2.asDiagonal() * root;
  const Matrix sigma1 = random_symmetric(rng, n, 3.0);
  const Matrix Ginv = G.inverse();
  auto R = CoefficientPath::polynomial({Ginv * sigma0, Ginv * sigma1});
  BoundaryData boundary = random_boundary(rng, g, 1.0);
  return {g, R, boundary, std::nullopt, nlohmann::json{{"generator", "random_riemannian"}, {"seed", seed}}};
}

MorseSturmProblem random_lorentzian_problem(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x10e47ULL);
  std::uniform_real_distribution<double> u(-1, 1);
  if (seed % 2 == 0) {
    // 2D with a curved timelike witness.
    MorseSturmProblem p = generate_timelike_2d(random_timelike_path(seed), {}, 257);
    p.boundary = random_boundary(rng, p.g, 0.8);
    p.meta = {{"generator", "random_lorentzian/timelike_2d"}, {"seed", seed}};
    return p;
  }
  // n in {2, 3}, constant timelike witness Y0 with R(t) Y0 = 0.
  const int n = 2 + static_cast<int>((seed / 2) % 2);
  const MetricForm g = MetricForm::minkowski(n);
  const Matrix G = g.entries();
  Vector y0(n);
  for (int i = 0; i + 1 < n; ++i) y0[i] = 0.6 * u(rng) / std::sqrt(static_cast<double>(n));
  y0[n - 1] = 1.0;
  // Columns of Q span the Euclidean complement of y0, so Sigma y0 = 0.
  Eigen::JacobiSVD<Matrix> svd(Matrix(y0.transpose()), Eigen::ComputeFullV);
  const Matrix Q = svd.matrixV().rightCols(n - 1);
  const Matrix b0 = random_symmetric(rng, n - 1, 8.0);
  const Matrix b1 = random_symmetric(rng, n - 1, 4.0);
  const Matrix Ginv = G.inverse();
  auto R = CoefficientPath::polynomial({Ginv * Q * b0 * Q.transpose(), Ginv * Q * b1 * Q.transpose()});
  BoundaryData boundary = random_boundary(rng, g, 0.8);
  return {g, R, boundary, WitnessSeed{y0, Vector::Zero(n)},
          nlohmann::json{{"generator", "random_lorentzian/constant_witness"}, {"seed", seed}}};
}

}  // namespace msturm
