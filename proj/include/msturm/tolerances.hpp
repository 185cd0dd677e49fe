#pragma once

#include <vector>

#include <nlohmann/json.hpp>

namespace msturm {

/// Every numerical threshold used by the pipeline, in one place so that
/// outputs can echo the exact set they were produced with.
struct Tolerances {
  double ode_tol = 1e-10;     ///< local error target of the Runge-Kutta substeps
  int grid_size = 2048;       ///< master grid steps of the fundamental solution
  double tol_rank = 1e-7;     ///< relative singular-value threshold
  double tol_eig = 1e-9;      ///< relative zero-eigenvalue threshold
  double refine_tol = 1e-10;  ///< root polishing width
  double t_guard = 1e-6;      ///< focal candidates below this instant are ignored
  int witness_samples = 512;  ///< margin grid of the timelike witness
  int mesh = 128;             ///< default Galerkin elements for single-mesh runs
  std::vector<int> mesh_schedule{32, 64, 128, 256, 512};

  void check() const;
};

nlohmann::json to_json(const Tolerances& tol);

}  // namespace msturm
