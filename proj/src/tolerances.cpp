#include "msturm/tolerances.hpp"

#include "msturm/errors.hpp"

namespace msturm {

void Tolerances::check() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0)) throw PreconditionError(std::string(name) + " must be positive");
  };
  positive(ode_tol, "ode_tol");
  positive(tol_rank, "tol_rank");
  positive(tol_eig, "tol_eig");
  positive(refine_tol, "refine_tol");
  if (t_guard < 0) throw PreconditionError("t_guard must be nonnegative");
  if (grid_size < 8) throw PreconditionError("grid_size must be >= 8");
  if (witness_samples < 512) throw PreconditionError("witness_samples must be >= 512");
  if (mesh < 2) throw PreconditionError("mesh must be >= 2");
  for (int m : mesh_schedule)
    if (m < 2) throw PreconditionError("mesh schedule entries must be >= 2");
}

nlohmann::json to_json(const Tolerances& tol) {
  return {{"ode_tol", tol.ode_tol},       {"grid_size", tol.grid_size},
          {"tol_rank", tol.tol_rank},     {"tol_eig", tol.tol_eig},
          {"refine_tol", tol.refine_tol}, {"t_guard", tol.t_guard},
          {"witness_samples", tol.witness_samples}, {"mesh", tol.mesh},
          {"mesh_schedule", tol.mesh_schedule}};
}

}  // namespace msturm
