// msturm: command-line front end for focal scans, index verification and
// parallel trivialization of geodesic problems.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "msturm/errors.hpp"
#include "msturm/fixtures.hpp"
#include "msturm/focal.hpp"
#include "msturm/geometry.hpp"
#include "msturm/indexform.hpp"
#include "msturm/problem.hpp"
#include "msturm/sturm_solver.hpp"
#include "msturm/tolerances.hpp"

using namespace msturm;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kScan = 2, kWitness = 3, kNotStable = 4, kResidual = 5 };

struct Config {
  std::string input;
  std::string output;
  Tolerances tol;
  int mesh = 0;  // 0: keep defaults
  std::string t_grid = "0.05:1:0.05";
  std::uint64_t seed = 0;
  double eps = 1e-4;
  int trials = 8;
  std::string trace;
  std::string jumps;

  std::string chart = "minkowski2";
  double T = 1.0;
  std::vector<double> x0, v0, tangent, sff, witness_value, witness_velocity;
  std::string curve = "b1";
};

SolveOptions solve_opts(const Tolerances& t) { return {t.ode_tol, t.grid_size, true}; }
ScanOptions scan_opts(const Tolerances& t) { return {t.tol_rank, t.tol_eig, t.refine_tol, 1e-6, t.t_guard}; }

// All output goes through one buffer and is written once at the end.
class Sink {
 public:
  explicit Sink(const std::string& path) : path_(path) {}
  std::ostream& out() { return buf_; }
  void flush() {
    if (path_.empty()) {
      std::cout << buf_.str();
      return;
    }
    std::ofstream f(path_);
    if (!f) throw PreconditionError("cannot write " + path_);
    f << buf_.str();
  }

 private:
  std::string path_;
  std::ostringstream buf_;
};

void header(std::ostream& out, const std::string& cmd, const Config& cfg) {
  out << "# msturm " << cmd;
  if (!cfg.input.empty()) out << " " << cfg.input;
  out << "\n# tolerances " << to_json(cfg.tol).dump() << "\n";
}

std::vector<double> parse_t_grid(const std::string& text) {
  double a, b, step;
  char c1, c2;
  std::istringstream in(text);
  if (!(in >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0) || !(b >= a))
    throw PreconditionError("--t-grid expects a:b:step with a <= b and step > 0, got '" + text + "'");
  std::vector<double> ts;
  const long count = std::lround(std::floor((b - a) / step + 1e-9));
  for (long i = 0; i <= count; ++i) ts.push_back(a + i * step);
  if (b - ts.back() > 1e-9 * step) ts.push_back(b);
  return ts;
}

void apply_mesh(Config& cfg) {
  if (cfg.mesh == 0) return;
  cfg.tol.mesh = cfg.mesh;
  cfg.tol.mesh_schedule.clear();
  for (int m = cfg.mesh, i = 0; i < 5; ++i, m *= 2) cfg.tol.mesh_schedule.push_back(m);
}

MorseSturmProblem load_valid(const Config& cfg) {
  MorseSturmProblem p = load(cfg.input);
  require_valid(p);
  return p;
}

int cmd_validate(const Config& cfg) {
  const MorseSturmProblem p = load(cfg.input);
  const auto violations = validate(p, 1e-9, cfg.tol.tol_eig);
  Sink sink(cfg.output);
  if (violations.empty()) {
    sink.out() << "valid: n=" << p.n() << " k=" << p.boundary.P.dim() << " R=" << to_string(p.R.kind()) << "\n";
    sink.flush();
    return kOk;
  }
  for (const auto& v : violations)
    sink.out() << "violation: " << v.invariant << " (margin " << v.margin << ") " << v.detail << "\n";
  sink.flush();
  return kInvalid;
}

int cmd_focal(const Config& cfg) {
  const MorseSturmProblem p = load_valid(cfg);
  const FundamentalSolution fund = solve_fundamental(p, solve_opts(cfg.tol));
  const FocalScan scan = scan_focal(fund, p.g, scan_opts(cfg.tol));
  Sink sink(cfg.output);
  header(sink.out(), "focal", cfg);
  sink.out() << "# wronskian_drift " << wronskian_drift(fund, p.g) << "\n";
  for (const auto& w : scan.warnings) sink.out() << "# warning: " << w << "\n";
  sink.out() << "# t, multiplicity, signature, degenerate\n";
  write_focal_table(sink.out(), scan);
  sink.flush();
  if (!cfg.trace.empty()) {
    Sink trace(cfg.trace);
    header(trace.out(), "focal", cfg);
    write_trace_csv(trace.out(), scan);
    trace.flush();
  }
  return kOk;
}

int cmd_verify(const Config& cfg) {
  const MorseSturmProblem p = load(cfg.input);
  VerifyOptions opts;
  opts.tol = cfg.tol;
  opts.robust_eps = cfg.eps;
  opts.robust_trials = cfg.trials;
  opts.seed = cfg.seed;
  Sink sink(cfg.output);
  try {
    const IndexReport rep = verify(p, opts);
    sink.out() << to_json(rep).dump(2) << "\n";
    sink.flush();
    return rep.ok() ? kOk : kResidual;
  } catch (const NotStabilized& e) {
    sink.out() << to_json(e.report()).dump(2) << "\n";
    sink.flush();
    throw;
  }
}

int cmd_evolve(const Config& cfg) {
  const MorseSturmProblem p = load_valid(cfg);
  const std::vector<double> ts = parse_t_grid(cfg.t_grid);
  const SolveOptions solve = solve_opts(cfg.tol);
  std::optional<TimelikeWitness> witness;
  if (!p.g.positive_definite()) witness = solve_witness(p, solve, cfg.tol.witness_samples);
  const FocalScan scan = scan_focal(solve_fundamental(p, solve), p.g, scan_opts(cfg.tol));
  const EvolutionTrace tr = evolution_trace(p, witness ? &*witness : nullptr, Mesh(cfg.tol.mesh), ts, &scan,
                                            cfg.tol.tol_eig, cfg.tol.tol_rank);
  Sink sink(cfg.output);
  header(sink.out(), "evolve", cfg);
  sink.out() << "# space " << (tr.constrained ? "K-constrained" : "H1_P-full") << ", mesh " << cfg.tol.mesh << "\n";
  for (const auto& j : tr.jumps) {
    char line[160];
    std::snprintf(line, sizeof line, "# jump (%.6f, %.6f] delta %+d", j.t_lo, j.t_hi, j.delta);
    sink.out() << line;
    if (j.matched_focal_t) {
      std::snprintf(line, sizeof line, " focal %.6f sgn %+d", *j.matched_focal_t, *j.matched_signature);
      sink.out() << line;
    } else {
      sink.out() << " unmatched";
    }
    sink.out() << "\n";
  }
  sink.out() << "t,i_t\n";
  for (std::size_t i = 0; i < tr.ts.size(); ++i) {
    char line[64];
    std::snprintf(line, sizeof line, "%.6f,%d\n", tr.ts[i], tr.i_of_t[i]);
    sink.out() << line;
  }
  sink.flush();
  if (!cfg.jumps.empty()) {
    Sink jumps(cfg.jumps);
    header(jumps.out(), "evolve", cfg);
    jumps.out() << "t_jump,delta_i,matched_focal_t,matched_signature\n";
    for (const auto& j : tr.jumps) {
      char line[128];
      if (j.matched_focal_t)
        std::snprintf(line, sizeof line, "%.6f,%d,%.6f,%d\n", j.t_hi, j.delta, *j.matched_focal_t, *j.matched_signature);
      else
        std::snprintf(line, sizeof line, "%.6f,%d,,\n", j.t_hi, j.delta);
      jumps.out() << line;
    }
    jumps.flush();
  }
  return kOk;
}

int cmd_maslov(const Config& cfg) {
  const MorseSturmProblem p = load_valid(cfg);
  const FocalScan scan = scan_focal(solve_fundamental(p, solve_opts(cfg.tol)), p.g, scan_opts(cfg.tol));
  Sink sink(cfg.output);
  header(sink.out(), "maslov", cfg);
  if (!scan.interior_degenerate()) {
    const int value = maslov_index(scan);
    sink.out() << "maslov " << value << " (signature-sum)\n";
  } else {
    const RobustMaslov r = maslov_robust(p, cfg.eps, cfg.trials, cfg.seed, solve_opts(cfg.tol), scan_opts(cfg.tol));
    sink.out() << "maslov " << r.value << " (perturbation, eps " << cfg.eps << ", " << r.trials.size()
               << " trials)\n";
  }
  sink.flush();
  return kOk;
}

int cmd_perturb(const Config& cfg) {
  const MorseSturmProblem p = load_valid(cfg);
  const SolveOptions solve = solve_opts(cfg.tol);
  const FocalScan base = scan_focal(solve_fundamental(p, solve), p.g, scan_opts(cfg.tol));
  const auto trials = perturbation_trials(p, cfg.eps, cfg.trials, cfg.seed, solve, scan_opts(cfg.tol));
  Sink sink(cfg.output);
  header(sink.out(), "perturb", cfg);
  sink.out() << "# eps " << cfg.eps << ", trials " << cfg.trials << ", seed " << cfg.seed << "\n";
  sink.out() << "trial, seed, maslov, endpoint_focal, degenerate, note\n";
  std::optional<int> agreed;
  bool unanimous = true;
  int usable = 0;
  for (const auto& t : trials) {
    sink.out() << t.trial << ", " << t.seed << ", " << (t.interior_sum ? std::to_string(*t.interior_sum) : "-") << ", "
               << (t.endpoint_focal ? "true" : "false") << ", " << (t.degenerate ? "true" : "false") << ", "
               << (t.note.empty() ? "-" : t.note) << "\n";
    if (!t.usable()) continue;
    ++usable;
    if (agreed && *agreed != *t.interior_sum) unanimous = false;
    if (!agreed) agreed = t.interior_sum;
  }
  int code = kOk;
  if (base.endpoint_focal) {
    sink.out() << "agreement: n.a. (t = 1 is focal for the unperturbed problem)\n";
  } else if (usable == 0) {
    sink.out() << "agreement: none (no usable trial)\n";
    code = kScan;
  } else if (!unanimous) {
    sink.out() << "agreement: no (" << usable << " usable trials disagree)\n";
    code = kScan;
  } else {
    const bool matches = !base.interior_degenerate() && base.interior_signature_sum() == *agreed;
    sink.out() << "agreement: yes, maslov " << *agreed << " on " << usable << "/" << trials.size() << " trials";
    if (!base.interior_degenerate())
      sink.out() << (matches ? ", equal to the unperturbed value" : ", DIFFERS from the unperturbed value");
    sink.out() << "\n";
    if (!base.interior_degenerate() && !matches) code = kScan;
  }
  sink.flush();
  return code;
}

Vector as_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

int cmd_trivialize(const Config& cfg) {
  const MetricChart chart = builtin_chart(cfg.chart);
  const int n = chart.dim;
  Vector x0 = cfg.x0.empty() ? Vector::Zero(n) : as_vector(cfg.x0);
  Vector v0 = cfg.v0.empty() ? Vector::Unit(n, 0) : as_vector(cfg.v0);
  if (x0.size() != n || v0.size() != n)
    throw PreconditionError("--x0/--v0 need " + std::to_string(n) + " components for chart " + cfg.chart);
  if (cfg.tangent.size() % n != 0) throw PreconditionError("--tangent takes whole vectors of length " + std::to_string(n));
  const int k = static_cast<int>(cfg.tangent.size()) / n;
  Matrix tb(n, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) tb(i, j) = cfg.tangent[j * n + i];
  Matrix sff = Matrix::Zero(k, k);
  if (!cfg.sff.empty()) {
    if (static_cast<int>(cfg.sff.size()) != k * k) throw PreconditionError("--sff takes k*k entries (row-major)");
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) sff(i, j) = cfg.sff[i * k + j];
  }
  TrivializeOptions opts;
  if (!cfg.witness_value.empty()) {
    Vector vel = cfg.witness_velocity.empty() ? Vector::Zero(n) : as_vector(cfg.witness_velocity);
    opts.witness = WitnessSeed{as_vector(cfg.witness_value), vel};
    if (opts.witness->value.size() != n || vel.size() != n) throw PreconditionError("witness vectors need length n");
  }
  const SolveOptions solve = solve_opts(cfg.tol);
  const GeodesicPath path = integrate_geodesic(chart, GeodesicSeed{x0, v0, cfg.T}, solve);
  const ParallelFrame frame = parallel_frame(chart, path, solve);
  MorseSturmProblem p = trivialize(chart, path, frame, SubmanifoldGerm{tb, sff}, opts);
  p.meta["energy_drift"] = path.energy_drift;
  p.meta["gram_drift"] = frame.gram_drift;
  p.meta["tolerances"] = to_json(cfg.tol);
  Sink sink(cfg.output);
  sink.out() << problem_to_json(p).dump(2) << "\n";
  sink.flush();
  return kOk;
}

int cmd_curve(const Config& cfg) {
  Matrix (*curve)(double) = nullptr;
  if (cfg.curve == "b1") curve = fixtures::crossing_curve_b1;
  else if (cfg.curve == "b2") curve = fixtures::crossing_curve_b2;
  else throw PreconditionError("unknown curve '" + cfg.curve + "' (expected b1 or b2)");
  std::vector<std::pair<double, Matrix>> samples;
  for (double t : parse_t_grid(cfg.t_grid)) samples.emplace_back(t, curve(t));
  const auto rows = matrix_curve_inertia(samples, cfg.tol.tol_eig);
  Sink sink(cfg.output);
  header(sink.out(), "curve " + cfg.curve, cfg);
  sink.out() << "t,n_plus,n_minus,n_zero\n";
  for (const auto& [t, in] : rows) {
    char line[96];
    std::snprintf(line, sizeof line, "%.6f,%d,%d,%d\n", t, in.n_plus, in.n_minus, in.n_zero);
    sink.out() << line;
  }
  sink.flush();
  return kOk;
}

void add_tolerance_flags(CLI::App* sub, Config& cfg) {
  sub->add_option("--ode-tol", cfg.tol.ode_tol, "local error target of the integrator")->capture_default_str();
  sub->add_option("--grid-size", cfg.tol.grid_size, "master grid steps on [0,1]")->capture_default_str();
  sub->add_option("--tol-rank", cfg.tol.tol_rank, "singular value threshold")->capture_default_str();
  sub->add_option("--tol-eig", cfg.tol.tol_eig, "zero eigenvalue threshold")->capture_default_str();
  sub->add_option("--refine-tol", cfg.tol.refine_tol, "root polishing width")->capture_default_str();
  sub->add_option("--mesh", cfg.mesh, "elements (verify: first mesh of a doubling schedule)");
  sub->add_option("-o,--output", cfg.output, "write to this file instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Focal instants, index forms and Maslov index of Morse-Sturm systems"};
  app.require_subcommand(0, 1);
  Config cfg;
  bool show_config = false;
  app.add_flag("--show-config", show_config, "print the default tolerance set and exit");

  auto with_input = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("input", cfg.input, "problem file (.msp.json)")->required()->check(CLI::ExistingFile);
    add_tolerance_flags(sub, cfg);
    return sub;
  };
  CLI::App* validate_cmd = with_input("validate", "check the invariants of a problem file");
  CLI::App* focal_cmd = with_input("focal", "table of focal instants");
  focal_cmd->add_option("--trace", cfg.trace, "also write the det / detector trace as CSV");
  CLI::App* verify_cmd = with_input("verify", "check the index formula along the mesh schedule");
  verify_cmd->add_option("--seed", cfg.seed, "seed of the fallback perturbation trials");
  verify_cmd->add_option("--eps", cfg.eps, "fallback perturbation size")->capture_default_str();
  verify_cmd->add_option("--trials", cfg.trials, "fallback perturbation trials")->capture_default_str();
  CLI::App* evolve_cmd = with_input("evolve", "index of the restricted form as a function of t");
  evolve_cmd->add_option("--t-grid", cfg.t_grid, "a:b:step")->capture_default_str();
  evolve_cmd->add_option("--jumps", cfg.jumps, "also write the jump table as CSV");
  CLI::App* maslov_cmd = with_input("maslov", "Maslov index as a signature sum");
  maslov_cmd->add_option("--eps", cfg.eps, "perturbation size for degenerate crossings")->capture_default_str();
  maslov_cmd->add_option("--trials", cfg.trials)->capture_default_str();
  maslov_cmd->add_option("--seed", cfg.seed);
  CLI::App* perturb_cmd = with_input("perturb", "Maslov index of randomly perturbed copies");
  perturb_cmd->add_option("--eps", cfg.eps)->capture_default_str();
  perturb_cmd->add_option("--trials", cfg.trials)->capture_default_str();
  perturb_cmd->add_option("--seed", cfg.seed);

  CLI::App* triv_cmd = app.add_subcommand("trivialize", "problem file from a geodesic in a built-in chart");
  add_tolerance_flags(triv_cmd, cfg);
  triv_cmd->add_option("--chart", cfg.chart)->capture_default_str()->check(CLI::IsMember(builtin_chart_names()));
  triv_cmd->add_option("--T", cfg.T, "parameter length of the geodesic")->capture_default_str();
  triv_cmd->add_option("--x0", cfg.x0, "initial point (default origin)")->delimiter(',');
  triv_cmd->add_option("--v0", cfg.v0, "initial velocity (default e1)")->delimiter(',');
  triv_cmd->add_option("--tangent", cfg.tangent, "tangent vectors of the germ, concatenated")->delimiter(',');
  triv_cmd->add_option("--sff", cfg.sff, "second fundamental form, k*k row-major")->delimiter(',');
  triv_cmd->add_option("--witness-value", cfg.witness_value)->delimiter(',');
  triv_cmd->add_option("--witness-velocity", cfg.witness_velocity)->delimiter(',');

  CLI::App* curve_cmd = app.add_subcommand("curve", "inertia along the 2x2 test curves b1 / b2");
  add_tolerance_flags(curve_cmd, cfg);
  curve_cmd->add_option("name", cfg.curve, "b1 or b2")->required();
  curve_cmd->add_option("--t-grid", cfg.t_grid)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalid;
  }
  if (show_config) {
    std::cout << to_json(Tolerances{}).dump(2) << "\n";
    return kOk;
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return kInvalid;
  }
  if (app.got_subcommand(curve_cmd) && cfg.t_grid == "0.05:1:0.05") cfg.t_grid = "-0.5:0.5:0.25";

  try {
    apply_mesh(cfg);
    cfg.tol.check();
    if (app.got_subcommand(validate_cmd)) return cmd_validate(cfg);
    if (app.got_subcommand(focal_cmd)) return cmd_focal(cfg);
    if (app.got_subcommand(verify_cmd)) return cmd_verify(cfg);
    if (app.got_subcommand(evolve_cmd)) return cmd_evolve(cfg);
    if (app.got_subcommand(maslov_cmd)) return cmd_maslov(cfg);
    if (app.got_subcommand(perturb_cmd)) return cmd_perturb(cfg);
    if (app.got_subcommand(triv_cmd)) return cmd_trivialize(cfg);
    if (app.got_subcommand(curve_cmd)) return cmd_curve(cfg);
  } catch (const ValidationFailed& e) {
    std::cerr << "invalid problem: " << e.what() << "\n";
    return kInvalid;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kInvalid;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kInvalid;
  } catch (const UnresolvedRoot& e) {
    char br[96];
    std::snprintf(br, sizeof br, "[%.9f, %.9f]", e.lo(), e.hi());
    std::cerr << "unresolved root in " << br << ": " << e.what() << "\n";
    return kScan;
  } catch (const NotTimelike& e) {
    std::cerr << "witness: " << e.what() << "\n";
    return kWitness;
  } catch (const MissingSeed& e) {
    std::cerr << "witness: " << e.what() << "\n";
    return kWitness;
  } catch (const NotStabilized& e) {
    std::cerr << "not stabilized: " << e.what() << "\n";
    return kNotStable;
  } catch (const DegenerateFocalInstant& e) {
    std::cerr << "degenerate focal instant: " << e.what() << "\n";
    return kScan;
  } catch (const EndpointFocal& e) {
    std::cerr << "endpoint focal: " << e.what() << "\n";
    return kScan;
  } catch (const NoAgreement& e) {
    std::cerr << "no agreement: " << e.what() << "\n";
    return kScan;
  } catch (const AllTrialsDegenerate& e) {
    std::cerr << "perturbation: " << e.what() << "\n";
    return kScan;
  } catch (const IntegrationFailure& e) {
    std::cerr << "integration failed: " << e.what() << "\n";
    return kScan;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}
