#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "ocpcert/io.hpp"
#include "ocpcert/registry.hpp"
#include "ocpcert/report.hpp"
#include "ocpcert/selftest.hpp"

using namespace ocpcert;

namespace {

int certify(const CertifyOptions& opts, const std::string& report_path, bool quiet) {
  const CertifyResult res = run_certify(opts);
  const std::string text = serialize_report(res.report);
  if (report_path.empty() || report_path == "-") {
    std::cout << text;
  } else {
    write_text_file(report_path, text);
  }
  if (!quiet) {
    for (const auto& [name, v] : res.verdicts) std::cerr << name << ": " << to_string(v) << "\n";
    std::cerr << "exit " << res.exit_code << "\n";
  }
  return res.exit_code;
}

int dump(const std::string& name, int grid, const std::string& dir) {
  namespace fs = std::filesystem;
  const Instance in = registry_get(name, grid);
  fs::create_directories(dir);
  const Multiplier m = integrate_costate(in.spec, in.traj, in.seed.beta, in.seed.psi,
                                         resolve_atoms(in.traj, in.seed.atoms), Tolerances{});
  const fs::path base = fs::path(dir) / name;
  write_text_file(base.string() + ".problem.json", serialize_problem(in.spec));
  write_text_file(base.string() + ".trajectory.json", serialize_trajectory(in.traj));
  write_text_file(base.string() + ".multiplier.json", serialize_multiplier(to_file(m)));
  std::cout << "wrote " << base.string() << ".{problem,trajectory,multiplier}.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimality certificates for control-affine optimal control problems"};
  app.require_subcommand(1);

  CertifyOptions opts;
  std::string order = "first";
  std::string report_path;
  std::vector<std::string> overrides;
  std::string profile;
  bool quiet = false;
  auto* cert = app.add_subcommand("certify", "Run the certification pipeline");
  auto* reg = cert->add_option("--registry", opts.registry, "Builtin instance (REG1, CB1)");
  cert->add_option("--problem", opts.problem_path, "Problem file")->excludes(reg);
  cert->add_option("--trajectory", opts.trajectory_path, "Trajectory file")->excludes(reg);
  cert->add_option("--multiplier", opts.multiplier_paths, "Multiplier file (repeatable)");
  cert->add_flag("--fit-multiplier", opts.fit, "Fit a multiplier instead of using the seed or files");
  cert->add_option("--order", order, "first, second or sufficient")
      ->check(CLI::IsMember({"first", "second", "sufficient"}));
  cert->add_option("--grid", opts.grid, "Grid intervals for registry instances")->check(CLI::PositiveNumber);
  cert->add_option("--tol", overrides, "Tolerance override key=value (repeatable)");
  cert->add_option("--tol-profile", profile, "default, strict or loose (overrides OCPCERT_TOL_PROFILE)");
  cert->add_option("--report", report_path, "Report path (stdout when omitted)");
  cert->add_option("--csv-dir", opts.csv_dir, "Directory for per-node CSV dumps");
  cert->add_option("--samples", opts.qomega_samples, "Random directions for the Q = Omega check");
  cert->add_option("--sample-seed", opts.sample_seed, "Seed for sampled checks");
  cert->add_flag("--full-matrices", opts.full_matrices, "Always include cone matrices in the report");
  cert->add_flag("--quiet", quiet, "No verdict summary on stderr");

  std::uint64_t seed = 0;
  bool corrupt = false;
  auto* self = app.add_subcommand("selftest", "Run the property suites");
  self->add_option("--seed", seed, "Random seed");
  self->add_flag("--corrupt", corrupt, "Perturb registry trajectories by 1e-3 first");

  std::string dump_name, dump_dir = ".";
  int dump_grid = kDefaultGrid;
  auto* dmp = app.add_subcommand("dump", "Write registry problem, trajectory and multiplier files");
  dmp->add_option("name", dump_name, "Registry instance")->required();
  dmp->add_option("--out", dump_dir, "Output directory");
  dmp->add_option("--grid", dump_grid, "Grid intervals")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cert) {
      opts.order = order_from_string(order);
      opts.tol = profile.empty() ? Tolerances::from_environment() : Tolerances::profile(profile);
      for (const auto& o : overrides) opts.tol.apply_override(o);
      return certify(opts, report_path, quiet);
    }
    if (*self) {
      const SelftestResult r = run_selftest(seed, corrupt);
      std::cout << r.text();
      return r.passed() ? 0 : 1;
    }
    if (*dmp) return dump(dump_name, dump_grid, dump_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
