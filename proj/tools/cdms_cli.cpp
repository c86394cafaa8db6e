// Command-line front end: run / sweep / oracle-check / gen-noise.
// Exit codes: 0 success, 1 configuration error, 2 every trajectory failed,
// 3 oracle equivalence failure.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdms/config.hpp"
#include "cdms/oracle.hpp"
#include "cdms/runner.hpp"

namespace {

cdms::RunConfig load_or_default(const std::string& path) {
  if (path.empty()) {
    cdms::RunConfig cfg;
    cdms::finalize_config(cfg);
    return cfg;
  }
  return cdms::load_config(path);
}

void apply_overrides(cdms::RunConfig& cfg, int workers,
                     const std::string& output_dir) {
  if (workers > 0) cfg.workers = workers;
  if (!output_dir.empty()) cfg.output_dir = output_dir;
}

int report_batch(const cdms::BatchResult& res, const cdms::RunConfig& cfg) {
  for (const cdms::TrajectoryOutcome& o : res.outcomes) {
    if (o.ok)
      std::printf("ok      %s -> %s\n", o.label.c_str(), o.csv_file.c_str());
    else
      std::printf("FAILED  %s: %s\n", o.label.c_str(), o.error.c_str());
  }
  for (const std::string& e : res.ensemble_files)
    std::printf("wrote   %s\n", e.c_str());
  std::printf("wrote   %s\n", res.manifest_file.c_str());
  std::printf("%d ok, %d failed; output in %s\n", res.n_ok, res.n_failed,
              cfg.output_dir.c_str());
  if (res.n_ok == 0 && res.n_failed > 0) return 2;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional spin squeezing simulator"};
  app.require_subcommand(1);

  std::string run_config, sweep_config, oracle_config, out_dir;
  int workers = 0;

  CLI::App* run = app.add_subcommand(
      "run", "Integrate trajectories (batch over seeds and noise files)");
  run->add_option("config", run_config,
                  "key=value config file; omit for defaults (seed 1)");
  run->add_option("--workers", workers, "override run.workers");
  run->add_option("--output-dir", out_dir, "override run.output_dir");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Run a parameter sweep (config must have a sweep section)");
  sweep->add_option("config", sweep_config, "config file with sweep.* keys")
      ->required();
  sweep->add_option("--workers", workers, "override run.workers");
  sweep->add_option("--output-dir", out_dir, "override run.output_dir");

  CLI::App* oracle = app.add_subcommand(
      "oracle-check",
      "Compare the collective solver against the unreduced-matrix oracle");
  oracle->add_option("config", oracle_config,
                     "config file; n_atoms > 4 falls back to N = 2 and 3");

  CLI::App* noise = app.add_subcommand(
      "gen-noise", "Write a reproducible standard-normal draw file");
  std::uint64_t gn_seed = 0;
  std::uint64_t gn_count = 0;
  std::string gn_out;
  noise->add_option("--seed", gn_seed, "generator seed")->required();
  noise->add_option("--count", gn_count, "number of draws")->required();
  noise->add_option("--out", gn_out, "output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      cdms::RunConfig cfg = load_or_default(run_config);
      apply_overrides(cfg, workers, out_dir);
      return report_batch(cdms::run_batch(cfg, "run"), cfg);
    }

    if (sweep->parsed()) {
      cdms::RunConfig cfg = cdms::load_config(sweep_config);
      if (!cfg.sweep)
        throw cdms::ConfigError(
            "sweep subcommand requires sweep.parameter and sweep.values");
      apply_overrides(cfg, workers, out_dir);
      return report_batch(cdms::run_batch(cfg, "sweep"), cfg);
    }

    if (oracle->parsed()) {
      cdms::RunConfig cfg = load_or_default(oracle_config);
      std::vector<int> sizes;
      if (cfg.physical.n_atoms <= cdms::kOracleMaxAtoms)
        sizes.push_back(cfg.physical.n_atoms);
      else
        sizes = {2, 3};

      cdms::StepConfig sc = cfg.step;
      const auto requested =
          static_cast<std::uint64_t>(std::llround(sc.t_end / sc.dt));
      const std::uint64_t steps = std::min<std::uint64_t>(requested, 1000);
      sc.t_end = static_cast<double>(steps) * sc.dt;

      bool all_pass = true;
      for (int n : sizes) {
        cdms::PhysicalParams p = cfg.physical;
        p.n_atoms = n;
        const std::uint64_t seed = cfg.seeds.empty() ? 1 : cfg.seeds.front();
        const cdms::WienerPath path =
            cfg.noise_files.empty()
                ? cdms::WienerPath::seeded(seed, steps)
                : cdms::WienerPath::from_file(cfg.noise_files.front());
        const cdms::OracleCheckReport rep =
            cdms::oracle_equivalence_run(p, sc, path);
        std::printf("N=%d steps=%zu max|collective-oracle|=%.3e tol=%.0e %s\n",
                    rep.n_atoms, rep.steps, rep.max_abs_diff, rep.tolerance,
                    rep.pass ? "PASS" : "FAIL");
        all_pass = all_pass && rep.pass;
      }
      return all_pass ? 0 : 3;
    }

    if (noise->parsed()) {
      if (gn_count == 0)
        throw cdms::ConfigError("gen-noise: --count must be positive");
      cdms::WienerPath::seeded(gn_seed, gn_count).save(gn_out);
      std::printf("wrote %llu draws to %s\n",
                  static_cast<unsigned long long>(gn_count), gn_out.c_str());
      return 0;
    }
  } catch (const cdms::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
