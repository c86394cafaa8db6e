#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdms/config.hpp"
#include "cdms/dynamics.hpp"

namespace cdms {

inline constexpr const char* kCodeVersion = "0.1.0";

struct TrajectoryTask {
  std::string label;       // file stem and manifest key, unique per batch
  std::uint64_t seed = 0;  // used when noise_file is empty
  std::string noise_file;  // recorded draws take precedence over the seed
  PhysicalParams physical;
  StepConfig step;
  int sweep_index = -1;  // -1: no sweep
  double sweep_value = 0.0;
};

struct TrajectoryOutcome {
  std::string label;
  std::string csv_file;  // relative to the output directory
  bool ok = false;
  std::string error;        // non-empty iff !ok
  TrajectoryRecord record;  // final_state dropped to keep batches small
};

struct BatchResult {
  std::vector<TrajectoryOutcome> outcomes;  // task order
  std::vector<std::string> ensemble_files;
  std::string manifest_file;
  int n_ok = 0;
  int n_failed = 0;
};

// Expands config into per-trajectory tasks: (sweep value x trajectory
// source), sources being explicit noise files then seeds. Seeded noise is
// identical across sweep values, which is what makes sweep comparisons
// controlled experiments.
std::vector<TrajectoryTask> plan_batch(const RunConfig& cfg);

// Runs every task (concurrently up to cfg.workers), writes per-trajectory
// CSVs and snapshots as each finishes, then the per-sweep-value ensemble
// CSVs and the manifest in task order. Output bytes are identical for any
// worker count: each file has exactly one writer and the reductions run on
// the main thread in a fixed order. A failed trajectory is recorded in the
// manifest and does not abort the batch.
BatchResult run_batch(const RunConfig& cfg, const std::string& command);

// Steps the collective solver and the unreduced-matrix oracle side by side
// on a shared noise sequence, tracking the elementwise gap after every step.
struct OracleCheckReport {
  int n_atoms = 0;
  std::size_t steps = 0;
  double max_abs_diff = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

OracleCheckReport oracle_equivalence_run(const PhysicalParams& p,
                                         const StepConfig& cfg,
                                         const WienerPath& noise,
                                         double tolerance = 1e-8);

}  // namespace cdms
