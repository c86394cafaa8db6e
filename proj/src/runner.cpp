#include "cdms/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "cdms/oracle.hpp"
#include "cdms/results.hpp"

namespace cdms {

namespace {

std::int64_t step_count(const StepConfig& cfg) {
  return std::llround(cfg.t_end / cfg.dt);
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

TrajectoryOutcome run_one(const TrajectoryTask& task, const RunConfig& cfg) {
  TrajectoryOutcome out;
  out.label = task.label;
  out.csv_file = task.label + ".csv";
  const std::string csv_path = cfg.output_dir + "/" + out.csv_file;
  try {
    const auto steps = static_cast<std::size_t>(step_count(task.step));
    WienerPath noise = task.noise_file.empty()
                           ? WienerPath::seeded(task.seed, steps)
                           : WienerPath::from_file(task.noise_file);
    TrajectoryRecord rec = run_trajectory(task.physical, task.step, noise);
    write_trajectory_csv(rec, csv_path);
    for (const DistributionSnapshot& snap : rec.snapshots)
      write_snapshot_csv(snap, snapshot_path_for(csv_path, snap.time));
    if (cfg.dump_final_state)
      save_state(rec.final_state,
                 cfg.output_dir + "/" + task.label + "_final.state");
    rec.final_state = CollectiveState{};
    out.record = std::move(rec);
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

}  // namespace

std::vector<TrajectoryTask> plan_batch(const RunConfig& cfg) {
  std::vector<TrajectoryTask> tasks;

  struct Point {
    int index;
    double value;
    PhysicalParams phys;
    std::string prefix;
  };
  std::vector<Point> points;
  if (cfg.sweep) {
    for (std::size_t j = 0; j < cfg.sweep->values.size(); ++j) {
      const double v = cfg.sweep->values[j];
      points.push_back({static_cast<int>(j), v,
                        apply_sweep_value(cfg.physical, cfg.sweep->parameter, v),
                        "sweep" + std::to_string(j) + "_"});
    }
  } else {
    points.push_back({-1, 0.0, cfg.physical, ""});
  }

  for (const Point& pt : points) {
    for (std::size_t i = 0; i < cfg.noise_files.size(); ++i) {
      TrajectoryTask t;
      t.label = pt.prefix + "traj_noise" + std::to_string(i);
      t.noise_file = cfg.noise_files[i];
      t.physical = pt.phys;
      t.step = cfg.step;
      t.sweep_index = pt.index;
      t.sweep_value = pt.value;
      tasks.push_back(std::move(t));
    }
    for (std::uint64_t seed : cfg.seeds) {
      TrajectoryTask t;
      t.label = pt.prefix + "traj_seed" + std::to_string(seed);
      t.seed = seed;
      t.physical = pt.phys;
      t.step = cfg.step;
      t.sweep_index = pt.index;
      t.sweep_value = pt.value;
      tasks.push_back(std::move(t));
    }
  }
  return tasks;
}

BatchResult run_batch(const RunConfig& cfg, const std::string& command) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec)
    throw IoError("cannot create output directory: " + cfg.output_dir + " (" +
                  ec.message() + ")");

  const std::vector<TrajectoryTask> tasks = plan_batch(cfg);
  BatchResult result;
  result.outcomes.resize(tasks.size());

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      result.outcomes[i] = run_one(tasks[i], cfg);
    }
  };

  const int n_workers =
      std::max(1, std::min<int>(cfg.workers, static_cast<int>(tasks.size())));
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }

  for (const TrajectoryOutcome& o : result.outcomes)
    (o.ok ? result.n_ok : result.n_failed) += 1;

  // Ensemble files, one per sweep point, in sweep order. Only successful
  // trajectories enter the average.
  const int n_groups = cfg.sweep ? static_cast<int>(cfg.sweep->values.size()) : 1;
  for (int g = 0; g < n_groups; ++g) {
    const int key = cfg.sweep ? g : -1;
    std::vector<const TrajectoryRecord*> recs;
    for (std::size_t i = 0; i < tasks.size(); ++i)
      if (tasks[i].sweep_index == key && result.outcomes[i].ok)
        recs.push_back(&result.outcomes[i].record);
    if (recs.empty()) continue;
    const std::string name =
        cfg.sweep ? "sweep" + std::to_string(g) + "_ensemble.csv"
                  : "ensemble.csv";
    write_ensemble_csv(ensemble_average(recs), cfg.output_dir + "/" + name);
    result.ensemble_files.push_back(name);
  }

  // Manifest last: it is the record that the batch completed.
  nlohmann::ordered_json m;
  m["format"] = "cdms-manifest-v1";
  m["code_version"] = kCodeVersion;
  m["command"] = command;
  char hash[19];
  std::snprintf(hash, sizeof hash, "0x%016llx",
                static_cast<unsigned long long>(fnv1a64(cfg.source_text)));
  m["config_hash_fnv1a64"] = hash;
  m["n_atoms"] = cfg.physical.n_atoms;
  m["dt_us"] = cfg.step.dt;
  m["t_end_us"] = cfg.step.t_end;
  m["seeds"] = cfg.seeds;
  m["noise_files"] = cfg.noise_files;
  if (cfg.sweep) {
    m["sweep"] = {{"parameter", cfg.sweep->parameter},
                  {"values", cfg.sweep->values}};
  } else {
    m["sweep"] = nullptr;
  }
  nlohmann::ordered_json traj = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const TrajectoryTask& t = tasks[i];
    const TrajectoryOutcome& o = result.outcomes[i];
    nlohmann::ordered_json row;
    row["label"] = o.label;
    if (t.noise_file.empty())
      row["seed"] = t.seed;
    else
      row["noise_file"] = t.noise_file;
    if (t.sweep_index >= 0) {
      row["sweep_value"] = t.sweep_value;
      row["sweep_value_str"] = format_value(t.sweep_value);
    }
    row["status"] = o.ok ? "ok" : "failed";
    if (!o.ok) row["error"] = o.error;
    row["csv"] = o.csv_file;
    traj.push_back(std::move(row));
  }
  m["trajectories"] = std::move(traj);
  m["ensembles"] = result.ensemble_files;

  result.manifest_file = "manifest.json";
  const std::string mpath = cfg.output_dir + "/" + result.manifest_file;
  std::ofstream mf(mpath, std::ios::binary);
  if (!mf) throw IoError("cannot write file: " + mpath);
  mf << m.dump(2) << "\n";
  if (!mf) throw IoError("write failed: " + mpath);

  return result;
}

OracleCheckReport oracle_equivalence_run(const PhysicalParams& p,
                                         const StepConfig& cfg,
                                         const WienerPath& noise,
                                         double tolerance) {
  OracleCheckReport rep;
  rep.n_atoms = p.n_atoms;
  rep.tolerance = tolerance;
  if (p.n_atoms > kOracleMaxAtoms)
    throw std::invalid_argument(
        "oracle_equivalence_run: unreduced matrix limited to " +
        std::to_string(kOracleMaxAtoms) + " atoms");

  const DerivedParams d = derive_params(p);
  StepConfig sc = cfg;
  sc.renormalize_every = 1;  // the oracle renormalizes every step

  const auto steps = static_cast<std::size_t>(step_count(sc));
  if (noise.draws().size() < steps)
    throw std::invalid_argument("oracle_equivalence_run: noise too short");

  CollectiveState s = css_init(p.theta, p.phi, p.n_atoms);
  FullDensityMatrix rho = oracle_css(p.theta, p.phi, p.n_atoms);
  CollectiveStepper stepper(d, sc);
  OracleStepper oracle(d, sc.frame_shift_override);
  const double sqrt_dt = std::sqrt(sc.dt);

  rep.steps = steps;
  for (std::size_t k = 0; k < steps; ++k) {
    const double z = noise.draws()[k];
    stepper.step(s, z);
    oracle.step(rho, sc.dt, sc.measurement_on ? z * sqrt_dt : 0.0);
    const CollectiveState proj = collective_projection(rho);
    for (std::size_t i = 0; i < s.amp.size(); ++i) {
      const double diff = std::abs(s.amp[i] - proj.amp[i]);
      if (diff > rep.max_abs_diff) rep.max_abs_diff = diff;
    }
  }
  rep.pass = rep.max_abs_diff < tolerance;
  return rep;
}

}  // namespace cdms
