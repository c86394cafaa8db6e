#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cdms/dynamics.hpp"

namespace cdms {

// Output file could not be written; the message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Time-series CSV, one row per recorded step plus the fixed header
// "t,jx,jy,jz,djx,djy,djz,xi2z,photocurrent,trace_err,herm_err".
// Values print with 17 significant digits so a parse-back reproduces the
// doubles exactly; an undefined squeezing parameter prints as nan.
void write_trajectory_csv(const TrajectoryRecord& rec, const std::string& path);

// Diagonal-distribution snapshot, header "l,weight1,weightL,weightL2".
void write_snapshot_csv(const DistributionSnapshot& snap,
                        const std::string& path);

// Companion snapshot file name: "<csv path minus .csv>_snapshot_t<time>.csv".
std::string snapshot_path_for(const std::string& csv_path, double time);

// Mean and standard error over trajectories, per grid point. sem uses the
// n-1 divisor and is nan for a single trajectory.
struct SeriesStats {
  std::vector<double> mean;
  std::vector<double> sem;
};

struct EnsembleSeries {
  std::vector<double> times;
  SeriesStats jx, jy, jz, xi2z;
};

// All records must share one recording grid (same step config). Throws
// std::invalid_argument when the grids disagree or the list is empty.
EnsembleSeries ensemble_average(const std::vector<const TrajectoryRecord*>& recs);

// Header "t,jx_mean,jx_sem,jy_mean,jy_sem,jz_mean,jz_sem,xi2z_mean,xi2z_sem".
void write_ensemble_csv(const EnsembleSeries& es, const std::string& path);

}  // namespace cdms
