#include "cdms/results.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cdms {

namespace {

struct File {
  std::FILE* f;
  explicit File(const std::string& path) : f(std::fopen(path.c_str(), "wb")) {
    if (!f) throw IoError("cannot write file: " + path);
  }
  ~File() {
    if (f) std::fclose(f);
  }
  File(const File&) = delete;
  File& operator=(const File&) = delete;
};

}  // namespace

void write_trajectory_csv(const TrajectoryRecord& rec,
                          const std::string& path) {
  File out(path);
  std::fputs("t,jx,jy,jz,djx,djy,djz,xi2z,photocurrent,trace_err,herm_err\n",
             out.f);
  const std::size_t n = rec.times.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::fprintf(out.f,
                 "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                 "%.17g,%.17g\n",
                 rec.times[i], rec.jx[i], rec.jy[i], rec.jz[i], rec.dx[i],
                 rec.dy[i], rec.dz[i], rec.xi2z[i], rec.photocurrent[i],
                 rec.trace_err[i], rec.herm_err[i]);
  }
  if (std::ferror(out.f)) throw IoError("write failed: " + path);
}

void write_snapshot_csv(const DistributionSnapshot& snap,
                        const std::string& path) {
  File out(path);
  std::fputs("l,weight1,weightL,weightL2\n", out.f);
  for (std::size_t l = 0; l < snap.w1.size(); ++l) {
    std::fprintf(out.f, "%zu,%.17g,%.17g,%.17g\n", l, snap.w1[l], snap.wl[l],
                 snap.wl2[l]);
  }
  if (std::ferror(out.f)) throw IoError("write failed: " + path);
}

std::string snapshot_path_for(const std::string& csv_path, double time) {
  std::string stem = csv_path;
  if (stem.size() >= 4 && stem.compare(stem.size() - 4, 4, ".csv") == 0)
    stem.erase(stem.size() - 4);
  char buf[64];
  std::snprintf(buf, sizeof buf, "_snapshot_t%g.csv", time);
  return stem + buf;
}

EnsembleSeries ensemble_average(
    const std::vector<const TrajectoryRecord*>& recs) {
  if (recs.empty())
    throw std::invalid_argument("ensemble_average: no trajectories");
  const std::size_t rows = recs[0]->times.size();
  for (const TrajectoryRecord* r : recs)
    if (r->times != recs[0]->times)
      throw std::invalid_argument(
          "ensemble_average: trajectories on different recording grids");

  EnsembleSeries es;
  es.times = recs[0]->times;
  const double n = static_cast<double>(recs.size());

  auto reduce = [&](auto field) {
    SeriesStats st;
    st.mean.resize(rows);
    st.sem.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      double sum = 0.0;
      for (const TrajectoryRecord* r : recs) sum += (r->*field)[i];
      const double mean = sum / n;
      double ss = 0.0;
      for (const TrajectoryRecord* r : recs) {
        const double d = (r->*field)[i] - mean;
        ss += d * d;
      }
      st.mean[i] = mean;
      st.sem[i] = recs.size() > 1 ? std::sqrt(ss / (n - 1.0) / n)
                                  : std::nan("");
    }
    return st;
  };

  es.jx = reduce(&TrajectoryRecord::jx);
  es.jy = reduce(&TrajectoryRecord::jy);
  es.jz = reduce(&TrajectoryRecord::jz);
  es.xi2z = reduce(&TrajectoryRecord::xi2z);
  return es;
}

void write_ensemble_csv(const EnsembleSeries& es, const std::string& path) {
  File out(path);
  std::fputs("t,jx_mean,jx_sem,jy_mean,jy_sem,jz_mean,jz_sem,xi2z_mean,xi2z_sem\n",
             out.f);
  for (std::size_t i = 0; i < es.times.size(); ++i) {
    std::fprintf(out.f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                 es.times[i], es.jx.mean[i], es.jx.sem[i], es.jy.mean[i],
                 es.jy.sem[i], es.jz.mean[i], es.jz.sem[i], es.xi2z.mean[i],
                 es.xi2z.sem[i]);
  }
  if (std::ferror(out.f)) throw IoError("write failed: " + path);
}

}  // namespace cdms
