// End-to-end checks of the conditional-squeezing simulator: physics the
// implementation must reproduce, plus determinism and performance bounds.
// One line per check; exit code is the number of failures.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cdms/dynamics.hpp"
#include "cdms/indexing.hpp"
#include "cdms/noise.hpp"
#include "cdms/observables.hpp"
#include "cdms/params.hpp"
#include "cdms/runner.hpp"
#include "cdms/state.hpp"

namespace {

using namespace cdms;

constexpr double kPi = std::numbers::pi;

struct Ctx {
  std::string cli;      // path to the command-line binary
  std::string scratch;  // writable scratch directory
};

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

std::string strf(const char* fmt, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

PhysicalParams table_point(int n) {
  PhysicalParams p = PhysicalParams::defaults();
  p.n_atoms = n;
  return p;
}

// Lossless, unit-efficiency variant of the reference point.
PhysicalParams ideal_point(int n) {
  PhysicalParams p = table_point(n);
  p.gamma = 0.0;
  p.eta = 1.0;
  return p;
}

TrajectoryRecord run_seeded(const PhysicalParams& p, const StepConfig& cfg,
                            std::uint64_t seed) {
  const auto steps =
      static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
  return run_trajectory(p, cfg, WienerPath::seeded(seed, steps));
}

std::vector<double> mean_series(const std::vector<TrajectoryRecord>& rs,
                                std::vector<double> TrajectoryRecord::* m) {
  std::vector<double> out((rs.front().*m).size(), 0.0);
  for (const TrajectoryRecord& r : rs)
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += (r.*m)[k];
  for (double& v : out) v /= static_cast<double>(rs.size());
  return out;
}

std::vector<double> sem_series(const std::vector<TrajectoryRecord>& rs,
                               std::vector<double> TrajectoryRecord::* m,
                               const std::vector<double>& mean) {
  const double n = static_cast<double>(rs.size());
  std::vector<double> out(mean.size(), 0.0);
  for (const TrajectoryRecord& r : rs)
    for (std::size_t k = 0; k < out.size(); ++k) {
      const double d = (r.*m)[k] - mean[k];
      out[k] += d * d;
    }
  for (double& v : out) v = std::sqrt(v / (n - 1.0) / n);
  return out;
}

bool all_defined(const std::vector<TrajectoryRecord>& rs) {
  for (const TrajectoryRecord& r : rs)
    for (char c : r.xi2z_defined)
      if (!c) return false;
  return true;
}

// ---------------------------------------------------------------------------
// 1. The reduced solver reproduces the unreduced density matrix.

Verdict c1_oracle(const Ctx&) {
  Timer t;
  bool ok = true;
  std::string d = "oracle equivalence:";
  for (int n : {2, 3}) {
    StepConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 0.1;  // 1000 steps
    const WienerPath noise = WienerPath::seeded(100 + n, 1000);
    const OracleCheckReport r =
        oracle_equivalence_run(table_point(n), cfg, noise, 1e-8);
    ok = ok && r.pass && r.steps == 1000;
    d += strf(" N=%d max|diff|=%.1e", n, r.max_abs_diff);
  }
  const double secs = t.s();
  ok = ok && secs < 10.0;
  d += strf(" (tol 1e-8; %.1f s, limit 10)", secs);
  return {ok, d};
}

// ---------------------------------------------------------------------------
// 2. Index arithmetic is a bijection and shifts act like tuple arithmetic.

Verdict c2_indexing(const Ctx&) {
  Timer t;
  bool ok = state_count(100) == 176851;
  const std::array<std::array<int, 4>, 4> deltas = {{{1, -1, 0, 0},
                                                     {-1, 0, 0, 1},
                                                     {0, 1, -1, 0},
                                                     {1, 0, 0, -1}}};
  for (int n = 1; n <= 10 && ok; ++n) {
    const std::int64_t count = state_count(n);
    std::int64_t seen = 0;
    for (int uu = 0; uu <= n; ++uu)
      for (int ud = 0; ud + uu <= n; ++ud)
        for (int du = 0; du + ud + uu <= n; ++du) {
          const int dd = n - uu - ud - du;
          const MultiIndex m{uu, ud, du, dd};
          const std::int64_t i = flat_index(m, n);
          ok = ok && i >= 0 && i < count && multi_index(i, n) == m;
          for (const auto& dl : deltas) {
            const MultiIndex s{uu + dl[0], ud + dl[1], du + dl[2], dd + dl[3]};
            const bool valid = s.n_uu >= 0 && s.n_ud >= 0 && s.n_du >= 0 &&
                               s.n_dd >= 0 &&
                               s.n_uu + s.n_ud + s.n_du + s.n_dd == n;
            const std::int64_t got = shift_index(i, dl, n);
            ok = ok && got == (valid ? flat_index(s, n) : kOutOfDomain);
          }
          ++seen;
        }
    ok = ok && seen == count;
  }
  const double secs = t.s();
  return {ok && secs < 1.0,
          strf("index integrity: N<=10 bijection+shifts, state_count(100)=%lld"
               " (%.2f s, limit 1)",
               static_cast<long long>(state_count(100)), secs)};
}

// ---------------------------------------------------------------------------
// 3. The equatorial product state sits at the standard quantum limit.

Verdict c3_css(const Ctx&) {
  const CollectiveState s = css_init(kPi / 2, 0.0, 100);
  const SpinMoments m = spin_moments(s);
  const SqueezingResult r = squeezing_parameter(s);
  const bool ok = std::abs(m.jx - 50.0) < 1e-10 && std::abs(m.jy) < 1e-10 &&
                  std::abs(m.jz) < 1e-10 && std::abs(m.dz - 5.0) < 1e-10 &&
                  r.defined && std::abs(r.value - 1.0) < 1e-10;
  return {ok, strf("standard quantum limit: Jx=%.12f dJz=%.12f xi2=%.12f "
                   "(each within 1e-10)",
                   m.jx, m.dz, r.value)};
}

// ---------------------------------------------------------------------------
// 4. Lossless system squeezes: fast drop of xi2, slow contrast decay, and a
//    measurement-selected Jz plateau whose sign differs between records.

Verdict c4_ideal(const Ctx&) {
  Timer t;
  const PhysicalParams p = ideal_point(100);
  StepConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 0.5;
  cfg.record_every = 100;
  std::vector<TrajectoryRecord> rs;
  for (std::uint64_t seed = 1; seed <= 16; ++seed)
    rs.push_back(run_seeded(p, cfg, seed));
  const std::vector<double> mean = mean_series(rs, &TrajectoryRecord::xi2z);
  const std::vector<double>& times = rs.front().times;

  bool early = false;
  for (std::size_t k = 0; k < mean.size(); ++k)
    if (times[k] <= 0.1 + 1e-9 && mean[k] < 1.0) early = true;
  const bool deep = mean.back() < 0.3;
  bool mono = true;
  for (std::size_t k = 1; k < mean.size(); ++k)
    if (mean[k] > mean[k - 1] * 1.02) mono = false;
  int pos = 0, neg = 0;
  for (const TrajectoryRecord& r : rs) {
    if (r.jz.back() > 0.5) ++pos;
    if (r.jz.back() < -0.5) ++neg;
  }

  StepConfig lcfg;
  lcfg.dt = 1e-4;
  lcfg.t_end = 10.0;
  lcfg.record_every = 1000;
  const TrajectoryRecord lr = run_seeded(p, lcfg, 7);
  const double jx10 = lr.jx.back();
  const double jz8 = lr.jz[80], jz10 = lr.jz.back();
  const bool decay = std::abs(jx10) / 50.0 < 0.2;
  const bool plateau = std::abs(jz10 - jz8) < 0.5 && std::abs(jz10) > 0.5;

  // The 600 s budget assumes 4 workers; this binary runs the seeds serially,
  // so on fewer cores the equivalent single-stream budget scales up.
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const double budget = 600.0 * (hw >= 4 ? 1.0 : 4.0 / hw);
  const double secs = t.s();
  const bool ok = all_defined(rs) && early && deep && mono && pos >= 1 &&
                  neg >= 1 && decay && plateau && secs < budget;
  return {ok, strf("lossless squeezing: mean xi2(0.1)=%.3f (<1), "
                   "xi2(0.5)=%.3f (<0.3), monotone=%d, Jz signs +%d/-%d, "
                   "Jx(10)=%.2f (<10), Jz(8->10)=%.2f->%.2f (%.0f s, "
                   "limit 600 scaled to %.0f on %u cores)",
                   mean[10], mean.back(), mono ? 1 : 0, pos, neg, jx10, jz8,
                   jz10, secs, budget, hw)};
}

// ---------------------------------------------------------------------------
// 5. Balanced beam splitting makes the two couplings equal and kills the
//    measurement signal; squeezing disappears with it.

Verdict c5_polarization(const Ctx&) {
  PhysicalParams pq = table_point(100);
  pq.vartheta = 0.25 * kPi;
  const DerivedParams dq = derive_params(pq);
  const std::complex<double> gap = dq.xi_dn - dq.xi_up;
  const bool exact_null = gap.real() == 0.0 && gap.imag() == 0.0;

  StepConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 0.5;
  cfg.record_every = 100;
  const TrajectoryRecord rq = run_seeded(pq, cfg, 21);
  const TrajectoryRecord r0 = run_seeded(table_point(100), cfg, 21);
  const double minq = *std::min_element(rq.xi2z.begin(), rq.xi2z.end());
  const double min0 = *std::min_element(r0.xi2z.begin(), r0.xi2z.end());
  const bool ok = exact_null && minq >= 0.9 && min0 < 0.5;
  return {ok, strf("polarization null: xi_dn-xi_up=(%g,%g) exact, min xi2 "
                   "balanced=%.4f (>=0.9) vs reference=%.4f (<0.5), shared "
                   "noise",
                   gap.real(), gap.imag(), minq, min0)};
}

// ---------------------------------------------------------------------------
// 6. Without measurement backaction nothing selects a Jz value: the
//    transverse components stay zero and the Jz uncertainty stays at 5.

Verdict c6_no_measurement(const Ctx&) {
  PhysicalParams p = table_point(100);
  p.vartheta = 0.25 * kPi;
  StepConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 2.0;
  cfg.record_every = 100;
  cfg.measurement_on = false;
  const TrajectoryRecord r = run_seeded(p, cfg, 1);
  double ty = 0.0, tz = 0.0, ddz = 0.0;
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    ty = std::max(ty, std::abs(r.jy[k]));
    tz = std::max(tz, std::abs(r.jz[k]));
    ddz = std::max(ddz, std::abs(r.dz[k] - 5.0));
  }
  bool mono = true;
  for (std::size_t k = 1; k < r.jx.size(); ++k)
    if (!(r.jx[k] < r.jx[k - 1])) mono = false;
  const bool ok = ty <= 1e-10 && tz <= 1e-10 && ddz <= 1e-6 && mono;
  return {ok, strf("measurement off: max|Jy|=%.1e max|Jz|=%.1e (<=1e-10), "
                   "max|dJz-5|=%.1e (<=1e-6), Jx strictly decreasing=%d",
                   ty, tz, ddz, mono ? 1 : 0)};
}

// ---------------------------------------------------------------------------
// 7. The centered diagonal profile starts exactly linear and collapses into
//    ever sharper structures as the measurement localizes Jz.

bool single_peaked(const std::vector<double>& y) {
  double mx = 0.0;
  for (double v : y) mx = std::max(mx, std::abs(v));
  const double thr = 0.05 * mx;
  // Entries above the floor must form one contiguous run per sign.
  for (int sign : {+1, -1}) {
    int runs = 0;
    bool in = false;
    for (double v : y) {
      const bool hit = sign > 0 ? v > thr : v < -thr;
      if (hit && !in) ++runs;
      in = hit;
    }
    if (runs > 1) return false;
  }
  return true;
}

double recombined_sigma(const std::vector<double>& w1) {
  const int n = static_cast<int>(w1.size()) - 1;
  double norm = 0.0, m1 = 0.0, m2 = 0.0;
  for (int l = 0; l <= n; ++l) {
    const double pl = std::exp(std::lgamma(n + 1.0) - std::lgamma(l + 1.0) -
                               std::lgamma(n - l + 1.0)) *
                      w1[static_cast<std::size_t>(l)];
    norm += pl;
    m1 += pl * l;
    m2 += pl * static_cast<double>(l) * l;
  }
  m1 /= norm;
  m2 /= norm;
  return std::sqrt(m2 - m1 * m1);
}

Verdict c7_narrowing(const Ctx&) {
  StepConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 0.5;
  cfg.record_every = 100;
  cfg.snapshot_times = {0.0, 0.01, 0.5};
  const TrajectoryRecord r = run_seeded(ideal_point(100), cfg, 31);
  const DistributionSnapshot* snap[3] = {nullptr, nullptr, nullptr};
  for (const DistributionSnapshot& s : r.snapshots)
    for (int j = 0; j < 3; ++j)
      if (std::abs(s.time - cfg.snapshot_times[static_cast<std::size_t>(j)]) <
          1e-9)
        snap[j] = &s;
  if (!snap[0] || !snap[1] || !snap[2])
    return {false, "distribution narrowing: snapshot missing"};

  double mx = 0.0, dd = 0.0;
  const std::vector<double>& w = snap[0]->wl;
  for (double v : w) mx = std::max(mx, std::abs(v));
  for (std::size_t l = 1; l + 1 < w.size(); ++l)
    dd = std::max(dd, std::abs(w[l + 1] - 2.0 * w[l] + w[l - 1]));
  const bool linear = dd <= 1e-12 * mx;

  const bool sp1 = single_peaked(snap[1]->wl);
  const bool sp2 = single_peaked(snap[2]->wl);
  const double s1 = recombined_sigma(snap[1]->w1);
  const double s2 = recombined_sigma(snap[2]->w1);
  const bool ok = linear && sp1 && sp2 && s2 < s1;
  return {ok, strf("distribution narrowing: css curvature %.1e (<=1e-12 rel), "
                   "single-peaked@0.01=%d @0.5=%d, sigma 0.01->0.5: "
                   "%.2f->%.2f (shrinks)",
                   mx > 0 ? dd / mx : 0.0, sp1 ? 1 : 0, sp2 ? 1 : 0, s1, s2)};
}

// ---------------------------------------------------------------------------
// 8. Spontaneous emission raises the attainable minimum and shortens the
//    window during which xi2 stays below 1.

Verdict c8_emission(const Ctx&) {
  Timer t;
  const double twopi = 2.0 * kPi;
  const std::array<double, 3> gammas = {0.0, twopi * 4.9, twopi * 95.0};
  std::array<double, 3> mins{}, recross{};
  StepConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 2.0;
  cfg.record_every = 100;
  for (std::size_t j = 0; j < gammas.size(); ++j) {
    PhysicalParams p = table_point(100);
    p.gamma = gammas[j];
    const TrajectoryRecord r = run_seeded(p, cfg, 41);
    const auto it = std::min_element(r.xi2z.begin(), r.xi2z.end());
    mins[j] = *it;
    recross[j] = cfg.t_end;  // never recovers within the run
    for (auto k = static_cast<std::size_t>(it - r.xi2z.begin());
         k < r.xi2z.size(); ++k)
      if (r.xi2z[k] >= 1.0) {
        recross[j] = r.times[k];
        break;
      }
  }
  const bool ok = mins[0] <= mins[1] && mins[1] <= mins[2] &&
                  recross[0] >= recross[1] && recross[1] >= recross[2];
  return {ok, strf("emission degradation: min xi2 %.3f/%.3f/%.3f "
                   "(non-decreasing), recross t %.2f/%.2f/%.2f us "
                   "(non-increasing) (%.0f s)",
                   mins[0], mins[1], mins[2], recross[0], recross[1],
                   recross[2], t.s())};
}

// ---------------------------------------------------------------------------
// 9. More atoms squeeze deeper and hold the squeezing longer.

Verdict c9_atom_number(const Ctx&) {
  Timer t;
  const std::array<int, 3> ns = {10, 50, 100};
  std::array<double, 3> mins{}, windows{};
  StepConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 2.0;
  cfg.record_every = 100;
  for (std::size_t j = 0; j < ns.size(); ++j) {
    std::vector<TrajectoryRecord> rs;
    for (std::uint64_t seed = 51; seed <= 58; ++seed)
      rs.push_back(run_seeded(table_point(ns[j]), cfg, seed));
    const std::vector<double> mean = mean_series(rs, &TrajectoryRecord::xi2z);
    mins[j] = *std::min_element(mean.begin(), mean.end());
    int below = 0;
    for (std::size_t k = 1; k < mean.size(); ++k)
      if (mean[k] < 1.0) ++below;
    windows[j] = 0.01 * below;
  }
  const bool ok = mins[0] > mins[1] && mins[1] > mins[2] &&
                  windows[0] < windows[1] && windows[1] < windows[2] &&
                  std::abs(mins[0] - 0.8) <= 0.15;
  return {ok, strf("atom number: min xi2 %.3f/%.3f/%.3f (decreasing, first "
                   "within 0.8+-0.15), window %.2f/%.2f/%.2f us (lengthening) "
                   "(%.0f s)",
                   mins[0], mins[1], mins[2], windows[0], windows[1],
                   windows[2], t.s())};
}

// ---------------------------------------------------------------------------
// 10. Averaging the conditional Jz over many records recovers the
//     deterministic no-measurement curve.

Verdict c10_averaged_jz(const Ctx&) {
  Timer t;
  const PhysicalParams p = table_point(100);
  StepConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 0.5;
  cfg.record_every = 100;
  std::vector<TrajectoryRecord> rs;
  for (std::uint64_t seed = 1; seed <= 100; ++seed)
    rs.push_back(run_seeded(p, cfg, seed));
  const std::vector<double> mean = mean_series(rs, &TrajectoryRecord::jz);
  const std::vector<double> sem =
      sem_series(rs, &TrajectoryRecord::jz, mean);

  StepConfig off = cfg;
  off.measurement_on = false;
  const TrajectoryRecord r0 = run_seeded(p, off, 1);

  double worst = 0.0;  // fraction of the allowed band used per row
  for (std::size_t k = 0; k < mean.size(); ++k) {
    const double gap = std::abs(mean[k] - r0.jz[k]);
    // 1e-12 absorbs the roundoff floor of identical-to-machine rows.
    worst = std::max(worst, gap / (3.0 * sem[k] + 1e-12));
  }
  const bool ok = worst <= 1.0;
  return {ok, strf("averaged Jz: 100 records vs measurement-off curve, worst "
                   "row at %.0f%% of its 3-sigma-plus-floor band over %zu "
                   "rows (%.0f s)",
                   worst * 100.0, mean.size(), t.s())};
}

// ---------------------------------------------------------------------------
// 11. Determinism across worker counts and convergence under dt halving.

std::vector<std::filesystem::path> sorted_files(
    const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> v;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file()) v.push_back(std::filesystem::relative(e, dir));
  std::sort(v.begin(), v.end());
  return v;
}

bool same_bytes(const std::filesystem::path& a,
                const std::filesystem::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::ostringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return fa && fb && sa.str() == sb.str();
}

Verdict c11_determinism(const Ctx& ctx) {
  Timer t;
  if (ctx.cli.empty())
    return {false, "determinism: no --cli path to the run binary"};
  namespace fs = std::filesystem;
  const fs::path root = ctx.scratch;
  const fs::path cfgp = root / "workers.cfg";
  {
    std::ofstream f(cfgp);
    f << "physical.n_atoms = 20\n"
         "step.dt_us = 1e-4\n"
         "step.t_end_us = 0.05\n"
         "step.record_every = 50\n"
         "step.snapshot_times_us = 0.02\n"
         "run.seeds = 1 2 3 4\n"
         "run.dump_final_state = true\n";
  }
  const fs::path da = root / "w1", db = root / "w8";
  fs::remove_all(da);
  fs::remove_all(db);
  const std::string base = "\"" + ctx.cli + "\" run \"" + cfgp.string() + "\"";
  const std::string quiet = " > /dev/null 2>&1";
  const int ra = std::system(
      (base + " --workers 1 --output-dir \"" + da.string() + "\"" + quiet)
          .c_str());
  const int rb = std::system(
      (base + " --workers 8 --output-dir \"" + db.string() + "\"" + quiet)
          .c_str());
  bool identical = ra == 0 && rb == 0;
  const auto fa = sorted_files(da), fb = sorted_files(db);
  identical = identical && !fa.empty() && fa == fb;
  if (identical)
    for (const auto& rel : fa)
      identical = identical && same_bytes(da / rel, db / rel);

  // dt halving, common Brownian path: each coarse increment is the sum of
  // the two fine increments it spans.
  const PhysicalParams p = table_point(100);
  const std::size_t fine_steps = 40000;
  const WienerPath fine = WienerPath::seeded(11, fine_steps);
  const fs::path coarse_file = root / "coarse_noise.txt";
  {
    std::ofstream f(coarse_file);
    f << "# wiener v1 count=" << fine_steps / 2 << " seed=11\n";
    char line[64];
    for (std::size_t k = 0; k < fine_steps / 2; ++k) {
      const double z = (fine.draws()[2 * k] + fine.draws()[2 * k + 1]) /
                       std::sqrt(2.0);
      std::snprintf(line, sizeof line, "%.17g\n", z);
      f << line;
    }
  }
  StepConfig coarse_cfg;
  coarse_cfg.dt = 2.5e-5;
  coarse_cfg.t_end = 0.5;
  coarse_cfg.record_every = 20000;
  StepConfig fine_cfg = coarse_cfg;
  fine_cfg.dt = 1.25e-5;
  fine_cfg.record_every = 40000;
  const TrajectoryRecord rc =
      run_trajectory(p, coarse_cfg, WienerPath::from_file(coarse_file.string()));
  const TrajectoryRecord rf = run_trajectory(p, fine_cfg, fine);
  const double a = rc.xi2z.back(), b = rf.xi2z.back();
  const double rel = std::abs(a - b) / std::abs(b);
  const bool converged = rel < 0.01;

  const bool ok = identical && converged;
  return {ok, strf("determinism: %zu files across workers 1 vs 8, "
                   "byte-identical=%d, xi2(0.5) %.4f vs %.4f at dt/2, "
                   "rel diff %.2f%% (<1%%) (%.0f s)",
                   fa.size(), identical ? 1 : 0, a, b, rel * 100.0, t.s())};
}

// ---------------------------------------------------------------------------
// 12. Wall-clock budget and linear scaling of the per-step cost.

Verdict c12_performance(const Ctx&) {
  StepConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 5.0;  // 5e4 steps
  cfg.record_every = 100;
  Timer t;
  const TrajectoryRecord r = run_seeded(table_point(100), cfg, 61);
  const double wall = t.s();
  const bool fast = wall < 120.0 && r.steps_done == 50000;

  const std::array<int, 3> ns = {25, 50, 100};
  const std::array<double, 3> ends = {2.0, 0.5, 0.1};
  std::array<double, 3> per{};
  for (std::size_t j = 0; j < ns.size(); ++j) {
    StepConfig sc;
    sc.dt = 1e-4;
    sc.t_end = ends[j];
    sc.record_every = static_cast<int>(std::llround(ends[j] / sc.dt));
    Timer tt;
    const TrajectoryRecord rr = run_seeded(table_point(ns[j]), sc, 62);
    per[j] = tt.s() / static_cast<double>(rr.steps_done) /
             static_cast<double>(state_count(ns[j]));
  }
  const double lo = *std::min_element(per.begin(), per.end());
  const double hi = *std::max_element(per.begin(), per.end());
  const bool linear = hi / lo <= 3.0;
  return {fast && linear,
          strf("performance: N=100 5e4 steps in %.1f s (<120), per-element "
               "step cost %.1f/%.1f/%.1f ns at N=25/50/100, spread x%.2f "
               "(<=3)",
               wall, per[0] * 1e9, per[1] * 1e9, per[2] * 1e9, hi / lo)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks for the conditional-squeezing simulator"};
  Ctx ctx;
  std::vector<int> only;
  app.add_option("--cli", ctx.cli, "path to the command-line binary");
  app.add_option("--scratch", ctx.scratch, "scratch directory");
  app.add_option("--criterion", only, "run only these check numbers");
  CLI11_PARSE(app, argc, argv);

  if (ctx.scratch.empty())
    ctx.scratch =
        (std::filesystem::temp_directory_path() / "cdms_acceptance").string();
  std::filesystem::create_directories(ctx.scratch);

  struct Entry {
    int id;
    Verdict (*fn)(const Ctx&);
  };
  const std::vector<Entry> entries = {
      {1, c1_oracle},       {2, c2_indexing},    {3, c3_css},
      {4, c4_ideal},        {5, c5_polarization}, {6, c6_no_measurement},
      {7, c7_narrowing},    {8, c8_emission},    {9, c9_atom_number},
      {10, c10_averaged_jz}, {11, c11_determinism}, {12, c12_performance}};

  int failures = 0, ran = 0;
  for (const Entry& e : entries) {
    if (!only.empty() &&
        std::find(only.begin(), only.end(), e.id) == only.end())
      continue;
    Verdict v;
    try {
      v = e.fn(ctx);
    } catch (const std::exception& ex) {
      v = {false, strf("exception: %s", ex.what())};
    }
    ++ran;
    if (!v.pass) ++failures;
    std::printf("[%2d] %s  %s\n", e.id, v.pass ? "PASS" : "FAIL",
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/%d passed\n", ran - failures, ran);
  return failures;
}
