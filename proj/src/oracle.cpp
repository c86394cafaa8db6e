#include "cdms/oracle.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cdms/indexing.hpp"

namespace cdms {
namespace {

using Cvec = std::vector<std::complex<double>>;

// C = A * B, row-major dim x dim, spelled out on (re, im) pairs to keep the
// inner loop free of checked complex-multiply calls.
void matmul(const Cvec& a, const Cvec& b, Cvec& c, int dim) {
  std::fill(c.begin(), c.end(), std::complex<double>(0.0, 0.0));
  const double* ap = reinterpret_cast<const double*>(a.data());
  const double* bp = reinterpret_cast<const double*>(b.data());
  double* cp = reinterpret_cast<double*>(c.data());
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < dim; ++k) {
      const double ar = ap[2 * (i * dim + k)], ai = ap[2 * (i * dim + k) + 1];
      if (ar == 0.0 && ai == 0.0) continue;
      const double* brow = bp + 2 * static_cast<std::size_t>(k) * dim;
      double* crow = cp + 2 * static_cast<std::size_t>(i) * dim;
      for (int j = 0; j < dim; ++j) {
        const double br = brow[2 * j], bi = brow[2 * j + 1];
        crow[2 * j] += ar * br - ai * bi;
        crow[2 * j + 1] += ar * bi + ai * br;
      }
    }
}

Cvec kron(const Cvec& a, int da, const Cvec& b, int db) {
  Cvec out(static_cast<std::size_t>(da) * db * da * db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j)
      for (int k = 0; k < db; ++k)
        for (int l = 0; l < db; ++l)
          out[(i * db + k) * static_cast<std::size_t>(da * db) + (j * db + l)] =
              a[i * da + j] * b[k * db + l];
  return out;
}

// Operator acting as op2 on atom k and identity elsewhere; atom 0 owns the
// most significant basis bit.
Cvec op_at(const Cvec& op2, int k, int n) {
  Cvec acc = {1.0};
  int dim = 1;
  const Cvec id2 = {1.0, 0.0, 0.0, 1.0};
  for (int a = 0; a < n; ++a) {
    acc = kron(acc, dim, a == k ? op2 : id2, 2);
    dim *= 2;
  }
  return acc;
}

bool extract_diagonal(const Cvec& m, int dim, Cvec& diag) {
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      if (i != j && m[i * static_cast<std::size_t>(dim) + j] != 0.0) return false;
  diag.resize(dim);
  for (int i = 0; i < dim; ++i) diag[i] = m[i * static_cast<std::size_t>(dim) + i];
  return true;
}

void check_capacity(int n) {
  if (n < 1 || n > kOracleMaxAtoms)
    throw std::invalid_argument("oracle handles 1 <= N <= " +
                                std::to_string(kOracleMaxAtoms));
}

}  // namespace

FullDensityMatrix oracle_css(double theta, double phi, int n_atoms) {
  check_capacity(n_atoms);
  const std::complex<double> d_up =
      std::sin(0.5 * theta) * std::complex<double>(std::cos(phi), std::sin(phi));
  const std::complex<double> d_dn = std::cos(0.5 * theta);
  const int dim = 1 << n_atoms;
  std::vector<std::complex<double>> psi(dim);
  for (int a = 0; a < dim; ++a) {
    std::complex<double> v = 1.0;
    for (int bit = 0; bit < n_atoms; ++bit)
      v *= (a >> bit) & 1 ? d_dn : d_up;
    psi[a] = v;
  }
  FullDensityMatrix r;
  r.n_atoms = n_atoms;
  r.rho.resize(static_cast<std::size_t>(dim) * dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      r.rho[a * static_cast<std::size_t>(dim) + b] = psi[a] * std::conj(psi[b]);
  return r;
}

OracleStepper::OracleStepper(const DerivedParams& d,
                             std::optional<double> frame_shift_override)
    : n_(d.phys.n_atoms) {
  check_capacity(n_);
  const int dim = 1 << n_;
  const Cvec p_up2 = {1.0, 0.0, 0.0, 0.0};
  const Cvec p_dn2 = {0.0, 0.0, 0.0, 1.0};
  const Cvec s_plus2 = {0.0, 1.0, 0.0, 0.0};   // |up><dn|
  const Cvec s_minus2 = {0.0, 0.0, 1.0, 0.0};  // |dn><up|
  const double gamma = d.phys.gamma;
  const double coll = 4.0 * d.phys.g * d.phys.g / d.phys.kappa;

  std::vector<std::pair<double, Cvec>> raw;
  for (int k = 0; k < n_; ++k) {
    raw.emplace_back(2.0 / 3.0 * gamma * d.chi_dn, op_at(p_up2, k, n_));
    raw.emplace_back(1.0 / 3.0 * gamma * d.chi_dn, op_at(s_minus2, k, n_));
    raw.emplace_back(2.0 / 3.0 * gamma * d.chi_up, op_at(p_dn2, k, n_));
    raw.emplace_back(1.0 / 3.0 * gamma * d.chi_up, op_at(s_plus2, k, n_));
  }
  Cvec cap_up(static_cast<std::size_t>(dim) * dim, 0.0);
  Cvec cap_dn(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int k = 0; k < n_; ++k) {
    const Cvec pu = op_at(p_up2, k, n_), pd = op_at(p_dn2, k, n_);
    for (std::size_t i = 0; i < cap_up.size(); ++i) {
      cap_up[i] += pu[i];
      cap_dn[i] += pd[i];
    }
  }
  raw.emplace_back(coll * d.chi_dn, cap_up);
  raw.emplace_back(coll * d.chi_up, cap_dn);

  // K = -iH - (1/2) sum rate o^dag o; every o^dag o here lands diagonal, and
  // H = -Omega Jz is diagonal, so K collapses to a vector.
  const double frame = frame_shift_override.value_or(d.frame_shift);
  const double omega =
      2.0 * (d.phys.delta_up * d.chi_up - d.phys.delta_dn * d.chi_dn) - frame;
  Cvec k_full(static_cast<std::size_t>(dim) * dim, 0.0);
  Cvec tmp(k_full.size());
  for (auto& [rate, op] : raw) {
    if (rate == 0.0) continue;
    Cvec dag(op.size());
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        dag[i * static_cast<std::size_t>(dim) + j] =
            std::conj(op[j * static_cast<std::size_t>(dim) + i]);
    matmul(dag, op, tmp, dim);
    for (std::size_t i = 0; i < k_full.size(); ++i) k_full[i] -= 0.5 * rate * tmp[i];
    Channel ch;
    ch.rate = rate;
    ch.op = op;
    ch.dag = std::move(dag);
    extract_diagonal(ch.op, dim, ch.diag);
    channels_.push_back(std::move(ch));
  }
  for (int a = 0; a < dim; ++a) {
    const double jz = 0.5 * (n_ - 2 * std::popcount(static_cast<unsigned>(a)));
    // H = -omega * Jz; -iH contributes +i omega jz on the diagonal
    k_full[a * static_cast<std::size_t>(dim) + a] +=
        std::complex<double>(0.0, omega * jz);
  }
  if (!extract_diagonal(k_full, dim, k_diag_))
    throw std::logic_error("oracle: drift generator unexpectedly non-diagonal");

  measurement_ = d.xi_up != std::complex<double>(0.0) ||
                 d.xi_dn != std::complex<double>(0.0);
  b_diag_.assign(dim, 0.0);
  for (int a = 0; a < dim; ++a) {
    const int ups = n_ - std::popcount(static_cast<unsigned>(a));
    b_diag_[a] = d.xi_dn * static_cast<double>(ups) +
                 d.xi_up * static_cast<double>(n_ - ups);
  }
}

void OracleStepper::step(FullDensityMatrix& rho, double dt, double dW) const {
  const int dim = rho.dim();
  if (rho.n_atoms != n_)
    throw std::invalid_argument("oracle stepper: N mismatch");
  Cvec next = rho.rho;
  Cvec tmp1(rho.rho.size()), tmp2(rho.rho.size());

  // K rho + rho K^dag, K diagonal
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      next[a * static_cast<std::size_t>(dim) + b] +=
          dt * (k_diag_[a] + std::conj(k_diag_[b])) *
          rho.rho[a * static_cast<std::size_t>(dim) + b];

  for (const auto& ch : channels_) {
    if (!ch.diag.empty()) {
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
          next[a * static_cast<std::size_t>(dim) + b] +=
              dt * ch.rate * ch.diag[a] * std::conj(ch.diag[b]) *
              rho.rho[a * static_cast<std::size_t>(dim) + b];
    } else {
      matmul(ch.op, rho.rho, tmp1, dim);
      matmul(tmp1, ch.dag, tmp2, dim);
      for (std::size_t i = 0; i < next.size(); ++i)
        next[i] += dt * ch.rate * tmp2[i];
    }
  }

  if (measurement_ && dW != 0.0) {
    std::complex<double> mean = 0.0;
    for (int a = 0; a < dim; ++a)
      mean += (b_diag_[a] + std::conj(b_diag_[a])) *
              rho.rho[a * static_cast<std::size_t>(dim) + a];
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        next[a * static_cast<std::size_t>(dim) + b] +=
            dW * (b_diag_[a] + std::conj(b_diag_[b]) - mean) *
            rho.rho[a * static_cast<std::size_t>(dim) + b];
  }

  double tr = 0.0;
  for (int a = 0; a < dim; ++a)
    tr += next[a * static_cast<std::size_t>(dim) + a].real();
  if (!std::isfinite(tr) || tr <= 0.0)
    throw std::runtime_error("oracle step: trace became " + std::to_string(tr));
  const double inv = 1.0 / tr;
  for (auto& v : next) v *= inv;
  rho.rho.swap(next);
}

void full_sme_step(FullDensityMatrix& rho, const DerivedParams& d, double dt,
                   double dW) {
  OracleStepper(d).step(rho, dt, dW);
}

namespace {

// tuple of pair counts for bra index a, ket index b (bit = 1 means dn)
MultiIndex pair_counts(unsigned a, unsigned b, int n) {
  MultiIndex m;
  for (int bit = n - 1; bit >= 0; --bit) {
    const bool a_dn = (a >> bit) & 1, b_dn = (b >> bit) & 1;
    if (!a_dn && !b_dn) ++m.n_uu;
    else if (!a_dn && b_dn) ++m.n_ud;
    else if (a_dn && !b_dn) ++m.n_du;
    else ++m.n_dd;
  }
  return m;
}

double projection_impl(const FullDensityMatrix& rho, CollectiveState* out) {
  const int n = rho.n_atoms;
  const int dim = 1 << n;
  const std::int64_t size = state_count(n);
  std::vector<char> seen(static_cast<std::size_t>(size), 0);
  std::vector<std::complex<double>> val(static_cast<std::size_t>(size));
  double worst = 0.0;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      const std::int64_t i = flat_index(pair_counts(a, b, n), n);
      const std::complex<double> v = rho.rho[a * static_cast<std::size_t>(dim) + b];
      if (!seen[i]) {
        seen[i] = 1;
        val[i] = v;
      } else {
        worst = std::max(worst, std::abs(v - val[i]));
      }
    }
  if (out) {
    out->n_atoms = n;
    out->amp = std::move(val);
  }
  return worst;
}

}  // namespace

CollectiveState collective_projection(const FullDensityMatrix& rho) {
  check_capacity(rho.n_atoms);
  CollectiveState s;
  const double worst = projection_impl(rho, &s);
  if (worst > 1e-10)
    throw std::runtime_error(
        "projection: permutation-equivalent elements disagree by " +
        std::to_string(worst));
  return s;
}

double oracle_symmetry_residual(const FullDensityMatrix& rho) {
  return projection_impl(rho, nullptr);
}

namespace {

std::complex<double> trace_prod(const Cvec& op, const Cvec& rho, int dim) {
  // tr(O rho) = sum_{a,b} O[a,b] rho[b,a]
  std::complex<double> acc = 0.0;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      acc += op[a * static_cast<std::size_t>(dim) + b] *
             rho[b * static_cast<std::size_t>(dim) + a];
  return acc;
}

}  // namespace

SpinMoments oracle_observables(const FullDensityMatrix& rho) {
  check_capacity(rho.n_atoms);
  const int n = rho.n_atoms;
  const int dim = 1 << n;
  const Cvec s_plus2 = {0.0, 1.0, 0.0, 0.0};
  Cvec jp(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int k = 0; k < n; ++k) {
    const Cvec sk = op_at(s_plus2, k, n);
    for (std::size_t i = 0; i < jp.size(); ++i) jp[i] += sk[i];
  }
  Cvec jm(jp.size()), jx(jp.size()), jy(jp.size()), jz(jp.size(), 0.0);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      jm[i * static_cast<std::size_t>(dim) + j] =
          std::conj(jp[j * static_cast<std::size_t>(dim) + i]);
  for (std::size_t i = 0; i < jp.size(); ++i) {
    jx[i] = 0.5 * (jp[i] + jm[i]);
    jy[i] = std::complex<double>(0.0, 0.5) * (jp[i] - jm[i]);
  }
  for (int a = 0; a < dim; ++a)
    jz[a * static_cast<std::size_t>(dim) + a] =
        0.5 * (n - 2 * std::popcount(static_cast<unsigned>(a)));

  SpinMoments m;
  Cvec sq(jp.size());
  m.jx = trace_prod(jx, rho.rho, dim).real();
  m.jy = trace_prod(jy, rho.rho, dim).real();
  m.jz = trace_prod(jz, rho.rho, dim).real();
  matmul(jx, jx, sq, dim);
  m.jx2 = trace_prod(sq, rho.rho, dim).real();
  matmul(jy, jy, sq, dim);
  m.jy2 = trace_prod(sq, rho.rho, dim).real();
  matmul(jz, jz, sq, dim);
  m.jz2 = trace_prod(sq, rho.rho, dim).real();
  m.dx = std::sqrt(std::max(0.0, m.jx2 - m.jx * m.jx));
  m.dy = std::sqrt(std::max(0.0, m.jy2 - m.jy * m.jy));
  m.dz = std::sqrt(std::max(0.0, m.jz2 - m.jz * m.jz));
  return m;
}

std::complex<double> oracle_bm_expectation(const FullDensityMatrix& rho,
                                           const DerivedParams& d) {
  const int n = rho.n_atoms;
  const int dim = 1 << n;
  std::complex<double> acc = 0.0;
  for (int a = 0; a < dim; ++a) {
    const int ups = n - std::popcount(static_cast<unsigned>(a));
    acc += (d.xi_dn * static_cast<double>(ups) +
            d.xi_up * static_cast<double>(n - ups)) *
           rho.rho[a * static_cast<std::size_t>(dim) + a];
  }
  return acc;
}

double oracle_trace(const FullDensityMatrix& rho) {
  const int dim = rho.dim();
  double tr = 0.0;
  for (int a = 0; a < dim; ++a)
    tr += rho.rho[a * static_cast<std::size_t>(dim) + a].real();
  return tr;
}

double oracle_hermitian_residual(const FullDensityMatrix& rho) {
  const int dim = rho.dim();
  double worst = 0.0;
  for (int a = 0; a < dim; ++a)
    for (int b = a; b < dim; ++b)
      worst = std::max(worst,
                       std::abs(rho.rho[a * static_cast<std::size_t>(dim) + b] -
                                std::conj(rho.rho[b * static_cast<std::size_t>(dim) + a])));
  return worst;
}

double oracle_min_eigenvalue(const FullDensityMatrix& rho) {
  // hermitize, embed as the real symmetric [[Re, -Im], [Im, Re]], cyclic
  // Jacobi; each complex eigenvalue appears twice in the embedding
  const int dim = rho.dim();
  const int m = 2 * dim;
  std::vector<double> a(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const std::complex<double> h =
          0.5 * (rho.rho[i * static_cast<std::size_t>(dim) + j] +
                 std::conj(rho.rho[j * static_cast<std::size_t>(dim) + i]));
      a[i * static_cast<std::size_t>(m) + j] = h.real();
      a[(i + dim) * static_cast<std::size_t>(m) + (j + dim)] = h.real();
      a[i * static_cast<std::size_t>(m) + (j + dim)] = -h.imag();
      a[(i + dim) * static_cast<std::size_t>(m) + j] = h.imag();
    }
  auto at = [&](int i, int j) -> double& { return a[i * static_cast<std::size_t>(m) + j]; };
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < m; ++p)
      for (int q = p + 1; q < m; ++q) off += at(p, q) * at(p, q);
    if (off < 1e-26) break;
    for (int p = 0; p < m; ++p)
      for (int q = p + 1; q < m; ++q) {
        const double apq = at(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = 0.5 * (at(q, q) - at(p, p)) / apq;
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int i = 0; i < m; ++i) {
          const double aip = at(i, p), aiq = at(i, q);
          at(i, p) = c * aip - s * aiq;
          at(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < m; ++i) {
          const double api = at(p, i), aqi = at(q, i);
          at(p, i) = c * api - s * aqi;
          at(q, i) = s * api + c * aqi;
        }
      }
  }
  double lo = at(0, 0);
  for (int i = 1; i < m; ++i) lo = std::min(lo, at(i, i));
  return lo;
}

}  // namespace cdms
