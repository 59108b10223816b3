#include "limitdyn/admm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "limitdyn/errors.hpp"

namespace ld {

double SigmaSchedule::next(long k, double current, const KktResiduals* last) const {
  switch (mode) {
    case Mode::fixed:
      return current;
    case Mode::sweep: {
      const long kk = std::min(k, sweep_iters);
      return sigma0 * std::pow(sweep_end / sigma0, static_cast<double>(kk) / sweep_iters);
    }
    case Mode::balance: {
      if (!last || k == 0 || k > freeze || k % cadence != 0) return current;
      if (last->r_d <= 0.0 || last->r_p <= 0.0) return current;
      // r_p grows with sigma and r_d shrinks with it, so balancing moves sigma
      // against the larger residual.
      const double ratio = last->r_p / last->r_d;
      if (ratio > mu) return current / gamma;
      if (ratio < 1.0 / mu) return current * gamma;
      return current;
    }
  }
  return current;
}

Iterate three_step_admm_step(const SdpProblem& p, const Iterate& it) {
  const double s = it.sigma;
  Iterate out;
  out.sigma = s;
  out.y = solve_gram(p, p.b / s - apply_A(p, it.x / s + it.s - p.c));
  const SymMatrix aty = apply_Aadj(p, out.y);
  out.s = psd_project(p.c - aty - it.x / s);
  out.x = sym(it.x + s * (out.s + aty - p.c));
  return out;
}

SymMatrix one_step_drs_step(const SdpProblem& p, const SymMatrix& z, double sigma) {
  const SymMatrix xp = psd_project(z);
  const SymMatrix xm = psd_project(-z);
  return sym(z - project_rangeA(p, xp - p.x_feas) + project_rangeA_perp(p, xm - sigma * p.c));
}

Iterate iterate_from_z(const SdpProblem& p, const SymMatrix& z, double sigma) {
  Iterate it;
  it.sigma = sigma;
  it.x = psd_project(z);
  it.s = psd_project(-z) / sigma;
  it.y = recover_y(p, it.s);
  return it;
}

TrajectoryRecord run(const SdpProblem& p, const SigmaSchedule& schedule, const Iterate& start,
                     const RunOptions& opt) {
  TrajectoryRecord rec;
  Iterate cur = start;
  cur.sigma = schedule.next(0, start.sigma, nullptr);
  SymMatrix prev_dz;
  const KktResiduals* last = nullptr;
  KktResiduals last_res;
  rec.rows.reserve(static_cast<size_t>(std::max<long>(opt.max_iters, 0)));
  for (long k = 0; k < opt.max_iters; ++k) {
    cur.sigma = schedule.next(k, cur.sigma, last);
    Iterate nxt;
    SymMatrix znew;
    if (opt.solver == Solver::three_step) {
      nxt = three_step_admm_step(p, cur);
      znew = z_of(nxt);
    } else {
      // The DRS state is Z; re-anchor it to the current sigma first.
      const SymMatrix zc = z_of(cur);
      znew = one_step_drs_step(p, zc, cur.sigma);
      nxt.sigma = cur.sigma;
      nxt.x = psd_project(znew);
      nxt.s = psd_project(-znew) / cur.sigma;
      nxt.y = solve_gram(p, p.b / cur.sigma - apply_A(p, cur.x / cur.sigma + cur.s - p.c));
    }
    if (!znew.allFinite()) throw DivergenceError(k + 1, "non-finite iterate");
    const SymMatrix zold = z_of(cur);
    TrajectoryRow row;
    row.iter = k + 1;
    row.res = kkt_residuals(p, nxt);
    const SymMatrix dz = znew - zold;
    row.dz = dz.norm();
    row.dx = (nxt.x - cur.x).norm();
    row.ds = (nxt.s - cur.s).norm();
    row.sigma = cur.sigma;
    if (prev_dz.size() > 0) {
      const double floor = 1e-14 * (1.0 + znew.norm());
      if (prev_dz.norm() >= floor && row.dz >= floor) row.angle = angle_between(prev_dz, dz);
    }
    rec.rows.push_back(row);
    prev_dz = dz;
    last_res = row.res;
    last = &last_res;
    cur = nxt;
    if (row.res.r_max <= opt.tol_rmax) {
      rec.converged = true;
      break;
    }
  }
  rec.last = cur;
  return rec;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + mid));
  return m;
}

}  // namespace

StallWindow find_stall_window(const TrajectoryRecord& rec, double rel_change, size_t min_len) {
  StallWindow w;
  const auto& r = rec.rows;
  size_t best_b = 0, best_e = 0, b = 0;
  for (size_t i = 1; i <= r.size(); ++i) {
    const bool flat = i < r.size() && r[i - 1].dz > 0 &&
                      std::abs(r[i].dz / r[i - 1].dz - 1.0) <= rel_change;
    if (!flat) {
      if (i - b > best_e - best_b) {
        best_b = b;
        best_e = i;
      }
      b = i;
    }
  }
  if (best_e - best_b < min_len) return w;
  w.found = true;
  w.begin = best_b;
  w.end = best_e;
  std::vector<double> dz, ang;
  for (size_t i = best_b; i < best_e; ++i) {
    dz.push_back(r[i].dz);
    if (r[i].angle) ang.push_back(*r[i].angle);
  }
  w.median_dz = median(dz);
  w.median_angle = median(ang);
  return w;
}

std::optional<size_t> first_spike(const TrajectoryRecord& rec, size_t window, double factor) {
  std::vector<double> trail;
  for (size_t i = 0; i < rec.rows.size(); ++i) {
    const auto& a = rec.rows[i].angle;
    if (!a) continue;
    if (trail.size() >= window) {
      const double med = median(std::vector<double>(trail.end() - window, trail.end()));
      if (*a > factor * med) return i;
    }
    trail.push_back(*a);
  }
  return std::nullopt;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DimensionError("fit_slope: need two or more points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0) throw DegenerateInput("fit_slope: constant abscissa");
  return sxy / sxx;
}

}  // namespace ld
