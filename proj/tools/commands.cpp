#include "commands.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "limitdyn/admm.hpp"
#include "limitdyn/errors.hpp"
#include "limitdyn/examples.hpp"
#include "limitdyn/limitdyn.hpp"

namespace cli {

using json = nlohmann::json;
using namespace ld;

namespace {

std::string g17(double v) {
  if (std::isnan(v)) return "NaN";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json mat_json(const Mat& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

json nan_or(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

std::vector<std::vector<double>> parse_param_sets(const std::string& s) {
  std::vector<std::vector<double>> out;
  std::stringstream all(s);
  std::string set;
  while (std::getline(all, set, ';')) {
    std::vector<double> v;
    std::stringstream ss(set);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw AssumptionError("bad --h-params value '" + tok + "'");
      }
    }
    if (!v.empty()) out.push_back(v);
  }
  return out;
}

ToyOracle require_toy(const Options& o, const char* cmd) {
  if (o.toy == 0) throw AssumptionError(std::string(cmd) + " needs --toy");
  return toy_by_id(o.toy);
}

SdpProblem load_problem(const Options& o) {
  if (o.toy != 0 && !o.instance.empty()) throw AssumptionError("give either --toy or --instance, not both");
  if (o.toy == 0 && o.instance.empty()) throw AssumptionError("give --toy or --instance");
  SdpProblem p = o.toy ? toy_by_id(o.toy).problem : load_sdpa(o.instance);
  return o.rescale ? rescale_rows(p) : p;
}

SigmaSchedule parse_schedule(const std::string& s, double sigma0) {
  if (!(sigma0 > 0)) throw AssumptionError("--sigma0 must be positive");
  SigmaSchedule sch;
  sch.sigma0 = sigma0;
  if (s == "fixed") {
    sch.mode = SigmaSchedule::Mode::fixed;
  } else if (s == "balance") {
    sch.mode = SigmaSchedule::Mode::balance;
  } else if (s.rfind("sweep", 0) == 0) {
    sch.mode = SigmaSchedule::Mode::sweep;
    sch.sweep_end = 10 * sigma0;
    sch.sweep_iters = 1000;
    if (s.size() > 5) {
      double end = 0;
      long iters = 0;
      char tail = 0;
      if (std::sscanf(s.c_str(), "sweep:%lf:%ld%c", &end, &iters, &tail) != 2 || !(end > 0) || iters <= 0)
        throw AssumptionError("--sigma-schedule sweep expects sweep:END:ITERS");
      sch.sweep_end = end;
      sch.sweep_iters = iters;
    }
  } else {
    throw AssumptionError("unknown --sigma-schedule '" + s + "'");
  }
  return sch;
}

Solver parse_solver(const std::string& s) {
  if (s == "three-step") return Solver::three_step;
  if (s == "one-step") return Solver::one_step;
  throw AssumptionError("unknown --solver '" + s + "'");
}

std::string with_suffix(const std::string& path, size_t k, size_t count) {
  if (path.empty() || count <= 1) return path;
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  const std::string tag = "_" + std::to_string(k + 1);
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + tag;
  return path.substr(0, dot) + tag + path.substr(dot);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  return f;
}

void emit_json(const std::string& path, const json& j) {
  if (path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  auto f = open_out(path);
  f << j.dump(2) << "\n";
  if (!f) throw IoError("write failed: " + path);
}

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec) {
  auto f = open_out(path);
  f << "iter,r_p,r_d,r_g,r_max,dZ,dX,dS,angle,sigma\n";
  for (const auto& r : rec.rows) {
    f << r.iter << ',' << g17(r.res.r_p) << ',' << g17(r.res.r_d) << ',' << g17(r.res.r_g) << ','
      << g17(r.res.r_max) << ',' << g17(r.dz) << ',' << g17(r.dx) << ',' << g17(r.ds) << ','
      << g17(r.angle ? *r.angle : std::numeric_limits<double>::quiet_NaN()) << ',' << g17(r.sigma)
      << '\n';
  }
  if (!f) throw IoError("write failed: " + path);
}

struct Start {
  Iterate it;
  std::optional<KktAnchor> anchor;
  std::optional<PsiTriple> psi;  // oracle psi of t * Hbar
};

// Zbar + t Hbar for toys, otherwise the zero iterate.
Start make_start(const Options& o, const SdpProblem& p, const std::vector<double>& params,
                 double t, double sigma) {
  Start s;
  if (o.toy == 0) {
    s.it.x = SymMatrix::Zero(p.n, p.n);
    s.it.s = SymMatrix::Zero(p.n, p.n);
    s.it.y = Vec::Zero(p.m);
    s.it.sigma = sigma;
    return s;
  }
  if (!(t > 0)) throw AssumptionError("--t must be positive");
  const ToyOracle toy = toy_by_id(o.toy);
  const std::vector<double> prm = params.empty() ? toy.default_params : params;
  s.anchor = toy.anchor(sigma);
  const SymMatrix hb = toy.h_bar(prm);
  const SymMatrix z0 = s.anchor->z_bar_caller() + t * hb;
  s.it = iterate_from_z(p, z0, sigma);
  PsiTriple ps = toy.oracle_psi(prm, sigma);
  ps.z *= t * t;
  ps.x *= t * t;
  ps.s *= t * t;
  s.psi = ps;
  return s;
}

template <class F>
void fan_out(size_t count, int jobs, F&& body) {
  std::vector<std::exception_ptr> errs(count);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs))
  for (long k = 0; k < static_cast<long>(count); ++k) {
    try {
      body(static_cast<size_t>(k));
    } catch (...) {
      errs[k] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace

int cmd_solve(const Options& o) {
  const SdpProblem p = load_problem(o);
  const SigmaSchedule sch = parse_schedule(o.schedule, o.sigma0);
  RunOptions ro;
  ro.max_iters = o.max_iters < 0 ? 20000 : o.max_iters;
  ro.tol_rmax = o.tol;
  ro.solver = parse_solver(o.solver);
  Iterate start{SymMatrix::Zero(p.n, p.n), Vec::Zero(p.m), SymMatrix::Zero(p.n, p.n), o.sigma0};
  const TrajectoryRecord rec = run(p, sch, start, ro);
  if (!o.out_csv.empty()) write_trajectory_csv(o.out_csv, rec);
  json j;
  j["iterations"] = rec.rows.size();
  j["converged"] = rec.converged;
  if (!rec.rows.empty()) {
    const auto& r = rec.rows.back().res;
    j["r_p"] = r.r_p;
    j["r_d"] = r.r_d;
    j["r_g"] = r.r_g;
    j["r_max"] = r.r_max;
  }
  j["objective"] = inner(p.c, rec.last.x);
  j["sigma"] = rec.last.sigma;
  j["x"] = mat_json(rec.last.x);
  j["y"] = std::vector<double>(rec.last.y.data(), rec.last.y.data() + rec.last.y.size());
  emit_json(o.out_json, j);
  return rec.converged ? 0 : 3;
}

int cmd_trajectory(const Options& o) {
  const SdpProblem p = load_problem(o);
  const SigmaSchedule sch = parse_schedule(o.schedule, o.sigma0);
  auto sets = parse_param_sets(o.h_params);
  if (sets.empty()) sets.push_back({});
  const double t = o.t < 0 ? 1e-4 : o.t;
  RunOptions ro;
  ro.max_iters = o.max_iters < 0 ? 1000 : o.max_iters;
  ro.tol_rmax = o.tol;
  ro.solver = parse_solver(o.solver);
  std::vector<json> reports(sets.size());
  fan_out(sets.size(), o.jobs, [&](size_t k) {
    const Start st = make_start(o, p, sets[k], t, o.sigma0);
    const TrajectoryRecord rec = run(p, sch, st.it, ro);
    if (!o.out_csv.empty()) write_trajectory_csv(with_suffix(o.out_csv, k, sets.size()), rec);
    json j;
    j["params"] = sets[k];
    j["t"] = t;
    j["iterations"] = rec.rows.size();
    j["converged"] = rec.converged;
    const StallWindow w = find_stall_window(rec);
    j["plateau_found"] = w.found;
    if (w.found) {
      j["plateau_begin"] = rec.rows[w.begin].iter;
      j["plateau_end"] = rec.rows[w.end - 1].iter;
      j["plateau_dZ"] = w.median_dz;
      j["plateau_median_angle"] = nan_or(w.median_angle);
    }
    if (st.psi) {
      const double pred = 0.5 * st.psi->z.norm();
      j["predicted_dZ"] = pred;
      if (w.found && pred > 0) j["plateau_ratio"] = w.median_dz / pred;
    }
    reports[k] = j;
  });
  emit_json(o.out_json, reports.size() == 1 ? reports[0] : json(reports));
  return 0;
}

int cmd_sigma_sweep(const Options& o) {
  const SdpProblem p = load_problem(o);
  const std::string sched = o.schedule == "fixed" ? "sweep" : o.schedule;
  const SigmaSchedule sch = parse_schedule(sched, o.sigma0);
  if (sch.mode != SigmaSchedule::Mode::sweep) throw AssumptionError("sigma-sweep needs a sweep schedule");
  auto sets = parse_param_sets(o.h_params);
  if (sets.empty()) sets.push_back({});
  const double t = o.t < 0 ? 1e-5 : o.t;
  RunOptions ro;
  ro.max_iters = o.max_iters < 0 ? sch.sweep_iters : o.max_iters;
  ro.tol_rmax = o.tol;
  ro.solver = parse_solver(o.solver);
  std::vector<json> reports(sets.size());
  fan_out(sets.size(), o.jobs, [&](size_t k) {
    const Start st = make_start(o, p, sets[k], t, o.sigma0);
    // burn-in at sigma0 so the sweep starts on the plateau, not in the start transient
    SigmaSchedule fixed;
    fixed.sigma0 = o.sigma0;
    RunOptions burn = ro;
    burn.max_iters = 200;
    const Iterate start = run(p, fixed, st.it, burn).last;
    const TrajectoryRecord rec = run(p, sch, start, ro);
    if (!o.out_csv.empty()) {
      auto f = open_out(with_suffix(o.out_csv, k, sets.size()));
      f << "sigma,dX,dS,r_p,r_d\n";
      for (const auto& r : rec.rows)
        f << g17(r.sigma) << ',' << g17(r.dx) << ',' << g17(r.ds) << ',' << g17(r.res.r_p) << ','
          << g17(r.res.r_d) << '\n';
      if (!f) throw IoError("write failed");
    }
    std::vector<double> ls, lx, lsd;
    double rp_min = INFINITY, rp_max = 0, rd_min = INFINITY, rd_max = 0;
    for (const auto& r : rec.rows) {
      if (r.dx <= 0 || r.ds <= 0) continue;
      ls.push_back(std::log10(r.sigma));
      lx.push_back(std::log10(r.dx));
      lsd.push_back(std::log10(r.ds));
      rp_min = std::min(rp_min, r.res.r_p);
      rp_max = std::max(rp_max, r.res.r_p);
      rd_min = std::min(rd_min, r.res.r_d);
      rd_max = std::max(rd_max, r.res.r_d);
    }
    json j;
    j["params"] = sets[k];
    j["t"] = t;
    j["iterations"] = rec.rows.size();
    if (ls.size() >= 2 && ls.front() != ls.back()) {
      j["slope_dX"] = fit_slope(ls, lx);
      j["slope_dS"] = fit_slope(ls, lsd);
      j["r_p_drift"] = (rp_max - rp_min) / rp_min;
      j["r_d_drift"] = (rd_max - rd_min) / rd_min;
    }
    reports[k] = j;
  });
  emit_json(o.out_json, reports.size() == 1 ? reports[0] : json(reports));
  return 0;
}

int cmd_limitmap(const Options& o) {
  const ToyOracle toy = require_toy(o, "limitmap");
  const KktAnchor a = toy.anchor(o.sigma0);
  auto sets = parse_param_sets(o.h_params);
  std::vector<double> prm = sets.empty() ? toy.default_params : sets[0];
  SymMatrix hb;
  json j;
  j["toy"] = toy.id;
  j["sigma"] = o.sigma0;
  if (!o.direction.empty()) {
    if (o.direction != "tangent" && o.direction != "cone") throw AssumptionError("--direction must be tangent or cone");
    unsigned long long seed = 12345;
    if (const char* env = std::getenv("LIMITDYN_SEED")) seed = std::strtoull(env, nullptr, 10);
    std::mt19937_64 rng(seed);
    hb = sample_cone_member(a, rng, o.direction == "tangent");
    j["seed"] = seed;
    j["direction"] = o.direction;
  } else {
    hb = toy.h_bar(prm);
    j["params"] = prm;
  }
  j["h_bar"] = mat_json(hb);
  const MembershipReport mr = cone_C_membership(a, hb);
  j["membership"] = {{"member", mr.member},
                     {"structural_ok", mr.structural_ok},
                     {"delta1_norm", mr.delta1_norm},
                     {"forbidden_block_norm", mr.forbidden_block_norm},
                     {"psd_violation", mr.psd_violation},
                     {"range_violation", mr.range_violation},
                     {"tangent", tangent_cone_membership(a, hb)}};
  if (!mr.member) {
    j["error"] = "direction is not in C(Zbar)";
    emit_json(o.out_json, j);
    return 2;
  }
  const LimitMapResult it = limit_map_iterative(a, hb);
  const LimitMapResult dc = limit_map_decoupled(a, hb);
  j["psi_z"] = mat_json(dc.psi_z);
  j["psi_x"] = mat_json(dc.psi_x);
  j["psi_s"] = mat_json(dc.psi_s);
  j["method_agreement"] = (it.psi_z - dc.psi_z).norm();
  j["iterative"] = {{"iterations", it.iterations_used}, {"converged", it.converged},
                    {"residual_estimate", it.residual_estimate}};
  j["decoupled"] = {{"iterations", dc.iterations_used}, {"converged", dc.converged}};
  j["two_homogeneity"] = {{"t=0.5", two_homogeneity_check(a, hb, 0.5)},
                          {"t=2", two_homogeneity_check(a, hb, 2.0)},
                          {"t=10", two_homogeneity_check(a, hb, 10.0)}};
  json scal = json::array();
  for (double r : {0.1, 0.5, 2.0, 10.0}) {
    const SigmaRescale sr = sigma_rescale(a, hb, r * a.sigma);
    const LimitMapResult nr = limit_map_decoupled(sr.anchor, sr.h_bar);
    const double ex = (nr.psi_x - sr.psi_x_pred).norm() / std::max(1e-300, sr.psi_x_pred.norm());
    const double es = (nr.psi_s - sr.psi_s_pred).norm() / std::max(1e-300, sr.psi_s_pred.norm());
    scal.push_back({{"ratio", r}, {"psi_x_rel_err", sr.psi_x_pred.norm() > 0 ? ex : nr.psi_x.norm()},
                    {"psi_s_rel_err", sr.psi_s_pred.norm() > 0 ? es : nr.psi_s.norm()}});
  }
  j["sigma_scaling"] = scal;
  if (o.direction.empty()) {
    const PsiTriple ref = toy.oracle_psi(prm, a.sigma);
    j["oracle_max_abs_err"] = (dc.psi_z - ref.z).cwiseAbs().maxCoeff();
    if (toy.id == 3) {
      std::vector<double> q = prm;
      q[1] = q[1] == 0.0 ? 1e-6 : 0.0;
      const LimitMapResult other = limit_map_decoupled(a, toy.h_bar(q));
      j["discontinuity"] = {{"other_eps", q[1]},
                            {"h_bar_gap", (toy.h_bar(q) - hb).norm()},
                            {"psi_gap", (other.psi_z - dc.psi_z).norm()}};
    }
  }
  const RangeReport rr = range_inclusion_check(a, hb, toy.primal_unique, toy.dual_unique);
  j["range_distance"] = rr.distance;
  emit_json(o.out_json, j);
  return it.converged && dc.converged ? 0 : 3;
}

int cmd_spike(const Options& o) {
  const int toy_id = o.toy == 0 ? 3 : o.toy;
  if (!o.instance.empty()) throw AssumptionError("spike runs on toy instances only");
  Options oo = o;
  oo.toy = toy_id;
  const SdpProblem p = load_problem(oo);
  auto sets = parse_param_sets(o.h_params);
  if (sets.empty()) sets.push_back({});
  const double t = o.t < 0 ? 1e-4 : o.t;
  const SigmaSchedule sch = parse_schedule(o.schedule, o.sigma0);
  RunOptions ro;
  ro.max_iters = o.max_iters < 0 ? 1000 : o.max_iters;
  ro.tol_rmax = o.tol;
  ro.solver = parse_solver(o.solver);
  std::vector<json> reports(sets.size());
  fan_out(sets.size(), o.jobs, [&](size_t k) {
    const Start st = make_start(oo, p, sets[k], t, o.sigma0);
    const TrajectoryRecord rec = run(p, sch, st.it, ro);
    const auto spike = first_spike(rec);
    if (!o.out_csv.empty()) {
      auto f = open_out(with_suffix(o.out_csv, k, sets.size()));
      f << "iter,angle,r_max,spike\n";
      for (size_t i = 0; i < rec.rows.size(); ++i) {
        const auto& r = rec.rows[i];
        f << r.iter << ',' << g17(r.angle ? *r.angle : std::numeric_limits<double>::quiet_NaN()) << ','
          << g17(r.res.r_max) << ',' << (spike && *spike == i ? 1 : 0) << '\n';
      }
      if (!f) throw IoError("write failed");
    }
    json j;
    j["params"] = sets[k].empty() ? toy_by_id(toy_id).default_params : sets[k];
    j["t"] = t;
    j["iterations"] = rec.rows.size();
    j["spike_iter"] = spike ? json(rec.rows[*spike].iter) : json(nullptr);
    reports[k] = j;
  });
  emit_json(o.out_json, reports.size() == 1 ? reports[0] : json(reports));
  return 0;
}

int cmd_toy(const Options& o) {
  const ToyOracle toy = require_toy(o, "toy");
  const std::string text = to_sdpa(toy.problem);
  if (o.out_json.empty()) {
    std::cout << text;
    return 0;
  }
  json j;
  j["name"] = toy.name;
  j["sdpa"] = text;
  j["x_bar"] = mat_json(toy.x_bar);
  j["s_bar"] = mat_json(toy.s_bar);
  j["param_names"] = toy.param_names;
  j["default_params"] = toy.default_params;
  const PsiTriple ps = toy.oracle_psi(toy.default_params, o.sigma0);
  j["oracle_psi_z"] = mat_json(ps.z);
  emit_json(o.out_json, j);
  return 0;
}

}  // namespace cli
