// Copyright 2026 The rbmest authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rbmest/solver.hpp"

#include <cmath>
#include <limits>

#include "rbmest/matrix.hpp"

namespace rbm {

namespace {

double norm_l1(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::fabs(x);
  return s;
}

std::vector<double> starting_point(const EstimatingModel& m, const SolverConfig& cfg) {
  if (!cfg.start.empty()) {
    if (static_cast<int>(cfg.start.size()) != m.p)
      throw DimensionMismatch("start length != model parameter dim");
    return cfg.start;
  }
  if (!m.start.empty()) {
    if (static_cast<int>(m.start.size()) != m.p)
      throw DimensionMismatch("model start length != parameter dim");
    return m.start;
  }
  return std::vector<double>(m.p, 0.0);
}

struct SystemEval {
  std::vector<double> r;  // residual vector (psi, or psi + A)
  double norm = std::numeric_limits<double>::infinity();
  DenseMatrix j;
};

// Shared quasi-Newton loop. `eval(theta, need_j)` returns the residual and,
// when asked, j at theta. Evaluation errors at trial points count as an
// infinite residual (one more halving); an error at the incoming iterate
// propagates.
template <typename Eval>
FitResult newton_loop(const EstimatingModel& m, const SolverConfig& cfg, Eval&& eval) {
  FitResult res;
  std::vector<double> theta = starting_point(m, cfg);
  SystemEval cur = eval(theta);
  if (cfg.keep_trace) res.trace.push_back({theta, cur.norm, 0.0});

  // Step-halving search along delta; returns true (and advances theta / cur /
  // the trace) once the residual strictly decreases.
  auto try_direction = [&](const std::vector<double>& delta, int it) {
    double a = 1.0;
    std::vector<double> cand(m.p);
    for (int halvings = 0; halvings <= cfg.max_halvings; ++halvings) {
      for (int s = 0; s < m.p; ++s) cand[s] = theta[s] + a * delta[s];
      SystemEval trial;
      bool failed = false;
      try {
        trial = eval(cand);
      } catch (const Error&) {
        failed = true;
      }
      if (!failed && trial.norm < cur.norm) {
        theta = cand;
        cur = std::move(trial);
        res.iterations = it;
        if (cfg.keep_trace) res.trace.push_back({theta, cur.norm, a});
        return true;
      }
      a *= 0.5;
    }
    return false;
  };

  // Negative central-difference Jacobian of the residual system itself, the
  // fallback direction source when the j-approximate step stalls (for the
  // adjusted system, j ignores the adjustment's own curvature).
  auto fd_direction = [&]() {
    static const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
    DenseMatrix jfd(m.p, m.p);
    std::vector<double> shifted = theta;
    for (int t = 0; t < m.p; ++t) {
      double h = h0 * std::max(1.0, std::fabs(theta[t]));
      volatile double tmp = theta[t] + h;
      h = tmp - theta[t];
      shifted[t] = theta[t] + h;
      const SystemEval up = eval(shifted);
      shifted[t] = theta[t] - h;
      const SystemEval dn = eval(shifted);
      shifted[t] = theta[t];
      for (int s = 0; s < m.p; ++s) jfd(s, t) = -(up.r[s] - dn.r[s]) / (2.0 * h);
    }
    return solve(lu_factor(jfd), cur.r);
  };

  // Once the j-approximate direction stalls it tends to keep stalling (the
  // fixed-point rate depends on the curvature j ignores, not on the iterate),
  // so the switch to differenced directions is permanent for the solve.
  bool use_fd = false;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    if (cfg.rule == StoppingRule::ResidualL1 && cur.norm < cfg.epsilon) {
      res.converged = true;
      break;
    }
    std::vector<double> delta;
    if (use_fd) {
      try {
        delta = fd_direction();
      } catch (const Error&) {
        break;
      }
    } else {
      delta = solve(lu_factor(cur.j), cur.r);
    }
    if (cfg.rule == StoppingRule::StepL1 && norm_l1(delta) < cfg.epsilon) {
      for (int s = 0; s < m.p; ++s) theta[s] += delta[s];
      cur = eval(theta);
      res.iterations = it;
      if (cfg.keep_trace) res.trace.push_back({theta, cur.norm, 1.0});
      res.converged = true;
      break;
    }

    bool accepted = try_direction(delta, it);
    if (!accepted && !use_fd) {
      use_fd = true;
      try {
        accepted = try_direction(fd_direction(), it);
      } catch (const Error&) {
        // a failed derivative probe or singular FD Jacobian ends the search
      }
    }
    if (!accepted) break;  // stalled: report the best point with converged=false
  }

  // Residual rule: the loop above may exit via break with convergence checked
  // at the top; re-check for the max_iter fall-through.
  if (cfg.rule == StoppingRule::ResidualL1 && cur.norm < cfg.epsilon) res.converged = true;
  res.theta = std::move(theta);
  res.residual = cur.norm;
  return res;
}

}  // namespace

FitResult solve_m(const EstimatingModel& m, const SolverConfig& cfg) {
  auto eval = [&m](const std::vector<double>& th) {
    AdjustmentMatrices mats = assemble(m, th, false);
    SystemEval ev;
    ev.r = std::move(mats.psi);
    ev.j = std::move(mats.j);
    ev.norm = norm_l1(ev.r);
    return ev;
  };
  return newton_loop(m, cfg, eval);
}

FitResult solve_rbm(const EstimatingModel& m, const SolverConfig& cfg) {
  SolverConfig inner = cfg;
  if (cfg.start.empty() && cfg.start_from_m) {
    SolverConfig mcfg = cfg;
    mcfg.keep_trace = false;
    try {
      const FitResult mfit = solve_m(m, mcfg);
      if (mfit.converged) inner.start = mfit.theta;
    } catch (const Error&) {
      // fall through to the model's own start
    }
  }
  AdjustedSystem sys(m);
  auto eval = [&sys](const std::vector<double>& th) {
    const AdjustedSystem::State& st = sys.at(th);
    SystemEval ev;
    ev.r = st.adjusted_psi;
    ev.j = st.mats.j;
    ev.norm = norm_l1(ev.r);
    return ev;
  };
  return newton_loop(m, inner, eval);
}

FitResult maximize_penalized(const EstimatingModel& m, const SolverConfig& cfg,
                             PenaltyVariant variant) {
  if (m.flavor != ModelFlavor::ObjectiveGradient)
    throw FlavorMismatch("maximize_penalized needs an ObjectiveGradient model");

  SolverConfig inner = cfg;
  if (cfg.start.empty() && cfg.start_from_m) {
    SolverConfig mcfg = cfg;
    mcfg.keep_trace = false;
    try {
      const FitResult mfit = solve_m(m, mcfg);
      if (mfit.converged) inner.start = mfit.theta;
    } catch (const Error&) {
      // fall through to the model's own start
    }
  }

  // For gradient fields the penalty gradients are exact in terms of the
  // second-order blocks: third derivatives of the objective enter only
  // through u_r, and d(j)/d theta_r = -u_r by symmetry. The half-trace
  // penalty gradient coincides with the empirical adjustment, so its
  // stationary points are exactly the adjusted-system roots.
  auto eval = [&m, variant](const std::vector<double>& th) {
    AdjustmentMatrices mats = assemble(m, th, true);
    SystemEval ev;
    ev.r = mats.psi;
    if (variant == PenaltyVariant::HalfTrace) {
      const std::vector<double> adj = empirical_adjustment(mats);
      for (int s = 0; s < static_cast<int>(ev.r.size()); ++s) ev.r[s] += adj[s];
    } else {
      // d/d theta_r { 1/2 log|det j| - 1/2 log|det e| }
      //   = -1/2 tr(j^-1 u_r) - tr(e^-1 d_r).
      const LuFactorization lj = lu_factor(mats.j);
      const LuFactorization le = lu_factor(mats.e);
      for (int r = 0; r < static_cast<int>(ev.r.size()); ++r)
        ev.r[r] += -0.5 * trace(solve(lj, mats.u[r])) - trace(solve(le, mats.d[r]));
    }
    ev.j = std::move(mats.j);
    ev.norm = norm_l1(ev.r);
    return ev;
  };
  return newton_loop(m, inner, eval);
}

}  // namespace rbm
