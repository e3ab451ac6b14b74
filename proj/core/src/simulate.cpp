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

#include "rbmest/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <span>
#include <thread>

#include <json.hpp>

#include "rbmest/errors.hpp"
#include "rbmest/glm.hpp"
#include "rbmest/inference.hpp"
#include "rbmest/solver.hpp"
#include "rbmest/special.hpp"

namespace rbm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct EstimatorRecord {
  bool ok = false;
  std::vector<double> est;
  std::vector<double> vdiag;
};

struct DesignInfo {
  std::vector<std::string> default_estimators;
  std::vector<std::string> coord_names;
  std::vector<double> truth;
};

DesignInfo design_info(DesignKind kind) {
  switch (kind) {
    case DesignKind::RatioCopula:
      return {{"m", "rbm", "onestep", "jackknife"}, {"theta"}, {5.0}};
    case DesignKind::ProbitStudy:
      return {{"ml", "rbm"},
              {"beta1", "beta2", "beta3", "beta4", "beta5"},
              {-0.5, 0.0, 0.0, 0.5, 0.5}};
    case DesignKind::NegBinQuasi:
      return {{"quasi", "rbm"}, {"beta0", "beta1", "beta2", "phi"}, {2.0, 1.0, -1.0, 6.0}};
  }
  throw InadmissibleSpec("unknown design kind");
}

void validate_design(SimDesign& d, const DesignInfo& info) {
  if (d.sample_sizes.empty()) throw InadmissibleSpec("the design needs at least one sample size");
  for (size_t i = 0; i < d.sample_sizes.size(); ++i) {
    if (d.sample_sizes[i] < 1) throw InadmissibleSpec("sample sizes must be at least 1");
    if (i > 0 && d.sample_sizes[i] <= d.sample_sizes[i - 1])
      throw InadmissibleSpec("sample sizes must be strictly increasing");
  }
  if (d.replications < 1) throw InadmissibleSpec("the replication count must be at least 1");
  if (d.estimators.empty()) d.estimators = info.default_estimators;
  for (const std::string& e : d.estimators)
    if (std::find(info.default_estimators.begin(), info.default_estimators.end(), e) ==
        info.default_estimators.end())
      throw InadmissibleSpec("estimator '" + e + "' is not defined for this design");
  if (d.threads < 1) d.threads = 1;
}

std::vector<double> sandwich_diag(const EstimatingModel& model, const std::vector<double>& theta) {
  const VarianceEstimate v = sandwich(assemble(model, theta, false));
  std::vector<double> diag(theta.size());
  for (size_t s = 0; s < theta.size(); ++s)
    diag[s] = v.vhat(static_cast<int>(s), static_cast<int>(s));
  return diag;
}

void run_ratio_rep(const SimDesign& d, const StudyHooks* hooks, int n, Philox4x32& rng,
                   std::span<EstimatorRecord> out) {
  const RatioData data = hooks && hooks->ratio_generator ? hooks->ratio_generator(n, rng)
                                                         : gen_ratio_copula(n, rng);
  for (size_t k = 0; k < d.estimators.size(); ++k) {
    try {
      const std::string& name = d.estimators[k];
      double theta;
      if (name == "m") theta = ratio_m_estimate(data);
      else if (name == "rbm") theta = ratio_rbm_estimate(data);
      else if (name == "onestep") theta = ratio_one_step(data);
      else theta = ratio_jackknife(data);
      out[k].est = {theta};
      out[k].vdiag = {ratio_sandwich(data, theta)};
      out[k].ok = true;
    } catch (const Error&) {
      out[k].ok = false;
    }
  }
}

// Shared by the probit and the negative-binomial designs: the unadjusted fit
// feeds the reduced-bias fit its starting point.
void run_newton_rep(const SimDesign& d, const EstimatingModel& model, const char* plain_name,
                    std::span<EstimatorRecord> out, const std::vector<double>& start = {}) {
  FitResult fm;
  bool have_m = false;
  try {
    SolverConfig mcfg;
    mcfg.keep_trace = false;
    if (!start.empty()) mcfg.start = start;
    fm = solve_m(model, mcfg);
    have_m = true;
  } catch (const Error&) {
  }
  for (size_t k = 0; k < d.estimators.size(); ++k) {
    try {
      if (d.estimators[k] == plain_name) {
        if (!(have_m && fm.converged)) continue;  // ok stays false
        out[k].est = fm.theta;
        out[k].vdiag = sandwich_diag(model, fm.theta);
        out[k].ok = true;
      } else {  // rbm
        SolverConfig cfg;
        cfg.keep_trace = false;
        if (have_m && fm.converged) {
          cfg.start = fm.theta;
          cfg.start_from_m = false;
        } else if (!start.empty()) {
          cfg.start = start;
          cfg.start_from_m = false;
        }
        const FitResult fr = solve_rbm(model, cfg);
        if (!fr.converged) continue;
        out[k].est = fr.theta;
        out[k].vdiag = sandwich_diag(model, fr.theta);
        out[k].ok = true;
      }
    } catch (const Error&) {
      out[k].ok = false;
    }
  }
}

void run_probit_rep(const SimDesign& d, const DenseMatrix& x, const std::vector<double>& mu,
                    Philox4x32& rng, std::span<EstimatorRecord> out) {
  GlmSpec spec;
  spec.family = Family::Binomial;
  spec.link = Link::Probit;
  spec.x = x;
  spec.y.resize(mu.size());
  for (size_t i = 0; i < mu.size(); ++i) spec.y[i] = rng.uniform() < mu[i] ? 1.0 : 0.0;
  run_newton_rep(d, glm_model(spec), "ml", out);
}

void run_negbin_rep(const SimDesign& d, const DenseMatrix& x, Philox4x32& rng,
                    std::span<EstimatorRecord> out) {
  QuasiSpec spec;
  spec.link = Link::Log;
  spec.varfun = d.negbin_varfun;
  spec.x = x;
  spec.y = gen_negbin(x, {2.0, 1.0, -1.0}, 6.0, rng);

  // The joint system's own starting heuristic is poor under heavy
  // overdispersion. The moment-mode beta root with the divisor-n Pearson phi
  // solves the plain joint system exactly, so prefit that and start there.
  std::vector<double> start;
  try {
    SolverConfig mcfg;
    mcfg.keep_trace = false;
    const FitResult pre = solve_m(quasi_model(spec), mcfg);
    if (pre.converged) {
      start = pre.theta;
      start.push_back(quasi_phi_moment(spec, pre.theta, x.rows()));
    }
  } catch (const Error&) {
  }
  spec.mode = QuasiMode::AdjustedJointPhi;
  run_newton_rep(d, quasi_model(spec), "quasi", out, start);
}

double sample_sd(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return kNaN;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (static_cast<double>(v.size()) - 1.0));
}

CellStats aggregate_cell(const std::vector<std::vector<EstimatorRecord>>& slots, size_t k,
                         const std::vector<double>& truth) {
  const size_t p = truth.size();
  CellStats c;
  c.replications = static_cast<long long>(slots.size());
  for (auto* field : {&c.bias, &c.mse, &c.mae, &c.pu, &c.variance, &c.mean_vhat, &c.bias_se,
                      &c.mse_se, &c.mae_se, &c.pu_se})
    field->assign(p, kNaN);

  std::vector<const EstimatorRecord*> good;
  good.reserve(slots.size());
  for (const auto& recs : slots)
    if (recs[k].ok) good.push_back(&recs[k]);
  c.failures = c.replications - static_cast<long long>(good.size());
  if (good.empty()) return c;
  const double M = static_cast<double>(good.size());

  std::vector<double> err(good.size()), sq(good.size()), ab(good.size()), under(good.size());
  for (size_t j = 0; j < p; ++j) {
    double vsum = 0.0;
    for (size_t r = 0; r < good.size(); ++r) {
      const double e = good[r]->est[j] - truth[j];
      err[r] = e;
      sq[r] = e * e;
      ab[r] = std::fabs(e);
      under[r] = e < 0.0 ? 1.0 : (e == 0.0 ? 0.5 : 0.0);
      vsum += good[r]->vdiag[j];
    }
    double bias = 0.0, mse = 0.0, mae = 0.0, pu = 0.0;
    for (size_t r = 0; r < good.size(); ++r) {
      bias += err[r];
      mse += sq[r];
      mae += ab[r];
      pu += under[r];
    }
    bias /= M; mse /= M; mae /= M; pu /= M;
    c.bias[j] = bias;
    c.mse[j] = mse;
    c.mae[j] = mae;
    c.pu[j] = pu;
    c.mean_vhat[j] = vsum / M;
    const double sd = sample_sd(err, bias);
    c.variance[j] = sd * sd;
    c.bias_se[j] = sd / std::sqrt(M);
    c.mse_se[j] = sample_sd(sq, mse) / std::sqrt(M);
    c.mae_se[j] = sample_sd(ab, mae) / std::sqrt(M);
    c.pu_se[j] = sample_sd(under, pu) / std::sqrt(M);
  }
  return c;
}

const char* kind_name(DesignKind k) {
  switch (k) {
    case DesignKind::RatioCopula: return "ratio_copula";
    case DesignKind::ProbitStudy: return "probit_study";
    case DesignKind::NegBinQuasi: return "negbin_quasi";
  }
  return "?";
}

const char* rule_name(ReplicationRule r) {
  switch (r) {
    case ReplicationRule::Fixed: return "fixed";
    case ReplicationRule::InverseN: return "inverse_n";
    case ReplicationRule::Doubling: return "doubling";
  }
  return "?";
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

long long replications_at(const SimDesign& design, int n_index) {
  switch (design.rule) {
    case ReplicationRule::Fixed:
      return design.replications;
    case ReplicationRule::InverseN:
      return std::max<long long>(1, design.replications /
                                        design.sample_sizes[static_cast<size_t>(n_index)]);
    case ReplicationRule::Doubling:
      return design.replications << n_index;
  }
  throw InadmissibleSpec("unknown replication rule");
}

RatioData gen_ratio_copula(int n, Philox4x32& rng, double rho) {
  if (n < 1) throw InadmissibleSpec("n must be at least 1");
  if (!(rho > -1.0 && rho < 1.0)) throw DomainError("copula correlation must be in (-1, 1)");
  const double c = std::sqrt(1.0 - rho * rho);
  RatioData d;
  d.x.resize(static_cast<size_t>(n));
  d.y.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double z1 = rng.normal();
    const double z2 = rho * z1 + c * rng.normal();
    d.x[static_cast<size_t>(i)] = -2.0 * std::log(normal_cdf(-z1));
    d.y[static_cast<size_t>(i)] = 10.0 + z2;
  }
  return d;
}

DenseMatrix gen_probit_design(int n, Philox4x32& rng) {
  if (n < 1) throw InadmissibleSpec("n must be at least 1");
  DenseMatrix x(n, 5);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = rng.normal();
    x(i, 2) = rng.uniform() < 0.25 ? 1.0 : 0.0;
    x(i, 3) = rng.uniform() < 0.75 ? 1.0 : 0.0;
    x(i, 4) = rng.exponential(1.0);
  }
  return x;
}

std::vector<double> gen_probit_response(const DenseMatrix& x, const std::vector<double>& beta,
                                        Philox4x32& rng) {
  if (static_cast<int>(beta.size()) != x.cols())
    throw DimensionMismatch("beta length does not match the design columns");
  std::vector<double> y(static_cast<size_t>(x.rows()));
  for (int i = 0; i < x.rows(); ++i) {
    double eta = 0.0;
    for (int s = 0; s < x.cols(); ++s) eta += x(i, s) * beta[static_cast<size_t>(s)];
    y[static_cast<size_t>(i)] = rng.uniform() < normal_cdf(eta) ? 1.0 : 0.0;
  }
  return y;
}

DenseMatrix gen_negbin_design(int n, Philox4x32& rng) {
  if (n < 1) throw InadmissibleSpec("n must be at least 1");
  DenseMatrix x(n, 3);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = rng.uniform() < 0.5 ? 1.0 : 0.0;
    x(i, 2) = rng.exponential(2.0);
  }
  return x;
}

std::vector<double> gen_negbin(const DenseMatrix& x, const std::vector<double>& beta,
                               double phi, Philox4x32& rng) {
  if (!(phi > 1.0)) throw DomainError("the gamma-Poisson construction needs phi > 1");
  if (static_cast<int>(beta.size()) != x.cols())
    throw DimensionMismatch("beta length does not match the design columns");
  std::vector<double> y(static_cast<size_t>(x.rows()));
  for (int i = 0; i < x.rows(); ++i) {
    double eta = 0.0;
    for (int s = 0; s < x.cols(); ++s) eta += x(i, s) * beta[static_cast<size_t>(s)];
    const double mu = std::exp(eta);
    const double lambda = rng.gamma(mu / (phi - 1.0), phi - 1.0);
    y[static_cast<size_t>(i)] = static_cast<double>(rng.poisson(lambda));
  }
  return y;
}

SimSummary run_study(const SimDesign& design, const StudyHooks* hooks) {
  SimDesign d = design;
  const DesignInfo info = design_info(d.kind);
  validate_design(d, info);
  const size_t ne = d.estimators.size();
  const size_t nn = d.sample_sizes.size();

  SimSummary out;
  out.kind = d.kind;
  out.seed = d.seed;
  out.rule = d.rule;
  out.replications = d.replications;
  out.sample_sizes = d.sample_sizes;
  out.estimators = d.estimators;
  out.coord_names = info.coord_names;
  out.truth = info.truth;
  out.cells.assign(ne, std::vector<CellStats>(nn));

  for (size_t ni = 0; ni < nn; ++ni) {
    const int n = d.sample_sizes[ni];
    const long long reps = replications_at(d, static_cast<int>(ni));

    DenseMatrix px;
    std::vector<double> pmu;
    if (d.kind == DesignKind::ProbitStudy) {
      Philox4x32 drng(d.seed, (1ULL << 63) + ni);
      px = gen_probit_design(n, drng);
      pmu.resize(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) {
        double eta = 0.0;
        for (int s = 0; s < px.cols(); ++s) eta += px(i, s) * info.truth[static_cast<size_t>(s)];
        pmu[static_cast<size_t>(i)] = normal_cdf(eta);
      }
    } else if (d.kind == DesignKind::NegBinQuasi) {
      // One covariate block drawn at the smallest sample size and tiled, so
      // the leverage structure is constant along the sample-size ladder.
      Philox4x32 drng(d.seed, 1ULL << 62);
      const int n0 = d.sample_sizes.front();
      const DenseMatrix base = gen_negbin_design(n0, drng);
      px = DenseMatrix(n, base.cols());
      for (int i = 0; i < n; ++i)
        for (int s = 0; s < base.cols(); ++s) px(i, s) = base(i % n0, s);
    }

    std::vector<std::vector<EstimatorRecord>> slots(
        static_cast<size_t>(reps), std::vector<EstimatorRecord>(ne));
    auto work = [&](long long lo, long long hi) {
      for (long long rep = lo; rep < hi; ++rep) {
        Philox4x32 rng(d.seed, (static_cast<std::uint64_t>(ni) << 32) |
                                   static_cast<std::uint64_t>(rep));
        std::span<EstimatorRecord> recs(slots[static_cast<size_t>(rep)]);
        try {
          switch (d.kind) {
            case DesignKind::RatioCopula: run_ratio_rep(d, hooks, n, rng, recs); break;
            case DesignKind::ProbitStudy: run_probit_rep(d, px, pmu, rng, recs); break;
            case DesignKind::NegBinQuasi: run_negbin_rep(d, px, rng, recs); break;
          }
        } catch (...) {
          for (auto& r : recs) r.ok = false;
        }
      }
    };

    const long long workers = std::min<long long>(d.threads, reps);
    if (workers <= 1) {
      work(0, reps);
    } else {
      std::vector<std::thread> pool;
      const long long chunk = (reps + workers - 1) / workers;
      for (long long w = 0; w < workers; ++w)
        pool.emplace_back(work, w * chunk, std::min(reps, (w + 1) * chunk));
      for (auto& t : pool) t.join();
    }

    for (size_t k = 0; k < ne; ++k) out.cells[k][ni] = aggregate_cell(slots, k, info.truth);
    if (hooks && hooks->progress) hooks->progress(n, reps);
  }

  out.slopes.assign(ne, std::vector<double>(info.truth.size(), kNaN));
  for (size_t k = 0; k < ne; ++k)
    for (size_t j = 0; j < info.truth.size(); ++j) {
      std::vector<double> lx, ly;
      for (size_t ni = 0; ni < nn; ++ni) {
        const double b = out.cells[k][ni].bias[j];
        if (std::isfinite(b) && b != 0.0) {
          lx.push_back(std::log(static_cast<double>(d.sample_sizes[ni])));
          ly.push_back(std::log(std::fabs(b)));
        }
      }
      if (lx.size() < 2) continue;
      double mx = 0.0, my = 0.0;
      for (size_t r = 0; r < lx.size(); ++r) {
        mx += lx[r];
        my += ly[r];
      }
      mx /= static_cast<double>(lx.size());
      my /= static_cast<double>(lx.size());
      double sxy = 0.0, sxx = 0.0;
      for (size_t r = 0; r < lx.size(); ++r) {
        sxy += (lx[r] - mx) * (ly[r] - my);
        sxx += (lx[r] - mx) * (lx[r] - mx);
      }
      if (sxx > 0.0) out.slopes[k][j] = sxy / sxx;
    }
  return out;
}

std::string summary_to_json(const SimSummary& s) {
  nlohmann::ordered_json j;
  j["design"]["kind"] = kind_name(s.kind);
  j["design"]["seed"] = s.seed;
  j["design"]["sample_sizes"] = s.sample_sizes;
  j["design"]["replications"] = {{"rule", rule_name(s.rule)}, {"value", s.replications}};
  j["design"]["estimators"] = s.estimators;
  j["truth"]["names"] = s.coord_names;
  j["truth"]["values"] = s.truth;
  j["results"] = nlohmann::ordered_json::array();
  for (size_t k = 0; k < s.estimators.size(); ++k) {
    nlohmann::ordered_json rk;
    rk["estimator"] = s.estimators[k];
    rk["cells"] = nlohmann::ordered_json::array();
    for (size_t ni = 0; ni < s.sample_sizes.size(); ++ni) {
      const CellStats& c = s.cells[k][ni];
      nlohmann::ordered_json cj;
      cj["n"] = s.sample_sizes[ni];
      cj["replications"] = c.replications;
      cj["failures"] = c.failures;
      cj["bias"] = c.bias;
      cj["bias_mcse"] = c.bias_se;
      cj["mse"] = c.mse;
      cj["mse_mcse"] = c.mse_se;
      cj["mae"] = c.mae;
      cj["mae_mcse"] = c.mae_se;
      cj["pu"] = c.pu;
      cj["pu_mcse"] = c.pu_se;
      cj["variance"] = c.variance;
      cj["mean_vhat"] = c.mean_vhat;
      rk["cells"].push_back(std::move(cj));
    }
    rk["slope_log_abs_bias"] = s.slopes[k];
    j["results"].push_back(std::move(rk));
  }
  return j.dump(2) + "\n";
}

std::string summary_to_csv(const SimSummary& s) {
  std::string csv = "metric,estimator,coordinate";
  for (int n : s.sample_sizes) csv += ",n=" + std::to_string(n);
  csv += ",slope\n";

  const auto field = [&](const char* name,
                         std::vector<double> CellStats::*member) {
    for (size_t k = 0; k < s.estimators.size(); ++k)
      for (size_t j = 0; j < s.coord_names.size(); ++j) {
        csv += name;
        csv += "," + s.estimators[k] + "," + s.coord_names[j];
        for (size_t ni = 0; ni < s.sample_sizes.size(); ++ni)
          csv += "," + format_number((s.cells[k][ni].*member)[j]);
        if (std::string(name) == "bias") csv += "," + format_number(s.slopes[k][j]);
        else csv += ",";
        csv += "\n";
      }
  };
  field("bias", &CellStats::bias);
  field("bias_mcse", &CellStats::bias_se);
  field("mse", &CellStats::mse);
  field("mse_mcse", &CellStats::mse_se);
  field("mae", &CellStats::mae);
  field("mae_mcse", &CellStats::mae_se);
  field("pu", &CellStats::pu);
  field("pu_mcse", &CellStats::pu_se);
  field("variance", &CellStats::variance);
  field("mean_vhat", &CellStats::mean_vhat);
  for (size_t k = 0; k < s.estimators.size(); ++k) {
    csv += "failure_rate," + s.estimators[k] + ",all";
    for (size_t ni = 0; ni < s.sample_sizes.size(); ++ni) {
      const CellStats& c = s.cells[k][ni];
      csv += "," + format_number(c.replications > 0
                                     ? static_cast<double>(c.failures) /
                                           static_cast<double>(c.replications)
                                     : kNaN);
    }
    csv += ",\n";
  }
  return csv;
}

}  // namespace rbm
