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

#include "rbmest/quasi.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "rbmest/errors.hpp"
#include "rbmest/special.hpp"

namespace rbm {

namespace {

inline double value_of(double x) { return x; }
inline double value_of(const Dual2& x) { return x.value(); }
inline double s_exp(double x) { return std::exp(x); }
inline Dual2 s_exp(Dual2 x) { return exp(std::move(x)); }
inline double s_inverse(double x) {
  if (x == 0.0) throw DomainError("inverse at 0");
  return 1.0 / x;
}
inline Dual2 s_inverse(Dual2 x) { return inverse(std::move(x)); }
inline double s_normal_cdf(double x) { return normal_cdf(x); }
inline Dual2 s_normal_cdf(Dual2 x) { return normal_cdf(std::move(x)); }
inline double s_normal_pdf(double x) { return normal_pdf(x); }
inline Dual2 s_normal_pdf(Dual2 x) { return normal_pdf(std::move(x)); }

struct QuasiInternal {
  QuasiSpec spec;
  std::vector<double> m;
  int pb = 0;
  int p = 0;
};

void validate_spec(const QuasiSpec& spec) {
  const int n = spec.x.rows();
  if (n < 1 || spec.x.cols() < 1) throw InadmissibleSpec("design matrix must be non-empty");
  if (static_cast<int>(spec.y.size()) != n)
    throw InadmissibleSpec("response length does not match the design rows");
  if (!spec.weights.empty() && static_cast<int>(spec.weights.size()) != n)
    throw InadmissibleSpec("weight length does not match the design rows");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < spec.x.cols(); ++j)
      if (!std::isfinite(spec.x(i, j))) throw InadmissibleSpec("design entries must be finite");
  for (double v : spec.y)
    if (!std::isfinite(v)) throw InadmissibleSpec("responses must be finite");
  for (double w : spec.weights)
    if (!(std::isfinite(w) && w > 0.0)) throw InadmissibleSpec("weights must be positive");
  if (spec.moment_r == 0 || spec.moment_r < -1)
    throw InadmissibleSpec("the Pearson divisor must be positive (or -1 for n - p)");
}

std::vector<double> resolve_weights(const QuasiSpec& spec) {
  const int n = spec.x.rows();
  if (spec.weights.empty()) return std::vector<double>(static_cast<size_t>(n), 1.0);
  return spec.weights;
}

// psi contributions for observation i, shared between the dual and the plain
// double instantiations. Joint mode divides the quasi-score by phi and appends
// the Pearson moment equation.
template <typename T>
void quasi_psi(const QuasiInternal& q, int i, std::span<const T> th, std::span<T> out) {
  const QuasiSpec& spec = q.spec;
  const double y = spec.y[static_cast<size_t>(i)];
  const double m = q.m[static_cast<size_t>(i)];
  const bool joint = spec.mode == QuasiMode::AdjustedJointPhi;

  T eta = th[0] * spec.x(i, 0);
  for (int j = 1; j < q.pb; ++j) eta += th[static_cast<size_t>(j)] * spec.x(i, j);

  T dd{}, mu{};
  switch (spec.link) {
    case Link::Identity:
      mu = std::move(eta);
      break;
    case Link::Log:
      mu = s_exp(std::move(eta));
      dd = mu;
      break;
    case Link::Logit: {
      if (value_of(eta) >= 0.0) mu = s_inverse(s_exp(-std::move(eta)) + 1.0);
      else {
        T e = s_exp(std::move(eta));
        T den = e + 1.0;
        mu = std::move(e) * s_inverse(std::move(den));
      }
      dd = mu * (1.0 - mu);
      break;
    }
    case Link::Probit:
      dd = s_normal_pdf(eta);
      mu = s_normal_cdf(std::move(eta));
      break;
  }

  T res = y - std::move(mu);
  T num = spec.link == Link::Identity ? res : std::move(dd) * res;

  T invv{};
  bool unit_v = false;
  switch (spec.varfun) {
    case VarianceFunction::One:
      unit_v = true;
      break;
    case VarianceFunction::Mu: {
      // res = y - mu, so mu = y - res.
      T v = y - res;
      if (!(value_of(v) > 0.0)) throw DomainError("variance function needs a positive mean");
      invv = s_inverse(std::move(v));
      break;
    }
    case VarianceFunction::MuSquared: {
      T muv = y - res;
      T v = muv * muv;
      if (!(value_of(v) > 0.0)) throw DomainError("variance function hit zero");
      invv = s_inverse(std::move(v));
      break;
    }
    case VarianceFunction::MuOneMinusMu: {
      T muv = y - res;
      T v = muv * (1.0 - muv);
      if (!(value_of(v) > 0.0))
        throw DomainError("variance function needs a mean inside the unit interval");
      invv = s_inverse(std::move(v));
      break;
    }
  }

  T core = unit_v ? std::move(num) : std::move(num) * invv;
  if (joint) {
    T phi = th[static_cast<size_t>(q.pb)];
    if (!(value_of(phi) > 0.0)) throw DomainError("dispersion must be positive");
    T pearson = unit_v ? res * res * m : res * res * invv * m;
    out[static_cast<size_t>(q.pb)] = std::move(pearson) - phi;
    core = std::move(core) * s_inverse(std::move(phi));
  }
  for (int s = 0; s < q.pb; ++s)
    out[static_cast<size_t>(s)] = core * (m * spec.x(i, s));
}

double link_transform(Link link, double mu) {
  switch (link) {
    case Link::Identity: return mu;
    case Link::Log: return std::log(mu);
    case Link::Logit: return std::log(mu / (1.0 - mu));
    case Link::Probit: return normal_quantile(mu);
  }
  throw InadmissibleSpec("unknown link");
}

std::vector<double> starting_point(const QuasiSpec& spec) {
  const int n = spec.x.rows();
  const int pb = spec.x.cols();
  std::vector<double> z(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double yi = spec.y[static_cast<size_t>(i)];
    switch (spec.link) {
      case Link::Identity: break;
      case Link::Log: yi = std::fmax(yi, 0.1); break;
      case Link::Logit:
      case Link::Probit: yi = std::clamp(yi, 0.02, 0.98); break;
    }
    z[static_cast<size_t>(i)] = link_transform(spec.link, yi);
  }
  DenseMatrix xtx(pb, pb);
  std::vector<double> xtz(static_cast<size_t>(pb), 0.0);
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < pb; ++s) {
      xtz[static_cast<size_t>(s)] += spec.x(i, s) * z[static_cast<size_t>(i)];
      for (int t = 0; t < pb; ++t) xtx(s, t) += spec.x(i, s) * spec.x(i, t);
    }
  std::vector<double> beta(static_cast<size_t>(pb), 0.0);
  try {
    beta = solve(lu_factor(xtx), xtz);
  } catch (const Error&) {
    std::fill(beta.begin(), beta.end(), 0.0);
  }
  return beta;
}

// Chain-rule scalars for one observation, everything the closed-form blocks
// need. Primes are eta-derivatives; v' and v'' below are mu-derivatives of
// the variance function.
struct ObsScalars {
  double wtil, q, qp;  // b(y-mu), b d - b'(y-mu), 2b'd + b d' - b''(y-mu)
  double k, f, s;      // c(y-mu)^2 and its first two negated eta-derivatives
};

ObsScalars obs_scalars(const QuasiSpec& spec, double m, double y, double eta) {
  double mu, d, dp, dpp;
  switch (spec.link) {
    case Link::Identity:
      mu = eta; d = 1.0; dp = 0.0; dpp = 0.0;
      break;
    case Link::Log:
      mu = std::exp(eta); d = mu; dp = mu; dpp = mu;
      break;
    case Link::Logit: {
      mu = eta >= 0.0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
      d = mu * (1.0 - mu);
      dp = d * (1.0 - 2.0 * mu);
      dpp = d * ((1.0 - 2.0 * mu) * (1.0 - 2.0 * mu) - 2.0 * d);
      break;
    }
    case Link::Probit: {
      const double f = normal_pdf(eta);
      mu = normal_cdf(eta); d = f; dp = -eta * f; dpp = (eta * eta - 1.0) * f;
      break;
    }
    default:
      throw InadmissibleSpec("unknown link");
  }

  double v, vp, vpp;
  switch (spec.varfun) {
    case VarianceFunction::One: v = 1.0; vp = 0.0; vpp = 0.0; break;
    case VarianceFunction::Mu: v = mu; vp = 1.0; vpp = 0.0; break;
    case VarianceFunction::MuSquared: v = mu * mu; vp = 2.0 * mu; vpp = 2.0; break;
    case VarianceFunction::MuOneMinusMu:
      v = mu * (1.0 - mu); vp = 1.0 - 2.0 * mu; vpp = -2.0; break;
    default:
      throw InadmissibleSpec("unknown variance function");
  }
  if (!(v > 0.0)) throw DomainError("variance function must be positive");

  const double v2 = v * v;
  const double v3 = v2 * v;
  const double b = m * d / v;
  const double bp = m * (dp / v - d * d * vp / v2);
  const double bpp = m * ((dpp * v - 3.0 * d * dp * vp - d * d * d * vpp) / v2 +
                          2.0 * d * d * d * vp * vp / v3);
  const double c = m / v;
  const double cp = -m * vp * d / v2;
  const double cpp = -m * (vpp * d * d / v2 + vp * dp / v2 - 2.0 * d * d * vp * vp / v3);

  const double res = y - mu;
  ObsScalars o;
  o.wtil = b * res;
  o.q = b * d - bp * res;
  o.qp = 2.0 * bp * d + b * dp - bpp * res;
  o.k = c * res * res;
  o.f = 2.0 * c * d * res - cp * res * res;
  o.s = cpp * res * res - 4.0 * cp * d * res - 2.0 * c * dp * res + 2.0 * c * d * d;
  return o;
}

}  // namespace

EstimatingModel quasi_model(const QuasiSpec& spec) {
  validate_spec(spec);
  auto q = std::make_shared<QuasiInternal>();
  q->spec = spec;
  q->m = resolve_weights(spec);
  q->pb = spec.x.cols();
  q->p = q->pb + (spec.mode == QuasiMode::AdjustedJointPhi ? 1 : 0);

  EstimatingModel model;
  model.flavor = ModelFlavor::VectorPsi;
  model.k = spec.x.rows();
  model.p = q->p;
  model.psi = [q](int i, std::span<const Dual2> th, std::span<Dual2> out) {
    quasi_psi(*q, i, th, out);
  };
  model.psi_value = [q](int i, std::span<const double> th, std::span<double> out) {
    quasi_psi(*q, i, th, out);
  };
  model.start = starting_point(spec);
  if (spec.mode == QuasiMode::AdjustedJointPhi) {
    double phi0 = 1.0;
    try {
      phi0 = quasi_phi_moment(spec, model.start, spec.x.rows());
      if (!(std::isfinite(phi0) && phi0 > 0.0)) phi0 = 1.0;
    } catch (const Error&) {
      phi0 = 1.0;
    }
    model.start.push_back(phi0);
  }
  return model;
}

double quasi_phi_moment(const QuasiSpec& spec, const std::vector<double>& beta,
                        int r_divisor) {
  validate_spec(spec);
  const int n = spec.x.rows();
  const int pb = spec.x.cols();
  if (static_cast<int>(beta.size()) < pb)
    throw DimensionMismatch("beta is shorter than the design columns");
  int r = r_divisor;
  if (r <= 0) r = spec.moment_r > 0 ? spec.moment_r : n - pb;
  if (r <= 0) throw DegenerateData("no residual degrees of freedom for the Pearson divisor");

  const std::vector<double> m = resolve_weights(spec);
  double pearson = 0.0;
  for (int i = 0; i < n; ++i) {
    double eta = 0.0;
    for (int s = 0; s < pb; ++s) eta += spec.x(i, s) * beta[static_cast<size_t>(s)];
    const ObsScalars o = obs_scalars(spec, m[static_cast<size_t>(i)],
                                     spec.y[static_cast<size_t>(i)], eta);
    pearson += o.k;
  }
  return pearson / r;
}

QuasiMatrices quasi_appendix_matrices(const QuasiSpec& spec, const std::vector<double>& beta,
                                      double phi) {
  validate_spec(spec);
  const int n = spec.x.rows();
  const int pb = spec.x.cols();
  if (static_cast<int>(beta.size()) != pb)
    throw DimensionMismatch("beta length does not match the design columns");
  if (!(phi > 0.0)) throw DomainError("dispersion must be positive");
  const std::vector<double> m = resolve_weights(spec);
  const int p = pb + 1;

  QuasiMatrices out;
  out.j = DenseMatrix(p, p);
  out.e = DenseMatrix(p, p);
  out.d.assign(static_cast<size_t>(p), DenseMatrix(p, p));
  out.u.assign(static_cast<size_t>(p), DenseMatrix(p, p));

  const double ph2 = phi * phi;
  const double ph3 = ph2 * phi;
  for (int i = 0; i < n; ++i) {
    double eta = 0.0;
    for (int s = 0; s < pb; ++s) eta += spec.x(i, s) * beta[static_cast<size_t>(s)];
    const ObsScalars o = obs_scalars(spec, m[static_cast<size_t>(i)],
                                     spec.y[static_cast<size_t>(i)], eta);
    const double kc = o.k - phi;

    for (int s = 0; s < pb; ++s) {
      const double xs = spec.x(i, s);
      out.j(s, pb) += o.wtil * xs / ph2;
      out.j(pb, s) += o.f * xs;
      out.e(s, pb) += o.wtil * kc * xs / phi;
      out.e(pb, s) += o.wtil * kc * xs / phi;
      for (int t = 0; t < pb; ++t) {
        const double xx = xs * spec.x(i, t);
        out.j(s, t) += o.q * xx / phi;
        out.e(s, t) += o.wtil * o.wtil * xx / ph2;
      }
    }
    out.j(pb, pb) += 1.0;
    out.e(pb, pb) += kc * kc;

    for (int r = 0; r < pb; ++r) {
      const double xr = spec.x(i, r);
      DenseMatrix& dr = out.d[static_cast<size_t>(r)];
      DenseMatrix& ur = out.u[static_cast<size_t>(r)];
      for (int s = 0; s < pb; ++s) {
        const double xrs = xr * spec.x(i, s);
        dr(s, pb) += -o.q * kc * xrs / phi;
        ur(s, pb) += o.q * xrs / ph2;
        ur(pb, s) += o.q * xrs / ph2;
        for (int t = 0; t < pb; ++t) {
          dr(s, t) += -o.q * o.wtil * xrs * spec.x(i, t) / ph2;
          ur(s, t) += -o.qp * xrs * spec.x(i, t) / phi;
        }
      }
      for (int t = 0; t < pb; ++t) dr(pb, t) += -o.wtil * o.wtil * xr * spec.x(i, t) / ph3;
      dr(pb, pb) += -o.wtil * kc * xr / ph2;
      ur(pb, pb) += 2.0 * o.wtil * xr / ph3;
    }

    DenseMatrix& dphi = out.d[static_cast<size_t>(pb)];
    DenseMatrix& uphi = out.u[static_cast<size_t>(pb)];
    for (int s = 0; s < pb; ++s) {
      const double xs = spec.x(i, s);
      dphi(s, pb) += -o.f * kc * xs;
      dphi(pb, s) += -o.wtil * xs / phi;
      for (int t = 0; t < pb; ++t) {
        dphi(s, t) += -o.f * o.wtil * xs * spec.x(i, t) / phi;
        uphi(s, t) += o.s * xs * spec.x(i, t);
      }
    }
    dphi(pb, pb) += -kc;
  }
  return out;
}

}  // namespace rbm
