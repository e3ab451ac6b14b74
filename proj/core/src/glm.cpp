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

#include "rbmest/glm.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "rbmest/errors.hpp"
#include "rbmest/special.hpp"

namespace rbm {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Scalar shims so the same contribution code instantiates for plain doubles
// (value-only fast path) and for Dual2 (derivative path). The double versions
// guard domains the same way the dual versions do.
inline double value_of(double x) { return x; }
inline double value_of(const Dual2& x) { return x.value(); }

inline double s_exp(double x) { return std::exp(x); }
inline Dual2 s_exp(Dual2 x) { return exp(std::move(x)); }
inline double s_log(double x) {
  if (!(x > 0.0)) throw DomainError("log of a non-positive value");
  return std::log(x);
}
inline Dual2 s_log(Dual2 x) { return log(std::move(x)); }
inline double s_log1p(double x) {
  if (!(x > -1.0)) throw DomainError("log1p at or below -1");
  return std::log1p(x);
}
inline Dual2 s_log1p(Dual2 x) { return log1p(std::move(x)); }
inline double s_softplus(double x) {
  return std::fmax(x, 0.0) + std::log1p(std::exp(-std::fabs(x)));
}
inline Dual2 s_softplus(Dual2 x) { return softplus(std::move(x)); }
inline double s_normal_cdf(double x) { return normal_cdf(x); }
inline Dual2 s_normal_cdf(Dual2 x) { return normal_cdf(std::move(x)); }
inline double s_lgamma(double x) {
  if (!(x > 0.0)) throw DomainError("lgamma needs a positive argument");
  return std::lgamma(x);
}
inline Dual2 s_lgamma(Dual2 x) { return lgamma(std::move(x)); }
inline double s_inverse(double x) {
  if (x == 0.0) throw DomainError("inverse at 0");
  return 1.0 / x;
}
inline Dual2 s_inverse(Dual2 x) { return inverse(std::move(x)); }

template <typename T>
T linear_predictor(const DenseMatrix& x, int i, std::span<const T> th, int pb) {
  T eta = th[0] * x(i, 0);
  for (int j = 1; j < pb; ++j) eta += th[static_cast<size_t>(j)] * x(i, j);
  return eta;
}

template <typename T>
T inverse_link(Link link, T eta) {
  switch (link) {
    case Link::Identity:
      return eta;
    case Link::Log:
      return s_exp(std::move(eta));
    case Link::Logit:
      if (value_of(eta) >= 0.0) {
        return s_inverse(s_exp(-std::move(eta)) + 1.0);
      } else {
        T e = s_exp(std::move(eta));
        T denom = e + 1.0;
        return std::move(e) * s_inverse(std::move(denom));
      }
    case Link::Probit:
      return s_normal_cdf(std::move(eta));
  }
  throw InadmissibleSpec("unknown link");
}

struct GlmInternal {
  GlmSpec spec;
  std::vector<double> m;     // resolved prior weights
  std::vector<double> logc;  // per-observation data constants (binomial logC, etc.)
  int pb = 0;                // beta dimension
  int p = 0;                 // full parameter dimension
};

// Exact log-density of observation i. th holds beta, plus phi last when the
// dispersion is free.
template <typename T>
T log_density(const GlmInternal& g, int i, std::span<const T> th) {
  const GlmSpec& spec = g.spec;
  const double y = spec.y[static_cast<size_t>(i)];
  const double m = g.m[static_cast<size_t>(i)];
  const bool free_phi = spec.dispersion == DispersionMode::Unknown;
  T eta = linear_predictor(spec.x, i, th, g.pb);

  switch (spec.family) {
    case Family::Normal: {
      T res = y - inverse_link(spec.link, std::move(eta));
      T sq = res * res;
      if (!free_phi) {
        const double phi = spec.phi;
        return std::move(sq) * (-0.5 * m / phi) - 0.5 * (kLog2Pi + std::log(phi / m));
      }
      T phi = th[static_cast<size_t>(g.pb)];
      if (!(value_of(phi) > 0.0)) throw DomainError("dispersion must be positive");
      T out = std::move(sq) * s_inverse(phi) * (-0.5 * m);
      out -= s_log(std::move(phi)) * 0.5;
      out -= 0.5 * (kLog2Pi - std::log(m));
      return out;
    }
    case Family::Poisson: {
      // log link writes y*eta - exp(eta) directly.
      T lmu = spec.link == Link::Log ? eta : T();
      T mu = spec.link == Link::Log ? s_exp(std::move(eta))
                                    : inverse_link(spec.link, std::move(eta));
      if (!(value_of(mu) > 0.0)) throw DomainError("Poisson mean must be positive");
      if (spec.link != Link::Log) lmu = s_log(mu);
      T out = std::move(mu) * (-m);
      if (y > 0.0) out += std::move(lmu) * (m * y);
      out -= m * std::lgamma(y + 1.0);
      return out;
    }
    case Family::Binomial: {
      if (spec.link == Link::Logit) {
        T out = s_softplus(eta) * (-m);
        if (y != 0.0) out += std::move(eta) * (m * y);
        out += g.logc[static_cast<size_t>(i)];
        return out;
      }
      T mu = inverse_link(spec.link, std::move(eta));
      const double muv = value_of(mu);
      if (!(muv > 0.0) || !(muv < 1.0))
        throw DomainError("binomial mean escaped the open unit interval");
      T out;
      if (y <= 0.0) {
        out = s_log1p(-std::move(mu)) * m;
      } else if (y >= 1.0) {
        out = s_log(std::move(mu)) * m;
      } else {
        out = s_log(mu) * (m * y);
        out += s_log1p(-std::move(mu)) * (m * (1.0 - y));
      }
      out += g.logc[static_cast<size_t>(i)];
      return out;
    }
    case Family::Gamma: {
      T lmu = spec.link == Link::Log ? eta : T();
      T invmu = spec.link == Link::Log ? s_exp(-std::move(eta)) : T();
      if (spec.link != Link::Log) {
        T mu = inverse_link(spec.link, std::move(eta));
        if (!(value_of(mu) > 0.0)) throw DomainError("gamma mean must be positive");
        lmu = s_log(mu);
        invmu = s_inverse(std::move(mu));
      }
      if (!free_phi) {
        const double lam = m / spec.phi;
        T out = std::move(invmu) * (-lam * y);
        out -= std::move(lmu) * lam;
        out += lam * std::log(lam) + (lam - 1.0) * std::log(y) - std::lgamma(lam);
        return out;
      }
      T phi = th[static_cast<size_t>(g.pb)];
      if (!(value_of(phi) > 0.0)) throw DomainError("dispersion must be positive");
      T lam = s_inverse(std::move(phi)) * m;
      T out = s_log(lam) * lam;
      out -= std::move(lmu) * lam;
      out -= std::move(invmu) * lam * y;
      out += (lam - 1.0) * std::log(y);
      out -= s_lgamma(std::move(lam));
      return out;
    }
  }
  throw InadmissibleSpec("unknown family");
}

std::vector<double> resolve_weights(const GlmSpec& spec) {
  const int n = spec.x.rows();
  if (spec.weights.empty()) return std::vector<double>(static_cast<size_t>(n), 1.0);
  return spec.weights;
}

void validate_spec(const GlmSpec& spec) {
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

  switch (spec.family) {
    case Family::Normal:
      break;
    case Family::Poisson:
      for (double v : spec.y)
        if (v < 0.0) throw InadmissibleSpec("Poisson responses must be non-negative");
      break;
    case Family::Binomial:
      for (double v : spec.y)
        if (v < 0.0 || v > 1.0)
          throw InadmissibleSpec("binomial responses must be proportions in [0, 1]");
      break;
    case Family::Gamma:
      for (double v : spec.y)
        if (!(v > 0.0)) throw InadmissibleSpec("gamma responses must be positive");
      break;
  }

  const bool fixed_scale = spec.family == Family::Poisson || spec.family == Family::Binomial;
  if (fixed_scale) {
    if (spec.dispersion == DispersionMode::Unknown)
      throw InadmissibleSpec("this family has no free dispersion");
    if (spec.phi != 1.0) throw InadmissibleSpec("this family fixes the dispersion at 1");
  } else if (spec.dispersion == DispersionMode::Known) {
    if (!(std::isfinite(spec.phi) && spec.phi > 0.0))
      throw InadmissibleSpec("known dispersion must be positive");
  }

  if (spec.family == Family::Binomial &&
      (spec.link == Link::Identity || spec.link == Link::Log))
    throw InadmissibleSpec("binomial mean needs a unit-interval link");
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

// Least squares on the link-transformed (domain-adjusted) response; a cheap,
// deterministic warm start for the Newton loops.
std::vector<double> starting_point(const GlmSpec& spec, const std::vector<double>& m) {
  const int n = spec.x.rows();
  const int pb = spec.x.cols();
  std::vector<double> z(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double yi = spec.y[static_cast<size_t>(i)];
    // Pull the adjusted response into the link's domain.
    switch (spec.link) {
      case Link::Identity:
        break;
      case Link::Log:
        yi = std::fmax(yi, 0.1);
        break;
      case Link::Logit:
      case Link::Probit:
        yi = std::clamp(yi, 0.02, 0.98);
        break;
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
  bool have_fit = false;
  try {
    beta = solve(lu_factor(xtx), xtz);
    have_fit = true;
  } catch (const Error&) {
    std::fill(beta.begin(), beta.end(), 0.0);
  }

  if (spec.dispersion == DispersionMode::Unknown) {
    double phi0 = 1.0;
    if (spec.family == Family::Normal && have_fit) {
      double rss = 0.0;
      for (int i = 0; i < n; ++i) {
        double fit = 0.0;
        for (int s = 0; s < pb; ++s) fit += spec.x(i, s) * beta[static_cast<size_t>(s)];
        const double r = z[static_cast<size_t>(i)] - fit;
        rss += m[static_cast<size_t>(i)] * r * r;
      }
      phi0 = std::fmax(rss / n, 1e-8);
    }
    beta.push_back(phi0);
  }
  return beta;
}

struct LinkPieces {
  double mu;   // inverse link
  double d;    // d mu / d eta
  double dp;   // second derivative
};

LinkPieces link_pieces(Link link, double eta) {
  switch (link) {
    case Link::Identity:
      return {eta, 1.0, 0.0};
    case Link::Log: {
      const double e = std::exp(eta);
      return {e, e, e};
    }
    case Link::Logit: {
      const double mu = eta >= 0.0 ? 1.0 / (1.0 + std::exp(-eta))
                                   : std::exp(eta) / (1.0 + std::exp(eta));
      const double d = mu * (1.0 - mu);
      return {mu, d, d * (1.0 - 2.0 * mu)};
    }
    case Link::Probit: {
      const double f = normal_pdf(eta);
      return {normal_cdf(eta), f, -eta * f};
    }
  }
  throw InadmissibleSpec("unknown link");
}

// Variance function v(mu) and its mu-derivative for each family.
void family_variance(Family family, double mu, double* v, double* vp) {
  switch (family) {
    case Family::Normal: *v = 1.0; *vp = 0.0; return;
    case Family::Poisson: *v = mu; *vp = 1.0; return;
    case Family::Binomial: *v = mu * (1.0 - mu); *vp = 1.0 - 2.0 * mu; return;
    case Family::Gamma: *v = mu * mu; *vp = 2.0 * mu; return;
  }
  throw InadmissibleSpec("unknown family");
}

// Per-observation weighted-design quantities shared by the closed-form blocks
// and the fast penalized objective.
struct ObsPieces {
  double mu;
  double q;      // b*d - b'*(y - mu)
  double wtil;   // b*(y - mu)
};

ObsPieces obs_pieces(const GlmSpec& spec, double m, double y, double eta) {
  const LinkPieces lk = link_pieces(spec.link, eta);
  double v, vp;
  family_variance(spec.family, lk.mu, &v, &vp);
  if (!(v > 0.0)) throw DomainError("variance function hit zero");
  const double b = m * lk.d / v;
  const double bp = m * (lk.dp / v - lk.d * lk.d * vp / (v * v));
  const double res = y - lk.mu;
  return {lk.mu, b * lk.d - bp * res, b * res};
}

}  // namespace

EstimatingModel glm_model(const GlmSpec& spec) {
  validate_spec(spec);
  auto g = std::make_shared<GlmInternal>();
  g->spec = spec;
  g->m = resolve_weights(spec);
  g->pb = spec.x.cols();
  g->p = g->pb + (spec.dispersion == DispersionMode::Unknown ? 1 : 0);
  if (spec.family == Family::Binomial) {
    const int n = spec.x.rows();
    g->logc.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double m = g->m[static_cast<size_t>(i)];
      const double s = m * spec.y[static_cast<size_t>(i)];
      g->logc[static_cast<size_t>(i)] =
          std::lgamma(m + 1.0) - std::lgamma(s + 1.0) - std::lgamma(m - s + 1.0);
    }
  }

  EstimatingModel model;
  model.flavor = ModelFlavor::ObjectiveGradient;
  model.k = spec.x.rows();
  model.p = g->p;
  model.objective = [g](int i, std::span<const Dual2> th) { return log_density(*g, i, th); };
  model.objective_value = [g](int i, std::span<const double> th) {
    return log_density(*g, i, th);
  };
  model.start = starting_point(spec, g->m);
  return model;
}

GlmMatrices glm_appendix_matrices(const GlmSpec& spec, const std::vector<double>& beta,
                                  double phi) {
  validate_spec(spec);
  const int n = spec.x.rows();
  const int pb = spec.x.cols();
  if (static_cast<int>(beta.size()) != pb)
    throw DimensionMismatch("beta length does not match the design columns");
  if (!(phi > 0.0)) throw DomainError("dispersion must be positive");
  const std::vector<double> m = resolve_weights(spec);
  const bool free_phi = spec.dispersion == DispersionMode::Unknown;
  const int p = pb + (free_phi ? 1 : 0);

  GlmMatrices out{DenseMatrix(p, p), DenseMatrix(p, p)};
  for (int i = 0; i < n; ++i) {
    double eta = 0.0;
    for (int s = 0; s < pb; ++s) eta += spec.x(i, s) * beta[static_cast<size_t>(s)];
    const double mi = m[static_cast<size_t>(i)];
    const double yi = spec.y[static_cast<size_t>(i)];
    const ObsPieces ob = obs_pieces(spec, mi, yi, eta);

    for (int s = 0; s < pb; ++s)
      for (int t = 0; t < pb; ++t) {
        const double xx = spec.x(i, s) * spec.x(i, t);
        out.j(s, t) += ob.q * xx / phi;
        out.e(s, t) += ob.wtil * ob.wtil * xx / (phi * phi);
      }

    if (free_phi) {
      // r_i = -2 m_i (y_i theta_i - kappa - c1), and the a(.) derivatives,
      // per family.
      double r, ap, app;
      if (spec.family == Family::Normal) {
        const double res = yi - ob.mu;
        r = mi * res * res;
        ap = phi;
        app = phi * phi;
      } else {
        const double lam = mi / phi;
        r = 2.0 * mi * (yi / ob.mu + std::log(ob.mu) - std::log(yi));
        ap = mi * 2.0 * (-digamma(lam) + std::log(lam) + 1.0);
        app = mi * mi * 2.0 * (trigamma(lam) - 1.0 / lam);
      }
      const double score_phi = (r - ap) / (2.0 * phi * phi);
      for (int s = 0; s < pb; ++s) {
        const double jcross = ob.wtil * spec.x(i, s) / (phi * phi);
        out.j(s, pb) += jcross;
        out.j(pb, s) += jcross;
        const double ecross = ob.wtil * spec.x(i, s) * (r - ap) / (2.0 * phi * phi * phi);
        out.e(s, pb) += ecross;
        out.e(pb, s) += ecross;
      }
      out.j(pb, pb) += (r - ap) / (phi * phi * phi) + app / (2.0 * phi * phi * phi * phi);
      out.e(pb, pb) += score_phi * score_phi;
    }
  }
  return out;
}

double glm_penalized_fast(const GlmSpec& spec, const std::vector<double>& beta) {
  validate_spec(spec);
  if (spec.dispersion != DispersionMode::Known)
    throw InadmissibleSpec("the fast penalized objective needs a known dispersion");
  const int n = spec.x.rows();
  const int pb = spec.x.cols();
  if (static_cast<int>(beta.size()) != pb)
    throw DimensionMismatch("beta length does not match the design columns");
  const std::vector<double> m = resolve_weights(spec);

  std::vector<double> wtil(static_cast<size_t>(n));
  DenseMatrix xtqx(pb, pb);
  double loglik = 0.0;  // canonical-scale sum of m (y theta - kappa)
  for (int i = 0; i < n; ++i) {
    double eta = 0.0;
    for (int s = 0; s < pb; ++s) eta += spec.x(i, s) * beta[static_cast<size_t>(s)];
    const double mi = m[static_cast<size_t>(i)];
    const double yi = spec.y[static_cast<size_t>(i)];
    const ObsPieces ob = obs_pieces(spec, mi, yi, eta);
    wtil[static_cast<size_t>(i)] = ob.wtil;
    for (int s = 0; s < pb; ++s)
      for (int t = 0; t < pb; ++t) xtqx(s, t) += ob.q * spec.x(i, s) * spec.x(i, t);

    switch (spec.family) {
      case Family::Normal:
        loglik += mi * (yi * ob.mu - 0.5 * ob.mu * ob.mu);
        break;
      case Family::Poisson:
        loglik += mi * ((yi > 0.0 ? yi * std::log(ob.mu) : 0.0) - ob.mu);
        break;
      case Family::Binomial:
        if (yi > 0.0) loglik += mi * yi * std::log(ob.mu);
        if (yi < 1.0) loglik += mi * (1.0 - yi) * std::log1p(-ob.mu);
        break;
      case Family::Gamma:
        loglik += mi * (-yi / ob.mu - std::log(ob.mu));
        break;
    }
  }

  const LuFactorization lu = lu_factor(xtqx);
  double penalty = 0.0;
  std::vector<double> xi(static_cast<size_t>(pb));
  for (int i = 0; i < n; ++i) {
    for (int s = 0; s < pb; ++s) xi[static_cast<size_t>(s)] = spec.x(i, s);
    const std::vector<double> sol = solve(lu, xi);
    double quad = 0.0;
    for (int s = 0; s < pb; ++s) quad += xi[static_cast<size_t>(s)] * sol[static_cast<size_t>(s)];
    const double w = wtil[static_cast<size_t>(i)];
    penalty += w * quad * w;
  }
  return loglik - 0.5 * penalty;
}

}  // namespace rbm
