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

#ifndef RBMEST_DUAL_HPP
#define RBMEST_DUAL_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "rbmest/errors.hpp"
#include "rbmest/matrix.hpp"
#include "rbmest/special.hpp"

namespace rbm {

// Forward-mode scalar carrying value, gradient and full Hessian with respect
// to a fixed parameter vector of length p. Storage is inline up to p = 8
// (covers every model in the tree without touching the heap) and spills to a
// heap block beyond that. The Hessian stays symmetric by construction: every
// operation writes h[s][t] and h[t][s] from the same expression.
class Dual2 {
 public:
  static constexpr int kInlineP = 8;

  Dual2() : p_(0), v_(0.0) {}
  explicit Dual2(int p, double value = 0.0) : p_(p), v_(value) {
    if (p > kInlineP) ext_.assign(static_cast<size_t>(p) + static_cast<size_t>(p) * p, 0.0);
    else {
      std::fill(sg_, sg_ + p, 0.0);
      std::fill(sh_, sh_ + p * p, 0.0);
    }
  }

  Dual2(const Dual2& o) : p_(o.p_), v_(o.v_), ext_(o.ext_) {
    if (p_ <= kInlineP) {
      std::copy(o.sg_, o.sg_ + p_, sg_);
      std::copy(o.sh_, o.sh_ + p_ * p_, sh_);
    }
  }
  Dual2(Dual2&& o) noexcept : p_(o.p_), v_(o.v_), ext_(std::move(o.ext_)) {
    if (p_ <= kInlineP) {
      std::copy(o.sg_, o.sg_ + p_, sg_);
      std::copy(o.sh_, o.sh_ + p_ * p_, sh_);
    }
  }
  Dual2& operator=(const Dual2& o) {
    if (this == &o) return *this;
    p_ = o.p_;
    v_ = o.v_;
    ext_ = o.ext_;
    if (p_ <= kInlineP) {
      std::copy(o.sg_, o.sg_ + p_, sg_);
      std::copy(o.sh_, o.sh_ + p_ * p_, sh_);
    }
    return *this;
  }
  Dual2& operator=(Dual2&& o) noexcept {
    p_ = o.p_;
    v_ = o.v_;
    ext_ = std::move(o.ext_);
    if (p_ <= kInlineP) {
      std::copy(o.sg_, o.sg_ + p_, sg_);
      std::copy(o.sh_, o.sh_ + p_ * p_, sh_);
    }
    return *this;
  }

  int dim() const { return p_; }
  double value() const { return v_; }
  double& value() { return v_; }

  const double* g() const { return p_ <= kInlineP ? sg_ : ext_.data(); }
  double* g() { return p_ <= kInlineP ? sg_ : ext_.data(); }
  const double* h() const { return p_ <= kInlineP ? sh_ : ext_.data() + p_; }
  double* h() { return p_ <= kInlineP ? sh_ : ext_.data() + p_; }

  double grad(int s) const { return g()[s]; }
  double hess(int s, int t) const { return h()[static_cast<size_t>(s) * p_ + t]; }

  // --- compound ops with a plain scalar ---
  Dual2& operator+=(double c) { v_ += c; return *this; }
  Dual2& operator-=(double c) { v_ -= c; return *this; }
  Dual2& operator*=(double c) {
    v_ *= c;
    double* gp = g(); double* hp = h();
    for (int s = 0; s < p_; ++s) gp[s] *= c;
    for (int k = 0; k < p_ * p_; ++k) hp[k] *= c;
    return *this;
  }
  Dual2& operator/=(double c) { return (*this) *= (1.0 / c); }

  Dual2& operator+=(const Dual2& o) {
    check_dims(o);
    v_ += o.v_;
    double* gp = g(); double* hp = h();
    const double* og = o.g(); const double* oh = o.h();
    for (int s = 0; s < p_; ++s) gp[s] += og[s];
    for (int k = 0; k < p_ * p_; ++k) hp[k] += oh[k];
    return *this;
  }
  Dual2& operator-=(const Dual2& o) {
    check_dims(o);
    v_ -= o.v_;
    double* gp = g(); double* hp = h();
    const double* og = o.g(); const double* oh = o.h();
    for (int s = 0; s < p_; ++s) gp[s] -= og[s];
    for (int k = 0; k < p_ * p_; ++k) hp[k] -= oh[k];
    return *this;
  }

  // this = this * o, ordering h -> g -> v so the read-after-write hazards
  // resolve correctly in place.
  Dual2& operator*=(const Dual2& o) {
    check_dims(o);
    double* gp = g(); double* hp = h();
    const double* og = o.g(); const double* oh = o.h();
    for (int s = 0; s < p_; ++s) {
      const double xs = gp[s];
      double* hr = hp + static_cast<size_t>(s) * p_;
      const double* ohr = oh + static_cast<size_t>(s) * p_;
      for (int t = 0; t < p_; ++t)
        hr[t] = v_ * ohr[t] + o.v_ * hr[t] + xs * og[t] + gp[t] * og[s];
    }
    for (int s = 0; s < p_; ++s) gp[s] = v_ * og[s] + o.v_ * gp[s];
    v_ *= o.v_;
    return *this;
  }

  // this = f(this) given f(v), f'(v), f''(v); same in-place ordering trick.
  Dual2& compose(double f, double fp, double fpp) {
    double* gp = g(); double* hp = h();
    for (int s = 0; s < p_; ++s) {
      double* hr = hp + static_cast<size_t>(s) * p_;
      const double gs = gp[s];
      for (int t = 0; t < p_; ++t) hr[t] = fp * hr[t] + fpp * gs * gp[t];
    }
    for (int s = 0; s < p_; ++s) gp[s] *= fp;
    v_ = f;
    return *this;
  }

  void negate() {
    v_ = -v_;
    double* gp = g(); double* hp = h();
    for (int s = 0; s < p_; ++s) gp[s] = -gp[s];
    for (int k = 0; k < p_ * p_; ++k) hp[k] = -hp[k];
  }

 private:
  void check_dims(const Dual2& o) const {
    if (p_ != o.p_) throw DimensionMismatch("Dual2 operands carry different parameter dims");
  }

  int p_;
  double v_;
  double sg_[kInlineP];
  double sh_[kInlineP * kInlineP];
  std::vector<double> ext_;
};

// --- value-returning operators (rvalue-aware where it matters) ---

inline Dual2 operator+(Dual2 a, const Dual2& b) { a += b; return a; }
inline Dual2 operator-(Dual2 a, const Dual2& b) { a -= b; return a; }
inline Dual2 operator*(Dual2 a, const Dual2& b) { a *= b; return a; }

inline Dual2 operator+(Dual2 a, double c) { a += c; return a; }
inline Dual2 operator+(double c, Dual2 a) { a += c; return a; }
inline Dual2 operator-(Dual2 a, double c) { a -= c; return a; }
inline Dual2 operator-(double c, Dual2 a) { a.negate(); a += c; return a; }
inline Dual2 operator*(Dual2 a, double c) { a *= c; return a; }
inline Dual2 operator*(double c, Dual2 a) { a *= c; return a; }
inline Dual2 operator/(Dual2 a, double c) { a /= c; return a; }
inline Dual2 operator-(Dual2 a) { a.negate(); return a; }

inline Dual2 inverse(Dual2 x) {
  const double v = x.value();
  if (v == 0.0) throw DomainError("dual inverse at 0");
  const double iv = 1.0 / v;
  x.compose(iv, -iv * iv, 2.0 * iv * iv * iv);
  return x;
}
inline Dual2 operator/(const Dual2& a, const Dual2& b) { return inverse(b) *= a; }
inline Dual2 operator/(double c, Dual2 b) { return inverse(std::move(b)) *= c; }

inline Dual2 exp(Dual2 x) {
  const double e = std::exp(x.value());
  x.compose(e, e, e);
  return x;
}
inline Dual2 log(Dual2 x) {
  const double v = x.value();
  if (!(v > 0.0)) throw DomainError("dual log of a non-positive value");
  const double iv = 1.0 / v;
  x.compose(std::log(v), iv, -iv * iv);
  return x;
}
inline Dual2 log1p(Dual2 x) {
  const double v = x.value();
  if (!(v > -1.0)) throw DomainError("dual log1p at or below -1");
  const double iv = 1.0 / (1.0 + v);
  x.compose(std::log1p(v), iv, -iv * iv);
  return x;
}
inline Dual2 sqrt(Dual2 x) {
  const double v = x.value();
  if (v < 0.0) throw DomainError("dual sqrt of a negative value");
  const double r = std::sqrt(v);
  x.compose(r, 0.5 / r, -0.25 / (r * v));
  return x;
}
inline Dual2 pow(Dual2 x, double a) {
  const double v = x.value();
  if (v < 0.0 && a != std::floor(a))
    throw DomainError("dual pow: negative base with non-integer exponent");
  const double f = std::pow(v, a);
  x.compose(f, a * std::pow(v, a - 1.0), a * (a - 1.0) * std::pow(v, a - 2.0));
  return x;
}
// log(1 + e^x), computed without overflow; f' is the logistic function.
inline Dual2 softplus(Dual2 x) {
  const double v = x.value();
  const double sp = std::fmax(v, 0.0) + std::log1p(std::exp(-std::fabs(v)));
  const double sig = 1.0 / (1.0 + std::exp(-v));
  x.compose(sp, sig, sig * (1.0 - sig));
  return x;
}
inline Dual2 normal_pdf(Dual2 x) {
  const double v = x.value();
  const double f = normal_pdf(v);
  x.compose(f, -v * f, (v * v - 1.0) * f);
  return x;
}
inline Dual2 normal_cdf(Dual2 x) {
  const double v = x.value();
  const double f = normal_pdf(v);
  x.compose(normal_cdf(v), f, -v * f);
  return x;
}
inline Dual2 lgamma(Dual2 x) {
  const double v = x.value();
  if (!(v > 0.0)) throw DomainError("dual lgamma needs a positive argument");
  x.compose(std::lgamma(v), digamma(v), trigamma(v));
  return x;
}

// Independent variables: component s gets gradient e_s and zero Hessian.
std::vector<Dual2> lift_params(const std::vector<double>& theta);

struct ScalarDerivatives {
  double value = 0.0;
  std::vector<double> grad;
  DenseMatrix hess;
};

// Evaluate a scalar-valued function of lifted parameters and unpack.
ScalarDerivatives eval_with_derivs(
    const std::function<Dual2(std::span<const Dual2>)>& f,
    const std::vector<double>& theta);

}  // namespace rbm

#endif  // RBMEST_DUAL_HPP
