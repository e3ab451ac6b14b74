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

#include "rbmest/model.hpp"

#include <cmath>

namespace rbm {

namespace {

void validate(const EstimatingModel& m) {
  if (m.p <= 0) throw EmptyParameter("model has no parameters");
  if (m.k < 0) throw InadmissibleSpec("negative contribution count");
  if (m.flavor == ModelFlavor::VectorPsi && !m.psi)
    throw InadmissibleSpec("VectorPsi model without a psi evaluator");
  if (m.flavor == ModelFlavor::ObjectiveGradient && !m.objective)
    throw InadmissibleSpec("ObjectiveGradient model without an objective evaluator");
}

[[noreturn]] void rethrow_as_failed(int i, const Error& err) {
  throw EvaluationFailed(i, err.what());
}

void check_finite(const AdjustmentMatrices& mats) {
  bool ok = true;
  for (double v : mats.psi) ok = ok && std::isfinite(v);
  ok = ok && std::isfinite(mats.j.max_abs()) && std::isfinite(mats.e.max_abs());
  for (const auto& d : mats.d) ok = ok && std::isfinite(d.max_abs());
  for (const auto& u : mats.u) ok = ok && std::isfinite(u.max_abs());
  if (!ok) throw NonFinite("assembled matrices contain non-finite entries");
}

// Summed per-contribution Hessian of the objective at theta (second-derivative
// ingredient of the finite-difference u_r path).
DenseMatrix objective_hessian_sum(const EstimatingModel& m, const std::vector<double>& theta) {
  const int p = m.p;
  const std::vector<Dual2> lifted = lift_params(theta);
  const std::span<const Dual2> th(lifted.data(), lifted.size());
  DenseMatrix h(p, p);
  for (int i = 0; i < m.k; ++i) {
    try {
      const Dual2 li = m.objective(i, th);
      for (int s = 0; s < p; ++s)
        for (int t = 0; t < p; ++t) h(s, t) += li.hess(s, t);
    } catch (const EvaluationFailed&) {
      throw;
    } catch (const Error& err) {
      rethrow_as_failed(i, err);
    }
  }
  return h;
}

}  // namespace

std::vector<double> psi_sum(const EstimatingModel& m, const std::vector<double>& theta) {
  validate(m);
  if (static_cast<int>(theta.size()) != m.p)
    throw DimensionMismatch("theta length != model parameter dim");
  const int p = m.p;
  std::vector<double> total(p, 0.0);

  if (m.flavor == ModelFlavor::VectorPsi && m.psi_value) {
    std::vector<double> out(p);
    const std::span<const double> th(theta.data(), theta.size());
    for (int i = 0; i < m.k; ++i) {
      try {
        m.psi_value(i, th, std::span<double>(out.data(), out.size()));
      } catch (const Error& err) {
        rethrow_as_failed(i, err);
      }
      for (int s = 0; s < p; ++s) total[s] += out[s];
    }
    return total;
  }

  const std::vector<Dual2> lifted = lift_params(theta);
  const std::span<const Dual2> th(lifted.data(), lifted.size());
  if (m.flavor == ModelFlavor::VectorPsi) {
    std::vector<Dual2> out(p, Dual2(p));
    for (int i = 0; i < m.k; ++i) {
      try {
        m.psi(i, th, std::span<Dual2>(out.data(), out.size()));
      } catch (const Error& err) {
        rethrow_as_failed(i, err);
      }
      for (int s = 0; s < p; ++s) total[s] += out[s].value();
    }
  } else {
    for (int i = 0; i < m.k; ++i) {
      try {
        const Dual2 li = m.objective(i, th);
        for (int s = 0; s < p; ++s) total[s] += li.grad(s);
      } catch (const Error& err) {
        rethrow_as_failed(i, err);
      }
    }
  }
  return total;
}

double objective_sum(const EstimatingModel& m, const std::vector<double>& theta) {
  validate(m);
  if (m.flavor != ModelFlavor::ObjectiveGradient)
    throw FlavorMismatch("objective_sum needs an ObjectiveGradient model");
  if (static_cast<int>(theta.size()) != m.p)
    throw DimensionMismatch("theta length != model parameter dim");
  double total = 0.0;
  if (m.objective_value) {
    const std::span<const double> th(theta.data(), theta.size());
    for (int i = 0; i < m.k; ++i) {
      try {
        total += m.objective_value(i, th);
      } catch (const Error& err) {
        rethrow_as_failed(i, err);
      }
    }
    if (!std::isfinite(total)) throw NonFinite("objective sum is not finite");
    return total;
  }
  const std::vector<Dual2> lifted = lift_params(theta);
  const std::span<const Dual2> th(lifted.data(), lifted.size());
  for (int i = 0; i < m.k; ++i) {
    try {
      total += m.objective(i, th).value();
    } catch (const Error& err) {
      rethrow_as_failed(i, err);
    }
  }
  if (!std::isfinite(total)) throw NonFinite("objective sum is not finite");
  return total;
}

AdjustmentMatrices assemble(const EstimatingModel& m, const std::vector<double>& theta,
                            bool need_second) {
  validate(m);
  if (static_cast<int>(theta.size()) != m.p)
    throw DimensionMismatch("theta length != model parameter dim");
  const int p = m.p;

  AdjustmentMatrices mats;
  mats.psi.assign(p, 0.0);
  mats.j = DenseMatrix(p, p);
  mats.e = DenseMatrix(p, p);
  mats.d.assign(p, DenseMatrix(p, p));
  if (need_second) mats.u.assign(p, DenseMatrix(p, p));
  mats.has_second = need_second;

  const std::vector<Dual2> lifted = lift_params(theta);
  const std::span<const Dual2> th(lifted.data(), lifted.size());

  if (m.flavor == ModelFlavor::VectorPsi) {
    std::vector<Dual2> out(p, Dual2(p));
    for (int i = 0; i < m.k; ++i) {
      try {
        m.psi(i, th, std::span<Dual2>(out.data(), out.size()));
      } catch (const Error& err) {
        rethrow_as_failed(i, err);
      }
      for (int s = 0; s < p; ++s) {
        const Dual2& ps = out[s];
        mats.psi[s] += ps.value();
        for (int t = 0; t < p; ++t) {
          mats.j(s, t) -= ps.grad(t);
          mats.e(s, t) += ps.value() * out[t].value();
        }
      }
      for (int r = 0; r < p; ++r) {
        const Dual2& pr = out[r];
        for (int s = 0; s < p; ++s) {
          const double grs = pr.grad(s);
          for (int t = 0; t < p; ++t) mats.d[r](s, t) += grs * out[t].value();
        }
        if (need_second)
          for (int s = 0; s < p; ++s)
            for (int t = 0; t < p; ++t) mats.u[r](s, t) += pr.hess(s, t);
      }
    }
  } else {
    for (int i = 0; i < m.k; ++i) {
      Dual2 li;
      try {
        li = m.objective(i, th);
      } catch (const Error& err) {
        rethrow_as_failed(i, err);
      }
      for (int s = 0; s < p; ++s) {
        const double gs = li.grad(s);
        mats.psi[s] += gs;
        for (int t = 0; t < p; ++t) {
          mats.j(s, t) -= li.hess(s, t);
          mats.e(s, t) += gs * li.grad(t);
        }
      }
      for (int r = 0; r < p; ++r)
        for (int s = 0; s < p; ++s) {
          const double hrs = li.hess(r, s);
          for (int t = 0; t < p; ++t) mats.d[r](s, t) += hrs * li.grad(t);
        }
    }
    if (need_second) {
      // u_r[s,t] = d/dtheta_s of the (r,t) second-derivative sum, by central
      // differences of the exact second-derivative matrix.
      std::vector<double> shifted = theta;
      for (int s = 0; s < p; ++s) {
        double h = 1e-5 * std::max(1.0, std::fabs(theta[s]));
        volatile double tmp = theta[s] + h;
        h = tmp - theta[s];
        shifted[s] = theta[s] + h;
        const DenseMatrix hp = objective_hessian_sum(m, shifted);
        shifted[s] = theta[s] - h;
        const DenseMatrix hm = objective_hessian_sum(m, shifted);
        shifted[s] = theta[s];
        const double inv2h = 1.0 / (2.0 * h);
        for (int r = 0; r < p; ++r)
          for (int t = 0; t < p; ++t) mats.u[r](s, t) = (hp(r, t) - hm(r, t)) * inv2h;
      }
      // Each u_r is a Hessian slice, so enforce the symmetry the finite
      // difference only achieves approximately.
      for (int r = 0; r < p; ++r) {
        DenseMatrix sym = mats.u[r];
        for (int s = 0; s < p; ++s)
          for (int t = 0; t < p; ++t) sym(s, t) = 0.5 * (mats.u[r](s, t) + mats.u[r](t, s));
        mats.u[r] = sym;
      }
    }
  }

  check_finite(mats);
  return mats;
}

}  // namespace rbm
