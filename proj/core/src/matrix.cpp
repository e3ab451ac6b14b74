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

#include "rbmest/matrix.hpp"

#include <cmath>
#include <limits>

namespace rbm {

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows.begin()->size());
  DenseMatrix m(r, c);
  int i = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != c)
      throw DimensionMismatch("ragged initializer for DenseMatrix");
    int j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::fabs(v));
  return m;
}

double DenseMatrix::norm1() const {
  double m = 0.0;
  for (int j = 0; j < cols_; ++j) {
    double s = 0.0;
    for (int i = 0; i < rows_; ++i) s += std::fabs((*this)(i, j));
    m = std::max(m, s);
  }
  return m;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw DimensionMismatch("matrix addition shape mismatch");
  for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw DimensionMismatch("matrix subtraction shape mismatch");
  for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double c) {
  for (double& v : a_) v *= c;
  return *this;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matmul shape mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

std::vector<double> matvec(const DenseMatrix& a, const std::vector<double>& x) {
  if (a.cols() != static_cast<int>(x.size()))
    throw DimensionMismatch("matvec shape mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

namespace {

void forward_back_substitute(const LuFactorization& f, std::vector<double>& x) {
  const int n = f.n;
  // Ly = Pb (unit lower triangle).
  for (int i = 1; i < n; ++i) {
    double s = x[i];
    for (int j = 0; j < i; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s;
  }
  // Ux = y.
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int j = i + 1; j < n; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s / f.lu(i, i);
  }
}

}  // namespace

LuFactorization lu_factor(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("lu_factor needs a square matrix");
  const int n = a.rows();
  if (n == 0) throw DimensionMismatch("lu_factor on an empty matrix");

  const double scale = a.max_abs();
  const double threshold = 1e-13 * scale;

  LuFactorization f;
  f.n = n;
  f.lu = a;
  f.perm.resize(n);
  for (int i = 0; i < n; ++i) f.perm[i] = i;

  const double norm_a = a.norm1();

  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::fabs(f.lu(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double v = std::fabs(f.lu(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (!(best > threshold) || !std::isfinite(best))
      throw SingularMatrix("pivot " + std::to_string(best) + " below threshold at column " +
                           std::to_string(k));
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
      f.det_sign = -f.det_sign;
    }
    const double inv_piv = 1.0 / f.lu(k, k);
    for (int i = k + 1; i < n; ++i) {
      const double m = f.lu(i, k) * inv_piv;
      f.lu(i, k) = m;
      if (m == 0.0) continue;
      for (int j = k + 1; j < n; ++j) f.lu(i, j) -= m * f.lu(k, j);
    }
  }
  // det sign also flips with each negative U diagonal entry; fold them in.
  for (int i = 0; i < n; ++i)
    if (f.lu(i, i) < 0) f.det_sign = -f.det_sign;

  // Exact 1-norm of the inverse via n solves.
  double norm_ainv = 0.0;
  std::vector<double> col(n);
  for (int j = 0; j < n; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    // Apply the permutation to e_j up front: (Pb)_i = b_perm[i].
    for (int i = 0; i < n; ++i) col[i] = (f.perm[i] == j) ? 1.0 : 0.0;
    forward_back_substitute(f, col);
    double s = 0.0;
    for (double v : col) s += std::fabs(v);
    norm_ainv = std::max(norm_ainv, s);
  }
  f.rcond = (norm_a > 0 && norm_ainv > 0) ? 1.0 / (norm_a * norm_ainv) : 0.0;
  return f;
}

std::vector<double> solve(const LuFactorization& f, const std::vector<double>& b) {
  if (static_cast<int>(b.size()) != f.n)
    throw DimensionMismatch("solve: rhs length != matrix order");
  std::vector<double> x(f.n);
  for (int i = 0; i < f.n; ++i) x[i] = b[f.perm[i]];
  forward_back_substitute(f, x);
  return x;
}

DenseMatrix solve(const LuFactorization& f, const DenseMatrix& b) {
  if (b.rows() != f.n) throw DimensionMismatch("solve: rhs rows != matrix order");
  DenseMatrix x(f.n, b.cols());
  std::vector<double> col(f.n);
  for (int j = 0; j < b.cols(); ++j) {
    for (int i = 0; i < f.n; ++i) col[i] = b(f.perm[i], j);
    forward_back_substitute(f, col);
    for (int i = 0; i < f.n; ++i) x(i, j) = col[i];
  }
  return x;
}

double log_abs_det(const LuFactorization& f) {
  double s = 0.0;
  for (int i = 0; i < f.n; ++i) s += std::log(std::fabs(f.lu(i, i)));
  return s;
}

double trace(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("trace of a non-square matrix");
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i) s += a(i, i);
  return s;
}

double trace_of_product(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols())
    throw DimensionMismatch("trace_of_product shape mismatch");
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) s += a(i, j) * b(j, i);
  return s;
}

DenseMatrix finite_diff_jacobian(
    const std::function<std::vector<double>(const std::vector<double>&)>& f,
    const std::vector<double>& x) {
  static const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
  const int p = static_cast<int>(x.size());
  if (p == 0) throw EmptyParameter("finite_diff_jacobian with empty x");
  std::vector<double> xp = x, xm = x;
  DenseMatrix jac;
  for (int j = 0; j < p; ++j) {
    double h = h0 * std::max(1.0, std::fabs(x[j]));
    volatile double t = x[j] + h;
    h = t - x[j];
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    const std::vector<double> fp = f(xp);
    const std::vector<double> fm = f(xm);
    if (fp.size() != fm.size()) throw DimensionMismatch("f dimension varies across calls");
    if (jac.rows() == 0) jac = DenseMatrix(static_cast<int>(fp.size()), p);
    for (int i = 0; i < jac.rows(); ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return jac;
}

}  // namespace rbm
