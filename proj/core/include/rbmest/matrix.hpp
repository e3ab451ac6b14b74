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

#ifndef RBMEST_MATRIX_HPP
#define RBMEST_MATRIX_HPP

#include <functional>
#include <initializer_list>
#include <vector>

#include "rbmest/errors.hpp"

namespace rbm {

// Row-major dense matrix. Just enough surface for the estimating machinery;
// not a general linear-algebra library.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, fill) {}

  static DenseMatrix identity(int n);
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

  DenseMatrix transpose() const;
  double max_abs() const;
  // Largest absolute column sum.
  double norm1() const;

  DenseMatrix& operator+=(const DenseMatrix& o);
  DenseMatrix& operator-=(const DenseMatrix& o);
  DenseMatrix& operator*=(double c);

  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
  friend DenseMatrix operator*(DenseMatrix a, double c) { return a *= c; }
  friend DenseMatrix operator*(double c, DenseMatrix a) { return a *= c; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
std::vector<double> matvec(const DenseMatrix& a, const std::vector<double>& x);

// PA = LU with partial pivoting. A pivot below 1e-13 * max|A_ij| throws
// SingularMatrix. rcond is the exact 1-norm reciprocal condition number
// 1 / (norm1(A) * norm1(A^-1)); the matrices here are small enough that the
// inverse norm is computed by n solves rather than estimated.
struct LuFactorization {
  int n = 0;
  DenseMatrix lu;          // L below the diagonal (unit), U on and above
  std::vector<int> perm;   // row permutation applied to the input
  double det_sign = 1.0;   // sign of det(A)
  double rcond = 0.0;
};

LuFactorization lu_factor(const DenseMatrix& a);

std::vector<double> solve(const LuFactorization& f, const std::vector<double>& b);
// Solves A X = B column by column.
DenseMatrix solve(const LuFactorization& f, const DenseMatrix& b);

double log_abs_det(const LuFactorization& f);

// tr(A B) without forming the product.
double trace_of_product(const DenseMatrix& a, const DenseMatrix& b);
double trace(const DenseMatrix& a);

// Central-difference Jacobian of f at x; row i is the gradient of f_i.
// Step per coordinate: cbrt(machine eps) * max(1, |x_j|), re-rounded so the
// two evaluation points differ by an exactly representable amount.
DenseMatrix finite_diff_jacobian(
    const std::function<std::vector<double>(const std::vector<double>&)>& f,
    const std::vector<double>& x);

}  // namespace rbm

#endif  // RBMEST_MATRIX_HPP
