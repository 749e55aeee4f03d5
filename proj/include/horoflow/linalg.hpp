#pragma once

// Small dense linear algebra (dimension <= 16 in practice): symmetric Jacobi
// eigendecomposition, modified Gram-Schmidt QR, Pade matrix exponential.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace horoflow {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);
  static Matrix from_columns(std::span<const Vector> columns);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> values() const { return data_; }
  Vector column(std::size_t j) const;
  Vector row(std::size_t i) const;

  Matrix transposed() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);
  Matrix& operator/=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator/(Matrix a, double s);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(double s, Vector a);

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
bool all_finite(const Matrix& a);
bool all_finite(std::span<const double> v);

Matrix symmetrized(const Matrix& a);
// max |a_ij - a_ji|
double asymmetry(const Matrix& a);

// Eigenvalues sorted descending; eigenvector k is column k of `vectors`.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};

// Cyclic Jacobi on (a + a^T) / 2.
SymmetricEigen sym_eigen(const Matrix& a);

// V diag(fn(lambda)) V^T
Matrix sym_apply(const SymmetricEigen& eig, const std::function<double(double)>& fn);
Matrix sym_log(const Matrix& a);
Matrix sym_exp(const Matrix& a);

// Largest singular value, from the Jacobi spectrum of a^T a.
double spectral_norm(const Matrix& a);
// Spectral norm of a symmetric matrix: max |eigenvalue|.
double sym_spectral_norm(const Matrix& a);

// Lower-triangular L with a = L L^T, or nullopt when a is not positive definite.
std::optional<Matrix> cholesky(const Matrix& a);

struct LuFactors {
  Matrix lu;
  std::vector<std::size_t> perm;
  int sign = 1;
  bool singular = false;
};
LuFactors lu_factor(const Matrix& a);
Matrix lu_solve(const LuFactors& f, const Matrix& b);
Matrix inverse(const Matrix& a);
double log_abs_det(const Matrix& a);

// Solves L X = B for lower-triangular L.
Matrix forward_substitute(const Matrix& lower, const Matrix& b);

// Pade [6/6] with scaling and squaring.
Matrix expm(const Matrix& a);

// a = Q R with Q orthonormal columns and diag(R) > 0. Modified Gram-Schmidt,
// each column orthogonalized twice.
struct QrResult {
  Matrix q;
  Matrix r;
};
QrResult mgs_qr(const Matrix& a);

}  // namespace horoflow
