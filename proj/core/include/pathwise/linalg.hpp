#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pathwise {

using Vector = std::vector<double>;

/// Small dense row-major square matrix. Dimensions here are the number of
/// traded assets, so nothing more elaborate is needed.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);
  /// u vᵀ
  static Matrix outer(std::span<const double> u, std::span<const double> v);

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  std::span<const double> data() const { return a_; }

  double trace() const;
  /// max |M - Mᵀ|
  double max_asymmetry() const;
  double max_abs() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }
  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
/// tr(A B)
double trace_product(const Matrix& a, const Matrix& b);
Vector subtract(std::span<const double> a, std::span<const double> b);

}  // namespace pathwise
