#include "pathwise/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pathwise {

namespace {

void require_same_size(const Matrix& a, const Matrix& b) {
  if (a.size() != b.size()) throw std::invalid_argument("matrix dimension mismatch");
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::outer(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw std::invalid_argument("outer: dimension mismatch");
  Matrix m(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
  return m;
}

double Matrix::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, i);
  return s;
}

double Matrix::max_asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
  return worst;
}

double Matrix::max_abs() const {
  double worst = 0.0;
  for (double v : a_) worst = std::max(worst, std::abs(v));
  return worst;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_size(*this, other);
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += other.a_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_size(*this, other);
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= other.a_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : a_) v *= s;
  return *this;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double trace_product(const Matrix& a, const Matrix& b) {
  require_same_size(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < a.size(); ++k) s += a(i, k) * b(k, i);
  return s;
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("subtract: dimension mismatch");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

}  // namespace pathwise
