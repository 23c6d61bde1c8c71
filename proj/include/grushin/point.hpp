#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "grushin/errors.hpp"

namespace grushin {

/// Largest ambient dimension a Point can carry inline.
inline constexpr std::size_t kMaxDim = 8;

/// A point (or vector) of R^n with inline storage, n <= kMaxDim.
class Point {
 public:
  Point() = default;

  explicit Point(std::size_t dim) : dim_(dim) {
    if (dim == 0 || dim > kMaxDim) {
      throw UnsupportedDimension("dimension " + std::to_string(dim) + " out of range [1, 8]");
    }
  }

  Point(std::initializer_list<double> coords) : Point(coords.size()) {
    std::copy(coords.begin(), coords.end(), c_.begin());
  }

  explicit Point(std::span<const double> coords) : Point(coords.size()) {
    std::copy(coords.begin(), coords.end(), c_.begin());
  }

  [[nodiscard]] std::size_t dim() const { return dim_; }
  double& operator[](std::size_t i) { return c_[i]; }
  double operator[](std::size_t i) const { return c_[i]; }

  [[nodiscard]] std::span<const double> coords() const { return {c_.data(), dim_}; }
  [[nodiscard]] std::vector<double> to_vector() const { return {c_.begin(), c_.begin() + dim_}; }

  [[nodiscard]] bool finite() const {
    return std::all_of(c_.begin(), c_.begin() + dim_, [](double v) { return std::isfinite(v); });
  }

  Point& operator+=(const Point& o) {
    for (std::size_t i = 0; i < dim_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Point& operator-=(const Point& o) {
    for (std::size_t i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Point& operator*=(double s) {
    for (std::size_t i = 0; i < dim_; ++i) c_[i] *= s;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, double s) { return a *= s; }
  friend Point operator*(double s, Point a) { return a *= s; }

  friend bool operator==(const Point& a, const Point& b) {
    if (a.dim_ != b.dim_) return false;
    for (std::size_t i = 0; i < a.dim_; ++i)
      if (a.c_[i] != b.c_[i]) return false;
    return true;
  }

  /// Lexicographic order on coordinates; used for deterministic tie-breaking.
  friend bool lex_less(const Point& a, const Point& b) {
    return std::lexicographical_compare(a.c_.begin(), a.c_.begin() + a.dim_, b.c_.begin(),
                                        b.c_.begin() + b.dim_);
  }

 private:
  std::array<double, kMaxDim> c_{};
  std::size_t dim_ = 0;
};

inline double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }

inline double dist(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

/// Point on the segment a->b at parameter t in [0, 1].
inline Point lerp(const Point& a, const Point& b, double t) {
  Point p(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) p[i] = a[i] + t * (b[i] - a[i]);
  return p;
}

inline void require_same_dim(const Point& a, const Point& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()));
  }
}

std::string to_string(const Point& p);

}  // namespace grushin
