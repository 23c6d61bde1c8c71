#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "grushin/metric.hpp"

namespace grushin {

/// Additive-recurrence low-discrepancy sequence (the R_d sequence) with a seeded random
/// shift, so that runs with the same seed reproduce the same points.
class QuasiRandom {
 public:
  QuasiRandom(std::size_t dim, std::uint64_t seed) : dim_(dim), shift_(dim), alpha_(dim) {
    // phi_d is the positive root of x^(d+1) = x + 1.
    double phi = 2.0;
    for (int i = 0; i < 64; ++i) phi = std::pow(1.0 + phi, 1.0 / double(dim + 1));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < dim; ++i) {
      alpha_[i] = std::fmod(std::pow(1.0 / phi, double(i + 1)), 1.0);
      shift_[i] = u(rng);
    }
  }

  /// Next point of the unit cube [0, 1)^dim.
  std::vector<double> next_unit() {
    std::vector<double> u(dim_);
    ++k_;
    for (std::size_t i = 0; i < dim_; ++i) u[i] = std::fmod(shift_[i] + double(k_) * alpha_[i], 1.0);
    return u;
  }

  /// Next point mapped into `box`; dim must equal box.dim().
  Point next(const BoundingBox& box) { return place(box, next_unit(), 0); }

  /// Coordinates offset..offset+n-1 of a unit sample mapped into `box`.
  static Point place(const BoundingBox& box, const std::vector<double>& u, std::size_t offset) {
    Point p(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i)
      p[i] = box.lo[i] + u[offset + i] * (box.hi[i] - box.lo[i]);
    return p;
  }

 private:
  std::size_t dim_;
  std::vector<double> shift_;
  std::vector<double> alpha_;
  std::uint64_t k_ = 0;
};

}  // namespace grushin
