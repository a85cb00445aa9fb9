#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "micromaser/error.hpp"

namespace micromaser {

/// Real operator on |0>..|N> with a single non-zero band:
/// <m + shift| O |m> = values[m]. Entries whose row falls outside the
/// truncated space are stored as zero, so products agree with products of
/// the truncated matrices.
class BandOperator {
 public:
  BandOperator(std::size_t dim, int shift, std::vector<double> values)
      : dim_(dim), shift_(shift), values_(std::move(values)) {
    require(values_.size() == dim_, "BandOperator: values must have one entry per column");
    for (std::size_t m = 0; m < dim_; ++m) {
      if (!in_range(static_cast<long>(m) + shift_)) values_[m] = 0.0;
    }
  }

  static BandOperator diagonal(std::vector<double> values) {
    const std::size_t dim = values.size();
    return BandOperator(dim, 0, std::move(values));
  }

  static BandOperator identity(std::size_t dim, double scale = 1.0) {
    return BandOperator(dim, 0, std::vector<double>(dim, scale));
  }

  /// a|m> = sqrt(m)|m-1>
  static BandOperator annihilation(std::size_t dim) {
    std::vector<double> v(dim);
    for (std::size_t m = 0; m < dim; ++m) v[m] = std::sqrt(static_cast<double>(m));
    return BandOperator(dim, -1, std::move(v));
  }

  /// a^dagger|m> = sqrt(m+1)|m+1>, with a^dagger|N> = 0 in the truncation.
  static BandOperator creation(std::size_t dim) {
    std::vector<double> v(dim);
    for (std::size_t m = 0; m < dim; ++m) v[m] = std::sqrt(static_cast<double>(m + 1));
    return BandOperator(dim, +1, std::move(v));
  }

  std::size_t dim() const { return dim_; }
  int shift() const { return shift_; }
  const std::vector<double>& values() const { return values_; }
  double value(std::size_t column) const { return values_[column]; }

  /// Matrix element <row|O|column>.
  double element(std::size_t row, std::size_t column) const {
    return static_cast<long>(row) == static_cast<long>(column) + shift_ ? values_[column] : 0.0;
  }

  BandOperator adjoint() const {
    std::vector<double> v(dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) {
      const long source = static_cast<long>(i) - shift_;
      if (in_range(source)) v[i] = values_[static_cast<std::size_t>(source)];
    }
    return BandOperator(dim_, -shift_, std::move(v));
  }

  BandOperator operator*(const BandOperator& rhs) const {
    require(dim_ == rhs.dim_, "BandOperator: dimension mismatch");
    std::vector<double> v(dim_, 0.0);
    for (std::size_t m = 0; m < dim_; ++m) {
      const long mid = static_cast<long>(m) + rhs.shift_;
      if (in_range(mid)) v[m] = values_[static_cast<std::size_t>(mid)] * rhs.values_[m];
    }
    return BandOperator(dim_, shift_ + rhs.shift_, std::move(v));
  }

  BandOperator operator*(double s) const {
    std::vector<double> v = values_;
    for (double& x : v) x *= s;
    return BandOperator(dim_, shift_, std::move(v));
  }

  BandOperator operator+(const BandOperator& rhs) const { return combine(rhs, 1.0); }
  BandOperator operator-(const BandOperator& rhs) const { return combine(rhs, -1.0); }

  double trace() const {
    if (shift_ != 0) return 0.0;
    double t = 0.0;
    for (double x : values_) t += x;
    return t;
  }

 private:
  bool in_range(long i) const { return i >= 0 && i < static_cast<long>(dim_); }

  BandOperator combine(const BandOperator& rhs, double sign) const {
    require(dim_ == rhs.dim_, "BandOperator: dimension mismatch");
    // Sums of different bands leave the single-band representation.
    require(shift_ == rhs.shift_, "BandOperator: cannot add operators on different bands");
    std::vector<double> v(dim_);
    for (std::size_t m = 0; m < dim_; ++m) v[m] = values_[m] + sign * rhs.values_[m];
    return BandOperator(dim_, shift_, std::move(v));
  }

  std::size_t dim_;
  int shift_;
  std::vector<double> values_;
};

inline BandOperator commutator(const BandOperator& a, const BandOperator& b) {
  return a * b - b * a;
}

/// Jump operators L_lambda of a Lindblad generator, rates folded in.
using LindbladSet = std::vector<BandOperator>;

}  // namespace micromaser
