#pragma once

#include <cmath>
#include <cstddef>

#include <Eigen/Dense>

#include "micromaser/band_operator.hpp"

namespace micromaser {

inline Eigen::MatrixXd to_dense(const BandOperator& op) {
  const auto dim = static_cast<Eigen::Index>(op.dim());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    const Eigen::Index row = c + op.shift();
    if (row >= 0 && row < dim) m(row, c) = op.value(static_cast<std::size_t>(c));
  }
  return m;
}

/// Full density-matrix Lindbladian of a jump set; small truncations only.
class DenseLindbladian {
 public:
  explicit DenseLindbladian(const LindbladSet& jumps) {
    require(!jumps.empty(), "DenseLindbladian: empty jump set");
    const auto dim = static_cast<Eigen::Index>(jumps.front().dim());
    decay_ = Eigen::MatrixXd::Zero(dim, dim);
    for (const BandOperator& L : jumps) {
      ops_.push_back(to_dense(L));
      decay_ += ops_.back().transpose() * ops_.back();
    }
  }

  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const {
    Eigen::MatrixXcd out = -0.5 * (decay_ * rho + rho * decay_);
    for (const auto& L : ops_) out += L * rho * L.transpose();
    return out;
  }

  /// Classical RK4 with a fixed step count.
  Eigen::MatrixXcd evolve(Eigen::MatrixXcd rho, double t, std::size_t steps) const {
    const double h = t / static_cast<double>(steps);
    for (std::size_t i = 0; i < steps; ++i) {
      const Eigen::MatrixXcd k1 = apply(rho);
      const Eigen::MatrixXcd k2 = apply(rho + 0.5 * h * k1);
      const Eigen::MatrixXcd k3 = apply(rho + 0.5 * h * k2);
      const Eigen::MatrixXcd k4 = apply(rho + h * k3);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return rho;
  }

 private:
  std::vector<Eigen::MatrixXd> ops_;
  Eigen::MatrixXd decay_;
};

}  // namespace micromaser
