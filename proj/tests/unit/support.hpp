#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "micromaser/micromaser.hpp"

namespace mmtest {

using namespace micromaser;

inline constexpr double kPi = std::numbers::pi;

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Fixed-tau micromaser at pump parameter theta.
inline MaserParams at_theta(double r, double n_th, double theta, double kappa = 1.0) {
  return fixed_maser(kappa, n_th, r, theta / std::sqrt(r / kappa));
}

/// Exponential laser at gbar and theta_bar, n_th = 0.
inline MaserParams exp_at(double gbar, double theta_bar, double kappa = 1.0) {
  return exponential_laser(kappa, 0.0, rate_for_theta(kappa, theta_bar, gbar), gbar);
}

inline PhotonStatistics stationary(const MaserParams& p) { return steady_state(p, auto_truncation(p)); }

}  // namespace mmtest

#include <functional>
#include <optional>

namespace mmtest {

inline std::optional<ErrorCode> error_code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace mmtest
