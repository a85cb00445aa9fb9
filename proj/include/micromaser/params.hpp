#pragma once

#include <cmath>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "micromaser/error.hpp"

namespace micromaser {

/// Interaction time known exactly (point mass).
struct FixedTime {
  double tau = 1.0;
};

/// Exponentially distributed interaction time, density exp(-tau/tau_bar)/tau_bar.
struct ExponentialTime {
  double tau_bar = 1.0;
};

struct TimeNode {
  double tau = 0.0;
  double weight = 0.0;
};

/// Riemann/quadrature form of the measure dp(tau): sum_k weight_k delta(tau - tau_k).
struct DiscreteTime {
  std::vector<TimeNode> nodes;
};

using InteractionTimeDistribution = std::variant<FixedTime, ExponentialTime, DiscreteTime>;

inline bool is_fixed(const InteractionTimeDistribution& d) {
  return std::holds_alternative<FixedTime>(d);
}
inline bool is_exponential(const InteractionTimeDistribution& d) {
  return std::holds_alternative<ExponentialTime>(d);
}

inline void validate(const InteractionTimeDistribution& dist) {
  std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, FixedTime>) {
          require(std::isfinite(d.tau) && d.tau > 0.0, "interaction time must be > 0");
        } else if constexpr (std::is_same_v<T, ExponentialTime>) {
          require(std::isfinite(d.tau_bar) && d.tau_bar > 0.0, "mean interaction time must be > 0");
        } else {
          require(!d.nodes.empty(), "discrete distribution needs at least one node");
          double total = 0.0;
          for (const auto& node : d.nodes) {
            require(std::isfinite(node.tau) && node.tau > 0.0, "node times must be > 0");
            require(std::isfinite(node.weight) && node.weight > 0.0, "node weights must be > 0");
            total += node.weight;
          }
          require(std::abs(total - 1.0) <= 1e-12, "node weights must sum to 1");
        }
      },
      dist);
}

/// Physical input record. Rates are in the same (arbitrary) time unit;
/// every derived linewidth carries that unit.
struct MaserParams {
  double kappa = 1.0;  ///< cavity decay rate
  double n_th = 0.0;   ///< thermal photon number
  double r = 0.0;      ///< atom injection rate
  double g = 1.0;      ///< one-photon Rabi frequency
  InteractionTimeDistribution tau_dist = FixedTime{};

  void validate() const {
    require(std::isfinite(kappa) && kappa > 0.0, "kappa must be > 0");
    require(std::isfinite(n_th) && n_th >= 0.0, "n_th must be >= 0");
    require(std::isfinite(r) && r >= 0.0, "pump rate r must be >= 0");
    require(std::isfinite(g) && g > 0.0, "coupling g must be > 0");
    micromaser::validate(tau_dist);
  }

  /// theta = (r/kappa)^{1/2} g tau
  double pump_parameter(double tau) const { return std::sqrt(r / kappa) * g * tau; }

  /// g*tau for a fixed distribution, g*tau_bar for an exponential one.
  double coupling_angle() const {
    if (const auto* f = std::get_if<FixedTime>(&tau_dist)) return g * f->tau;
    if (const auto* e = std::get_if<ExponentialTime>(&tau_dist)) return g * e->tau_bar;
    fail(ErrorCode::InvalidArgument, "coupling angle needs a fixed or exponential distribution");
  }

  /// theta for fixed tau, theta_bar for exponential tau.
  double theta() const { return std::sqrt(r / kappa) * coupling_angle(); }
};

inline MaserParams fixed_maser(double kappa, double n_th, double r, double g_tau) {
  MaserParams p{kappa, n_th, r, g_tau, FixedTime{1.0}};
  p.validate();
  return p;
}

inline MaserParams exponential_laser(double kappa, double n_th, double r, double g_tau_bar) {
  MaserParams p{kappa, n_th, r, g_tau_bar, ExponentialTime{1.0}};
  p.validate();
  return p;
}

/// Pump rate giving pump parameter theta at coupling angle g_tau.
inline double rate_for_theta(double kappa, double theta, double g_tau) {
  return kappa * (theta / g_tau) * (theta / g_tau);
}

}  // namespace micromaser
