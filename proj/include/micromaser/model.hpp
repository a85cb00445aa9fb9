#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <variant>

#include "micromaser/band_operator.hpp"
#include "micromaser/fock.hpp"
#include "micromaser/params.hpp"
#include "micromaser/quadrature.hpp"

namespace micromaser {

/// |sinc| below this is treated as an exact zero of the gain (trapping state).
inline constexpr double kTrappingSincCutoff = 1e-15;

/// Averages over the interaction-time measure of the trigonometric factors
/// that enter the pump terms. Arguments a, b are the operator eigenvalues
/// (sqrt(n) or sqrt(n+1)); the angle is g tau a.
///
/// Point masses and node lists are summed directly. The exponential measure
/// is either averaged in closed form or replaced by an explicit node list.
class PumpAverage {
 public:
  explicit PumpAverage(const MaserParams& params) : params_(params) {
    params.validate();
    if (const auto* e = std::get_if<ExponentialTime>(&params.tau_dist)) {
      closed_form_tau_bar_ = e->tau_bar;
    } else {
      nodes_ = quadrature_nodes(params.tau_dist, 1);
    }
  }

  /// Same measure, but sampled on the given nodes (any distribution).
  PumpAverage(const MaserParams& params, DiscreteTime nodes)
      : params_(params), nodes_(std::move(nodes)) {
    params.validate();
    validate(InteractionTimeDistribution{nodes_});
  }

  bool closed_form() const { return closed_form_tau_bar_.has_value(); }

  double cos_cos(double a, double b) const {
    if (closed_form_tau_bar_) {
      const double x = params_.g * *closed_form_tau_bar_;
      return exp_average_trig(TrigProduct::CosCos, x * a, x * b);
    }
    double s = 0.0;
    for (const auto& node : nodes_.nodes) {
      const double x = params_.g * node.tau;
      s += node.weight * std::cos(x * a) * std::cos(x * b);
    }
    return s;
  }

  double sin_sin(double a, double b) const {
    if (closed_form_tau_bar_) {
      const double x = params_.g * *closed_form_tau_bar_;
      return exp_average_trig(TrigProduct::SinSin, x * a, x * b);
    }
    double s = 0.0;
    for (const auto& node : nodes_.nodes) {
      const double x = params_.g * node.tau;
      s += node.weight * std::sin(x * a) * std::sin(x * b);
    }
    return s;
  }

  /// <theta^2 sinc^2(g tau sqrt(n+1))>, the pump term of the detailed-balance
  /// ratio p_{n+1}/p_n. Trapping zeros of sinc are returned as exact zeros.
  double gain_term(std::size_t n) const {
    const double root = std::sqrt(static_cast<double>(n + 1));
    const double pump = params_.r / params_.kappa;
    if (closed_form_tau_bar_) {
      return pump * exp_average_trig(TrigProduct::SinSin, params_.g * *closed_form_tau_bar_ * root,
                                     params_.g * *closed_form_tau_bar_ * root) /
             static_cast<double>(n + 1);
    }
    double s = 0.0;
    for (const auto& node : nodes_.nodes) {
      const double gt = params_.g * node.tau;
      const double sc = sinc(gt * root);
      if (std::abs(sc) < kTrappingSincCutoff) continue;
      s += node.weight * pump * gt * gt * sc * sc;
    }
    return s;
  }

 private:
  MaserParams params_;
  DiscreteTime nodes_;
  std::optional<double> closed_form_tau_bar_;
};

/// Jump operators of the micromaser master equation on |0>..|N>:
/// cavity loss, thermal gain, and per node the photon-conserving cosine
/// operator (shifted by the real scalar cos_shift) and the emitting sine operator.
inline LindbladSet micromaser_lindblad_set(const MaserParams& params, std::size_t N,
                                           const DiscreteTime& nodes, double cos_shift = 0.0) {
  params.validate();
  require(N >= 1, "micromaser_lindblad_set: N must be >= 1");
  const std::size_t dim = N + 1;
  const FockDiagonal phi = phi_eigenvalues(N);

  LindbladSet set;
  set.push_back(BandOperator::annihilation(dim) * std::sqrt(params.kappa * (1.0 + params.n_th)));
  if (params.n_th > 0.0) {
    set.push_back(BandOperator::creation(dim) * std::sqrt(params.kappa * params.n_th));
  }
  if (params.r == 0.0) return set;

  for (const auto& node : nodes.nodes) {
    const double amp = std::sqrt(params.r * node.weight);
    const double gt = params.g * node.tau;
    std::vector<double> c(dim), s(dim);
    for (std::size_t n = 0; n < dim; ++n) {
      c[n] = amp * std::cos(gt * phi.values[n]);
      s[n] = amp * gt * sinc(gt * phi.values[n]);
    }
    set.push_back(BandOperator::diagonal(std::move(c)) + BandOperator::identity(dim, cos_shift));
    set.push_back(BandOperator::creation(dim) * BandOperator::diagonal(std::move(s)));
  }
  return set;
}

}  // namespace micromaser
