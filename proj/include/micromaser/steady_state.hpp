#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "micromaser/model.hpp"
#include "micromaser/params.hpp"
#include "micromaser/quadrature.hpp"

namespace micromaser {

inline constexpr double kTailTolerance = 1e-12;

/// Normalised diagonal p_0..p_N of the stationary density operator.
struct PhotonStatistics {
  std::vector<double> p;
  double tail_mass_bound = 0.0;  ///< bound on the probability beyond N

  std::size_t truncation() const { return p.size() - 1; }
  double operator[](std::size_t n) const { return p[n]; }
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

inline Moments moments(const PhotonStatistics& stats) {
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t n = 0; n < stats.p.size(); ++n) {
    const double x = static_cast<double>(n);
    m1 += x * stats.p[n];
    m2 += x * x * stats.p[n];
  }
  return {m1, m2 - m1 * m1};
}

inline double mean_photon_number(const PhotonStatistics& stats) { return moments(stats).mean; }

inline PhotonStatistics vacuum_statistics(std::size_t N) {
  PhotonStatistics s{std::vector<double>(N + 1, 0.0), 0.0};
  s.p[0] = 1.0;
  return s;
}

/// Stationary distribution of a birth-death chain from its ratios
/// p_{n+1}/p_n = ratio(n), n = 0..N-1. The recurrence runs in log space and
/// is normalised once at the end. ratio(N) is used only for the tail check;
/// `tail_ratio_bound` bounds ratio(n) for every n >= N (>= 1 means unknown).
template <class Ratio>
PhotonStatistics stationary_from_ratios(std::size_t N, Ratio&& ratio, double tail_ratio_bound,
                                        bool check_truncation = true) {
  require(N >= 1, "steady state: truncation N must be >= 1");
  constexpr double kMinusInf = -std::numeric_limits<double>::infinity();
  std::vector<double> log_p(N + 1, kMinusInf);
  log_p[0] = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    if (log_p[n] == kMinusInf) break;
    const double q = ratio(n);
    log_p[n + 1] = q > 0.0 ? log_p[n] + std::log(q) : kMinusInf;
  }
  const double top = *std::max_element(log_p.begin(), log_p.end());

  PhotonStatistics s;
  s.p.resize(N + 1);
  double total = 0.0;
  for (std::size_t n = 0; n <= N; ++n) {
    s.p[n] = log_p[n] == kMinusInf ? 0.0 : std::exp(log_p[n] - top);
    total += s.p[n];
  }
  for (double& x : s.p) x /= total;

  const double p_max = *std::max_element(s.p.begin(), s.p.end());
  const double next = s.p[N] > 0.0 ? ratio(N) : 0.0;
  if (s.p[N] == 0.0 || next == 0.0) {
    s.tail_mass_bound = 0.0;
  } else {
    const double q = std::max(next, tail_ratio_bound);
    s.tail_mass_bound =
        q < 1.0 ? s.p[N] * q / (1.0 - q) : std::numeric_limits<double>::infinity();
    if (check_truncation && s.p[N] > kTailTolerance * p_max) {
      fail(ErrorCode::TruncationInadequate,
           "truncation N=" + std::to_string(N) + " too small: p_N/max p = " +
               std::to_string(s.p[N] / p_max));
    }
  }
  return s;
}

/// Upper bound of the detailed-balance ratio for every n >= N, valid for any
/// interaction-time measure since sin^2 <= 1.
inline double ratio_bound_beyond(const MaserParams& params, std::size_t N) {
  return (params.n_th + params.r / params.kappa / static_cast<double>(N + 1)) /
         (1.0 + params.n_th);
}

enum class TauAveraging {
  Auto,        ///< point mass / node sums / closed form for the exponential measure
  Quadrature,  ///< discretise the measure (node doubling unless nodes are given)
};

struct SteadyStateOptions {
  TauAveraging averaging = TauAveraging::Auto;
  int quadrature_nodes = 0;  ///< 0 = automatic doubling
  bool check_truncation = true;
};

/// Stationary photon statistics from
/// p_{n+1} = [n_th + <theta^2 sinc^2(g tau sqrt(n+1))>] p_n / (1 + n_th).
inline PhotonStatistics steady_state(const MaserParams& params, std::size_t N,
                                     const SteadyStateOptions& options = {}) {
  params.validate();
  require(N >= 1, "steady_state: truncation N must be >= 1");
  if (params.r == 0.0 && params.n_th == 0.0) return vacuum_statistics(N);

  const double bound = ratio_bound_beyond(params, N);
  auto solve = [&](const PumpAverage& avg) {
    return stationary_from_ratios(
        N, [&](std::size_t n) { return (params.n_th + avg.gain_term(n)) / (1.0 + params.n_th); },
        bound, options.check_truncation);
  };

  if (options.averaging == TauAveraging::Auto) return solve(PumpAverage(params));
  if (options.quadrature_nodes > 0) {
    return solve(PumpAverage(params, quadrature_nodes(params.tau_dist, options.quadrature_nodes)));
  }
  if (!is_exponential(params.tau_dist)) return solve(PumpAverage(params));
  auto converged = converge_by_doubling(
      [&](int n_nodes) {
        return solve(PumpAverage(params, quadrature_nodes(params.tau_dist, n_nodes)));
      },
      [](const PhotonStatistics& a, const PhotonStatistics& b) {
        double d = 0.0;
        for (std::size_t n = 0; n < a.p.size(); ++n) d = std::max(d, std::abs(a.p[n] - b.p[n]));
        return d;
      },
      1e-12);
  return converged.value;
}

/// Closed-form statistics for an exponentially distributed interaction time
/// without thermal photons: p_{n+1} = 2 theta_bar^2 p_n / (1 + 4 gbar^2 (n+1)).
inline PhotonStatistics steady_state_exp(const MaserParams& params, std::size_t N,
                                         bool check_truncation = true) {
  params.validate();
  require(is_exponential(params.tau_dist), "steady_state_exp: needs an exponential distribution");
  require(params.n_th == 0.0, "steady_state_exp: thermal photons are not included (n_th = 0)");
  require(N >= 1, "steady_state_exp: truncation N must be >= 1");
  const double gbar = params.coupling_angle();
  const double theta_bar = params.theta();
  if (theta_bar == 0.0) return vacuum_statistics(N);
  const double two_theta2 = 2.0 * theta_bar * theta_bar;
  auto ratio = [&](std::size_t n) {
    return two_theta2 / (1.0 + 4.0 * gbar * gbar * static_cast<double>(n + 1));
  };
  return stationary_from_ratios(N, ratio, ratio(N), check_truncation);
}

struct TruncationOptions {
  std::size_t hard_limit = 20000;
  std::size_t minimum = 50;
};

/// Basis size such that the detailed-balance ratio is < 1 for all n >= N/4
/// and p_N <= 1e-13 max p (or the support ends exactly at a trapping state).
inline std::size_t auto_truncation(const MaserParams& params, const TruncationOptions& options = {}) {
  params.validate();
  if (params.r == 0.0 && params.n_th == 0.0) return options.minimum;

  const PumpAverage avg(params);
  auto ratio = [&](std::size_t n) {
    return (params.n_th + avg.gain_term(n)) / (1.0 + params.n_th);
  };

  // Beyond r/kappa the ratio is < 1 for any measure.
  const double pump = params.r / params.kappa;
  if (pump > static_cast<double>(options.hard_limit)) {
    fail(ErrorCode::ResourceExhausted, "auto_truncation: pump r/kappa exceeds the hard limit");
  }
  const auto n_safe = static_cast<std::size_t>(std::floor(pump));
  std::size_t last_gain = 0;  // one past the last n with ratio >= 1
  for (std::size_t n = 0; n < n_safe; ++n) {
    if (ratio(n) >= 1.0) last_gain = n + 1;
  }
  std::size_t N = 4 * std::max(options.minimum, last_gain);
  if (N > options.hard_limit) {
    fail(ErrorCode::ResourceExhausted,
         "auto_truncation: required N=" + std::to_string(N) + " exceeds the hard limit");
  }

  // Extend until the tail is negligible.
  double log_p = 0.0;
  double log_max = 0.0;
  for (std::size_t n = 0;; ++n) {
    const double q = ratio(n);
    if (q == 0.0) return std::max(N, n + 1);
    log_p += std::log(q);
    log_max = std::max(log_max, log_p);
    if (n + 1 >= N && log_p - log_max <= std::log(1e-13)) return n + 1;
    if (n + 1 >= options.hard_limit) {
      fail(ErrorCode::ResourceExhausted, "auto_truncation: tail not resolved within the hard limit");
    }
  }
}

}  // namespace micromaser
