#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "micromaser/lindblad.hpp"
#include "micromaser/model.hpp"
#include "micromaser/params.hpp"
#include "micromaser/quadrature.hpp"
#include "micromaser/steady_state.hpp"

namespace micromaser {

/// D and its three additive parts; every field is a rate except n_mean.
struct LinewidthBreakdown {
  double total = 0.0;
  double thermal = 0.0;
  double cos = 0.0;  ///< dephasing by atoms leaving in the excited state
  double sin = 0.0;  ///< gain
  double n_mean = 0.0;
};

struct LinewidthOptions {
  /// Nodes for the exponential measure; 0 doubles 8 -> 512 until the
  /// result moves by less than `doubling_tolerance` (relative).
  int quadrature_nodes = 0;
  double doubling_tolerance = 1e-8;
};

namespace detail {

inline double checked_mean(const PhotonStatistics& stats) {
  const double n_mean = mean_photon_number(stats);
  if (!(n_mean > 0.0)) {
    fail(ErrorCode::UndefinedLinewidth, "linewidth undefined for the vacuum (<n> = 0)");
  }
  return n_mean;
}

/// Evaluates `eval(nodes)` on the measure's own nodes, or with node
/// doubling for the exponential measure. `key` picks the scalar that is
/// monitored for convergence.
template <class Eval, class Key>
auto with_tau_nodes(const MaserParams& params, const LinewidthOptions& options, Eval&& eval,
                    Key&& key) {
  if (!is_exponential(params.tau_dist)) return eval(quadrature_nodes(params.tau_dist, 1));
  if (options.quadrature_nodes > 0) {
    return eval(quadrature_nodes(params.tau_dist, options.quadrature_nodes));
  }
  return converge_by_doubling(
             [&](int n) { return eval(quadrature_nodes(params.tau_dist, n)); },
             [&](const auto& a, const auto& b) {
               return std::abs(key(a) - key(b)) / std::max(std::abs(key(b)), 1e-300);
             },
             options.doubling_tolerance)
      .value;
}

}  // namespace detail

/// Dephasing-resolved linewidth:
///   D <n> = kappa n_th + sum_k dp_k sum_n p_n r { [cos(g tau_k sqrt(n+1)) - cos(g tau_k sqrt(n))]^2 n
///                                     + [sqrt(n+1) sin(g tau_k sqrt(n+1)) - sqrt(n) sin(g tau_k sqrt(n))]^2 }
inline LinewidthBreakdown linewidth_main(const MaserParams& params, const PhotonStatistics& stats,
                                         const LinewidthOptions& options = {}) {
  params.validate();
  const double n_mean = detail::checked_mean(stats);
  auto evaluate = [&](const DiscreteTime& nodes) {
    double cos_part = 0.0;
    double sin_part = 0.0;
    for (std::size_t n = 0; n < stats.p.size(); ++n) {
      if (stats.p[n] == 0.0) continue;
      const double x = static_cast<double>(n);
      const double root0 = std::sqrt(x);
      const double root1 = std::sqrt(x + 1.0);
      double c_acc = 0.0;
      double s_acc = 0.0;
      for (const auto& node : nodes.nodes) {
        const double gt = params.g * node.tau;
        const double dc = std::cos(gt * root1) - std::cos(gt * root0);
        const double ds = root1 * std::sin(gt * root1) - root0 * std::sin(gt * root0);
        c_acc += node.weight * dc * dc * x;
        s_acc += node.weight * ds * ds;
      }
      cos_part += stats.p[n] * c_acc;
      sin_part += stats.p[n] * s_acc;
    }
    LinewidthBreakdown b;
    b.n_mean = n_mean;
    b.thermal = params.kappa * params.n_th / n_mean;
    b.cos = params.r * cos_part / n_mean;
    b.sin = params.r * sin_part / n_mean;
    b.total = b.thermal + b.cos + b.sin;
    return b;
  };
  return detail::with_tau_nodes(params, options, evaluate,
                                [](const LinewidthBreakdown& b) { return b.total; });
}

struct LindbladLinewidthOptions : LinewidthOptions {
  /// Real scalar added to each cosine jump operator; the result must not
  /// depend on it.
  double cos_shift = 0.0;
};

/// D from the literal commutator trace over the micromaser jump set.
inline double linewidth_from_lindblad(const MaserParams& params, const PhotonStatistics& stats,
                                      const LindbladLinewidthOptions& options = {}) {
  params.validate();
  const double n_mean = detail::checked_mean(stats);
  const std::size_t N = stats.truncation();
  auto evaluate = [&](const DiscreteTime& nodes) {
    return lindblad_linewidth_product(micromaser_lindblad_set(params, N, nodes, options.cos_shift),
                                      stats) /
           n_mean;
  };
  return detail::with_tau_nodes(params, options, evaluate, [](double d) { return d; });
}

/// Narrow-distribution estimate for a fixed interaction time,
///   D = kappa (1 + 2 n_th) / (4 <n>) + 4 r sin^2(g tau / (4 sqrt(<n>))).
/// `literal` drops kappa from the first term, as the formula is usually printed.
inline double linewidth_scully(const MaserParams& params, const PhotonStatistics& stats,
                               bool literal = false) {
  params.validate();
  require(is_fixed(params.tau_dist), "linewidth_scully: needs a fixed interaction time");
  const double n_mean = detail::checked_mean(stats);
  const double gt = params.coupling_angle();
  const double s = std::sin(gt / (4.0 * std::sqrt(n_mean)));
  const double spontaneous = (1.0 + 2.0 * params.n_th) / (4.0 * n_mean);
  return (literal ? spontaneous : params.kappa * spontaneous) + 4.0 * params.r * s * s;
}

/// n-resolved term of the McGowan-Schieve trace for one interaction time,
/// already multiplied by n (but not by p_n or the node weight).
inline double mcgowan_weight(const MaserParams& params, double g_tau, std::size_t n) {
  const double x = static_cast<double>(n);
  if (n == 0) return 0.0;
  const double root0 = std::sqrt(x);
  const double root1 = std::sqrt(x + 1.0);
  const double pump = params.r * (1.0 - std::sin(g_tau * root1) * std::sin(g_tau * root0) -
                                  std::cos(g_tau * root1) * std::cos(g_tau * root0));
  const double loss = params.kappa * (1.0 + params.n_th) * (x - 0.5 - std::sqrt(x * (x - 1.0)));
  const double gain = params.kappa * params.n_th * (x + 0.5 - root1 * root0);
  return 2.0 * (pump + loss + gain) * x;
}

/// McGowan-Schieve linewidth, averaged over the same nodes as linewidth_main.
inline double linewidth_mcgowan(const MaserParams& params, const PhotonStatistics& stats,
                                const LinewidthOptions& options = {}) {
  params.validate();
  const double n_mean = detail::checked_mean(stats);
  auto evaluate = [&](const DiscreteTime& nodes) {
    double total = 0.0;
    for (std::size_t n = 0; n < stats.p.size(); ++n) {
      if (stats.p[n] == 0.0) continue;
      double acc = 0.0;
      for (const auto& node : nodes.nodes) {
        acc += node.weight * mcgowan_weight(params, params.g * node.tau, n);
      }
      total += stats.p[n] * acc;
    }
    return total / n_mean;
  };
  return detail::with_tau_nodes(params, options, evaluate, [](double d) { return d; });
}

/// Summand of the closed-form exponential-model linewidth at photon number n:
/// [1 + gbar^2 (3n+2) + gbar^4 (n+1)(4n+1)] / ([1 + 4 gbar^2 (n+1)] [1 + 2 gbar^2 (2n+1) + gbar^4]).
inline double exp_closed_summand(double gbar, std::size_t n) {
  const double x = static_cast<double>(n);
  const double g2 = gbar * gbar;
  const double g4 = g2 * g2;
  const double num = 1.0 + g2 * (3.0 * x + 2.0) + g4 * (x + 1.0) * (4.0 * x + 1.0);
  const double den = (1.0 + 4.0 * g2 * (x + 1.0)) * (1.0 + 2.0 * g2 * (2.0 * x + 1.0) + g4);
  return num / den;
}

/// Closed-form linewidth for an exponentially distributed interaction time,
/// n_th = 0: D <n> = 2 kappa theta_bar^2 sum_n p_n summand(n).
/// `literal` uses the bare prefactor kappa, which misses the 2 theta_bar^2
/// gain factor.
inline double linewidth_exp_closed(const MaserParams& params, const PhotonStatistics& stats,
                                   bool literal = false) {
  params.validate();
  require(is_exponential(params.tau_dist), "linewidth_exp_closed: needs an exponential distribution");
  require(params.n_th == 0.0, "linewidth_exp_closed: thermal photons are not included (n_th = 0)");
  const double n_mean = detail::checked_mean(stats);
  const double gbar = params.coupling_angle();
  const double theta_bar = params.theta();
  double sum = 0.0;
  for (std::size_t n = 0; n < stats.p.size(); ++n) sum += stats.p[n] * exp_closed_summand(gbar, n);
  const double prefactor = literal ? params.kappa : 2.0 * params.kappa * theta_bar * theta_bar;
  return prefactor * sum / n_mean;
}

/// Above-threshold estimate D = kappa (1 + 2 theta_bar^2) / (4 <n>).
inline double linewidth_exp_scully(const MaserParams& params, const PhotonStatistics& stats) {
  params.validate();
  require(is_exponential(params.tau_dist), "linewidth_exp_scully: needs an exponential distribution");
  const double n_mean = detail::checked_mean(stats);
  const double theta_bar = params.theta();
  return params.kappa * (1.0 + 2.0 * theta_bar * theta_bar) / (4.0 * n_mean);
}

struct FockResolvedWeights {
  std::vector<double> p;
  std::vector<double> main;      ///< cos + sin terms of the dephasing-resolved trace
  std::vector<double> main_cos;
  std::vector<double> main_sin;
  std::vector<double> mcgowan;
};

/// Dephasing-resolved weight at photon number n for averaged trig products.
struct ResolvedWeight {
  double cos = 0.0;
  double sin = 0.0;
};

inline ResolvedWeight resolved_main_weight(const PumpAverage& avg, double r, std::size_t n) {
  const double x = static_cast<double>(n);
  const double root0 = std::sqrt(x);
  const double root1 = std::sqrt(x + 1.0);
  ResolvedWeight w;
  w.cos = r * x *
          (avg.cos_cos(root1, root1) + avg.cos_cos(root0, root0) - 2.0 * avg.cos_cos(root0, root1));
  w.sin = r * ((x + 1.0) * avg.sin_sin(root1, root1) + x * avg.sin_sin(root0, root0) -
               2.0 * root0 * root1 * avg.sin_sin(root0, root1));
  return w;
}

/// The n-dependent quantities under the dephasing-resolved and McGowan traces
/// (before multiplying by p_n), together with p_n.
inline FockResolvedWeights fock_resolved_weights(const MaserParams& params, const PhotonStatistics& stats) {
  params.validate();
  require(is_fixed(params.tau_dist), "fock_resolved_weights: needs a fixed interaction time");
  const PumpAverage avg(params);
  const double gt = params.coupling_angle();
  const std::size_t size = stats.p.size();
  FockResolvedWeights out{stats.p, std::vector<double>(size), std::vector<double>(size),
                          std::vector<double>(size), std::vector<double>(size)};
  for (std::size_t n = 0; n < size; ++n) {
    const ResolvedWeight w = resolved_main_weight(avg, params.r, n);
    out.main_cos[n] = w.cos;
    out.main_sin[n] = w.sin;
    out.main[n] = w.cos + w.sin;
    out.mcgowan[n] = mcgowan_weight(params, gt, n);
  }
  return out;
}

/// Divides by the largest absolute entry (the plotted normalisation is arbitrary).
inline std::vector<double> max_normalized(std::vector<double> values) {
  double top = 0.0;
  for (double v : values) top = std::max(top, std::abs(v));
  if (top > 0.0) {
    for (double& v : values) v /= top;
  }
  return values;
}

struct SchawlowTownes {
  double ratio = 0.0;      ///< D <n> / kappa
  double reference = 0.0;  ///< (theta^2 + 1 + 2 n_th) / 4
};

inline SchawlowTownes schawlow_townes_ratio(const MaserParams& params, const PhotonStatistics& stats,
                                            double D) {
  const double theta = params.theta();
  return {D * mean_photon_number(stats) / params.kappa,
          (theta * theta + 1.0 + 2.0 * params.n_th) / 4.0};
}

}  // namespace micromaser
