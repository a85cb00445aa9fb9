#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "micromaser/band_operator.hpp"
#include "micromaser/steady_state.hpp"

namespace micromaser {

/// D <n> from the initial slope of tr[a^dagger P(t)], P(0) = a rho, written
/// as the commutator trace
///   - sum_L tr{ L^dagger [a^dagger, L] a rho + [L^dagger, a^dagger] L a rho }
/// with rho = diag(p). Valid for any jump set whose operators are single-band.
inline double lindblad_linewidth_product(const LindbladSet& jumps, const PhotonStatistics& stats) {
  const std::size_t dim = stats.p.size();
  const BandOperator a = BandOperator::annihilation(dim);
  const BandOperator a_dag = BandOperator::creation(dim);
  const BandOperator a_rho = a * BandOperator::diagonal(stats.p);
  double total = 0.0;
  for (const BandOperator& L : jumps) {
    require(L.dim() == dim, "lindblad_linewidth_product: jump operator dimension mismatch");
    const BandOperator L_dag = L.adjoint();
    total -= (L_dag * commutator(a_dag, L) * a_rho).trace();
    total -= (commutator(L_dag, a_dag) * L * a_rho).trace();
  }
  return total;
}

/// Upward (n -> n+1) and downward (n -> n-1) jump rates on the diagonal.
struct TransitionRates {
  std::vector<double> up;
  std::vector<double> down;
};

inline TransitionRates transition_rates(const LindbladSet& jumps) {
  require(!jumps.empty(), "transition_rates: empty jump set");
  const std::size_t dim = jumps.front().dim();
  TransitionRates rates{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  for (const BandOperator& L : jumps) {
    if (L.shift() == 0) continue;
    require(L.shift() == 1 || L.shift() == -1,
            "transition_rates: only shifts -1, 0, +1 keep the steady state diagonal");
    auto& target = L.shift() == 1 ? rates.up : rates.down;
    for (std::size_t m = 0; m < dim; ++m) target[m] += L.value(m) * L.value(m);
  }
  return rates;
}

/// Stationary diagonal of a jump set by detailed balance,
/// p_{m+1} down_{m+1} = p_m up_m.
inline PhotonStatistics birth_death_steady_state(const LindbladSet& jumps, double tail_ratio_bound,
                                                 bool check_truncation = true) {
  const TransitionRates rates = transition_rates(jumps);
  const std::size_t N = rates.up.size() - 1;
  // The truncated jump set has no way out of |N>; the caller supplies the
  // ratio bound of the untruncated model for the tail check.
  auto ratio = [&](std::size_t m) {
    if (m >= N) return tail_ratio_bound;
    return rates.up[m] / rates.down[m + 1];
  };
  return stationary_from_ratios(N, ratio, tail_ratio_bound, check_truncation);
}

}  // namespace micromaser
