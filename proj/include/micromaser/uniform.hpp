#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "micromaser/band_operator.hpp"
#include "micromaser/error.hpp"
#include "micromaser/fock.hpp"
#include "micromaser/lindblad.hpp"
#include "micromaser/params.hpp"
#include "micromaser/regression.hpp"
#include "micromaser/steady_state.hpp"

namespace micromaser {

/// Laguerre polynomials L_0..L_order at t; orthonormal under exp(-t) dt.
inline std::vector<double> orthonormal_laguerre(double t, int order) {
  require(order >= 0, "orthonormal_laguerre: order must be >= 0");
  std::vector<double> L(order + 1);
  L[0] = 1.0;
  if (order >= 1) L[1] = 1.0 - t;
  for (int k = 1; k < order; ++k) {
    L[k + 1] = ((2.0 * k + 1.0 - t) * L[k] - k * L[k - 1]) / (k + 1.0);
  }
  return L;
}

enum class TrigKind { Cos, Sin };

/// c_k(x) = int_0^inf exp(-t) L_k(t) trig(x t) dt for k = 0..order.
/// The generating integral gives int exp(-t) L_k(t) exp(i x t) dt
/// = (-i x)^k / (1 - i x)^{k+1}; each step multiplies by a unit-modulus-
/// bounded factor, so the recurrence is stable.
inline std::vector<double> laguerre_trig_coeffs(double x, TrigKind kind, int order) {
  require(order >= 0, "laguerre_trig_coeffs: order must be >= 0");
  using Complex = std::complex<double>;
  const Complex step = Complex(0.0, -x) / Complex(1.0, -x);
  Complex z = 1.0 / Complex(1.0, -x);
  std::vector<double> out(order + 1);
  for (int k = 0; k <= order; ++k) {
    out[k] = kind == TrigKind::Cos ? z.real() : z.imag();
    z *= step;
  }
  return out;
}

struct UniformOrders {
  int order_sin = 1;
  int order_cos = 0;
};

/// Sine order odd, cosine order one less; anything else needs allow_any.
inline void validate(const UniformOrders& orders, bool allow_any = false) {
  require(orders.order_sin >= 0 && orders.order_cos >= 0, "uniform orders must be >= 0");
  if (allow_any) return;
  require(orders.order_sin >= 1 && orders.order_sin % 2 == 1 &&
              orders.order_cos == orders.order_sin - 1,
          "invalid uniform order pairing (need odd order_sin and order_cos = order_sin - 1), got (" +
              std::to_string(orders.order_sin) + "," + std::to_string(orders.order_cos) + ")");
}

struct UniformLindbladSet {
  int order_sin = 0;
  int order_cos = 0;
  std::vector<FockDiagonal> cos_coeffs;  ///< c_k^cos(gbar phi), k = 0..order_cos
  std::vector<FockDiagonal> sin_coeffs;  ///< c_k^sin(gbar phi), k = 0..order_sin
  double tau_bar = 0.0;
  MaserParams params;

  std::size_t truncation() const { return cos_coeffs.front().truncation(); }
};

inline UniformLindbladSet build_uniform_lindblad(const MaserParams& params, UniformOrders orders,
                                                 std::size_t N, bool allow_any_orders = false) {
  params.validate();
  require(is_exponential(params.tau_dist), "build_uniform_lindblad: needs an exponential distribution");
  validate(orders, allow_any_orders);
  require(N >= 2, "build_uniform_lindblad: need N >= 2");
  const FockDiagonal phi = phi_eigenvalues(N);
  const double gbar = params.coupling_angle();

  UniformLindbladSet set;
  set.order_sin = orders.order_sin;
  set.order_cos = orders.order_cos;
  set.tau_bar = std::get<ExponentialTime>(params.tau_dist).tau_bar;
  set.params = params;
  set.cos_coeffs.assign(orders.order_cos + 1, FockDiagonal{FockBasis::Phi, std::vector<double>(N + 1)});
  set.sin_coeffs.assign(orders.order_sin + 1, FockDiagonal{FockBasis::Phi, std::vector<double>(N + 1)});
  for (std::size_t n = 0; n <= N; ++n) {
    const double x = gbar * phi.values[n];
    const auto c = laguerre_trig_coeffs(x, TrigKind::Cos, orders.order_cos);
    const auto s = laguerre_trig_coeffs(x, TrigKind::Sin, orders.order_sin);
    for (int k = 0; k <= orders.order_cos; ++k) set.cos_coeffs[k].values[n] = c[k];
    for (int k = 0; k <= orders.order_sin; ++k) set.sin_coeffs[k].values[n] = s[k];
  }
  return set;
}

/// Cavity operators plus sqrt(r) C_k and sqrt(r) a^dagger S_k / phi.
inline LindbladSet as_lindblad_set(const UniformLindbladSet& set) {
  const MaserParams& params = set.params;
  const std::size_t dim = set.truncation() + 1;
  LindbladSet jumps;
  jumps.push_back(BandOperator::annihilation(dim) * std::sqrt(params.kappa * (1.0 + params.n_th)));
  if (params.n_th > 0.0) {
    jumps.push_back(BandOperator::creation(dim) * std::sqrt(params.kappa * params.n_th));
  }
  const double amp = std::sqrt(params.r);
  for (const FockDiagonal& c : set.cos_coeffs) {
    jumps.push_back(BandOperator::diagonal(c.values) * amp);
  }
  // <m+1| a^dagger f(phi)/phi |m> = f(sqrt(m+1))
  for (const FockDiagonal& s : set.sin_coeffs) {
    jumps.push_back(BandOperator(dim, +1, s.values) * amp);
  }
  return jumps;
}

inline PhotonStatistics uniform_steady_state(const UniformLindbladSet& set, bool check_truncation = true) {
  // Bessel's inequality keeps the truncated gain below the exact one, so the
  // exact tail bound still applies.
  return birth_death_steady_state(as_lindblad_set(set),
                                  ratio_bound_beyond(set.params, set.truncation()), check_truncation);
}

/// Initial-slope linewidth of the truncated model. `stats` is normally
/// uniform_steady_state(set); passing the exact p is allowed.
inline double uniform_linewidth(const UniformLindbladSet& set, const PhotonStatistics& stats) {
  require(stats.truncation() == set.truncation(), "uniform_linewidth: truncation mismatch");
  const SidebandGenerator gen = sideband_generator_from_lindblad(as_lindblad_set(set));
  return linewidth_from_slope(gen, initial_sideband(stats));
}

/// Per-photon-number weight of the dephasing-resolved trace for the pump
/// part of the truncated set, in the same units as resolved_main_weight.
inline double uniform_resolved_weight(const UniformLindbladSet& set, std::size_t n) {
  require(n < set.truncation(), "uniform_resolved_weight: n beyond truncation");
  const double x = static_cast<double>(n);
  double w = 0.0;
  for (const FockDiagonal& c : set.cos_coeffs) {
    const double diff = c.values[n] - (n > 0 ? c.values[n - 1] : 0.0);
    w += x * diff * diff;
  }
  for (const FockDiagonal& s : set.sin_coeffs) {
    const double diff = std::sqrt(x + 1.0) * s.values[n] - (n > 0 ? std::sqrt(x) * s.values[n - 1] : 0.0);
    w += diff * diff;
  }
  return set.params.r * w;
}

}  // namespace micromaser
