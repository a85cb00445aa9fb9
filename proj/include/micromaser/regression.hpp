#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "micromaser/band_operator.hpp"
#include "micromaser/model.hpp"
#include "micromaser/params.hpp"
#include "micromaser/steady_state.hpp"

namespace micromaser {

/// Master equation restricted to the coherence sector v_n = <n|P|n+1>,
/// n = 0..N-1, on the Fock truncation |0>..|N>:
///   (G v)_n = sub[n] v_{n-1} + diag[n] v_n + super[n] v_{n+1}.
/// sub[0] and super[N-1] are zero.
struct SidebandGenerator {
  std::vector<double> sub;
  std::vector<double> diag;
  std::vector<double> super;

  std::size_t size() const { return diag.size(); }

  std::vector<double> apply(const std::vector<double>& v) const {
    const std::size_t n_size = size();
    require(v.size() == n_size, "SidebandGenerator::apply: size mismatch");
    std::vector<double> out(n_size);
    for (std::size_t n = 0; n < n_size; ++n) {
      double acc = diag[n] * v[n];
      if (n > 0) acc += sub[n] * v[n - 1];
      if (n + 1 < n_size) acc += super[n] * v[n + 1];
      out[n] = acc;
    }
    return out;
  }

  Eigen::MatrixXd dense() const {
    const auto n_size = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_size, n_size);
    for (Eigen::Index n = 0; n < n_size; ++n) {
      m(n, n) = diag[n];
      if (n > 0) m(n, n - 1) = sub[n];
      if (n + 1 < n_size) m(n, n + 1) = super[n];
    }
    return m;
  }
};

/// Sector generator of an arbitrary jump set with shifts -1, 0, +1.
inline SidebandGenerator sideband_generator_from_lindblad(const LindbladSet& jumps) {
  require(!jumps.empty(), "sideband generator: empty jump set");
  const std::size_t dim = jumps.front().dim();
  require(dim >= 3, "sideband generator: need N >= 2");
  const std::size_t N = dim - 1;
  SidebandGenerator gen{std::vector<double>(N, 0.0), std::vector<double>(N, 0.0),
                        std::vector<double>(N, 0.0)};
  std::vector<double> decay(dim, 0.0);  // diagonal of sum L^dagger L
  for (const BandOperator& L : jumps) {
    require(L.dim() == dim, "sideband generator: jump operator dimension mismatch");
    const auto& x = L.values();
    switch (L.shift()) {
      case 0:
        for (std::size_t n = 0; n < N; ++n) gen.diag[n] += x[n] * x[n + 1];
        for (std::size_t m = 0; m < dim; ++m) decay[m] += x[m] * x[m];
        break;
      case 1:
        for (std::size_t n = 1; n < N; ++n) gen.sub[n] += x[n - 1] * x[n];
        for (std::size_t m = 0; m < dim; ++m) decay[m] += x[m] * x[m];
        break;
      case -1:
        for (std::size_t n = 0; n + 1 < N; ++n) gen.super[n] += x[n + 1] * x[n + 2];
        for (std::size_t m = 0; m < dim; ++m) decay[m] += x[m] * x[m];
        break;
      default:
        fail(ErrorCode::InvalidArgument, "sideband generator: jump operator leaves the sector");
    }
  }
  for (std::size_t n = 0; n < N; ++n) gen.diag[n] -= 0.5 * (decay[n] + decay[n + 1]);
  return gen;
}

/// Sector generator of the micromaser master equation on |0>..|N>. Pump
/// entries are tau-averages of trig products, so the exponential measure is
/// handled in closed form; `avg` may also carry an explicit node list.
inline SidebandGenerator build_sideband_generator(const MaserParams& params, std::size_t N,
                                                  const PumpAverage& avg) {
  params.validate();
  require(N >= 2, "build_sideband_generator: need N >= 2");
  const std::size_t dim = N + 1;
  LindbladSet cavity;
  cavity.push_back(BandOperator::annihilation(dim) * std::sqrt(params.kappa * (1.0 + params.n_th)));
  if (params.n_th > 0.0) {
    cavity.push_back(BandOperator::creation(dim) * std::sqrt(params.kappa * params.n_th));
  }
  SidebandGenerator gen = sideband_generator_from_lindblad(cavity);
  if (params.r == 0.0) return gen;

  const double r = params.r;
  auto root = [](std::size_t m) { return std::sqrt(static_cast<double>(m)); };
  // sum over pump jumps of L^dagger L at Fock index m: cos^2 + sin^2 for
  // m < N; the emitting operator has no matrix element out of |N>.
  std::vector<double> decay(dim);
  for (std::size_t m = 0; m < dim; ++m) {
    decay[m] = r * avg.cos_cos(root(m + 1), root(m + 1));
    if (m < N) decay[m] += r * avg.sin_sin(root(m + 1), root(m + 1));
  }
  for (std::size_t n = 0; n < N; ++n) {
    gen.diag[n] += r * avg.cos_cos(root(n + 1), root(n + 2)) - 0.5 * (decay[n] + decay[n + 1]);
    if (n > 0) gen.sub[n] += r * avg.sin_sin(root(n), root(n + 1));
  }
  return gen;
}

inline SidebandGenerator build_sideband_generator(const MaserParams& params, std::size_t N) {
  return build_sideband_generator(params, N, PumpAverage(params));
}

/// v_n = sqrt(n+1) p_{n+1}: the sector content of a rho_ss.
inline std::vector<double> initial_sideband(const PhotonStatistics& stats) {
  const std::size_t N = stats.truncation();
  std::vector<double> v(N);
  for (std::size_t n = 0; n < N; ++n) v[n] = std::sqrt(static_cast<double>(n + 1)) * stats.p[n + 1];
  return v;
}

/// g = tr[a^dagger P] = sum_n sqrt(n+1) v_n.
inline double correlation_value(const std::vector<double>& v) {
  double g = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n) g += std::sqrt(static_cast<double>(n + 1)) * v[n];
  return g;
}

/// D = -2 g'(0)/g(0) from a single generator application.
inline double linewidth_from_slope(const SidebandGenerator& gen, const std::vector<double>& v0) {
  const double g0 = correlation_value(v0);
  if (!(g0 > 0.0)) fail(ErrorCode::UndefinedLinewidth, "linewidth undefined for the vacuum");
  return -2.0 * correlation_value(gen.apply(v0)) / g0;
}

struct CorrelateOptions {
  double rel_tol = 1e-10;
  std::size_t max_steps = 5'000'000;
};

/// g(t_i) from adaptive Dormand-Prince integration of dv/dt = G v.
inline std::vector<double> correlate(const SidebandGenerator& gen, const std::vector<double>& v0,
                                     const std::vector<double>& t_grid,
                                     const CorrelateOptions& options = {}) {
  namespace odeint = boost::numeric::odeint;
  require(!t_grid.empty() && t_grid.front() == 0.0, "correlate: time grid must start at 0");
  require(std::is_sorted(t_grid.begin(), t_grid.end()), "correlate: time grid must be ascending");

  double scale = 0.0;
  double spectral_radius = 0.0;  // Gershgorin bound
  for (std::size_t n = 0; n < gen.size(); ++n) {
    scale = std::max(scale, std::abs(v0[n]));
    spectral_radius = std::max(spectral_radius,
                               std::abs(gen.diag[n]) + std::abs(gen.sub[n]) + std::abs(gen.super[n]));
  }
  std::vector<double> out;
  out.reserve(t_grid.size());
  if (scale == 0.0 || t_grid.size() == 1) {
    out.assign(t_grid.size(), correlation_value(v0));
    if (scale == 0.0) std::fill(out.begin(), out.end(), 0.0);
    return out;
  }
  // Explicit stepping: keep the step inside the stability region.
  const double max_dt = 3.0 / std::max(spectral_radius, 1e-300);
  auto stepper = odeint::make_dense_output(options.rel_tol * scale * 1e-6, options.rel_tol, max_dt,
                                           odeint::runge_kutta_dopri5<std::vector<double>>());
  auto rhs = [&gen](const std::vector<double>& v, std::vector<double>& dv, double) {
    dv = gen.apply(v);
  };
  std::vector<double> state = v0;
  double reached = 0.0;
  auto observer = [&](const std::vector<double>& v, double t) {
    out.push_back(correlation_value(v));
    reached = t;
  };
  try {
    odeint::integrate_times(stepper, rhs, state, t_grid.begin(), t_grid.end(),
                            std::min(max_dt, t_grid.back() / 100.0), observer,
                            odeint::max_step_checker(options.max_steps));
  } catch (const std::exception& e) {
    fail(ErrorCode::IntegrationFailure,
         "correlate: integration stopped at t=" + std::to_string(reached) + ": " + e.what());
  }
  return out;
}

struct SpectralDecomposition {
  std::vector<std::complex<double>> mu;       ///< decay rates, -2 x eigenvalues
  std::vector<std::complex<double>> weights;  ///< g_j with sum_j g_j = <n>
  double n_mean = 0.0;

  /// sum_j g_j mu_j / sum_j g_j (real part).
  double mean_decay_rate() const {
    std::complex<double> num = 0.0;
    std::complex<double> den = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j) {
      num += weights[j] * mu[j];
      den += weights[j];
    }
    return (num / den).real();
  }
};

/// Eigen-expansion g(t) = sum_j g_j exp(-mu_j t / 2).
///
/// The generator is first balanced by the diagonal similarity that equalises
/// |sub| and |super| on each link; with all link products positive it becomes
/// symmetric tridiagonal. Eigenvalues are unchanged and the weights are
/// transformed back.
inline SpectralDecomposition spectral_decomposition(const SidebandGenerator& gen,
                                                    const std::vector<double>& v0) {
  using Complex = std::complex<double>;
  const auto N = static_cast<Eigen::Index>(gen.size());
  require(static_cast<Eigen::Index>(v0.size()) == N, "spectral_decomposition: size mismatch");
  const double n_mean = correlation_value(v0);
  if (!(n_mean > 0.0)) fail(ErrorCode::UndefinedLinewidth, "spectral_decomposition: vacuum");

  // Balanced entries: super[n-1] e^{step}, sub[n] e^{-step}. A one-sided link
  // (pure loss, say) is scaled down to half the local diagonal gap.
  std::vector<double> log_d(N, 0.0);
  bool symmetric = true;
  for (Eigen::Index n = 1; n < N; ++n) {
    const double lower = std::abs(gen.sub[n]);
    const double upper = std::abs(gen.super[n - 1]);
    const double target = std::max(0.5 * std::abs(gen.diag[n] - gen.diag[n - 1]),
                                   1e-3 * (std::abs(gen.diag[n]) + std::abs(gen.diag[n - 1])));
    double step = 0.0;
    if (lower != 0.0 && upper != 0.0) {
      step = 0.5 * (std::log(lower) - std::log(upper));
    } else if (upper != 0.0 && target > 0.0) {
      step = std::log(target / upper);
    } else if (lower != 0.0 && target > 0.0) {
      step = std::log(lower / target);
    }
    if (!(gen.sub[n] * gen.super[n - 1] > 0.0)) symmetric = false;
    log_d[n] = log_d[n - 1] + step;
  }
  const double top = *std::max_element(log_d.begin(), log_d.end());
  Eigen::VectorXd d(N);
  for (Eigen::Index n = 0; n < N; ++n) d(n) = std::exp(std::max(log_d[n] - top, -600.0));

  Eigen::VectorXd w(N), v_bal(N);
  for (Eigen::Index n = 0; n < N; ++n) {
    w(n) = std::sqrt(static_cast<double>(n + 1)) * d(n);
    v_bal(n) = v0[n] / d(n);
  }

  SpectralDecomposition out;
  out.n_mean = n_mean;
  out.mu.resize(N);
  out.weights.resize(N);

  const Eigen::MatrixXd raw = gen.dense();
  const Eigen::MatrixXd balanced = d.cwiseInverse().asDiagonal() * raw * d.asDiagonal();

  if (symmetric) {
    Eigen::VectorXd main = balanced.diagonal();
    Eigen::VectorXd off(std::max<Eigen::Index>(N - 1, 0));
    for (Eigen::Index n = 1; n < N; ++n) off(n - 1) = std::sqrt(gen.sub[n] * gen.super[n - 1]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(main, off, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
      fail(ErrorCode::NumericalFailure, "spectral_decomposition: eigen iteration failed");
    }
    const Eigen::MatrixXd& X = solver.eigenvectors();
    const Eigen::VectorXd alpha = X.transpose() * v_bal;
    const Eigen::VectorXd proj = X.transpose() * w;
    for (Eigen::Index j = 0; j < N; ++j) {
      out.mu[j] = -2.0 * solver.eigenvalues()(j);
      out.weights[j] = alpha(j) * proj(j);
    }
    const double residual = (balanced * X - X * solver.eigenvalues().asDiagonal()).norm();
    if (residual > 1e-8 * std::max(1.0, balanced.norm())) {
      fail(ErrorCode::IllConditioned, "spectral_decomposition: eigen residual too large");
    }
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(balanced, true);
    if (solver.info() != Eigen::Success) {
      fail(ErrorCode::NumericalFailure, "spectral_decomposition: eigen iteration failed");
    }
    const Eigen::MatrixXcd X = solver.eigenvectors();
    const Eigen::VectorXcd lambda = solver.eigenvalues();
    const Eigen::MatrixXcd residual = balanced.cast<Complex>() * X - X * lambda.asDiagonal();
    for (Eigen::Index j = 0; j < N; ++j) {
      if (residual.col(j).norm() > 1e-8 * std::max(1.0, X.col(j).norm())) {
        fail(ErrorCode::IllConditioned, "spectral_decomposition: eigen residual too large");
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(X);
    if (lu.rank() < N) {
      fail(ErrorCode::IllConditioned, "spectral_decomposition: generator is defective");
    }
    const Eigen::VectorXcd alpha = lu.solve(v_bal.cast<Complex>());
    const Eigen::VectorXcd proj = X.transpose() * w.cast<Complex>();
    for (Eigen::Index j = 0; j < N; ++j) {
      out.mu[j] = -2.0 * lambda(j);
      out.weights[j] = alpha(j) * proj(j);
    }
  }

  Complex sum = 0.0;
  for (const auto& g : out.weights) sum += g;
  if (std::abs(sum - n_mean) > 1e-10 * n_mean) {
    fail(ErrorCode::IllConditioned, "spectral_decomposition: sum rule violated (sum g_j = " +
                                        std::to_string(sum.real()) + ", <n> = " +
                                        std::to_string(n_mean) + ")");
  }
  return out;
}

/// One-sided transform of the eigen-expansion: sum_j Re[g_j / (mu_j/2 - i omega)].
inline double spectral_density(const SpectralDecomposition& decomp, double omega) {
  std::complex<double> s = 0.0;
  for (std::size_t j = 0; j < decomp.mu.size(); ++j) {
    s += decomp.weights[j] / (0.5 * decomp.mu[j] - std::complex<double>(0.0, omega));
  }
  return s.real();
}

struct Spectrum {
  std::vector<double> density;
  double fwhm = 0.0;
};

/// S on the given grid plus the full width at half maximum (bisection on
/// both sides of the peak).
inline Spectrum spectrum_and_fwhm(const SpectralDecomposition& decomp,
                                  const std::vector<double>& omega_grid) {
  double weight_sum = 0.0;
  double width_scale = 0.0;
  for (std::size_t j = 0; j < decomp.mu.size(); ++j) weight_sum += std::abs(decomp.weights[j]);
  for (std::size_t j = 0; j < decomp.mu.size(); ++j) {
    const double a = std::abs(decomp.weights[j]);
    if (a > 1e-14 * weight_sum && !(decomp.mu[j].real() > 0.0)) {
      fail(ErrorCode::InvalidArgument, "spectrum: non-decaying mode with non-zero weight");
    }
    width_scale += a * std::abs(decomp.mu[j].real());
  }
  width_scale /= weight_sum;

  Spectrum out;
  out.density.reserve(omega_grid.size());
  for (double omega : omega_grid) out.density.push_back(spectral_density(decomp, omega));

  auto S = [&](double omega) { return spectral_density(decomp, omega); };
  // Coarse peak search, then golden-section refinement.
  constexpr int kSamples = 4001;
  const double span = 20.0 * width_scale;
  double best = -span;
  double best_value = S(best);
  const double step = 2.0 * span / (kSamples - 1);
  for (int i = 1; i < kSamples; ++i) {
    const double omega = -span + step * i;
    const double value = S(omega);
    if (value > best_value) {
      best = omega;
      best_value = value;
    }
  }
  double lo = best - step;
  double hi = best + step;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100; ++it) {
    const double m1 = hi - phi * (hi - lo);
    const double m2 = lo + phi * (hi - lo);
    if (S(m1) < S(m2)) lo = m1; else hi = m2;
  }
  const double peak = 0.5 * (lo + hi);
  const double half = 0.5 * S(peak);

  auto edge = [&](double direction) {
    double inner = peak;
    double outer = peak + direction * step;
    while (S(outer) > half) {
      inner = outer;
      outer = peak + 2.0 * (outer - peak);
      if (std::abs(outer - peak) > 1e8 * std::max(width_scale, 1e-300)) {
        fail(ErrorCode::NumericalFailure, "spectrum: half maximum not bracketed");
      }
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (inner + outer);
      if (S(mid) > half) inner = mid; else outer = mid;
    }
    return 0.5 * (inner + outer);
  };
  out.fwhm = edge(+1.0) - edge(-1.0);
  return out;
}

}  // namespace micromaser
