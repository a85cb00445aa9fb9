#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "micromaser/error.hpp"
#include "micromaser/params.hpp"

namespace micromaser {

enum class TrigProduct { CosCos, SinSin, SinCos };

/// Integral over t in [0, inf) of exp(-t) trig(a t) trig(b t), in closed form.
///
/// Uses 2 cos(x)cos(y) = cos(x-y) + cos(x+y) and the Laplace transforms
/// int exp(-t) cos(w t) = 1/(1+w^2), int exp(-t) sin(w t) = w/(1+w^2).
inline double exp_average_trig(TrigProduct kind, double a, double b) {
  require(std::isfinite(a) && std::isfinite(b), "exp_average_trig: non-finite frequency");
  const double dm = a - b;
  const double dp = a + b;
  const double lm = 1.0 / (1.0 + dm * dm);
  const double lp = 1.0 / (1.0 + dp * dp);
  switch (kind) {
    case TrigProduct::CosCos: return 0.5 * (lm + lp);
    case TrigProduct::SinSin: return 0.5 * (lm - lp);
    case TrigProduct::SinCos: return 0.5 * (dp * lp + dm * lm);
  }
  return 0.0;
}

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss rule for the unit-mean weight exp(-t) on [0, inf) (Golub-Welsch).
/// Exact for polynomials up to degree 2n-1. Nodes whose weight underflows
/// to zero are dropped.
inline QuadratureRule gauss_laguerre(int n) {
  require(n >= 1, "gauss_laguerre: need at least one node");
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) diag(k) = 2.0 * k + 1.0;
  for (int k = 1; k < n; ++k) sub(k - 1) = static_cast<double>(k);

  QuadratureRule rule;
  if (n == 1) {
    rule.nodes = {1.0};
    rule.weights = {1.0};
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::NumericalFailure, "gauss_laguerre: eigenvalue iteration did not converge");
  }
  rule.nodes.reserve(n);
  rule.weights.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double v0 = solver.eigenvectors()(0, k);
    const double w = v0 * v0;
    if (w > 0.0) {
      rule.nodes.push_back(solver.eigenvalues()(k));
      rule.weights.push_back(w);
    }
  }
  // Renormalise away the O(n eps) drift in the first-component sum.
  double total = 0.0;
  for (double w : rule.weights) total += w;
  for (double& w : rule.weights) w /= total;
  return rule;
}

/// Discretise the interaction-time measure into weighted nodes.
inline DiscreteTime quadrature_nodes(const InteractionTimeDistribution& dist, int n_nodes) {
  require(n_nodes >= 1, "quadrature_nodes: n_nodes must be >= 1");
  validate(dist);
  if (const auto* f = std::get_if<FixedTime>(&dist)) return DiscreteTime{{{f->tau, 1.0}}};
  if (const auto* d = std::get_if<DiscreteTime>(&dist)) return *d;
  const double tau_bar = std::get<ExponentialTime>(dist).tau_bar;
  const QuadratureRule rule = gauss_laguerre(n_nodes);
  DiscreteTime out;
  out.nodes.reserve(rule.nodes.size());
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    out.nodes.push_back({tau_bar * rule.nodes[k], rule.weights[k]});
  }
  return out;
}

inline constexpr int kMinDoublingNodes = 8;
inline constexpr int kMaxDoublingNodes = 512;

template <class T>
struct Converged {
  T value;
  int nodes;
};

/// Evaluates `eval(n_nodes)` for n = 8, 16, ..., 512 until `distance`
/// between consecutive results drops below `tol`.
template <class Eval, class Distance>
auto converge_by_doubling(Eval&& eval, Distance&& distance, double tol)
    -> Converged<decltype(eval(0))> {
  auto previous = eval(kMinDoublingNodes);
  for (int n = 2 * kMinDoublingNodes; n <= kMaxDoublingNodes; n *= 2) {
    auto current = eval(n);
    if (distance(previous, current) < tol) return {std::move(current), n};
    previous = std::move(current);
  }
  fail(ErrorCode::NumericalFailure,
       "quadrature did not converge with " + std::to_string(kMaxDoublingNodes) + " nodes");
}

/// Scalar convenience: relative change criterion.
template <class Eval>
Converged<double> converge_scalar_by_doubling(Eval&& eval, double rel_tol) {
  return converge_by_doubling(
      std::forward<Eval>(eval),
      [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }, rel_tol);
}

}  // namespace micromaser
