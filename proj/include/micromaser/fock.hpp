#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "micromaser/error.hpp"

namespace micromaser {

/// Which operator's eigenvalues index a diagonal: n, n^{1/2}, or
/// phi = (a a^dagger)^{1/2} (eigenvalue sqrt(n+1) on |n>).
enum class FockBasis { Number, SqrtNumber, Phi };

/// Function of a diagonal operator on the truncated Fock space |0>..|N>.
struct FockDiagonal {
  FockBasis basis = FockBasis::Number;
  std::vector<double> values;

  std::size_t truncation() const { return values.empty() ? 0 : values.size() - 1; }
};

inline FockDiagonal number_eigenvalues(std::size_t N) {
  FockDiagonal d{FockBasis::Number, std::vector<double>(N + 1)};
  for (std::size_t n = 0; n <= N; ++n) d.values[n] = static_cast<double>(n);
  return d;
}

inline FockDiagonal sqrt_number_eigenvalues(std::size_t N) {
  FockDiagonal d{FockBasis::SqrtNumber, std::vector<double>(N + 1)};
  for (std::size_t n = 0; n <= N; ++n) d.values[n] = std::sqrt(static_cast<double>(n));
  return d;
}

inline FockDiagonal phi_eigenvalues(std::size_t N) {
  require(N >= 1, "phi_eigenvalues: truncation N must be >= 1");
  FockDiagonal d{FockBasis::Phi, std::vector<double>(N + 1)};
  for (std::size_t n = 0; n <= N; ++n) d.values[n] = std::sqrt(static_cast<double>(n + 1));
  return d;
}

/// F(op) for a diagonal op: applies f to each eigenvalue, keeps the tag.
template <class F>
FockDiagonal apply_function(const FockDiagonal& op, F&& f) {
  FockDiagonal out{op.basis, std::vector<double>(op.values.size())};
  for (std::size_t n = 0; n < op.values.size(); ++n) out.values[n] = f(op.values[n]);
  return out;
}

inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

}  // namespace micromaser
