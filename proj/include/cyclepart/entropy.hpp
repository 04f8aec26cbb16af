#pragma once

#include <cstdint>
#include <vector>

#include "cyclepart/thermo.hpp"

namespace cyclepart {

// Increments Qhat(1..K) of a monotone probability function Q on the positive
// integers. sum_k k Qhat(k) = sum_l Q(l) is the constraint mass; values below
// one are allowed as an explicit relaxation.
struct TruncatedShape {
  std::vector<double> qhat;
  // When set, Qhat(k) = Qhat*(k) for every k > K, evaluated analytically.
  bool reference_tail = false;

  int K() const { return static_cast<int>(qhat.size()); }
  double at(int k) const { return (k >= 1 && k <= K()) ? qhat[static_cast<std::size_t>(k - 1)] : 0.0; }
  // sum_{k <= K} k Qhat(k).
  double truncated_mass() const;
  // Throws DomainError on negative or non-finite entries.
  void validate() const;
};

// sum_k k Qhat(k), including the analytic reference tail when present
// (which needs d >= 3 to converge).
double constraint_mass(const TruncatedShape& shape, const SystemParams& params, double tol);

// S(Q) = sum_k Qhat(k) (log(Qhat(k) / Qhat*(k)) - 1), with 0 log 0 = 0.
double functional_S(const TruncatedShape& shape, const SystemParams& params, double tol);

// Partial derivative of S with respect to Qhat(k): log(Qhat(k) / Qhat*(k)).
double functional_S_gradient(const TruncatedShape& shape, const SystemParams& params, int k);

// S(Q) = q H(P | P*) + q log(q / q*) - q with P = Qhat / q, P* = Qhat* / q*,
// all sums over k <= K.
struct EntropyDecomposition {
  double q = 0.0;
  double q_star = 0.0;
  double relative_entropy = 0.0;
  double reconstructed_S = 0.0;
  double direct_S = 0.0;
};

// Throws DomainError when q == 0 or the shape carries a reference tail.
EntropyDecomposition entropy_decomposition(const TruncatedShape& shape, const SystemParams& params, double tol);

struct MinimizeResult {
  TruncatedShape shape;
  // Dual variable: Qhat(k) = Qhat*(k) e^{-lambda k}. Tends to alpha in the
  // normal regime and is negative when condensed.
  double lambda = 0.0;
  double S = 0.0;
  Regime regime = Regime::normal;
  // |sum_k k Qhat(k) - 1|.
  double constraint_residual = 0.0;
  // sum_k k max(0, Qhat(k) - Qhat*(k)): mass pushed above the reference.
  double excess_mass = 0.0;
  // sum_{k > K/2} k Qhat(k): mass piled up near the truncation boundary.
  double boundary_mass = 0.0;
  int iterations = 0;
};

// Exact minimizer of S over {Qhat >= 0, sum_{k<=K} k Qhat(k) = 1}. Requires
// K >= 100.
MinimizeResult minimize_S(const SystemParams& params, int K, double tol);

// Qhat_n = Qhat* except Qhat_n(n) = Qhat*(n) + (rho - rho_c) / (n rho), with
// explicit entries up to K >= n and the reference tail beyond. Requires
// d >= 3 and rho > rho_c.
TruncatedShape minimizing_sequence(int n, const SystemParams& params, int K, double tol);

// Closed-form S(Q_n) = S(Q*) - eps + (Qhat*(n) + eps) log(1 + eps / Qhat*(n)),
// eps = (rho - rho_c) / (n rho), S(Q*) = -zeta((d+2)/2) / (rho (4 pi beta)^{d/2}).
double minimizing_sequence_S(int n, const SystemParams& params, double tol);

}  // namespace cyclepart
