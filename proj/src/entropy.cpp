#include "cyclepart/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cyclepart/errors.hpp"
#include "cyclepart/numeric.hpp"

namespace cyclepart {

namespace {

// Qhat*(k) summed over k > K and weighted by k^power: zeta_tail(1 + d/2 - power, K + 1) / (rho T).
double reference_tail_sum(const SystemParams& params, int K, int power, double tol) {
  const double s = 1.0 + 0.5 * params.d - power;
  if (s <= 1.0) {
    std::ostringstream msg;
    msg << "reference tail diverges for d = " << params.d;
    throw DomainError(msg.str());
  }
  const double scale = params.rho * params.thermal_factor();
  return zeta_tail(s, static_cast<std::int64_t>(K) + 1, std::max(tol * scale, 1e-15)).value / scale;
}

void check_condensed(const SystemParams& params, double tol, const char* who) {
  const ThermoSolution sol = solve_alpha(params, tol);
  if (sol.regime != Regime::condensed) {
    std::ostringstream msg;
    msg << who << ": requires d >= 3 and rho > rho_c (regime is " << to_string(sol.regime) << ")";
    throw DomainError(msg.str());
  }
}

}  // namespace

double TruncatedShape::truncated_mass() const {
  NeumaierSum m;
  for (std::size_t i = 0; i < qhat.size(); ++i) m.add(static_cast<double>(i + 1) * qhat[i]);
  return m.value();
}

void TruncatedShape::validate() const {
  for (std::size_t i = 0; i < qhat.size(); ++i) {
    if (!(qhat[i] >= 0.0) || !std::isfinite(qhat[i])) {
      std::ostringstream msg;
      msg << "TruncatedShape: Qhat(" << i + 1 << ") = " << qhat[i] << " is not a nonnegative finite number";
      throw DomainError(msg.str());
    }
  }
}

double constraint_mass(const TruncatedShape& shape, const SystemParams& params, double tol) {
  shape.validate();
  double mass = shape.truncated_mass();
  if (shape.reference_tail) mass += reference_tail_sum(params, shape.K(), 1, tol);
  return mass;
}

double functional_S(const TruncatedShape& shape, const SystemParams& params, double tol) {
  params.validate();
  shape.validate();
  NeumaierSum s;
  for (int k = 1; k <= shape.K(); ++k) {
    const double x = shape.at(k);
    if (x == 0.0) continue;
    s.add(x * (std::log(x) - log_reference_qhat(params, k) - 1.0));
  }
  // Each tail term is Qhat*(k) (log 1 - 1).
  if (shape.reference_tail) s.add(-reference_tail_sum(params, shape.K(), 0, tol));
  return s.value();
}

double functional_S_gradient(const TruncatedShape& shape, const SystemParams& params, int k) {
  const double x = shape.at(k);
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(x) - log_reference_qhat(params, k);
}

EntropyDecomposition entropy_decomposition(const TruncatedShape& shape, const SystemParams& params, double tol) {
  params.validate();
  shape.validate();
  if (shape.reference_tail) throw DomainError("entropy_decomposition: shapes with a reference tail are not supported");

  NeumaierSum q, q_star;
  for (int k = 1; k <= shape.K(); ++k) {
    q.add(shape.at(k));
    q_star.add(reference_qhat(params, k));
  }
  EntropyDecomposition out;
  out.q = q.value();
  out.q_star = q_star.value();
  if (!(out.q > 0.0)) throw DomainError("entropy_decomposition: total mass q is zero");

  NeumaierSum h;
  for (int k = 1; k <= shape.K(); ++k) {
    const double x = shape.at(k);
    if (x == 0.0) continue;
    const double p = x / out.q;
    const double p_star = reference_qhat(params, k) / out.q_star;
    h.add(p * std::log(p / p_star));
  }
  out.relative_entropy = h.value();
  out.reconstructed_S = out.q * out.relative_entropy + out.q * std::log(out.q / out.q_star) - out.q;
  out.direct_S = functional_S(shape, params, tol);
  return out;
}

MinimizeResult minimize_S(const SystemParams& params, int K, double tol) {
  params.validate();
  if (K < 100) throw DomainError("minimize_S: truncation K must be >= 100");
  if (!(tol > 0.0)) throw DomainError("minimize_S: tol must be positive");

  std::vector<double> log_weight(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) {
    log_weight[static_cast<std::size_t>(k - 1)] = std::log(static_cast<double>(k)) + log_reference_qhat(params, k);
  }
  // log sum_k k Qhat*(k) e^{-lambda k}; decreasing in lambda.
  auto log_mass = [&](double lambda) {
    LogSumExp acc;
    for (int k = 1; k <= K; ++k) acc.add(log_weight[static_cast<std::size_t>(k - 1)] - lambda * k);
    return acc.value();
  };

  double lo = -1.0, hi = 1.0;
  while (log_mass(hi) > 0.0) hi *= 2.0;
  while (log_mass(lo) < 0.0) lo *= 2.0;

  MinimizeResult out;
  double lambda = 0.5 * (lo + hi);
  for (; out.iterations < 300; ++out.iterations) {
    lambda = 0.5 * (lo + hi);
    if (lambda <= lo || lambda >= hi) break;
    const double lm = log_mass(lambda);
    if (lm == 0.0) break;
    (lm > 0.0 ? lo : hi) = lambda;
  }
  out.lambda = lambda;

  out.shape.qhat.resize(static_cast<std::size_t>(K));
  NeumaierSum excess, boundary;
  for (int k = 1; k <= K; ++k) {
    const double log_ref = log_reference_qhat(params, k);
    const double x = std::exp(log_ref - lambda * k);
    out.shape.qhat[static_cast<std::size_t>(k - 1)] = x;
    excess.add(k * std::max(0.0, x - std::exp(log_ref)));
    if (k > K / 2) boundary.add(k * x);
  }
  out.excess_mass = excess.value();
  out.boundary_mass = boundary.value();
  out.constraint_residual = std::abs(out.shape.truncated_mass() - 1.0);
  out.S = functional_S(out.shape, params, tol);
  out.regime = solve_alpha(params, tol).regime;
  return out;
}

TruncatedShape minimizing_sequence(int n, const SystemParams& params, int K, double tol) {
  params.validate();
  if (n < 1) throw DomainError("minimizing_sequence: n must be >= 1");
  if (K < n) throw DomainError("minimizing_sequence: truncation K must be >= n");
  check_condensed(params, tol, "minimizing_sequence");

  const double rho_c = critical_density(params.d, params.beta);
  TruncatedShape shape;
  shape.reference_tail = true;
  shape.qhat.resize(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) shape.qhat[static_cast<std::size_t>(k - 1)] = reference_qhat(params, k);
  shape.qhat[static_cast<std::size_t>(n - 1)] += (params.rho - rho_c) / (n * params.rho);
  return shape;
}

double minimizing_sequence_S(int n, const SystemParams& params, double tol) {
  params.validate();
  if (n < 1) throw DomainError("minimizing_sequence_S: n must be >= 1");
  check_condensed(params, tol, "minimizing_sequence_S");

  const double rho_c = critical_density(params.d, params.beta);
  const double scale = params.rho * params.thermal_factor();
  const double s_star = -zeta(0.5 * (params.d + 2), 1e-14).value / scale;
  const double eps = (params.rho - rho_c) / (n * params.rho);
  const double ref = reference_qhat(params, n);
  return s_star - eps + (ref + eps) * std::log1p(eps / ref);
}

}  // namespace cyclepart
