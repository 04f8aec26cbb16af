#include "cyclepart/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cyclepart/errors.hpp"

namespace cyclepart {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Working tolerance for the closed-form zeta values.
constexpr double kZetaTol = 1e-14;

double thermal_factor(int d, double beta) { return std::pow(4.0 * std::numbers::pi * beta, 0.5 * d); }

}  // namespace

void SystemParams::validate() const {
  if (d < 1) throw DomainError("SystemParams: dimension d must be >= 1");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("SystemParams: beta must be positive and finite");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("SystemParams: rho must be positive and finite");
  if (n && *n < 1) throw DomainError("SystemParams: particle number n must be >= 1");
}

double SystemParams::volume() const {
  if (!n) throw DomainError("SystemParams: particle number n is required for the volume");
  return static_cast<double>(*n) / rho;
}

double SystemParams::thermal_factor() const { return cyclepart::thermal_factor(d, beta); }

SystemParams SystemParams::with_n(int particles) const {
  SystemParams p = *this;
  p.n = particles;
  return p;
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::normal:
      return "normal";
    case Regime::critical:
      return "critical";
    case Regime::condensed:
      return "condensed";
  }
  return "unknown";
}

double log_reference_qhat(const SystemParams& params, std::int64_t k) {
  return -std::log(params.rho * params.thermal_factor()) - (1.0 + 0.5 * params.d) * std::log(static_cast<double>(k));
}

double reference_qhat(const SystemParams& params, std::int64_t k) {
  return 1.0 / (params.rho * params.thermal_factor() * std::pow(static_cast<double>(k), 1.0 + 0.5 * params.d));
}

double ThermoSolution::qhat(std::int64_t k) const {
  return std::exp(log_reference_qhat(params, k) - alpha * static_cast<double>(k));
}

double ThermoSolution::cycle_mass(std::int64_t k) const { return static_cast<double>(k) * qhat(k); }

double critical_density(int d, double beta) {
  if (d < 1 || !(beta > 0.0)) throw DomainError("critical_density: need d >= 1 and beta > 0");
  if (d <= 2) return kInf;
  return zeta(0.5 * d, kZetaTol).value / thermal_factor(d, beta);
}

double critical_beta(int d, double rho) {
  if (d < 1 || !(rho > 0.0)) throw DomainError("critical_beta: need d >= 1 and rho > 0");
  if (d <= 2) return kInf;
  return std::pow(zeta(0.5 * d, kZetaTol).value / rho, 2.0 / d) / (4.0 * std::numbers::pi);
}

ThermoSolution solve_alpha(const SystemParams& params, double tol) {
  params.validate();
  if (!(tol > 0.0)) throw DomainError("solve_alpha: tol must be positive");

  ThermoSolution sol;
  sol.params = params;
  sol.rho_c = critical_density(params.d, params.beta);
  sol.beta_c = critical_beta(params.d, params.rho);

  if (params.d >= 3) {
    if (std::abs(params.rho - sol.rho_c) <= tol * params.rho) {
      sol.regime = Regime::critical;
      sol.condensate_fraction = std::max(0.0, 1.0 - sol.rho_c / params.rho);
      return sol;
    }
    if (params.rho > sol.rho_c) {
      sol.regime = Regime::condensed;
      sol.condensate_fraction = 1.0 - sol.rho_c / params.rho;
      return sol;
    }
  }

  // g_{d/2}(alpha) = target, g decreasing in alpha.
  const double s = 0.5 * params.d;
  const double target = params.rho * params.thermal_factor();
  const double g_tol = 0.25 * tol * target;
  auto g = [&](double a) { return bose_g(s, a, g_tol); };

  double hi = 1.0;
  while (g(hi).value >= target) hi *= 2.0;
  double lo = 0.0;
  if (params.d <= 2) {
    lo = 0.5 * hi;
    while (g(lo).value <= target) {
      lo *= 0.5;
      if (lo < std::numeric_limits<double>::min()) {
        std::ostringstream msg;
        msg << "solve_alpha: root alpha is below the double range for d = " << params.d << ", beta = " << params.beta
            << ", rho = " << params.rho;
        throw PrecisionError(msg.str());
      }
    }
    hi = std::min(hi, 2.0 * lo);
  }

  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    mid = 0.5 * (lo + hi);
    const BoseEval gm = g(mid);
    const double residual = std::abs(gm.value - target);
    if (residual + gm.error_bound <= tol * target) break;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    (gm.value > target ? lo : hi) = mid;
  }
  sol.alpha = mid;
  sol.root_residual = std::abs(g(mid).value - target) / target;
  return sol;
}

ThermoSolution solve(const SystemParams& params, double tol) {
  ThermoSolution sol = solve_alpha(params, tol);
  const double T = params.thermal_factor();
  const double s_next = 0.5 * (params.d + 2);
  if (sol.regime == Regime::normal) {
    const BoseEval g = bose_g(s_next, sol.alpha, std::max(tol * 1e-2, 1e-14));
    sol.free_energy = -g.value / (T * params.beta) - params.rho * sol.alpha / params.beta;
    // The alpha error enters only through the root residual, since
    // df/dalpha = (rho / beta) (g_{d/2}(alpha) / (rho T) - 1).
    sol.free_energy_error = g.error_bound / (T * params.beta) +
                            params.rho / params.beta * sol.root_residual * std::max(sol.alpha, tol);
  } else {
    const BoseEval z = zeta(s_next, 1e-14);
    sol.free_energy = -z.value / (T * params.beta);
    sol.free_energy_error = z.error_bound / (T * params.beta);
  }
  sol.chi = params.beta * sol.free_energy / params.rho;
  return sol;
}

OptimalShape optimal_shape(const SystemParams& params, double tol) {
  OptimalShape out{solve(params, tol), {}, {}};
  const ThermoSolution sol = out.solution;
  out.qhat = [sol](std::int64_t k) { return sol.qhat(k); };
  const double scale = params.rho * params.thermal_factor();
  BoseEval g = bose_g(0.5 * params.d, sol.alpha, std::max(tol * scale, 1e-14));
  g.value /= scale;
  g.error_bound /= scale;
  out.total_mass = g;
  return out;
}

double free_energy(const SystemParams& params, double tol) { return solve(params, tol).free_energy; }

double chi(const SystemParams& params, double tol) { return solve(params, tol).chi; }

}  // namespace cyclepart
