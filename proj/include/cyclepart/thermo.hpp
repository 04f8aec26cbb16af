#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

#include "cyclepart/bosefn.hpp"

namespace cyclepart {

// Dimensionless inputs. beta is the time horizon of a Brownian motion with
// generator Delta (not Delta/2), so a k-cycle has return density
// (4 pi beta k)^{-d/2}.
struct SystemParams {
  int d = 3;
  double beta = 1.0;
  double rho = 1.0;
  // Particle number, required only by finite-size operations.
  std::optional<int> n;

  // Throws DomainError on d < 1, beta <= 0, rho <= 0 or n < 1.
  void validate() const;
  // |Lambda| = n / rho. Throws DomainError when n is unset.
  double volume() const;
  // (4 pi beta)^{d/2}.
  double thermal_factor() const;
  // Copy with a different particle number.
  SystemParams with_n(int particles) const;
};

enum class Regime { normal, critical, condensed };

std::string_view to_string(Regime regime);

// Qhat*(k) = 1 / (rho (4 pi beta)^{d/2} k^{1 + d/2}).
double reference_qhat(const SystemParams& params, std::int64_t k);
double log_reference_qhat(const SystemParams& params, std::int64_t k);

struct ThermoSolution {
  SystemParams params;
  Regime regime = Regime::normal;
  // Root of rho = (4 pi beta)^{-d/2} g_{d/2}(alpha); zero unless normal.
  double alpha = 0.0;
  // |rho - (4 pi beta)^{-d/2} g_{d/2}(alpha)| / rho at the returned alpha.
  double root_residual = 0.0;
  // +infinity for d = 1, 2.
  double rho_c = 0.0;
  double beta_c = 0.0;
  // 1 - rho_c/rho in the condensed band, 0 otherwise.
  double condensate_fraction = 0.0;
  double free_energy = 0.0;
  double free_energy_error = 0.0;
  // inf S(Q) = beta f / rho.
  double chi = 0.0;

  // Optimal increments Qhat(k) = Qhat*(k) e^{-alpha k}.
  double qhat(std::int64_t k) const;
  // Limiting mass k Qhat(k) carried by cycles of length k.
  double cycle_mass(std::int64_t k) const;
};

// zeta(d/2) (4 pi beta)^{-d/2} for d >= 3, +infinity for d = 1, 2.
double critical_density(int d, double beta);

// Inverse of critical_density in beta: (1 / 4 pi) (zeta(d/2) / rho)^{2/d} for
// d >= 3, +infinity for d = 1, 2. rho > rho_c(beta) iff beta > beta_c(rho).
double critical_beta(int d, double rho);

// Resolves the regime and alpha by bisection on the monotone root equation.
// Populates regime, alpha, root_residual, rho_c, beta_c, condensate_fraction.
// |rho - rho_c| <= tol rho is labelled critical and handled like condensed.
ThermoSolution solve_alpha(const SystemParams& params, double tol);

// solve_alpha plus free energy and chi.
ThermoSolution solve(const SystemParams& params, double tol);

struct OptimalShape {
  ThermoSolution solution;
  std::function<double(std::int64_t)> qhat;
  // sum_k k Qhat(k) = g_{d/2}(alpha) / (rho (4 pi beta)^{d/2}); 1 in the
  // normal regime, rho_c / rho when condensed.
  BoseEval total_mass;
};

OptimalShape optimal_shape(const SystemParams& params, double tol);

// Specific free energy in both phases:
//   normal:    -g_{(d+2)/2}(alpha) / ((4 pi beta)^{d/2} beta) - rho alpha / beta
//   condensed: -zeta((d+2)/2) / ((4 pi beta)^{d/2} beta)
double free_energy(const SystemParams& params, double tol);

// inf_Q S(Q) = beta f / rho.
double chi(const SystemParams& params, double tol);

}  // namespace cyclepart
