#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "partialreg/npg.hpp"
#include "partialreg/objectives.hpp"
#include "partialreg/partial_prox.hpp"

namespace partialreg {

/// Outer-loop constants shared by the noiseless and noisy feasible
/// augmented Lagrangian solvers. Subproblem tolerances follow
/// ε_0 = eps0, ε_{k+1} = max(eps_factor·ε_k, eps_min).
struct FALConfig {
  double rho0 = 1.0;
  double gamma = 5.0;
  double theta = 1e-2;
  double eta = 0.25;
  double eps0 = 1.0;
  double eps_factor = 0.1;
  double eps_min = 1e-5;
  double eps_target = 1e-4;  // stop once ε_k is at most this ...
  double feas_tol = 1e-5;    // ... and the infeasibility is at most this
  std::optional<double> upsilon;            // defaults to its lower bound
  std::optional<Eigen::VectorXd> mu0;       // noiseless multiplier, defaults to 0
  double mu0_noisy = 0.0;                   // noisy multiplier, must be ≥ 0
  std::optional<Eigen::VectorXd> x0;        // defaults to 0
  std::size_t outer_max = 200;
  double rho_cap = 1e14;

  void check() const;
};

enum class FALStatus { Converged, MaxOuter, PenaltyOverflow, NonFinite };

std::string_view to_string(FALStatus status);

struct FALIterate {
  double rho = 0.0;            // ϱ_k used for the subproblem
  double rho_next = 0.0;       // ϱ_{k+1}
  double mu_norm = 0.0;        // ‖μ^{k+1}‖ (or μ_{k+1} in the noisy case)
  double eps = 0.0;            // ε_k
  double residual_norm = 0.0;  // ‖Ax^{k+1} − b‖
  double infeasibility = 0.0;
  double al_start = 0.0;       // AL value at the subproblem start point
  double al_value = 0.0;       // AL value at x^{k+1}
  bool restarted = false;      // subproblem started from x_feas
  bool contracted = false;     // penalty kept because infeasibility shrank by η
  std::size_t npg_iterations = 0;
  NPGStatus npg_status = NPGStatus::Converged;
};

struct SolveResult {
  Eigen::VectorXd x;
  double objective = 0.0;      // Φ(x)
  double infeasibility = 0.0;  // ‖Ax−b‖_∞, or [‖Ax−b‖_∞ − σ]_+ when σ > 0
  double residual_norm = 0.0;
  double upsilon = 0.0;
  std::size_t outer_iterations = 0;
  std::size_t npg_iterations = 0;
  double wall_seconds = 0.0;
  double cpu_seconds = 0.0;
  FALStatus status = FALStatus::MaxOuter;
  std::vector<FALIterate> history;

  bool converged() const { return status == FALStatus::Converged; }

  static std::string csv_header();
  /// One CSV row matching csv_header(); x is written as ';'-separated values.
  void write_csv_row(std::ostream& out) const;
  /// Space-separated key=value record terminated by a newline.
  void write_line(std::ostream& out) const;
};

/// w(x;μ,ϱ) = μᵀ(Ax−b) + (ϱ/2)‖Ax−b‖² and its gradient Aᵀ(μ + ϱ(Ax−b)).
ValueGrad al_noiseless(const LinearSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                       double rho);

/// w̃(x;μ,ϱ) = ([μ + ϱ(‖Ax−b‖² − σ²)]_+² − μ²)/(2ϱ) and its gradient
/// 2[μ + ϱ(‖Ax−b‖² − σ²)]_+ Aᵀ(Ax−b).
ValueGrad al_noisy(const LinearSystem& sys, const Eigen::VectorXd& x, double mu, double rho);

/// Minimum-norm least-squares solution of Ax = b.
Eigen::VectorXd least_squares_point(const LinearSystem& sys);

/// Solves min Φ(x) s.t. Ax = b. `x_feas` must satisfy the constraint to
/// within cfg.feas_tol; by default the minimum-norm least-squares point is
/// used.
SolveResult fal_noiseless(const LinearSystem& sys, const PartialRegularizer& preg,
                          const FALConfig& cfg, const NPGConfig& npg_cfg,
                          std::optional<Eigen::VectorXd> x_feas = std::nullopt);

/// Solves min Φ(x) s.t. ‖Ax − b‖ ≤ σ with a scalar multiplier.
SolveResult fal_noisy(const LinearSystem& sys, const PartialRegularizer& preg, const FALConfig& cfg,
                      const NPGConfig& npg_cfg, std::optional<Eigen::VectorXd> x_feas = std::nullopt);

/// Dispatches on sys.sigma: zero uses fal_noiseless, positive fal_noisy.
SolveResult fal_solve(const LinearSystem& sys, const PartialRegularizer& preg, const FALConfig& cfg,
                      const NPGConfig& npg_cfg);

}  // namespace partialreg
