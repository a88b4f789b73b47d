#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "partialreg/objectives.hpp"
#include "partialreg/partial_prox.hpp"

namespace partialreg {

/// Constants of the nonmonotone proximal gradient method.
struct NPGConfig {
  double L_min = 1e-8;
  double L_max = 1e8;
  double tau = 2.0;         // backtracking factor
  double c = 1e-4;          // sufficient-decrease constant
  std::size_t N = 5;        // nonmonotone window
  double eps = 1e-5;        // surrogate stationarity tolerance
  std::size_t max_iters = 50000;
  double L_initial = 1.0;   // first-iteration curvature, clamped into [L_min, L_max]
  std::size_t max_backtracks = 200;

  /// Throws std::invalid_argument when a constant is out of range.
  void check() const;
};

enum class NPGStatus { Converged, MaxIters, NonFinite, BacktrackFailure };

std::string_view to_string(NPGStatus status);

struct NPGIterate {
  double F = 0.0;          // F(x^{k+1})
  double L_bar = 0.0;      // accepted curvature
  double step_norm = 0.0;  // ‖x^{k+1} − x^k‖
  double gap = 0.0;        // surrogate stationarity
  double window_max = 0.0; // max of the F-history the step was tested against
  std::size_t backtracks = 0;
};

struct NPGTrace {
  double F0 = 0.0;
  std::vector<NPGIterate> iterations;
  NPGStatus status = NPGStatus::MaxIters;

  /// iter,F,L_bar,step_norm,gap with a header row.
  void write_csv(std::ostream& out) const;
};

struct NPGResult {
  Eigen::VectorXd x;
  double F = 0.0;
  NPGTrace trace;
};

/// Barzilai–Borwein estimate ⟨s,y⟩/‖s‖² clamped into [L_min, L_max]. With
/// s = 0 the clamped `L_initial` is returned.
double bb_initial_step(const Eigen::VectorXd& s, const Eigen::VectorXd& y, const NPGConfig& cfg);

/// F_new ≤ max(history) − (c/2)·step_sq.
bool accept_test(const std::vector<double>& history, double F_new, double c, double step_sq);

/// ‖∇f(x_prev) − ∇f(x_curr) + L̄(x_curr − x_prev)‖, an upper bound on the
/// distance from 0 to ∇f(x_curr) + λ∂Φ(x_curr).
double stationarity_gap(const Eigen::VectorXd& grad_prev, const Eigen::VectorXd& grad_curr,
                        double L_bar, const Eigen::VectorXd& x_prev, const Eigen::VectorXd& x_curr);

/// Minimizes f(x) + λ Σ_{i=r+1}^n φ(|x|_[i]) from x0.
///
/// Each step takes x^{k+1} = partial_prox(x^k − ∇f(x^k)/L, λ/L), starting
/// from the BB curvature and multiplying L by τ until the nonmonotone test
/// against the last N+1 objective values passes. Stops once the surrogate
/// gap is at most cfg.eps.
NPGResult npg_solve(const SmoothOracle& f, const PartialRegularizer& preg, const NPGConfig& cfg,
                    const Eigen::VectorXd& x0);

}  // namespace partialreg
