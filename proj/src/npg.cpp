#include "partialreg/npg.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace partialreg {

void NPGConfig::check() const {
  if (!(L_min > 0.0 && L_min < L_max && std::isfinite(L_max)))
    throw std::invalid_argument("npg: require 0 < L_min < L_max");
  if (!(tau > 1.0)) throw std::invalid_argument("npg: tau must exceed 1");
  if (!(c > 0.0)) throw std::invalid_argument("npg: c must be positive");
  if (!(eps > 0.0)) throw std::invalid_argument("npg: eps must be positive");
  if (max_iters == 0) throw std::invalid_argument("npg: max_iters must be positive");
}

std::string_view to_string(NPGStatus status) {
  switch (status) {
    case NPGStatus::Converged: return "converged";
    case NPGStatus::MaxIters: return "max_iters";
    case NPGStatus::NonFinite: return "non_finite";
    case NPGStatus::BacktrackFailure: return "backtrack_failure";
  }
  return "unknown";
}

void NPGTrace::write_csv(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  out << "iter,F,L_bar,step_norm,gap\n";
  for (std::size_t k = 0; k < iterations.size(); ++k) {
    const auto& it = iterations[k];
    out << k + 1 << ',' << it.F << ',' << it.L_bar << ',' << it.step_norm << ',' << it.gap << '\n';
  }
  out.precision(old_precision);
}

double bb_initial_step(const Eigen::VectorXd& s, const Eigen::VectorXd& y, const NPGConfig& cfg) {
  const double ss = s.squaredNorm();
  const double estimate = ss > 0.0 ? s.dot(y) / ss : cfg.L_initial;
  if (std::isnan(estimate)) return cfg.L_min;
  return std::max(cfg.L_min, std::min(cfg.L_max, estimate));
}

bool accept_test(const std::vector<double>& history, double F_new, double c, double step_sq) {
  if (history.empty()) throw std::invalid_argument("accept_test: empty history");
  const double reference = *std::max_element(history.begin(), history.end());
  return F_new <= reference - 0.5 * c * step_sq;
}

double stationarity_gap(const Eigen::VectorXd& grad_prev, const Eigen::VectorXd& grad_curr,
                        double L_bar, const Eigen::VectorXd& x_prev, const Eigen::VectorXd& x_curr) {
  if (grad_prev.size() != grad_curr.size() || x_prev.size() != x_curr.size() ||
      grad_prev.size() != x_prev.size())
    throw std::invalid_argument("stationarity_gap: dimension mismatch");
  return (grad_prev - grad_curr + L_bar * (x_curr - x_prev)).norm();
}

NPGResult npg_solve(const SmoothOracle& f, const PartialRegularizer& preg, const NPGConfig& cfg,
                    const Eigen::VectorXd& x0) {
  cfg.check();
  preg.check(static_cast<std::size_t>(x0.size()));
  if (!x0.allFinite()) throw std::invalid_argument("npg: initial point is not finite");

  auto penalty = [&](const Eigen::VectorXd& x) {
    return preg.lambda == 0.0 ? 0.0 : phi_partial_value(preg, x);
  };

  NPGResult result;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd grad;
  double F = f(x, grad) + penalty(x);
  result.trace.F0 = F;
  if (!std::isfinite(F) || !grad.allFinite()) {
    result.trace.status = NPGStatus::NonFinite;
    result.x = x;
    result.F = F;
    return result;
  }

  std::vector<double> history{F};
  history.reserve(cfg.N + 1);
  Eigen::VectorXd x_prev;
  Eigen::VectorXd grad_prev;
  Eigen::VectorXd trial;
  Eigen::VectorXd trial_grad;
  result.trace.status = NPGStatus::MaxIters;

  for (std::size_t k = 0; k < cfg.max_iters; ++k) {
    double L = k == 0 ? std::clamp(cfg.L_initial, cfg.L_min, cfg.L_max)
                      : bb_initial_step(x - x_prev, grad - grad_prev, cfg);
    std::size_t backtracks = 0;
    double F_trial = 0.0;
    double step_sq = 0.0;
    bool failed = false;
    for (;;) {
      const Eigen::VectorXd forward = x - grad / L;
      if (preg.lambda == 0.0) {
        trial = forward;
      } else {
        partial_prox_into(preg, forward, preg.lambda / L, trial);
      }
      F_trial = f(trial, trial_grad) + penalty(trial);
      if (!std::isfinite(F_trial) || !trial_grad.allFinite()) {
        result.trace.status = NPGStatus::NonFinite;
        failed = true;
        break;
      }
      step_sq = (trial - x).squaredNorm();
      if (accept_test(history, F_trial, cfg.c, step_sq)) break;
      if (++backtracks > cfg.max_backtracks) {
        result.trace.status = NPGStatus::BacktrackFailure;
        failed = true;
        break;
      }
      L *= cfg.tau;
    }
    if (failed) break;

    NPGIterate rec;
    rec.F = F_trial;
    rec.L_bar = L;
    rec.step_norm = std::sqrt(step_sq);
    rec.gap = stationarity_gap(grad, trial_grad, L, x, trial);
    rec.window_max = *std::max_element(history.begin(), history.end());
    rec.backtracks = backtracks;
    result.trace.iterations.push_back(rec);

    x_prev.swap(x);
    grad_prev.swap(grad);
    x.swap(trial);
    grad.swap(trial_grad);
    F = F_trial;
    if (history.size() == cfg.N + 1) history.erase(history.begin());
    history.push_back(F);

    if (rec.gap <= cfg.eps) {
      result.trace.status = NPGStatus::Converged;
      break;
    }
  }

  result.x = std::move(x);
  result.F = F;
  return result;
}

}  // namespace partialreg
