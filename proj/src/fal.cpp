#include "partialreg/fal.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace partialreg {

namespace {

double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

double plus(double v) { return v > 0.0 ? v : 0.0; }

// Multiplier-specific pieces of the outer loop.
struct Multiplier {
  std::function<ValueGrad(const Eigen::VectorXd& x)> smooth;     // w at the current (μ, ϱ)
  std::function<void(const Eigen::VectorXd& residual)> update;  // μ ← ...
  std::function<double()> norm;                                  // ‖μ‖ or μ
  std::function<double(double res_norm)> excess;                // quantity tested against η
  std::function<double(const Eigen::VectorXd& residual)> infeasibility;
};

SolveResult run_fal(const LinearSystem& sys, const PartialRegularizer& preg, const FALConfig& cfg,
                    const NPGConfig& npg_cfg, const Eigen::VectorXd& x_feas, double& rho,
                    Multiplier& mult) {
  const auto wall_start = std::chrono::steady_clock::now();
  const double cpu_start = thread_cpu_seconds();
  const auto n = sys.cols();

  SolveResult result;
  Eigen::VectorXd x = cfg.x0.value_or(Eigen::VectorXd::Zero(n));
  if (x.size() != n) throw std::invalid_argument("fal: x0 has the wrong length");

  auto penalty = [&](const Eigen::VectorXd& v) { return phi_partial_value(preg, v); };
  auto al_value = [&](const Eigen::VectorXd& v) { return mult.smooth(v).value + penalty(v); };

  const double lower = std::max(penalty(x_feas), al_value(x));
  if (cfg.upsilon && *cfg.upsilon < lower)
    throw std::invalid_argument("fal: upsilon is below max{Phi(x_feas), L(x0)}");
  const double upsilon = cfg.upsilon.value_or(lower);
  const double upsilon_slack = 1e-9 * std::max(1.0, std::abs(upsilon));
  result.upsilon = upsilon;

  double eps = cfg.eps0;
  double prev_excess = mult.excess((sys.A * x - sys.b).norm());
  result.status = FALStatus::MaxOuter;

  for (std::size_t k = 0; k < cfg.outer_max; ++k) {
    FALIterate rec;
    rec.rho = rho;
    rec.eps = eps;

    const double al_current = al_value(x);
    rec.restarted = !(al_current <= upsilon);
    const Eigen::VectorXd& start = rec.restarted ? x_feas : x;
    rec.al_start = rec.restarted ? al_value(x_feas) : al_current;

    SmoothOracle oracle;
    oracle.eval = [&mult](const Eigen::VectorXd& v, Eigen::VectorXd& grad) {
      auto vg = mult.smooth(v);
      grad = std::move(vg.grad);
      return vg.value;
    };
    NPGConfig inner = npg_cfg;
    inner.eps = eps;
    NPGResult sub = npg_solve(oracle, preg, inner, start);
    rec.npg_iterations = sub.trace.iterations.size();
    rec.npg_status = sub.trace.status;
    result.npg_iterations += rec.npg_iterations;
    if (sub.trace.status == NPGStatus::NonFinite || !sub.x.allFinite()) {
      result.status = FALStatus::NonFinite;
      result.history.push_back(rec);
      break;
    }
    x = std::move(sub.x);
    rec.al_value = al_value(x);
    // x_feas satisfies the constraint only to rounding, so its AL value may
    // sit a hair above Φ(x_feas).
    const double feas_rounding = std::max(0.0, al_value(x_feas) - penalty(x_feas));
    if (rec.al_value > upsilon + upsilon_slack + feas_rounding)
      throw std::logic_error("fal: subproblem solution exceeds the AL upper bound");

    const Eigen::VectorXd residual = sys.A * x - sys.b;
    rec.residual_norm = residual.norm();
    rec.infeasibility = mult.infeasibility(residual);

    mult.update(residual);
    rec.mu_norm = mult.norm();
    const double excess = mult.excess(rec.residual_norm);
    rec.contracted = excess <= cfg.eta * prev_excess;
    if (!rec.contracted) rho = std::max(cfg.gamma * rho, std::pow(rec.mu_norm, 1.0 + cfg.theta));
    rec.rho_next = rho;
    prev_excess = excess;
    result.history.push_back(rec);

    if (rec.infeasibility <= cfg.feas_tol && eps <= cfg.eps_target) {
      result.status = FALStatus::Converged;
      break;
    }
    if (!std::isfinite(rho) || rho > cfg.rho_cap) {
      result.status = FALStatus::PenaltyOverflow;
      break;
    }
    eps = std::max(cfg.eps_factor * eps, cfg.eps_min);
  }

  const Eigen::VectorXd residual = sys.A * x - sys.b;
  result.residual_norm = residual.norm();
  result.infeasibility = mult.infeasibility(residual);
  result.objective = penalty(x);
  result.outer_iterations = result.history.size();
  result.x = std::move(x);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  result.cpu_seconds = thread_cpu_seconds() - cpu_start;
  return result;
}

}  // namespace

void FALConfig::check() const {
  if (!(rho0 > 0.0)) throw std::invalid_argument("fal: rho0 must be positive");
  if (!(gamma > 1.0)) throw std::invalid_argument("fal: gamma must exceed 1");
  if (!(theta > 0.0)) throw std::invalid_argument("fal: theta must be positive");
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("fal: eta must lie in (0, 1)");
  if (!(eps0 > 0.0 && eps_min > 0.0 && eps_min <= eps0))
    throw std::invalid_argument("fal: tolerances must satisfy 0 < eps_min <= eps0");
  if (!(eps_factor > 0.0 && eps_factor <= 1.0))
    throw std::invalid_argument("fal: eps_factor must lie in (0, 1]");
  if (!(feas_tol > 0.0)) throw std::invalid_argument("fal: feas_tol must be positive");
  if (!(mu0_noisy >= 0.0)) throw std::invalid_argument("fal: noisy multiplier must be nonnegative");
  if (outer_max == 0) throw std::invalid_argument("fal: outer_max must be positive");
}

std::string_view to_string(FALStatus status) {
  switch (status) {
    case FALStatus::Converged: return "converged";
    case FALStatus::MaxOuter: return "max_outer";
    case FALStatus::PenaltyOverflow: return "penalty_overflow";
    case FALStatus::NonFinite: return "non_finite";
  }
  return "unknown";
}

std::string SolveResult::csv_header() {
  return "status,objective,infeasibility,residual_norm,outer_iterations,npg_iterations,"
         "wall_seconds,cpu_seconds,x";
}

void SolveResult::write_csv_row(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  out << to_string(status) << ',' << objective << ',' << infeasibility << ',' << residual_norm << ','
      << outer_iterations << ',' << npg_iterations << ',' << wall_seconds << ',' << cpu_seconds
      << ',';
  for (Eigen::Index i = 0; i < x.size(); ++i) out << (i ? ";" : "") << x[i];
  out << '\n';
  out.precision(old_precision);
}

void SolveResult::write_line(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  out << "status=" << to_string(status) << " objective=" << objective
      << " infeasibility=" << infeasibility << " residual_norm=" << residual_norm
      << " outer_iterations=" << outer_iterations << " npg_iterations=" << npg_iterations
      << " wall_seconds=" << wall_seconds << " cpu_seconds=" << cpu_seconds << " x=";
  for (Eigen::Index i = 0; i < x.size(); ++i) out << (i ? ";" : "") << x[i];
  out << '\n';
  out.precision(old_precision);
}

ValueGrad al_noiseless(const LinearSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                       double rho) {
  if (x.size() != sys.cols() || mu.size() != sys.rows())
    throw std::invalid_argument("al_noiseless: dimension mismatch");
  if (!(rho > 0.0)) throw std::domain_error("al_noiseless: rho must be positive");
  const Eigen::VectorXd residual = sys.A * x - sys.b;
  ValueGrad out;
  out.value = mu.dot(residual) + 0.5 * rho * residual.squaredNorm();
  out.grad = sys.A.transpose() * (mu + rho * residual);
  return out;
}

ValueGrad al_noisy(const LinearSystem& sys, const Eigen::VectorXd& x, double mu, double rho) {
  if (x.size() != sys.cols()) throw std::invalid_argument("al_noisy: dimension mismatch");
  if (!(mu >= 0.0)) throw std::domain_error("al_noisy: multiplier must be nonnegative");
  if (!(rho > 0.0)) throw std::domain_error("al_noisy: rho must be positive");
  const Eigen::VectorXd residual = sys.A * x - sys.b;
  const double shifted = plus(mu + rho * (residual.squaredNorm() - sys.sigma * sys.sigma));
  ValueGrad out;
  out.value = (shifted * shifted - mu * mu) / (2.0 * rho);
  out.grad = (2.0 * shifted) * (sys.A.transpose() * residual);
  return out;
}

Eigen::VectorXd least_squares_point(const LinearSystem& sys) {
  sys.check();
  return sys.A.completeOrthogonalDecomposition().solve(sys.b);
}

SolveResult fal_noiseless(const LinearSystem& sys, const PartialRegularizer& preg,
                          const FALConfig& cfg, const NPGConfig& npg_cfg,
                          std::optional<Eigen::VectorXd> x_feas) {
  sys.check();
  cfg.check();
  npg_cfg.check();
  preg.check(static_cast<std::size_t>(sys.cols()));
  const Eigen::VectorXd feas = x_feas ? *x_feas : least_squares_point(sys);
  if (feas.size() != sys.cols()) throw std::invalid_argument("fal: x_feas has the wrong length");
  if ((sys.A * feas - sys.b).lpNorm<Eigen::Infinity>() > cfg.feas_tol)
    throw std::invalid_argument("fal_noiseless: x_feas does not satisfy Ax = b");

  Eigen::VectorXd mu = cfg.mu0.value_or(Eigen::VectorXd::Zero(sys.rows()));
  if (mu.size() != sys.rows()) throw std::invalid_argument("fal: mu0 has the wrong length");
  double rho = cfg.rho0;

  Multiplier mult;
  mult.smooth = [&](const Eigen::VectorXd& v) { return al_noiseless(sys, v, mu, rho); };
  mult.update = [&](const Eigen::VectorXd& residual) { mu += rho * residual; };
  mult.norm = [&] { return mu.norm(); };
  mult.excess = [](double res_norm) { return res_norm; };
  mult.infeasibility = [](const Eigen::VectorXd& residual) {
    return residual.lpNorm<Eigen::Infinity>();
  };
  return run_fal(sys, preg, cfg, npg_cfg, feas, rho, mult);
}

SolveResult fal_noisy(const LinearSystem& sys, const PartialRegularizer& preg, const FALConfig& cfg,
                      const NPGConfig& npg_cfg, std::optional<Eigen::VectorXd> x_feas) {
  sys.check();
  cfg.check();
  npg_cfg.check();
  preg.check(static_cast<std::size_t>(sys.cols()));
  const Eigen::VectorXd feas = x_feas ? *x_feas : least_squares_point(sys);
  if (feas.size() != sys.cols()) throw std::invalid_argument("fal: x_feas has the wrong length");
  const double slack = 1e-12 * std::max(1.0, sys.b.norm());
  if ((sys.A * feas - sys.b).norm() > sys.sigma + slack)
    throw std::invalid_argument("fal_noisy: x_feas violates ||Ax - b|| <= sigma");

  double mu = cfg.mu0_noisy;
  double rho = cfg.rho0;
  const double sigma = sys.sigma;

  Multiplier mult;
  mult.smooth = [&](const Eigen::VectorXd& v) { return al_noisy(sys, v, mu, rho); };
  mult.update = [&](const Eigen::VectorXd& residual) {
    mu = plus(mu + rho * (residual.squaredNorm() - sigma * sigma));
  };
  mult.norm = [&] { return mu; };
  mult.excess = [sigma](double res_norm) { return plus(res_norm - sigma); };
  mult.infeasibility = [sigma](const Eigen::VectorXd& residual) {
    return plus(residual.lpNorm<Eigen::Infinity>() - sigma);
  };
  return run_fal(sys, preg, cfg, npg_cfg, feas, rho, mult);
}

SolveResult fal_solve(const LinearSystem& sys, const PartialRegularizer& preg, const FALConfig& cfg,
                      const NPGConfig& npg_cfg) {
  return sys.sigma > 0.0 ? fal_noisy(sys, preg, cfg, npg_cfg) : fal_noiseless(sys, preg, cfg, npg_cfg);
}

}  // namespace partialreg
