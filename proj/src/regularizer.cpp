#include "partialreg/regularizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace partialreg {

namespace {

constexpr double kTieTolerance = 1e-12;

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("regularizer parameter '" + key + "' is not a number: " + text);
  }
}

// Larger root of u + scale*q*u^(q-1) = t on (0, t], or nothing when the
// convex function on the left never reaches t.
bool lq_stationary_root(double t, double scale, double q, double& root) {
  const double turn = std::pow(scale * q * (1.0 - q), 1.0 / (2.0 - q));
  auto h = [&](double u) { return u + scale * q * std::pow(u, q - 1.0); };
  if (turn >= t || h(turn) > t) return false;

  if (q == 0.5) {
    // v = sqrt(u) solves v^3 - t v + scale/2 = 0; take the largest real root.
    const double arg = -(3.0 * scale / (4.0 * t)) * std::sqrt(3.0 / t);
    if (arg >= -1.0) {
      const double v = 2.0 * std::sqrt(t / 3.0) * std::cos(std::acos(arg) / 3.0);
      root = std::clamp(v * v, 0.0, t);
      return true;
    }
    return false;
  }

  double lo = turn;
  double hi = t;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) > t) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  root = 0.5 * (lo + hi);
  return true;
}

// Collects nonnegative candidates for t >= 0; each is clamped into [0, t].
class Candidates {
 public:
  explicit Candidates(double t) : t_(t) {}
  void add(double u) {
    if (!std::isfinite(u) || count_ == values_.size()) return;
    values_[count_++] = std::clamp(u, 0.0, t_);
  }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.begin() + static_cast<std::ptrdiff_t>(count_); }

 private:
  double t_;
  std::array<double, 12> values_{};
  std::size_t count_ = 0;
};

}  // namespace

std::string_view to_string(RegKind kind) {
  switch (kind) {
    case RegKind::L1: return "l1";
    case RegKind::Lq: return "lq";
    case RegKind::Log: return "log";
    case RegKind::CappedL1: return "capped_l1";
    case RegKind::MCP: return "mcp";
    case RegKind::SCAD: return "scad";
  }
  return "unknown";
}

RegKind reg_kind_from_string(std::string_view name) {
  for (auto kind : {RegKind::L1, RegKind::Lq, RegKind::Log, RegKind::CappedL1, RegKind::MCP,
                    RegKind::SCAD}) {
    if (name == to_string(kind)) return kind;
  }
  if (name == "capped-l1" || name == "cappedl1") return RegKind::CappedL1;
  throw std::invalid_argument("unknown regularizer kind: " + std::string(name));
}

Regularizer Regularizer::l1() { return Regularizer(RegKind::L1); }

Regularizer Regularizer::lq(double q) {
  require(q > 0.0 && q < 1.0, "lq: q must lie in (0, 1)");
  Regularizer r(RegKind::Lq);
  r.q_ = q;
  return r;
}

Regularizer Regularizer::log(double epsilon) {
  require(epsilon > 0.0 && std::isfinite(epsilon), "log: epsilon must be positive");
  Regularizer r(RegKind::Log);
  r.epsilon_ = epsilon;
  return r;
}

Regularizer Regularizer::capped_l1(double nu) {
  require(nu > 0.0 && std::isfinite(nu), "capped_l1: nu must be positive");
  Regularizer r(RegKind::CappedL1);
  r.nu_ = nu;
  return r;
}

Regularizer Regularizer::mcp(double lambda, double alpha) {
  require(lambda > 0.0 && std::isfinite(lambda), "mcp: lambda must be positive");
  require(alpha > 1.0 && std::isfinite(alpha), "mcp: alpha must exceed 1");
  Regularizer r(RegKind::MCP);
  r.lambda_ = lambda;
  r.alpha_ = alpha;
  return r;
}

Regularizer Regularizer::scad(double lambda, double beta) {
  require(lambda > 0.0 && std::isfinite(lambda), "scad: lambda must be positive");
  require(beta > 1.0 && std::isfinite(beta), "scad: beta must exceed 1");
  Regularizer r(RegKind::SCAD);
  r.lambda_ = lambda;
  r.beta_ = beta;
  return r;
}

Regularizer Regularizer::with_defaults(RegKind kind) {
  switch (kind) {
    case RegKind::L1: return l1();
    case RegKind::Lq: return lq();
    case RegKind::Log: return log();
    case RegKind::CappedL1: return capped_l1();
    case RegKind::MCP: return mcp();
    case RegKind::SCAD: return scad();
  }
  return l1();
}

Regularizer Regularizer::from_params(std::string_view kind,
                                     const std::map<std::string, std::string>& params) {
  auto get = [&](const char* key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : parse_double(key, it->second);
  };
  switch (reg_kind_from_string(kind)) {
    case RegKind::L1: return l1();
    case RegKind::Lq: return lq(get("q", 0.5));
    case RegKind::Log: return log(get("epsilon", 1e-3));
    case RegKind::CappedL1: return capped_l1(get("nu", 1e-2));
    case RegKind::MCP: return mcp(get("reg_lambda", 1.0), get("alpha", 2.7));
    case RegKind::SCAD: return scad(get("reg_lambda", 1.0), get("beta", 3.7));
  }
  return l1();
}

double Regularizer::value(double t) const {
  if (!(t >= 0.0) || std::isnan(t)) throw std::domain_error("phi: argument must be nonnegative");
  if (std::isinf(t)) throw std::domain_error("phi: argument must be finite");
  switch (kind_) {
    case RegKind::L1:
      return t;
    case RegKind::Lq:
      return t == 0.0 ? 0.0 : std::pow(t, q_);
    case RegKind::Log:
      return std::log1p(t / epsilon_);
    case RegKind::CappedL1:
      return t < nu_ ? t : nu_;
    case RegKind::MCP:
      if (t < lambda_ * alpha_) return lambda_ * t - t * t / (2.0 * alpha_);
      return lambda_ * lambda_ * alpha_ / 2.0;
    case RegKind::SCAD:
      if (t <= lambda_) return lambda_ * t;
      if (t < lambda_ * beta_)
        return (-t * t + 2.0 * beta_ * lambda_ * t - lambda_ * lambda_) / (2.0 * (beta_ - 1.0));
      return (beta_ + 1.0) * lambda_ * lambda_ / 2.0;
  }
  return 0.0;
}

std::string Regularizer::describe() const {
  std::ostringstream out;
  out << to_string(kind_);
  switch (kind_) {
    case RegKind::L1: break;
    case RegKind::Lq: out << "(q=" << q_ << ")"; break;
    case RegKind::Log: out << "(epsilon=" << epsilon_ << ")"; break;
    case RegKind::CappedL1: out << "(nu=" << nu_ << ")"; break;
    case RegKind::MCP: out << "(lambda=" << lambda_ << ",alpha=" << alpha_ << ")"; break;
    case RegKind::SCAD: out << "(lambda=" << lambda_ << ",beta=" << beta_ << ")"; break;
  }
  return out.str();
}

double scalar_prox_objective(const Regularizer& reg, double t, double scale, double u) {
  const double d = u - t;
  return 0.5 * d * d + scale * reg.value(std::abs(u));
}

ScalarProxResult scalar_prox(const Regularizer& reg, double t, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw std::domain_error("scalar_prox: scale must be positive");
  if (!std::isfinite(t)) throw std::domain_error("scalar_prox: t must be finite");

  const double a = std::abs(t);
  if (a == 0.0) return {0.0, 0.0};

  Candidates cands(a);
  cands.add(0.0);
  cands.add(a);

  switch (reg.kind()) {
    case RegKind::L1:
      cands.add(a - scale);
      break;
    case RegKind::Lq: {
      double root = 0.0;
      if (lq_stationary_root(a, scale, reg.q(), root)) cands.add(root);
      break;
    }
    case RegKind::Log: {
      const double eps = reg.epsilon();
      const double disc = (a + eps) * (a + eps) - 4.0 * scale;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        cands.add(0.5 * (a - eps + sq));
        cands.add(0.5 * (a - eps - sq));
      }
      break;
    }
    case RegKind::CappedL1:
      cands.add(std::min(a - scale, reg.nu()));
      cands.add(reg.nu());
      break;
    case RegKind::MCP: {
      const double lam = reg.lambda();
      const double knot = lam * reg.alpha();
      const double curvature = 1.0 - scale / reg.alpha();
      if (curvature > 0.0) cands.add(std::min((a - scale * lam) / curvature, knot));
      cands.add(knot);
      break;
    }
    case RegKind::SCAD: {
      const double lam = reg.lambda();
      const double beta = reg.beta();
      cands.add(std::min(a - scale * lam, lam));
      cands.add(lam);
      const double curvature = 1.0 - scale / (beta - 1.0);
      if (curvature > 0.0) {
        const double u = (a - scale * beta * lam / (beta - 1.0)) / curvature;
        cands.add(std::clamp(u, lam, lam * beta));
      }
      cands.add(lam * beta);
      break;
    }
  }

  double lowest = std::numeric_limits<double>::infinity();
  for (double u : cands) lowest = std::min(lowest, scalar_prox_objective(reg, a, scale, u));

  double best_u = 0.0;
  for (double u : cands) {
    if (u > best_u && scalar_prox_objective(reg, a, scale, u) <= lowest + kTieTolerance) best_u = u;
  }
  const double best_val = scalar_prox_objective(reg, a, scale, best_u);
  return {t < 0.0 ? -best_u : best_u, best_val};
}

}  // namespace partialreg
