#pragma once

#include <map>
#include <string>
#include <string_view>

namespace partialreg {

enum class RegKind { L1, Lq, Log, CappedL1, MCP, SCAD };

std::string_view to_string(RegKind kind);
RegKind reg_kind_from_string(std::string_view name);

/// Scalar penalty φ on [0, ∞) with its shape parameters.
///
/// Only the parameters relevant to `kind` are read. Construct through the
/// named factories so the parameter domain is validated once; every
/// instance is immutable afterwards.
class Regularizer {
 public:
  static Regularizer l1();
  static Regularizer lq(double q = 0.5);
  static Regularizer log(double epsilon = 1e-3);
  static Regularizer capped_l1(double nu = 1e-2);
  static Regularizer mcp(double lambda = 1.0, double alpha = 2.7);
  static Regularizer scad(double lambda = 1.0, double beta = 3.7);

  /// Kind with default parameters.
  static Regularizer with_defaults(RegKind kind);

  /// Builds from a kind name and `key=value` parameters. Recognized keys are
  /// q, epsilon, nu, reg_lambda, alpha and beta; missing keys take defaults.
  static Regularizer from_params(std::string_view kind,
                                 const std::map<std::string, std::string>& params);

  RegKind kind() const { return kind_; }
  double q() const { return q_; }
  double epsilon() const { return epsilon_; }
  double nu() const { return nu_; }
  double lambda() const { return lambda_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  /// φ(t) for t ≥ 0. Throws std::domain_error on negative or non-finite t.
  double value(double t) const;

  /// e.g. "lq(q=0.5)".
  std::string describe() const;

 private:
  explicit Regularizer(RegKind kind) : kind_(kind) {}

  RegKind kind_;
  double q_ = 0.5;
  double epsilon_ = 1e-3;
  double nu_ = 1e-2;
  double lambda_ = 1.0;
  double alpha_ = 2.7;
  double beta_ = 3.7;
};

inline double phi_value(const Regularizer& reg, double t) { return reg.value(t); }

struct ScalarProxResult {
  double minimizer = 0.0;  // u*
  double value = 0.0;      // ν(t) = ½(u*−t)² + λ̃·φ(|u*|)
};

/// Objective ½(u−t)² + scale·φ(|u|) of the scalar proximal problem.
double scalar_prox_objective(const Regularizer& reg, double t, double scale, double u);

/// Global minimizer of ½(u−t)² + scale·φ(|u|).
///
/// Every stationary point and breakpoint of each smooth branch of φ is
/// enumerated together with u = 0 and u = t, and the best candidate wins.
/// Candidates within 1e-12 in objective are tied; ties go to the larger
/// |u|. The result always has the sign of t and |u*| ≤ |t|.
ScalarProxResult scalar_prox(const Regularizer& reg, double t, double scale);

}  // namespace partialreg
