#pragma once

#include <functional>
#include <optional>
#include <utility>

#include <Eigen/Dense>

namespace partialreg {

/// Ax ≈ b with noise level σ; σ = 0 means the equality-constrained model.
struct LinearSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  double sigma = 0.0;

  Eigen::Index rows() const { return A.rows(); }
  Eigen::Index cols() const { return A.cols(); }

  /// Throws std::invalid_argument on inconsistent shapes or σ < 0.
  void check() const;
};

/// Samples a^i stored as the rows of `samples`; outcomes b_i ∈ {−1, +1}.
struct LogRegData {
  Eigen::MatrixXd samples;
  Eigen::VectorXd outcomes;

  Eigen::Index size() const { return samples.rows(); }
  Eigen::Index features() const { return samples.cols(); }

  void check() const;
};

/// Smooth part f of a composite objective: returns f(x) and writes ∇f(x).
struct SmoothOracle {
  std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)> eval;
  std::optional<double> lipschitz;

  double operator()(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const { return eval(x, grad); }
};

struct ValueGrad {
  double value = 0.0;
  Eigen::VectorXd grad;
};

/// Average logistic loss (1/m) Σ log(1 + exp(−b_i wᵀa^i)) and its gradient.
ValueGrad logistic_value_grad(const LogRegData& data, const Eigen::VectorXd& w);

/// ‖Σ b_i a^i‖_∞ / (2m): the smallest ℓ1 weight at which w = 0 is optimal.
double lambda_max(const LogRegData& data);

/// Oracle for the average logistic loss with Lipschitz hint ‖A‖_F²/(4m).
/// Holds a reference to `data`, which must outlive it.
SmoothOracle logistic_oracle(const LogRegData& data);

/// Oracle for ½‖x − a‖².
SmoothOracle distance_oracle(const Eigen::VectorXd& a);

/// Oracle for ½xᵀQx − cᵀx with symmetric Q.
SmoothOracle quadratic_oracle(const Eigen::MatrixXd& Q, const Eigen::VectorXd& c);

/// Oracle for ½‖Ax − b‖². Holds a reference to `sys`.
SmoothOracle least_squares_oracle(const LinearSystem& sys);

struct ResidualNorms {
  double two_norm = 0.0;
  double inf_norm = 0.0;
};

ResidualNorms residual_norms(const LinearSystem& sys, const Eigen::VectorXd& x);

/// log(1 + e^z) without overflow.
double log1p_exp(double z);

/// 1 / (1 + e^{−z}) without overflow.
double sigmoid(double z);

}  // namespace partialreg
