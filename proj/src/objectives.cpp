#include "partialreg/objectives.hpp"

#include <cmath>
#include <stdexcept>

namespace partialreg {

namespace {

void require_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) throw std::invalid_argument(what);
}

}  // namespace

void LinearSystem::check() const {
  if (A.rows() == 0 || A.cols() == 0) throw std::invalid_argument("linear system: empty matrix");
  require_dim(b.size(), A.rows(), "linear system: rhs length differs from matrix rows");
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("linear system: sigma must be nonnegative");
}

void LogRegData::check() const {
  if (samples.rows() < 1) throw std::invalid_argument("logistic data: no samples");
  require_dim(outcomes.size(), samples.rows(), "logistic data: outcome count differs from samples");
  for (Eigen::Index i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i] != 1.0 && outcomes[i] != -1.0)
      throw std::invalid_argument("logistic data: outcomes must be -1 or +1");
  }
}

double log1p_exp(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

ValueGrad logistic_value_grad(const LogRegData& data, const Eigen::VectorXd& w) {
  data.check();
  require_dim(w.size(), data.features(), "logistic: weight length differs from feature count");
  const auto m = static_cast<double>(data.size());
  // z_i = −b_i wᵀa^i
  const Eigen::VectorXd z = -(data.outcomes.array() * (data.samples * w).array()).matrix();
  ValueGrad out;
  Eigen::VectorXd coef(z.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    total += log1p_exp(z[i]);
    coef[i] = -data.outcomes[i] * sigmoid(z[i]);
  }
  out.value = total / m;
  out.grad = data.samples.transpose() * coef / m;
  return out;
}

double lambda_max(const LogRegData& data) {
  data.check();
  const Eigen::VectorXd s = data.samples.transpose() * data.outcomes;
  return s.lpNorm<Eigen::Infinity>() / (2.0 * static_cast<double>(data.size()));
}

SmoothOracle logistic_oracle(const LogRegData& data) {
  data.check();
  SmoothOracle oracle;
  oracle.eval = [&data](const Eigen::VectorXd& w, Eigen::VectorXd& grad) {
    auto vg = logistic_value_grad(data, w);
    grad = std::move(vg.grad);
    return vg.value;
  };
  oracle.lipschitz = data.samples.squaredNorm() / (4.0 * static_cast<double>(data.size()));
  return oracle;
}

SmoothOracle distance_oracle(const Eigen::VectorXd& a) {
  SmoothOracle oracle;
  oracle.eval = [a](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    require_dim(x.size(), a.size(), "distance oracle: dimension mismatch");
    grad = x - a;
    return 0.5 * grad.squaredNorm();
  };
  oracle.lipschitz = 1.0;
  return oracle;
}

SmoothOracle quadratic_oracle(const Eigen::MatrixXd& Q, const Eigen::VectorXd& c) {
  if (Q.rows() != Q.cols() || Q.rows() != c.size())
    throw std::invalid_argument("quadratic oracle: shape mismatch");
  SmoothOracle oracle;
  oracle.eval = [Q, c](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    require_dim(x.size(), c.size(), "quadratic oracle: dimension mismatch");
    const Eigen::VectorXd Qx = Q * x;
    grad = Qx - c;
    return 0.5 * x.dot(Qx) - c.dot(x);
  };
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q, Eigen::EigenvaluesOnly);
  oracle.lipschitz = eig.eigenvalues().cwiseAbs().maxCoeff();
  return oracle;
}

SmoothOracle least_squares_oracle(const LinearSystem& sys) {
  sys.check();
  SmoothOracle oracle;
  oracle.eval = [&sys](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    require_dim(x.size(), sys.cols(), "least squares oracle: dimension mismatch");
    const Eigen::VectorXd res = sys.A * x - sys.b;
    grad = sys.A.transpose() * res;
    return 0.5 * res.squaredNorm();
  };
  return oracle;
}

ResidualNorms residual_norms(const LinearSystem& sys, const Eigen::VectorXd& x) {
  sys.check();
  require_dim(x.size(), sys.cols(), "residual: dimension mismatch");
  const Eigen::VectorXd res = sys.A * x - sys.b;
  return {res.norm(), res.lpNorm<Eigen::Infinity>()};
}

}  // namespace partialreg
