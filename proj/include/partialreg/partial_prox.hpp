#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "partialreg/regularizer.hpp"

namespace partialreg {

/// Φ(x) = λ · Σ_{i=r+1}^n φ(|x|_[i]): the penalty skips the r largest
/// magnitudes of x.
struct PartialRegularizer {
  Regularizer phi = Regularizer::l1();
  std::size_t r = 0;
  double lambda = 1.0;

  /// Throws std::domain_error unless r < n and λ ≥ 0.
  void check(std::size_t n) const;
};

/// λ times the sum of φ over the n−r smallest magnitudes of x.
double phi_partial_value(const PartialRegularizer& preg, const Eigen::VectorXd& x);

struct ProxSelection {
  std::vector<std::size_t> kept_indices;    // the r largest |a_i|, ascending index order
  std::vector<std::size_t> shrunk_indices;  // I*, ascending index order
  Eigen::VectorXd solution;
};

/// Indices of the n−r smallest |a_i|. Among equal magnitudes the smaller
/// index is shrunk first. Returned in ascending index order.
std::vector<std::size_t> smallest_magnitude_indices(const Eigen::VectorXd& a, std::size_t count);

/// Solves min_x ½‖x−a‖² + step·Σ_{i=r+1}^n φ(|x|_[i]).
///
/// The r largest |a_i| are copied through and every other entry receives the
/// scalar prox of φ with the same step. `preg.lambda` is not used here; the
/// caller folds it into `step` (λ/L inside the proximal gradient loop). A
/// zero step returns a unchanged.
ProxSelection partial_prox(const PartialRegularizer& preg, const Eigen::VectorXd& a, double step);

/// Same solution as partial_prox without the index bookkeeping; `out` is resized.
void partial_prox_into(const PartialRegularizer& preg, const Eigen::VectorXd& a, double step,
                       Eigen::VectorXd& out);

}  // namespace partialreg
