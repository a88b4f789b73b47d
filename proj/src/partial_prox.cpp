#include "partialreg/partial_prox.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace partialreg {

namespace {

// Orders by magnitude, then index, so the selection is deterministic.
struct SmallerMagnitude {
  const Eigen::VectorXd& a;
  bool operator()(std::size_t i, std::size_t j) const {
    const double ai = std::abs(a[static_cast<Eigen::Index>(i)]);
    const double aj = std::abs(a[static_cast<Eigen::Index>(j)]);
    return ai < aj || (ai == aj && i < j);
  }
};

// Partitions `order` so its first `count` entries are the smallest
// magnitudes; O(n) expected.
void select_smallest(const Eigen::VectorXd& a, std::size_t count, std::vector<std::size_t>& order) {
  order.resize(static_cast<std::size_t>(a.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (count > 0 && count < order.size()) {
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count - 1),
                     order.end(), SmallerMagnitude{a});
  }
}

}  // namespace

void PartialRegularizer::check(std::size_t n) const {
  if (n == 0) throw std::domain_error("partial regularizer: empty vector");
  if (r >= n) throw std::domain_error("partial regularizer: r must be smaller than the dimension");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::domain_error("partial regularizer: lambda must be nonnegative");
}

double phi_partial_value(const PartialRegularizer& preg, const Eigen::VectorXd& x) {
  const auto n = static_cast<std::size_t>(x.size());
  preg.check(n);
  std::vector<double> mags(n);
  for (std::size_t i = 0; i < n; ++i) mags[i] = std::abs(x[static_cast<Eigen::Index>(i)]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double sum = 0.0;
  for (std::size_t i = preg.r; i < n; ++i) sum += preg.phi.value(mags[i]);
  return preg.lambda * sum;
}

std::vector<std::size_t> smallest_magnitude_indices(const Eigen::VectorXd& a, std::size_t count) {
  if (count > static_cast<std::size_t>(a.size()))
    throw std::domain_error("smallest_magnitude_indices: count exceeds dimension");
  std::vector<std::size_t> order;
  select_smallest(a, count, order);
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

void partial_prox_into(const PartialRegularizer& preg, const Eigen::VectorXd& a, double step,
                       Eigen::VectorXd& out) {
  const auto n = static_cast<std::size_t>(a.size());
  preg.check(n);
  if (!(step >= 0.0) || !std::isfinite(step))
    throw std::domain_error("partial_prox: step must be nonnegative");
  out = a;
  if (step == 0.0) return;

  std::vector<std::size_t> order;
  select_smallest(a, n - preg.r, order);
  for (std::size_t j = 0; j < n - preg.r; ++j) {
    const auto i = static_cast<Eigen::Index>(order[j]);
    out[i] = scalar_prox(preg.phi, a[i], step).minimizer;
  }
}

ProxSelection partial_prox(const PartialRegularizer& preg, const Eigen::VectorXd& a, double step) {
  ProxSelection sel;
  partial_prox_into(preg, a, step, sel.solution);

  const auto n = static_cast<std::size_t>(a.size());
  sel.shrunk_indices = smallest_magnitude_indices(a, n - preg.r);
  std::vector<bool> shrunk(n, false);
  for (auto i : sel.shrunk_indices) shrunk[i] = true;
  for (std::size_t i = 0; i < n; ++i)
    if (!shrunk[i]) sel.kept_indices.push_back(i);
  return sel;
}

}  // namespace partialreg
