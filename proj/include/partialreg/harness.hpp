#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "partialreg/fal.hpp"
#include "partialreg/npg.hpp"
#include "partialreg/objectives.hpp"
#include "partialreg/regularizer.hpp"

namespace partialreg {

/// Entries with magnitude at or below this count as zero in ‖x‖_0.
inline constexpr double kCardinalityThreshold = 1e-6;
/// Recovery succeeds when ‖x − x̂‖ is strictly below this.
inline constexpr double kSuccessTolerance = 1e-3;

struct CSInstanceSpec {
  std::size_t m = 32;
  std::size_t n = 128;
  std::size_t K = 4;
  double noise_std = 0.0;
  std::uint64_t seed = 0;

  /// Throws std::domain_error unless 1 ≤ K ≤ n, 1 ≤ m ≤ n and noise_std ≥ 0.
  void check() const;
};

struct CSInstance {
  LinearSystem sys;
  Eigen::VectorXd x_true;
  std::vector<std::size_t> support;  // ascending
};

/// Random K-sparse x* with Gaussian nonzeros, Gaussian A with orthonormal
/// rows, b = Ax* (+ ξ, σ = ‖ξ‖). Identical specs give identical instances.
CSInstance gen_cs_instance(const CSInstanceSpec& spec);

/// m/2 positive then m/2 negative samples. Feature j of a positive sample is
/// N(μ⁺_j, 1) with μ⁺_j ~ U[0, 1]; negatives use μ⁻_j ~ U[−1, 0].
LogRegData gen_logreg_instance(std::size_t m, std::size_t n, std::uint64_t seed);

/// Rescales every column to mean zero and unit (population) variance.
/// Constant columns become zero.
void standardize_columns(Eigen::MatrixXd& M);

bool success(const Eigen::VectorXd& x_true, const Eigen::VectorXd& x_hat);
double rel_err(const Eigen::VectorXd& x_true, const Eigen::VectorXd& x_hat);
std::size_t cardinality(const Eigen::VectorXd& x, double threshold = kCardinalityThreshold);

/// r = ⌈tenths·K/10⌉, computed in integers.
std::size_t r_from_tenths(std::size_t tenths, std::size_t K);

/// A model in a sweep: penalty φ and r given in tenths of K (0 = full model).
struct SweepModel {
  Regularizer phi = Regularizer::l1();
  std::size_t r_tenths = 0;

  /// e.g. "l1/r=0.3K".
  std::string id() const;
};

/// The full model plus r = ⌈0.1K⌉, …, ⌈0.9K⌉, K, all with φ.
std::vector<SweepModel> default_cs_models(const Regularizer& phi = Regularizer::l1());

/// One row per (instance, model). NaN marks fields that do not apply.
struct ExperimentRecord {
  std::string experiment;  // "cs" or "logreg"
  std::size_t instance = 0;
  std::size_t K = 0;
  std::string model;
  std::size_t r = 0;
  double lambda = 0.0;
  bool success = false;
  double rel_err = 0.0;
  double l_avg = 0.0;
  std::size_t cardinality = 0;
  double objective = 0.0;
  double infeasibility = 0.0;
  std::size_t iterations = 0;
  double wall_seconds = 0.0;
  double cpu_seconds = 0.0;
  std::string status;
  bool flagged = false;
  std::string note;
  Eigen::VectorXd x_hat;   // not serialized
  Eigen::VectorXd x_true;  // not serialized; empty for logistic runs

  static std::string csv_header();
  void write_csv_row(std::ostream& out) const;
};

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);

struct CSSweepConfig {
  std::size_t m = 32;
  std::size_t n = 128;
  std::vector<std::size_t> K_values = {4, 8, 12, 16, 20, 24, 28};
  std::size_t instances = 20;
  double noise_std = 0.0;
  std::uint64_t seed = 1;
  std::vector<SweepModel> models = default_cs_models();
  FALConfig fal;
  NPGConfig npg;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Instance seed for (K, index): a fixed function of the sweep seed so that
/// changing the grid leaves other cells unchanged.
std::uint64_t cs_instance_seed(std::uint64_t seed, std::size_t K, std::size_t index);

/// Solves every model on every instance. Rows are ordered by (K, instance,
/// model) whatever the thread count. Solver exceptions become flagged rows.
std::vector<ExperimentRecord> run_cs_sweep(const CSSweepConfig& cfg);

struct CSSummary {
  std::string model;
  std::size_t K = 0;
  std::size_t runs = 0;
  double success_frequency = 0.0;
  double mean_rel_err = 0.0;
  double cpu_seconds = 0.0;  // accumulated
};

/// Aggregates per (model, K), ordered by K then by first appearance of model.
std::vector<CSSummary> summarize_cs(const std::vector<ExperimentRecord>& records);
void write_summary_csv(std::ostream& out, const std::vector<CSSummary>& rows);

struct LogRegSweepConfig {
  std::vector<double> lambda_fractions = {0.5, 0.25, 0.1, 0.01};
  std::vector<std::size_t> r_tenths = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  Regularizer phi = Regularizer::l1();
  NPGConfig npg;
  std::size_t bisect_iters = 40;
  double bracket_lo = 1e-6;  // times λ_max
  double bracket_hi = 10.0;  // times λ_max
};

/// For each λ = fraction·λ_max: solves the full model, takes its cardinality
/// K, then for each r searches λ̂ by bisection for the smallest weight whose
/// partial solution has cardinality ≤ K. With K = 0 only the full row is
/// written.
std::vector<ExperimentRecord> run_logreg_sweep(const LogRegData& data, const LogRegSweepConfig& cfg,
                                               std::size_t instance = 0);

/// Runs fn(0), …, fn(count−1) on a pool of `threads` workers (0 = hardware
/// concurrency). fn must only write to per-index state.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace partialreg
