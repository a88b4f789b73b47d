#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "partialreg/regularizer.hpp"

// Exact, enumeration-based checks of recovery conditions for small matrices.
// Everything here refuses rather than approximates once the enumeration would
// exceed its configured cap.

namespace partialreg {

/// Thrown when an exhaustive enumeration would exceed its cap.
class EnumerationRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnumerationOptions {
  std::uint64_t max_subsets = 2'000'000;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct RICResult {
  std::size_t order = 0;
  double delta = 0.0;
  std::vector<std::size_t> witness_support;
};

/// Binomial coefficient, saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Order used for a possibly fractional k: ⌈k⌉.
std::size_t ric_order(double k);

/// Restricted isometry constant of order k: the largest deviation of an
/// eigenvalue of A_Sᵀ A_S from 1 over all supports |S| = k. The result does
/// not depend on the thread count; ties keep the lexicographically first
/// support.
RICResult ric_exact(const Eigen::MatrixXd& A, std::size_t k, const EnumerationOptions& opts = {});

struct DeltaOptions {
  std::size_t max_columns = 14;
  double rank_tol = 1e-10;
  double zero_tol = 1e-12;
};

/// Smallest nonzero least-squares coefficient magnitude over all column
/// subsets I with A_I of full column rank and A_Iᵀb ≠ 0. Returns +∞ when
/// no subset qualifies.
double delta_lower_bound(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                         const DeltaOptions& opts = {});

/// Orthonormal basis of N(A) as columns (n × (n − rank)).
Eigen::MatrixXd null_space_basis(const Eigen::MatrixXd& A, double rank_tol = 1e-10);

enum class NSPStatus { Falsified, NotFalsified };

/// Outcome of a sampling search for a null-space vector violating a null
/// space property. NotFalsified is evidence only, never a certificate.
struct NSPVerdict {
  NSPStatus status = NSPStatus::NotFalsified;
  Eigen::VectorXd witness;              // violating h, when falsified
  std::vector<std::size_t> witness_j;   // maximizing J (local) or J_0 (global)
  std::vector<std::size_t> witness_j1;  // J_1 (global only)
  double witness_margin = 0.0;
  std::size_t samples_tested = 0;
  double min_margin = 0.0;
  double mean_margin = 0.0;
  std::string note;

  bool falsified() const { return status == NSPStatus::Falsified; }
};

/// Index sets of a candidate solution x* relative to position r+1 of its
/// sorted magnitudes. Entries with |x_i| ≤ zero_tol count as zero.
struct SupportSplit {
  std::vector<std::size_t> zeros;       // I_0(x*)
  std::vector<std::size_t> below;       // I^{<+}_{r+1}(x*): 0 < |x_i| < |x*|_[r+1]
  std::vector<std::size_t> tied;        // I^=_{r+1}(x*), nonzero entries only
  std::size_t j_size = 0;               // |J| = ‖x*‖_0 − r − |below|
  std::size_t support_size = 0;         // ‖x*‖_0
};

SupportSplit split_support(const Eigen::VectorXd& x_star, std::size_t r, double zero_tol = 1e-12);

/// Local margin Σ_{I_0} φ(|h_i|) − max_{J} Σ_{J ∪ I^{<+}} φ(|h_i|); writes the
/// maximizing J when `best_j` is non-null.
double lnsp_margin(const SupportSplit& split, const Regularizer& phi, const Eigen::VectorXd& h,
                   std::vector<std::size_t>* best_j = nullptr);

/// Global margin: min over (J_0 ⊆ I_0, J_1 ⊆ I_0ᶜ, |J_0|+|J_1| = n−r) of
/// Σ_{J_0} φ(|h_i|) − Σ_{J_1} φ(|h_i|); writes the minimizing pair.
double gnsp_margin(const SupportSplit& split, std::size_t r, const Regularizer& phi,
                   const Eigen::VectorXd& h, std::vector<std::size_t>* best_j0 = nullptr,
                   std::vector<std::size_t>* best_j1 = nullptr);

/// Samples h = N·c/‖N·c‖·ρ with c standard normal, ρ uniform in (0, eps_ball),
/// and reports the first h with a non-positive local margin.
NSPVerdict lnsp_falsify(const Eigen::MatrixXd& A, const Eigen::VectorXd& x_star, std::size_t r,
                        const Regularizer& phi, double eps_ball, std::size_t n_samples,
                        std::uint64_t seed);

NSPVerdict gnsp_falsify(const Eigen::MatrixXd& A, const Eigen::VectorXd& x_star, std::size_t r,
                        const Regularizer& phi, std::size_t n_samples, std::uint64_t seed);

enum class RecoveryKind { Local, Global };

/// RIC order the sufficient condition is stated at: K ∓ ⌊r/2⌋ (local uses −,
/// global +), multiplied by γ when given and rounded up.
std::size_t rip_order(RecoveryKind kind, std::size_t K, std::size_t r,
                      std::optional<double> gamma = std::nullopt);

/// 1/3 without γ, otherwise 1/√((γ−1)^{1−2/q} + 1).
double rip_threshold(double q, std::optional<double> gamma = std::nullopt);

/// Whether `delta_value` (the RIC at rip_order(kind, K, r, gamma)) meets the
/// sufficient recovery condition for φ(t) = |t|^q.
bool rip_condition(double delta_value, RecoveryKind kind, std::size_t K, std::size_t r, double q,
                   std::optional<double> gamma = std::nullopt);

/// ‖x_{−max(k)}‖_1: ℓ1 norm of x after zeroing its k largest magnitudes.
double tail_l1(const Eigen::VectorXd& x, std::size_t k);

/// RIC order for the stable-recovery bound: ⌈γ(k + ⌈r/2⌉)⌉, γ = 1 by default.
std::size_t stable_bound_order(std::size_t k, std::size_t r, std::optional<double> gamma = std::nullopt);

/// Error bound between a point x̃ with ‖Ax̃ − b‖ ≤ σ and a global minimizer
/// of the partial ℓ1 model. Without γ the bound requires δ < 1/3; with γ it
/// requires δ < √((γ−1)/γ). δ is the RIC at stable_bound_order(k, r, γ).
double stable_error_bound(double delta, double sigma, std::size_t k, std::size_t r,
                          const Eigen::VectorXd& x_tilde, std::optional<double> gamma = std::nullopt);

}  // namespace partialreg
