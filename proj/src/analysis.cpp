#include "partialreg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "partialreg/rng.hpp"

namespace partialreg {

namespace {

// Lexicographic unranking of k-combinations of {0, ..., n-1}.
std::vector<std::size_t> unrank_combination(std::uint64_t rank, std::size_t n, std::size_t k) {
  std::vector<std::size_t> comb(k);
  std::size_t next = 0;
  for (std::size_t pos = 0; pos < k; ++pos) {
    for (std::size_t v = next;; ++v) {
      const std::uint64_t with_v = binomial(n - v - 1, k - pos - 1);
      if (rank < with_v) {
        comb[pos] = v;
        next = v + 1;
        break;
      }
      rank -= with_v;
    }
  }
  return comb;
}

bool next_combination(std::vector<std::size_t>& comb, std::size_t n) {
  const std::size_t k = comb.size();
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (comb[i] < n - k + i) {
      ++comb[i];
      for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

struct ChunkBest {
  double delta = -1.0;
  std::uint64_t rank = 0;
  std::vector<std::size_t> support;
};

ChunkBest scan_chunk(const Eigen::MatrixXd& A, std::size_t k, std::uint64_t begin,
                     std::uint64_t end) {
  ChunkBest best;
  if (begin >= end) return best;
  const auto n = static_cast<std::size_t>(A.cols());
  std::vector<std::size_t> comb = unrank_combination(begin, n, k);
  Eigen::MatrixXd sub(A.rows(), static_cast<Eigen::Index>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  for (std::uint64_t rank = begin; rank < end; ++rank) {
    for (std::size_t j = 0; j < k; ++j) sub.col(static_cast<Eigen::Index>(j)) = A.col(static_cast<Eigen::Index>(comb[j]));
    eig.compute(sub.transpose() * sub, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    const double d = std::max(ev(ev.size() - 1) - 1.0, 1.0 - ev(0));
    if (d > best.delta) {
      best.delta = d;
      best.rank = rank;
      best.support = comb;
    }
    if (rank + 1 < end) next_combination(comb, n);
  }
  return best;
}

unsigned worker_count(unsigned requested, std::uint64_t work) {
  unsigned t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  if (work < 4096) t = 1;
  return static_cast<unsigned>(std::min<std::uint64_t>(t, std::max<std::uint64_t>(work, 1)));
}

double phi_abs(const Regularizer& phi, double v) { return phi.value(std::abs(v)); }

}  // namespace

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i stays integral at each step.
    const std::uint64_t num = n - k + i;
    const std::uint64_t g = std::gcd(result, i);
    const std::uint64_t r = result / g;
    const std::uint64_t d = i / g;
    const std::uint64_t num_red = num / d;
    if (r != 0 && num_red > kMax / r) return kMax;
    result = r * num_red;
  }
  return result;
}

std::size_t ric_order(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::domain_error("ric_order: k must be positive");
  return static_cast<std::size_t>(std::ceil(k));
}

RICResult ric_exact(const Eigen::MatrixXd& A, std::size_t k, const EnumerationOptions& opts) {
  const auto n = static_cast<std::size_t>(A.cols());
  if (k < 1 || k > n) throw std::domain_error("ric_exact: need 1 <= k <= n");
  const std::uint64_t total = binomial(n, k);
  if (total > opts.max_subsets) {
    throw EnumerationRefused("ric_exact: C(" + std::to_string(n) + "," + std::to_string(k) +
                             ") supports exceed the enumeration cap of " +
                             std::to_string(opts.max_subsets));
  }

  const unsigned workers = worker_count(opts.threads, total);
  std::vector<ChunkBest> partial(workers);
  if (workers == 1) {
    partial[0] = scan_chunk(A, k, 0, total);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t per = (total + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = std::min<std::uint64_t>(total, w * per);
      const std::uint64_t end = std::min<std::uint64_t>(total, begin + per);
      pool.emplace_back([&, w, begin, end] { partial[w] = scan_chunk(A, k, begin, end); });
    }
    for (auto& t : pool) t.join();
  }

  // Chunks are in rank order, so a strict comparison keeps the first maximizer.
  ChunkBest best;
  for (auto& c : partial) {
    if (c.delta > best.delta) best = std::move(c);
  }
  return {k, std::max(0.0, best.delta), std::move(best.support)};
}

double delta_lower_bound(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const DeltaOptions& opts) {
  const auto n = static_cast<std::size_t>(A.cols());
  if (b.size() != A.rows()) throw std::invalid_argument("delta_lower_bound: dimension mismatch");
  if (n > opts.max_columns || n >= 63) {
    throw EnumerationRefused("delta_lower_bound: n = " + std::to_string(n) +
                             " exceeds the column cap of " + std::to_string(opts.max_columns));
  }
  const auto m = static_cast<std::size_t>(A.rows());
  const double scale = std::max(1.0, A.norm() * b.norm());

  double best = std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> cols;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    cols.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (mask & (std::uint64_t{1} << j)) cols.push_back(static_cast<Eigen::Index>(j));
    }
    if (cols.size() > m) continue;
    const Eigen::MatrixXd AI = A(Eigen::all, cols);
    if ((AI.transpose() * b).lpNorm<Eigen::Infinity>() <= opts.zero_tol * scale) continue;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(AI);
    qr.setThreshold(opts.rank_tol);
    if (qr.rank() != static_cast<Eigen::Index>(cols.size())) continue;
    const Eigen::VectorXd coef = qr.solve(b);
    for (Eigen::Index i = 0; i < coef.size(); ++i) {
      const double mag = std::abs(coef(i));
      if (mag > opts.zero_tol) best = std::min(best, mag);
    }
  }
  return best;
}

Eigen::MatrixXd null_space_basis(const Eigen::MatrixXd& A, double rank_tol) {
  const Eigen::Index n = A.cols();
  if (A.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = rank_tol * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

SupportSplit split_support(const Eigen::VectorXd& x_star, std::size_t r, double zero_tol) {
  const auto n = static_cast<std::size_t>(x_star.size());
  SupportSplit s;
  std::vector<double> mags(n);
  for (std::size_t i = 0; i < n; ++i) {
    mags[i] = std::abs(x_star(static_cast<Eigen::Index>(i)));
    if (mags[i] <= zero_tol) {
      mags[i] = 0.0;
      s.zeros.push_back(i);
    }
  }
  s.support_size = n - s.zeros.size();
  if (s.support_size < r) throw std::domain_error("nsp: requires ||x*||_0 >= r");
  if (s.support_size == r) return s;  // |x*|_[r+1] = 0, so J is empty

  std::vector<double> sorted = mags;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(r), sorted.end(),
                   std::greater<>());
  const double pivot = sorted[r];
  const double tie = zero_tol * std::max(1.0, pivot);
  for (std::size_t i = 0; i < n; ++i) {
    if (mags[i] == 0.0) continue;
    if (std::abs(mags[i] - pivot) <= tie) {
      s.tied.push_back(i);
    } else if (mags[i] < pivot) {
      s.below.push_back(i);
    }
  }
  s.j_size = s.support_size - r - s.below.size();
  return s;
}

double lnsp_margin(const SupportSplit& split, const Regularizer& phi, const Eigen::VectorXd& h,
                   std::vector<std::size_t>* best_j) {
  double margin = 0.0;
  for (auto i : split.zeros) margin += phi_abs(phi, h(static_cast<Eigen::Index>(i)));
  for (auto i : split.below) margin -= phi_abs(phi, h(static_cast<Eigen::Index>(i)));

  // The maximizing J takes the j_size largest φ(|h_i|) among the tied indices.
  std::vector<std::size_t> order = split.tied;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return phi_abs(phi, h(static_cast<Eigen::Index>(a))) > phi_abs(phi, h(static_cast<Eigen::Index>(b)));
  });
  order.resize(std::min(order.size(), split.j_size));
  for (auto i : order) margin -= phi_abs(phi, h(static_cast<Eigen::Index>(i)));
  if (best_j) {
    std::sort(order.begin(), order.end());
    *best_j = std::move(order);
  }
  return margin;
}

double gnsp_margin(const SupportSplit& split, std::size_t r, const Regularizer& phi,
                   const Eigen::VectorXd& h, std::vector<std::size_t>* best_j0,
                   std::vector<std::size_t>* best_j1) {
  const auto n = static_cast<std::size_t>(h.size());
  if (r > n) throw std::domain_error("gnsp: r exceeds n");
  const std::size_t total = n - r;

  std::vector<std::size_t> support;
  support.reserve(split.support_size);
  {
    std::vector<bool> zero(n, false);
    for (auto i : split.zeros) zero[i] = true;
    for (std::size_t i = 0; i < n; ++i)
      if (!zero[i]) support.push_back(i);
  }
  auto val = [&](std::size_t i) { return phi_abs(phi, h(static_cast<Eigen::Index>(i))); };

  // J_0 should collect the smallest values on I_0, J_1 the largest on the support.
  std::vector<std::size_t> z = split.zeros;
  std::stable_sort(z.begin(), z.end(), [&](auto a, auto b) { return val(a) < val(b); });
  std::stable_sort(support.begin(), support.end(), [&](auto a, auto b) { return val(a) > val(b); });

  std::vector<double> zsum(z.size() + 1, 0.0), ssum(support.size() + 1, 0.0);
  for (std::size_t i = 0; i < z.size(); ++i) zsum[i + 1] = zsum[i] + val(z[i]);
  for (std::size_t i = 0; i < support.size(); ++i) ssum[i + 1] = ssum[i] + val(support[i]);

  const std::size_t lo = total > support.size() ? total - support.size() : 0;
  const std::size_t hi = std::min(z.size(), total);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_j0_size = lo;
  for (std::size_t j0 = lo; j0 <= hi; ++j0) {
    const double m = zsum[j0] - ssum[total - j0];
    if (m < best) {
      best = m;
      best_j0_size = j0;
    }
  }
  if (best_j0) {
    best_j0->assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(best_j0_size));
    std::sort(best_j0->begin(), best_j0->end());
  }
  if (best_j1) {
    best_j1->assign(support.begin(),
                    support.begin() + static_cast<std::ptrdiff_t>(total - best_j0_size));
    std::sort(best_j1->begin(), best_j1->end());
  }
  return best;
}

namespace {

template <typename MarginFn>
NSPVerdict falsify(const Eigen::MatrixXd& A, const Eigen::VectorXd& x_star, std::size_t n_samples,
                   std::uint64_t seed, double radius, MarginFn margin_of) {
  if (x_star.size() != A.cols()) throw std::invalid_argument("nsp: dimension mismatch");
  NSPVerdict v;
  const Eigen::MatrixXd N = null_space_basis(A);
  if (N.cols() == 0) {
    v.note = "trivial null space; property holds vacuously";
    return v;
  }
  Rng rng(seed);
  Eigen::VectorXd c(N.cols());
  double sum = 0.0;
  v.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (Eigen::Index j = 0; j < c.size(); ++j) c(j) = rng.normal();
    Eigen::VectorXd h = N * c;
    const double norm = h.norm();
    if (norm == 0.0) continue;
    const double rho = radius > 0.0 ? radius * rng.uniform_open() : 1.0;
    h *= rho / norm;

    std::vector<std::size_t> j0, j1;
    const double m = margin_of(h, j0, j1);
    ++v.samples_tested;
    sum += m;
    v.min_margin = std::min(v.min_margin, m);
    if (m <= 0.0) {
      v.status = NSPStatus::Falsified;
      v.witness = std::move(h);
      v.witness_j = std::move(j0);
      v.witness_j1 = std::move(j1);
      v.witness_margin = m;
      break;
    }
  }
  if (v.samples_tested > 0) v.mean_margin = sum / static_cast<double>(v.samples_tested);
  v.note = v.falsified() ? "violating null-space direction found"
                         : "no violation among samples; not a certificate";
  return v;
}

}  // namespace

NSPVerdict lnsp_falsify(const Eigen::MatrixXd& A, const Eigen::VectorXd& x_star, std::size_t r,
                        const Regularizer& phi, double eps_ball, std::size_t n_samples,
                        std::uint64_t seed) {
  if (!(eps_ball > 0.0)) throw std::domain_error("lnsp_falsify: eps_ball must be positive");
  const SupportSplit split = split_support(x_star, r);
  return falsify(A, x_star, n_samples, seed, eps_ball,
                 [&](const Eigen::VectorXd& h, std::vector<std::size_t>& j, std::vector<std::size_t>&) {
                   return lnsp_margin(split, phi, h, &j);
                 });
}

NSPVerdict gnsp_falsify(const Eigen::MatrixXd& A, const Eigen::VectorXd& x_star, std::size_t r,
                        const Regularizer& phi, std::size_t n_samples, std::uint64_t seed) {
  const SupportSplit split = split_support(x_star, r);
  return falsify(A, x_star, n_samples, seed, 0.0,
                 [&](const Eigen::VectorXd& h, std::vector<std::size_t>& j0,
                     std::vector<std::size_t>& j1) { return gnsp_margin(split, r, phi, h, &j0, &j1); });
}

std::size_t rip_order(RecoveryKind kind, std::size_t K, std::size_t r, std::optional<double> gamma) {
  if (r > K) throw std::domain_error("rip_order: need r <= K");
  const std::size_t base = kind == RecoveryKind::Local ? K - r / 2 : K + r / 2;
  if (!gamma) return base;
  if (!(*gamma > 1.0) || !std::isfinite(*gamma)) throw std::domain_error("rip_order: gamma must exceed 1");
  return static_cast<std::size_t>(std::ceil(*gamma * static_cast<double>(base)));
}

double rip_threshold(double q, std::optional<double> gamma) {
  if (!(q > 0.0 && q <= 1.0)) throw std::domain_error("rip_threshold: q must lie in (0, 1]");
  if (!gamma) return 1.0 / 3.0;
  if (!(*gamma > 1.0) || !std::isfinite(*gamma)) throw std::domain_error("rip_threshold: gamma must exceed 1");
  return 1.0 / std::sqrt(std::pow(*gamma - 1.0, 1.0 - 2.0 / q) + 1.0);
}

bool rip_condition(double delta_value, RecoveryKind kind, std::size_t K, std::size_t r, double q,
                   std::optional<double> gamma) {
  if (r > K) throw std::domain_error("rip_condition: need r <= K");
  if (!(delta_value >= 0.0)) throw std::domain_error("rip_condition: delta must be nonnegative");
  (void)kind;  // the order differs by kind, the threshold does not
  return delta_value < rip_threshold(q, gamma);
}

double tail_l1(const Eigen::VectorXd& x, std::size_t k) {
  std::vector<double> mags(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(x(i));
  if (k >= mags.size()) return 0.0;
  std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(k), mags.end(),
                   std::greater<>());
  return std::accumulate(mags.begin() + static_cast<std::ptrdiff_t>(k), mags.end(), 0.0);
}

std::size_t stable_bound_order(std::size_t k, std::size_t r, std::optional<double> gamma) {
  const std::size_t base = k + (r + 1) / 2;
  if (!gamma) return base;
  if (!(*gamma > 1.0) || !std::isfinite(*gamma)) throw std::domain_error("stable_bound_order: gamma must exceed 1");
  return static_cast<std::size_t>(std::ceil(*gamma * static_cast<double>(base)));
}

double stable_error_bound(double delta, double sigma, std::size_t k, std::size_t r,
                          const Eigen::VectorXd& x_tilde, std::optional<double> gamma) {
  if (!(delta >= 0.0)) throw std::domain_error("stable_error_bound: delta must be nonnegative");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::domain_error("stable_error_bound: sigma must be nonnegative");
  if (k < 1) throw std::domain_error("stable_error_bound: k must be positive");
  const double tail = tail_l1(x_tilde, k);
  const double root_order = std::sqrt(static_cast<double>(k + (r + 1) / 2));
  const double noise = 2.0 * std::sqrt(2.0 * (1.0 + delta)) * sigma;

  if (!gamma) {
    if (!(delta < 1.0 / 3.0)) throw std::domain_error("stable_error_bound: requires delta < 1/3");
    const double d = 1.0 - 3.0 * delta;
    return noise / d + 2.0 * std::sqrt(2.0) * (2.0 * delta + std::sqrt(d * delta)) / d * tail / root_order;
  }

  const double g = *gamma;
  if (!(g > 1.0) || !std::isfinite(g)) throw std::domain_error("stable_error_bound: gamma must exceed 1");
  const double limit = std::sqrt((g - 1.0) / g);
  if (!(delta < limit)) throw std::domain_error("stable_error_bound: requires delta < sqrt((gamma-1)/gamma)");
  const double gap = limit - delta;
  const double first = noise / (1.0 - std::sqrt(g / (g - 1.0)) * delta);
  const double factor = (std::sqrt(2.0) * delta + std::sqrt(g * gap * delta)) / (g * gap) + 1.0;
  return first + factor * 2.0 * tail / root_order;
}

}  // namespace partialreg
