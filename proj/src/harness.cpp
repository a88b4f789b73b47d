#include "partialreg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "partialreg/io.hpp"
#include "partialreg/partial_prox.hpp"
#include "partialreg/rng.hpp"

namespace partialreg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) { return format_double(v); }

double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

}  // namespace

void CSInstanceSpec::check() const {
  if (K < 1 || K > n) throw std::domain_error("cs instance: need 1 <= K <= n");
  if (m < 1 || m > n) throw std::domain_error("cs instance: need 1 <= m <= n");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
    throw std::domain_error("cs instance: noise_std must be nonnegative");
}

CSInstance gen_cs_instance(const CSInstanceSpec& spec) {
  spec.check();
  const auto m = static_cast<Eigen::Index>(spec.m);
  const auto n = static_cast<Eigen::Index>(spec.n);
  Rng rng(spec.seed);

  // Partial Fisher–Yates: the first K slots form a uniform K-subset.
  std::vector<std::size_t> perm(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) perm[i] = i;
  for (std::size_t i = 0; i < spec.K; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(spec.n - i));
    std::swap(perm[i], perm[j]);
  }
  CSInstance inst;
  inst.support.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(spec.K));
  std::sort(inst.support.begin(), inst.support.end());

  inst.x_true = Eigen::VectorXd::Zero(n);
  for (auto i : inst.support) inst.x_true(static_cast<Eigen::Index>(i)) = rng.normal();

  Eigen::MatrixXd G(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) G(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G.transpose());
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
  inst.sys.A = Q.transpose();

  inst.sys.b = inst.sys.A * inst.x_true;
  if (spec.noise_std > 0.0) {
    Eigen::VectorXd xi(m);
    for (Eigen::Index i = 0; i < m; ++i) xi(i) = spec.noise_std * rng.normal();
    inst.sys.b += xi;
    inst.sys.sigma = xi.norm();
  }
  return inst;
}

LogRegData gen_logreg_instance(std::size_t m, std::size_t n, std::uint64_t seed) {
  if (m == 0 || m % 2 != 0) throw std::domain_error("logreg instance: m must be even and positive");
  if (n == 0) throw std::domain_error("logreg instance: n must be positive");
  Rng rng(seed);
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::VectorXd mu_pos(nn), mu_neg(nn);
  for (Eigen::Index j = 0; j < nn; ++j) mu_pos(j) = rng.uniform();
  for (Eigen::Index j = 0; j < nn; ++j) mu_neg(j) = -rng.uniform();

  LogRegData data;
  const auto mm = static_cast<Eigen::Index>(m);
  data.samples.resize(mm, nn);
  data.outcomes.resize(mm);
  for (Eigen::Index i = 0; i < mm; ++i) {
    const bool positive = i < mm / 2;
    data.outcomes(i) = positive ? 1.0 : -1.0;
    const Eigen::VectorXd& mu = positive ? mu_pos : mu_neg;
    for (Eigen::Index j = 0; j < nn; ++j) data.samples(i, j) = mu(j) + rng.normal();
  }
  return data;
}

void standardize_columns(Eigen::MatrixXd& M) {
  if (M.rows() == 0) return;
  const double rows = static_cast<double>(M.rows());
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    auto col = M.col(j);
    const double mean = col.mean();
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / rows);
    if (sd > 0.0) {
      col /= sd;
    } else {
      col.setZero();
    }
  }
}

bool success(const Eigen::VectorXd& x_true, const Eigen::VectorXd& x_hat) {
  if (x_true.size() != x_hat.size()) throw std::invalid_argument("success: dimension mismatch");
  return (x_true - x_hat).norm() < kSuccessTolerance;
}

double rel_err(const Eigen::VectorXd& x_true, const Eigen::VectorXd& x_hat) {
  if (x_true.size() != x_hat.size()) throw std::invalid_argument("rel_err: dimension mismatch");
  const double denom = x_true.norm();
  if (denom == 0.0) throw std::domain_error("rel_err: x_true must be nonzero");
  return (x_hat - x_true).norm() / denom;
}

std::size_t cardinality(const Eigen::VectorXd& x, double threshold) {
  return static_cast<std::size_t>((x.array().abs() > threshold).count());
}

std::size_t r_from_tenths(std::size_t tenths, std::size_t K) { return (tenths * K + 9) / 10; }

std::string SweepModel::id() const {
  std::ostringstream out;
  out << to_string(phi.kind()) << "/r=";
  if (r_tenths == 0) {
    out << "0";
  } else if (r_tenths == 10) {
    out << "K";
  } else {
    out << "0." << r_tenths << "K";
  }
  return out.str();
}

std::vector<SweepModel> default_cs_models(const Regularizer& phi) {
  std::vector<SweepModel> models;
  for (std::size_t t = 0; t <= 10; ++t) models.push_back({phi, t});
  return models;
}

std::string ExperimentRecord::csv_header() {
  return "experiment,instance,K,model,r,lambda,success,rel_err,l_avg,cardinality,objective,"
         "infeasibility,iterations,wall_seconds,cpu_seconds,status,flagged,note";
}

void ExperimentRecord::write_csv_row(std::ostream& out) const {
  out << experiment << ',' << instance << ',' << K << ',' << model << ',' << r << ','
      << fmt(lambda) << ',' << (success ? 1 : 0) << ',' << fmt(rel_err) << ',' << fmt(l_avg) << ','
      << cardinality << ',' << fmt(objective) << ',' << fmt(infeasibility) << ',' << iterations
      << ',' << fmt(wall_seconds) << ',' << fmt(cpu_seconds) << ',' << status << ','
      << (flagged ? 1 : 0) << ',' << note << '\n';
}

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << ExperimentRecord::csv_header() << '\n';
  for (const auto& rec : records) rec.write_csv_row(out);
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t cs_instance_seed(std::uint64_t seed, std::size_t K, std::size_t index) {
  return splitmix64(splitmix64(seed ^ (std::uint64_t{K} << 32)) + std::uint64_t{index});
}

std::vector<ExperimentRecord> run_cs_sweep(const CSSweepConfig& cfg) {
  const std::size_t cells = cfg.K_values.size() * cfg.instances;
  std::vector<std::vector<ExperimentRecord>> per_task(cells);

  parallel_for(cells, cfg.threads, [&](std::size_t task) {
    const std::size_t K = cfg.K_values[task / cfg.instances];
    const std::size_t index = task % cfg.instances;
    CSInstanceSpec spec{cfg.m, cfg.n, K, cfg.noise_std, cs_instance_seed(cfg.seed, K, index)};
    const CSInstance inst = gen_cs_instance(spec);

    auto& out = per_task[task];
    for (const auto& model : cfg.models) {
      ExperimentRecord rec;
      rec.experiment = "cs";
      rec.instance = index;
      rec.K = K;
      rec.model = model.id();
      rec.r = r_from_tenths(model.r_tenths, K);
      rec.lambda = 1.0;
      rec.l_avg = kNaN;
      rec.x_true = inst.x_true;
      try {
        const PartialRegularizer preg{model.phi, rec.r, 1.0};
        const SolveResult res = fal_solve(inst.sys, preg, cfg.fal, cfg.npg);
        rec.x_hat = res.x;
        rec.success = success(inst.x_true, res.x);
        rec.rel_err = rel_err(inst.x_true, res.x);
        rec.cardinality = cardinality(res.x);
        rec.objective = res.objective;
        rec.infeasibility = res.infeasibility;
        rec.iterations = res.npg_iterations;
        rec.wall_seconds = res.wall_seconds;
        rec.cpu_seconds = res.cpu_seconds;
        rec.status = std::string(to_string(res.status));
        rec.flagged = !res.converged();
      } catch (const std::exception& e) {
        rec.x_hat = Eigen::VectorXd::Constant(inst.x_true.size(), kNaN);
        rec.rel_err = kNaN;
        rec.objective = kNaN;
        rec.infeasibility = kNaN;
        rec.status = "error";
        rec.flagged = true;
        rec.note = e.what();
        std::replace(rec.note.begin(), rec.note.end(), ',', ';');
      }
      out.push_back(std::move(rec));
    }
  });

  std::vector<ExperimentRecord> records;
  for (auto& task : per_task)
    for (auto& rec : task) records.push_back(std::move(rec));
  return records;
}

std::vector<CSSummary> summarize_cs(const std::vector<ExperimentRecord>& records) {
  std::vector<CSSummary> rows;
  std::map<std::pair<std::size_t, std::string>, std::size_t> slot;
  std::vector<std::size_t> rel_count;
  for (const auto& rec : records) {
    const auto key = std::make_pair(rec.K, rec.model);
    auto it = slot.find(key);
    if (it == slot.end()) {
      it = slot.emplace(key, rows.size()).first;
      rows.push_back({rec.model, rec.K, 0, 0.0, 0.0, 0.0});
      rel_count.push_back(0);
    }
    auto& row = rows[it->second];
    ++row.runs;
    row.success_frequency += rec.success ? 1.0 : 0.0;
    if (std::isfinite(rec.rel_err)) {
      row.mean_rel_err += rec.rel_err;
      ++rel_count[it->second];
    }
    row.cpu_seconds += rec.cpu_seconds;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].success_frequency /= static_cast<double>(rows[i].runs);
    rows[i].mean_rel_err = rel_count[i] ? rows[i].mean_rel_err / static_cast<double>(rel_count[i]) : kNaN;
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.K < b.K; });
  return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<CSSummary>& rows) {
  out << "model,K,runs,success_frequency,mean_rel_err,cpu_seconds\n";
  for (const auto& row : rows) {
    out << row.model << ',' << row.K << ',' << row.runs << ',' << fmt(row.success_frequency) << ','
        << fmt(row.mean_rel_err) << ',' << fmt(row.cpu_seconds) << '\n';
  }
}

namespace {

struct LogRegFit {
  Eigen::VectorXd w;
  double loss = 0.0;
  std::size_t card = 0;
  std::size_t iterations = 0;
  bool converged = false;
  double wall = 0.0;
  double cpu = 0.0;
};

LogRegFit fit_logreg(const LogRegData& data, const SmoothOracle& f, const PartialRegularizer& preg,
                     const NPGConfig& npg) {
  const auto wall0 = std::chrono::steady_clock::now();
  const double cpu0 = thread_cpu_seconds();
  const NPGResult res = npg_solve(f, preg, npg, Eigen::VectorXd::Zero(data.features()));
  LogRegFit fit;
  fit.w = res.x;
  fit.loss = logistic_value_grad(data, res.x).value;
  fit.card = cardinality(res.x);
  fit.iterations = res.trace.iterations.size();
  fit.converged = res.trace.status == NPGStatus::Converged;
  fit.cpu = thread_cpu_seconds() - cpu0;
  fit.wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return fit;
}

ExperimentRecord logreg_record(std::size_t instance, std::size_t K, std::string model, std::size_t r,
                               double lambda, const LogRegFit& fit) {
  ExperimentRecord rec;
  rec.experiment = "logreg";
  rec.instance = instance;
  rec.K = K;
  rec.model = std::move(model);
  rec.r = r;
  rec.lambda = lambda;
  rec.rel_err = kNaN;
  rec.l_avg = fit.loss;
  rec.cardinality = fit.card;
  rec.objective = kNaN;
  rec.infeasibility = kNaN;
  rec.iterations = fit.iterations;
  rec.wall_seconds = fit.wall;
  rec.cpu_seconds = fit.cpu;
  rec.status = fit.converged ? "converged" : "not_converged";
  rec.flagged = !fit.converged;
  rec.x_hat = fit.w;
  return rec;
}

}  // namespace

std::vector<ExperimentRecord> run_logreg_sweep(const LogRegData& data, const LogRegSweepConfig& cfg,
                                               std::size_t instance) {
  data.check();
  if (!(cfg.bracket_lo > 0.0 && cfg.bracket_lo < cfg.bracket_hi))
    throw std::domain_error("logreg sweep: invalid lambda bracket");
  const SmoothOracle f = logistic_oracle(data);
  const double lmax = lambda_max(data);
  const auto n = static_cast<std::size_t>(data.features());
  std::vector<ExperimentRecord> records;

  for (double frac : cfg.lambda_fractions) {
    const double lambda = frac * lmax;
    const LogRegFit full = fit_logreg(data, f, {cfg.phi, 0, lambda}, cfg.npg);
    const std::size_t K = full.card;
    std::ostringstream full_id;
    full_id << to_string(cfg.phi.kind()) << "/full/lambda=" << fmt(frac) << "max";
    records.push_back(logreg_record(instance, K, full_id.str(), 0, lambda, full));
    if (K == 0) {
      records.back().note = "zero cardinality; partial runs skipped";
      continue;
    }

    for (std::size_t tenths : cfg.r_tenths) {
      const std::size_t r = std::min(r_from_tenths(tenths, K), n - 1);
      SweepModel m{cfg.phi, tenths};
      std::ostringstream id;
      id << m.id() << "/lambda=" << fmt(frac) << "max";

      // Cardinality is assumed non-increasing in λ̂; keep card(hi) ≤ K < card(lo).
      auto solve_at = [&](double lam) { return fit_logreg(data, f, {cfg.phi, r, lam}, cfg.npg); };
      double lo = cfg.bracket_lo * lmax;
      double hi = cfg.bracket_hi * lmax;
      LogRegFit best = solve_at(hi);
      double best_lambda = hi;
      bool flagged = false;
      std::string note;
      if (best.card > K) {
        flagged = true;
        note = "bracket exhausted: cardinality above K at the upper end";
      } else {
        LogRegFit low = solve_at(lo);
        if (low.card <= K) {
          best = std::move(low);
          best_lambda = lo;
        } else {
          for (std::size_t it = 0; it < cfg.bisect_iters; ++it) {
            const double mid = std::sqrt(lo * hi);
            LogRegFit trial = solve_at(mid);
            if (trial.card <= K) {
              hi = mid;
              best = std::move(trial);
              best_lambda = mid;
            } else {
              lo = mid;
            }
            if (hi / lo < 1.0 + 1e-10) break;
          }
        }
      }
      ExperimentRecord rec = logreg_record(instance, K, id.str(), r, best_lambda, best);
      rec.flagged = rec.flagged || flagged;
      rec.note = note;
      records.push_back(std::move(rec));
    }
  }
  return records;
}

}  // namespace partialreg
