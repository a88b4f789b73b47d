// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "partialreg/analysis.hpp"
#include "partialreg/fal.hpp"
#include "partialreg/harness.hpp"
#include "partialreg/npg.hpp"
#include "partialreg/objectives.hpp"
#include "partialreg/partial_prox.hpp"
#include "partialreg/regularizer.hpp"
#include "partialreg/rng.hpp"

using namespace partialreg;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

constexpr RegKind kAllKinds[] = {RegKind::L1, RegKind::Lq, RegKind::Log, RegKind::CappedL1, RegKind::MCP, RegKind::SCAD};

// Feasibility records gathered from every FAL run for criterion 11.
struct FeasRecord {
  std::string source;
  double reported = 0.0;
  double recomputed = 0.0;
};
std::vector<FeasRecord> g_feasibility;

double recompute_infeasibility(const LinearSystem& sys, const Eigen::VectorXd& x) {
  const double inf = (sys.A * x - sys.b).lpNorm<Eigen::Infinity>();
  return sys.sigma > 0.0 ? std::max(0.0, inf - sys.sigma) : inf;
}

void note_feasibility(const std::string& source, const LinearSystem& sys, const SolveResult& res) {
  if (res.converged()) g_feasibility.push_back({source, res.infeasibility, recompute_infeasibility(sys, res.x)});
}

Eigen::MatrixXd gaussian(Rng& rng, Eigen::Index m, Eigen::Index n, double scale = 1.0) {
  Eigen::MatrixXd M(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) M(i, j) = scale * rng.normal();
  return M;
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

LinearSystem example_system() {
  LinearSystem sys{Eigen::MatrixXd(4, 5), Eigen::VectorXd(4), 0.0};
  sys.A << 1, -1, 0, 0, 0,
           1, 0, 1, 0, 0,
           1, 0, 0, 1, 0,
           1, 0, 0, 0, 1;
  sys.b << 0, 1, 2, 3;
  return sys;
}

Outcome criterion1() {
  const auto sys = example_system();
  Eigen::VectorXd xp(5), xf(5);
  xp << 0, 0, 1, 2, 3;
  xf << 1, 1, 0, 1, 2;
  Outcome out;
  std::ostringstream d;
  for (std::size_t r : {2, 3, 0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = fal_noiseless(sys, {Regularizer::l1(), r, 1.0}, FALConfig{}, NPGConfig{});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    note_feasibility("example r=" + std::to_string(r), sys, res);
    const double err = (res.x - (r == 0 ? xf : xp)).norm();
    const bool ok = err <= 1e-4 && secs < 1.0;
    out.pass = out.pass && ok;
    d << "r=" << r << " err=" << fmt(err) << " t=" << fmt(secs) << "s" << (ok ? "" : " [miss]") << "; ";
  }
  out.detail = d.str();
  return out;
}

Outcome criterion2() {
  Rng rng(20);
  double worst = 0.0;
  for (auto kind : kAllKinds) {
    const auto phi = Regularizer::with_defaults(kind);
    for (int s = 0; s < 1000; ++s) {
      const double t = rng.uniform(-10.0, 10.0);
      const double scale = 5.0 * (1.0 - rng.uniform());  // (0, 5]
      const double got = scalar_prox(phi, t, scale).value;
      worst = std::max(worst, std::abs(got - oracle::scalar_prox_value(phi, t, scale)));
    }
  }
  return {worst <= 1e-8, "6x1000 samples, max |objective gap| = " + fmt(worst)};
}

Outcome criterion3() {
  Rng rng(30);
  double worst = 0.0;
  std::size_t cases = 0;
  for (Eigen::Index n = 2; n <= 8; ++n) {
    for (std::size_t r = 0; r < static_cast<std::size_t>(n); ++r) {
      for (int s = 0; s < 50; ++s) {
        const auto phi = Regularizer::with_defaults(kAllKinds[rng.below(6)]);
        Eigen::VectorXd a(n);
        for (Eigen::Index i = 0; i < n; ++i) a(i) = rng.uniform(-10.0, 10.0);
        const double step = 5.0 * rng.uniform_open();
        const auto sel = partial_prox({phi, r, 1.0}, a, step);
        const double got = oracle::partial_prox_objective(phi, r, step, a, sel.solution);
        worst = std::max(worst, std::abs(got - oracle::partial_prox_bruteforce(phi, r, step, a)));
        ++cases;
      }
    }
  }
  return {worst <= 1e-10, std::to_string(cases) + " cases, max |objective gap| = " + fmt(worst)};
}

Outcome criterion4() {
  Rng rng(40);
  std::size_t mono_viol = 0, descent_viol = 0, level_viol = 0;
  for (int p = 0; p < 20; ++p) {
    const Eigen::Index n = 10;
    const Eigen::MatrixXd B = gaussian(rng, n + 2, n);
    const Eigen::MatrixXd Q = B.transpose() * B;
    const Eigen::VectorXd c = 3.0 * gaussian(rng, n, 1);
    const PartialRegularizer preg{Regularizer::l1(), 3, rng.uniform(0.1, 2.0)};
    const Eigen::VectorXd x0 = gaussian(rng, n, 1);

    NPGConfig mono;
    mono.N = 0;
    const auto r0 = npg_solve(quadratic_oracle(Q, c), preg, mono, x0);
    double prev = r0.trace.F0;
    for (const auto& it : r0.trace.iterations) {
      if (it.F > prev) ++mono_viol;
      prev = it.F;
    }

    NPGConfig nm;
    nm.N = 5;
    const auto r5 = npg_solve(quadratic_oracle(Q, c), preg, nm, x0);
    std::deque<double> window{r5.trace.F0};
    for (const auto& it : r5.trace.iterations) {
      const double wmax = *std::max_element(window.begin(), window.end());
      if (it.F > wmax - 0.5 * nm.c * it.step_norm * it.step_norm) ++descent_viol;
      window.push_back(it.F);
      if (window.size() > nm.N + 1) window.pop_front();
    }
    for (const auto* tr : {&r0.trace, &r5.trace})
      for (const auto& it : tr->iterations)
        if (it.F > tr->F0) ++level_viol;
  }
  const bool ok = mono_viol == 0 && descent_viol == 0 && level_viol == 0;
  return {ok, "violations: monotone=" + std::to_string(mono_viol) + " descent=" + std::to_string(descent_viol) +
                  " level=" + std::to_string(level_viol)};
}

Outcome criterion5() {
  Rng rng(50);
  double worst[3] = {0, 0, 0};
  auto rel = [](const Eigen::VectorXd& g, const Eigen::VectorXd& fd) { return (g - fd).norm() / std::max(1.0, fd.norm()); };
  for (int p = 0; p < 20; ++p) {
    const LogRegData data = gen_logreg_instance(30, 10, 500 + static_cast<std::uint64_t>(p));
    const Eigen::VectorXd w = gaussian(rng, 10, 1);
    worst[0] = std::max(worst[0], rel(logistic_value_grad(data, w).grad,
                                      oracle::fd_gradient([&](const Eigen::VectorXd& v) { return logistic_value_grad(data, v).value; }, w)));

    LinearSystem sys{gaussian(rng, 6, 12), gaussian(rng, 6, 1), 0.0};
    const Eigen::VectorXd x = gaussian(rng, 12, 1);
    const Eigen::VectorXd mu = gaussian(rng, 6, 1);
    const double rho = rng.uniform(0.5, 5.0);
    worst[1] = std::max(worst[1], rel(al_noiseless(sys, x, mu, rho).grad,
                                      oracle::fd_gradient([&](const Eigen::VectorXd& v) { return al_noiseless(sys, v, mu, rho).value; }, x)));

    sys.sigma = (sys.A * x - sys.b).norm() * rng.uniform(0.8, 1.2);
    const double mus = rng.uniform(0.0, 2.0);
    worst[2] = std::max(worst[2], rel(al_noisy(sys, x, mus, rho).grad,
                                      oracle::fd_gradient([&](const Eigen::VectorXd& v) { return al_noisy(sys, v, mus, rho).value; }, x)));
  }
  const bool ok = worst[0] <= 1e-6 && worst[1] <= 1e-6 && worst[2] <= 1e-6;
  return {ok, "max rel err: logistic=" + fmt(worst[0]) + " al=" + fmt(worst[1]) + " al_noisy=" + fmt(worst[2])};
}

Outcome criterion6() {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const LogRegData data = gen_logreg_instance(100, 50, 600 + s);
    const auto res = npg_solve(logistic_oracle(data), {Regularizer::l1(), 0, lambda_max(data)}, NPGConfig{},
                               Eigen::VectorXd::Zero(50));
    worst = std::max(worst, res.x.lpNorm<Eigen::Infinity>());
  }
  return {worst <= 1e-6, "10 instances, max ||w||_inf = " + fmt(worst)};
}

Outcome criterion7() {
  Rng rng(70);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(rng, 12, 8));
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(12, 8);
  double ortho = 0.0;
  for (std::size_t k = 1; k <= 8; ++k) ortho = std::max(ortho, ric_exact(Q, k).delta);

  Eigen::VectorXd d(7);
  for (Eigen::Index i = 0; i < 7; ++i) d(i) = rng.uniform(0.1, 2.0);
  const Eigen::MatrixXd D = d.asDiagonal();
  const double want = (d.array().square() - 1.0).abs().maxCoeff();
  const double diag_err = std::abs(ric_exact(D, 1).delta - want);

  std::size_t inversions = 0;
  for (int t = 0; t < 10; ++t) {
    const Eigen::MatrixXd A = gaussian(rng, 8, 12, 1.0 / std::sqrt(8.0));
    double prev = 0.0;
    for (std::size_t k = 1; k <= 12; ++k) {
      const double delta = ric_exact(A, k).delta;
      if (delta < prev) ++inversions;
      prev = delta;
    }
  }
  const bool ok = ortho <= 1e-10 && diag_err <= 1e-12 && inversions == 0;
  return {ok, "orthonormal max delta=" + fmt(ortho) + ", diag err=" + fmt(diag_err) +
                  ", monotonicity inversions=" + std::to_string(inversions)};
}

Outcome criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  CSSweepConfig cfg;  // m=32, n=128, K=4..28, 20 instances, partial l1 with r in tenths of K
  const auto records = run_cs_sweep(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  for (const auto& rec : records) {
    if (rec.status != "converged") continue;
    const auto inst = gen_cs_instance({cfg.m, cfg.n, rec.K, cfg.noise_std, cs_instance_seed(cfg.seed, rec.K, rec.instance)});
    g_feasibility.push_back({"sweep K=" + std::to_string(rec.K), rec.infeasibility, recompute_infeasibility(inst.sys, rec.x_hat)});
  }

  const auto summary = summarize_cs(records);
  std::map<std::size_t, std::map<std::string, double>> freq;
  for (const auto& row : summary) freq[row.K][row.model] = row.success_frequency;

  bool ok = true;
  std::ostringstream d;
  std::printf("  criterion 8 success frequencies (rows K, columns r = 0, 0.1K, ..., K):\n");
  for (const auto& [K, by_model] : freq) {
    std::vector<double> sched;
    std::printf("    K=%2zu:", K);
    for (const auto& m : cfg.models) {
      const double f = by_model.at(m.id());
      std::printf(" %.2f", f);
      if (m.r_tenths > 0) sched.push_back(f);
    }
    std::size_t inversions = 0;
    for (std::size_t i = 1; i < sched.size(); ++i)
      if (sched[i] < sched[i - 1]) ++inversions;
    const bool beats_full = by_model.at(cfg.models.back().id()) >= by_model.at(cfg.models.front().id());
    std::printf("   inversions=%zu%s\n", inversions, beats_full ? "" : " r=K below r=0");
    if (!beats_full || inversions > 1) {
      ok = false;
      d << "K=" << K << (beats_full ? "" : " r=K<r=0") << (inversions > 1 ? " inversions=" + std::to_string(inversions) : "")
        << "; ";
    }
  }
  std::size_t flagged = 0;
  for (const auto& rec : records) flagged += rec.flagged ? 1 : 0;
  const bool fast = secs < 20.0 * 60.0;
  d << "runs=" << records.size() << " flagged=" << flagged << " wall=" << fmt(secs) << "s" << (fast ? "" : " [over 20 min]");
  return {ok && fast, d.str()};
}

// Rows orthonormal, one-dimensional null space spanned by (±1, …)/√n.
Eigen::MatrixXd flat_null_design(Eigen::Index n) {
  Eigen::VectorXd u(n);
  for (Eigen::Index i = 0; i < n; ++i) u(i) = (i % 2 ? -1.0 : 1.0) / std::sqrt(static_cast<double>(n));
  const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) - u * u.transpose();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(P);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n - 1);
  return Q.transpose();
}

struct BoundCheck {
  std::size_t qualifying = 0;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::size_t not_converged = 0;
  double worst_ratio = 0.0;
  double min_delta = std::numeric_limits<double>::infinity();
};

void check_stable_bound(const CSInstance& inst, std::size_t k, std::size_t r, BoundCheck& acc, const std::string& tag) {
  const std::size_t order = k + (r + 1) / 2;
  const double delta = ric_exact(inst.sys.A, order).delta;
  acc.min_delta = std::min(acc.min_delta, delta);
  if (!(delta < 1.0 / 3.0)) return;
  ++acc.qualifying;
  const auto res = fal_noisy(inst.sys, {Regularizer::l1(), r, 1.0}, FALConfig{}, NPGConfig{});
  note_feasibility(tag, inst.sys, res);
  if (!res.converged()) {
    ++acc.not_converged;
    return;
  }
  ++acc.checked;
  const double bound = stable_error_bound(delta, inst.sys.sigma, k, r, inst.x_true);
  const double err = (res.x - inst.x_true).norm();
  acc.worst_ratio = std::max(acc.worst_ratio, err / bound);
  if (err > bound) ++acc.violations;
}

Outcome criterion9() {
  BoundCheck as_stated;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto inst = gen_cs_instance({10, 16, 2, 0.01, 900 + s});
    for (std::size_t r : {0, 1, 2}) check_stable_bound(inst, 2, r, as_stated, "stable m=10 n=16");
  }

  // Supplementary: a 10x11 design with δ_2 = 2/11 and δ_3 = 3/11. Reported, not scored.
  BoundCheck supp;
  const Eigen::MatrixXd A = flat_null_design(11);
  Rng rng(990);
  for (int s = 0; s < 20; ++s) {
    CSInstance inst;
    inst.x_true = Eigen::VectorXd::Zero(11);
    for (int j = 0; j < 2;) {
      const auto i = static_cast<Eigen::Index>(rng.below(11));
      if (inst.x_true(i) != 0.0) continue;
      inst.x_true(i) = rng.normal();
      ++j;
    }
    Eigen::VectorXd xi(10);
    for (Eigen::Index i = 0; i < 10; ++i) xi(i) = 0.01 * rng.normal();
    inst.sys = {A, A * inst.x_true + xi, xi.norm()};
    for (std::size_t r : {0, 1, 2}) check_stable_bound(inst, 2, r, supp, "stable supplementary");
  }
  std::printf("  criterion 9 supplementary 10x11 design (not scored): qualifying=%zu checked=%zu violations=%zu "
              "not_converged=%zu max err/bound=%s\n",
              supp.qualifying, supp.checked, supp.violations, supp.not_converged, fmt(supp.worst_ratio).c_str());

  const bool ok = as_stated.qualifying > 0 && as_stated.violations == 0 && as_stated.not_converged == 0;
  std::ostringstream d;
  d << "qualifying (instance,r) pairs=" << as_stated.qualifying << "/60, min delta seen=" << fmt(as_stated.min_delta)
    << " (orthonormal rows force delta_1 >= 1-m/n = 0.375), checked=" << as_stated.checked
    << " violations=" << as_stated.violations;
  return {ok, d.str()};
}

Outcome criterion10() {
  std::size_t converged = 0, violations = 0, runs = 0;
  double worst_gap = std::numeric_limits<double>::infinity();
  const auto phi = Regularizer::lq(0.5);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto inst = gen_cs_instance({6, 12, 2, 0.0, 1000 + s});
    const double delta = delta_lower_bound(inst.sys.A, inst.sys.b);
    for (std::size_t r : {0, 1, 2, 3}) {
      ++runs;
      const auto res = fal_noiseless(inst.sys, {phi, r, 1.0}, FALConfig{}, NPGConfig{});
      note_feasibility("lower bound", inst.sys, res);
      if (!res.converged()) continue;
      ++converged;
      const std::size_t nnz = cardinality(res.x, 0.0);
      if (nnz <= r) continue;
      double min_nz = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < res.x.size(); ++i)
        if (res.x(i) != 0.0) min_nz = std::min(min_nz, std::abs(res.x(i)));
      worst_gap = std::min(worst_gap, min_nz - delta);
      if (min_nz < delta - 1e-6) ++violations;
    }
  }
  std::ostringstream d;
  d << "lq(0.5), converged " << converged << "/" << runs << ", violations=" << violations
    << ", min (min|x_i| - delta) over non-r-sparse outputs=" << fmt(worst_gap);
  return {violations == 0 && converged > 0, d.str()};
}

Outcome criterion11() {
  for (std::uint64_t s = 0; s < 5; ++s) {
    for (double noise : {0.0, 0.01}) {
      const auto inst = gen_cs_instance({16, 40, 4, noise, 1100 + s});
      for (auto kind : kAllKinds) {
        const auto res = fal_solve(inst.sys, {Regularizer::with_defaults(kind), 2, 1.0}, FALConfig{}, NPGConfig{});
        note_feasibility("feasibility batch", inst.sys, res);
      }
    }
  }
  std::size_t bad = 0;
  double worst = 0.0;
  for (const auto& f : g_feasibility) {
    worst = std::max(worst, f.recomputed);
    if (f.recomputed > 1e-5 || std::abs(f.recomputed - f.reported) > 1e-12 * std::max(1.0, f.reported)) ++bad;
  }
  return {bad == 0 && !g_feasibility.empty(),
          std::to_string(g_feasibility.size()) + " converged runs re-verified, max infeasibility=" + fmt(worst) +
              ", failures=" + std::to_string(bad)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                          criterion5, criterion6, criterion7, criterion8,
                                                          criterion9, criterion10, criterion11};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (int i = 0; i < static_cast<int>(criteria.size()); ++i) {
    if (!selected.empty() && !selected.count(i + 1)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[static_cast<std::size_t>(i)]();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d: %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", i + 1, out.detail.c_str(), secs);
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
