// Command-line front end: solvers, prox evaluation, recovery-condition checks
// and experiment sweeps. Every record is printed as CSV with a header row.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "partialreg/analysis.hpp"
#include "partialreg/fal.hpp"
#include "partialreg/harness.hpp"
#include "partialreg/io.hpp"
#include "partialreg/npg.hpp"
#include "partialreg/objectives.hpp"
#include "partialreg/partial_prox.hpp"
#include "partialreg/regularizer.hpp"

namespace pr = partialreg;

namespace {

struct RegOptions {
  std::string kind = "l1";
  double q = 0.5;
  double epsilon = 1e-3;
  double nu = 1e-2;
  double reg_lambda = 1.0;
  double alpha = 2.7;
  double beta = 3.7;

  void attach(CLI::App* app) {
    app->add_option("--reg", kind, "penalty: l1, lq, log, capped_l1, mcp, scad")->capture_default_str();
    app->add_option("--q", q, "lq exponent")->capture_default_str();
    app->add_option("--epsilon", epsilon, "log penalty epsilon")->capture_default_str();
    app->add_option("--nu", nu, "capped-l1 cap")->capture_default_str();
    app->add_option("--reg-lambda", reg_lambda, "mcp/scad lambda")->capture_default_str();
    app->add_option("--alpha", alpha, "mcp alpha")->capture_default_str();
    app->add_option("--beta", beta, "scad beta")->capture_default_str();
  }

  pr::Regularizer build() const {
    switch (pr::reg_kind_from_string(kind)) {
      case pr::RegKind::L1: return pr::Regularizer::l1();
      case pr::RegKind::Lq: return pr::Regularizer::lq(q);
      case pr::RegKind::Log: return pr::Regularizer::log(epsilon);
      case pr::RegKind::CappedL1: return pr::Regularizer::capped_l1(nu);
      case pr::RegKind::MCP: return pr::Regularizer::mcp(reg_lambda, alpha);
      case pr::RegKind::SCAD: return pr::Regularizer::scad(reg_lambda, beta);
    }
    return pr::Regularizer::l1();
  }
};

struct SolverOptions {
  pr::FALConfig fal;
  pr::NPGConfig npg;
  std::optional<double> upsilon;

  void attach(CLI::App* app) {
    app->add_option("--rho0", fal.rho0)->capture_default_str();
    app->add_option("--gamma", fal.gamma)->capture_default_str();
    app->add_option("--theta", fal.theta)->capture_default_str();
    app->add_option("--eta", fal.eta)->capture_default_str();
    app->add_option("--eps0", fal.eps0)->capture_default_str();
    app->add_option("--eps-target", fal.eps_target)->capture_default_str();
    app->add_option("--feas-tol", fal.feas_tol)->capture_default_str();
    app->add_option("--outer-max", fal.outer_max)->capture_default_str();
    app->add_option("--upsilon", upsilon, "bound on the AL value (default: its lower bound)");
    app->add_option("--npg-eps", npg.eps)->capture_default_str();
    app->add_option("--npg-max-iters", npg.max_iters)->capture_default_str();
    app->add_option("--npg-window", npg.N)->capture_default_str();
    app->add_option("--npg-c", npg.c)->capture_default_str();
  }

  pr::FALConfig fal_config() const {
    pr::FALConfig c = fal;
    c.upsilon = upsilon;
    return c;
  }
};

// Fills options of `app` that were not given on the command line from the
// key=value pairs of a config file. Keys are option names without dashes.
void apply_config(CLI::App* app, const pr::KeyValues& kv) {
  for (const auto& [key, value] : kv) {
    CLI::Option* opt = app->get_option_no_throw("--" + key);
    if (opt == nullptr) throw std::invalid_argument("unknown config key for '" + app->get_name() + "': " + key);
    if (opt->count() > 0) continue;
    opt->clear();
    opt->add_result(value);
    opt->run_callback();
  }
}

std::string join(const std::vector<std::size_t>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ";" : "") << v[i];
  return out.str();
}

std::string join(const Eigen::VectorXd& v) {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? ";" : "") << pr::format_double(v(i));
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partially regularized sparse recovery"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "flat key=value file; command-line flags take precedence");

  // solve
  auto* solve = app.add_subcommand("solve", "constrained (FAL) or penalized (NPG) solve of Ax ~ b");
  std::string matrix_path, rhs_path, x_out;
  double sigma = 0.0;
  std::size_t r = 0;
  double lambda = 1.0;
  std::string model = "constrained";
  RegOptions solve_reg;
  SolverOptions solver;
  solve->add_option("--matrix", matrix_path, "A as dense CSV")->required();
  solve->add_option("--rhs", rhs_path, "b as dense CSV")->required();
  solve->add_option("--sigma", sigma, "noise level; 0 selects the equality-constrained model")->capture_default_str();
  solve->add_option("--r", r, "number of unpenalized entries")->capture_default_str();
  solve->add_option("--lambda", lambda, "penalty weight")->capture_default_str();
  solve->add_option("--model", model, "constrained or penalized")->capture_default_str();
  solve->add_option("--x-out", x_out, "write the solution vector to this CSV");
  solve_reg.attach(solve);
  solver.attach(solve);

  // prox-check
  auto* prox = app.add_subcommand("prox-check", "scalar or partial proximal operator");
  RegOptions prox_reg;
  double prox_t = 0.0, prox_scale = 1.0;
  std::string prox_vector;
  std::size_t prox_r = 0;
  prox_reg.attach(prox);
  prox->add_option("--t", prox_t, "scalar input")->capture_default_str();
  prox->add_option("--scale", prox_scale, "step multiplying the penalty")->capture_default_str();
  prox->add_option("--vector", prox_vector, "CSV vector for the partial prox");
  prox->add_option("--r", prox_r, "unpenalized entries for the partial prox")->capture_default_str();

  // ric
  auto* ric = app.add_subcommand("ric", "exact restricted isometry constant");
  std::string ric_matrix;
  double ric_k = 1.0;
  pr::EnumerationOptions enum_opts;
  ric->add_option("--matrix", ric_matrix)->required();
  ric->add_option("--k", ric_k, "order; fractional values round up")->capture_default_str();
  ric->add_option("--max-subsets", enum_opts.max_subsets)->capture_default_str();
  ric->add_option("--threads", enum_opts.threads)->capture_default_str();

  // delta-bound
  auto* delta = app.add_subcommand("delta-bound", "smallest nonzero basic-solution magnitude");
  std::string delta_matrix, delta_rhs;
  delta->add_option("--matrix", delta_matrix)->required();
  delta->add_option("--rhs", delta_rhs)->required();

  // nsp-check
  auto* nsp = app.add_subcommand("nsp-check", "search for null-space property violations");
  std::string nsp_matrix, nsp_x, nsp_kind = "local";
  std::size_t nsp_r = 0, nsp_samples = 10000;
  double nsp_eps = 1e-3;
  std::uint64_t nsp_seed = 1;
  RegOptions nsp_reg;
  nsp->add_option("--matrix", nsp_matrix)->required();
  nsp->add_option("--x", nsp_x, "candidate solution x* as CSV")->required();
  nsp->add_option("--r", nsp_r)->capture_default_str();
  nsp->add_option("--kind", nsp_kind, "local or global")->capture_default_str();
  nsp->add_option("--eps-ball", nsp_eps, "sampling radius for the local property")->capture_default_str();
  nsp->add_option("--samples", nsp_samples)->capture_default_str();
  nsp->add_option("--seed", nsp_seed)->capture_default_str();
  nsp_reg.attach(nsp);

  // experiment
  auto* experiment = app.add_subcommand("experiment", "experiment sweeps");
  experiment->require_subcommand(1);
  auto* cs = experiment->add_subcommand("cs", "compressed-sensing recovery sweep");
  pr::CSSweepConfig cs_cfg;
  std::string cs_out, cs_summary;
  RegOptions cs_reg;
  SolverOptions cs_solver;
  cs->add_option("--m", cs_cfg.m)->capture_default_str();
  cs->add_option("--n", cs_cfg.n)->capture_default_str();
  cs->add_option("--K", cs_cfg.K_values, "sparsity levels")->delimiter(',')->capture_default_str();
  cs->add_option("--instances", cs_cfg.instances)->capture_default_str();
  cs->add_option("--noise-std", cs_cfg.noise_std)->capture_default_str();
  cs->add_option("--seed", cs_cfg.seed)->capture_default_str();
  cs->add_option("--threads", cs_cfg.threads)->capture_default_str();
  cs->add_option("--out", cs_out, "record CSV")->required();
  cs->add_option("--summary-out", cs_summary, "per (model, K) aggregate CSV");
  cs_reg.attach(cs);
  cs_solver.attach(cs);

  auto* lr = experiment->add_subcommand("logreg", "sparse logistic regression sweep");
  std::size_t lr_m = 100, lr_n = 200, lr_instances = 1;
  std::uint64_t lr_seed = 1;
  std::string lr_out, lr_samples, lr_outcomes;
  bool lr_standardize = false;
  pr::LogRegSweepConfig lr_cfg;
  RegOptions lr_reg;
  lr->add_option("--m", lr_m, "samples (even)")->capture_default_str();
  lr->add_option("--n", lr_n, "features")->capture_default_str();
  lr->add_option("--instances", lr_instances)->capture_default_str();
  lr->add_option("--seed", lr_seed)->capture_default_str();
  lr->add_option("--samples", lr_samples, "load samples (rows) from CSV instead of generating");
  lr->add_option("--outcomes", lr_outcomes, "load +1/-1 outcomes from CSV");
  lr->add_flag("--standardize", lr_standardize, "scale loaded columns to mean 0, variance 1");
  lr->add_option("--fractions", lr_cfg.lambda_fractions, "lambda / lambda_max")->delimiter(',')->capture_default_str();
  lr->add_option("--npg-eps", lr_cfg.npg.eps)->capture_default_str();
  lr->add_option("--out", lr_out, "record CSV")->required();
  lr_reg.attach(lr);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (!config_path.empty()) {
      const pr::KeyValues kv = pr::read_config_file(config_path);
      for (CLI::App* sub : {solve, prox, ric, delta, nsp, cs, lr}) {
        if (sub->parsed()) apply_config(sub, kv);
      }
    }

    if (solve->parsed()) {
      pr::LinearSystem sys{pr::read_matrix_csv(matrix_path), pr::read_vector_csv(rhs_path), sigma};
      sys.check();
      const pr::PartialRegularizer preg{solve_reg.build(), r, lambda};
      if (model == "constrained") {
        const pr::SolveResult res = pr::fal_solve(sys, preg, solver.fal_config(), solver.npg);
        std::cout << pr::SolveResult::csv_header() << '\n';
        res.write_csv_row(std::cout);
        if (!x_out.empty()) pr::write_vector_csv(x_out, res.x);
        return res.converged() ? 0 : 3;
      }
      if (model != "penalized") throw std::invalid_argument("--model must be constrained or penalized");
      const pr::NPGResult res =
          pr::npg_solve(pr::least_squares_oracle(sys), preg, solver.npg, Eigen::VectorXd::Zero(sys.cols()));
      const auto norms = pr::residual_norms(sys, res.x);
      std::cout << "F,residual_norm,iterations,status,x\n"
                << pr::format_double(res.F) << ',' << pr::format_double(norms.two_norm) << ','
                << res.trace.iterations.size() << ',' << pr::to_string(res.trace.status) << ','
                << join(res.x) << '\n';
      if (!x_out.empty()) pr::write_vector_csv(x_out, res.x);
      return res.trace.status == pr::NPGStatus::Converged ? 0 : 3;
    }

    if (prox->parsed()) {
      const pr::Regularizer phi = prox_reg.build();
      if (!prox_vector.empty()) {
        const Eigen::VectorXd a = pr::read_vector_csv(prox_vector);
        const pr::PartialRegularizer preg{phi, prox_r, 1.0};
        preg.check(static_cast<std::size_t>(a.size()));
        const pr::ProxSelection sel = pr::partial_prox(preg, a, prox_scale);
        std::cout << "reg,r,scale,kept,solution\n"
                  << phi.describe() << ',' << prox_r << ',' << pr::format_double(prox_scale) << ','
                  << join(sel.kept_indices) << ',' << join(sel.solution) << '\n';
      } else {
        const pr::ScalarProxResult res = pr::scalar_prox(phi, prox_t, prox_scale);
        std::cout << "reg,t,scale,minimizer,value\n"
                  << phi.describe() << ',' << pr::format_double(prox_t) << ','
                  << pr::format_double(prox_scale) << ',' << pr::format_double(res.minimizer) << ','
                  << pr::format_double(res.value) << '\n';
      }
      return 0;
    }

    if (ric->parsed()) {
      const Eigen::MatrixXd A = pr::read_matrix_csv(ric_matrix);
      const pr::RICResult res = pr::ric_exact(A, pr::ric_order(ric_k), enum_opts);
      std::cout << "k,order,delta,witness_support\n"
                << pr::format_double(ric_k) << ',' << res.order << ',' << pr::format_double(res.delta)
                << ',' << join(res.witness_support) << '\n';
      return 0;
    }

    if (delta->parsed()) {
      const double d = pr::delta_lower_bound(pr::read_matrix_csv(delta_matrix), pr::read_vector_csv(delta_rhs));
      std::cout << "delta\n" << pr::format_double(d) << '\n';
      return 0;
    }

    if (nsp->parsed()) {
      const Eigen::MatrixXd A = pr::read_matrix_csv(nsp_matrix);
      const Eigen::VectorXd x = pr::read_vector_csv(nsp_x);
      const pr::Regularizer phi = nsp_reg.build();
      pr::NSPVerdict v;
      if (nsp_kind == "local") {
        v = pr::lnsp_falsify(A, x, nsp_r, phi, nsp_eps, nsp_samples, nsp_seed);
      } else if (nsp_kind == "global") {
        v = pr::gnsp_falsify(A, x, nsp_r, phi, nsp_samples, nsp_seed);
      } else {
        throw std::invalid_argument("--kind must be local or global");
      }
      std::cout << "kind,status,samples,min_margin,mean_margin,witness_margin,witness_j,witness_j1,witness,note\n"
                << nsp_kind << ',' << (v.falsified() ? "falsified" : "not_falsified") << ','
                << v.samples_tested << ',' << pr::format_double(v.min_margin) << ','
                << pr::format_double(v.mean_margin) << ',' << pr::format_double(v.witness_margin) << ','
                << join(v.witness_j) << ',' << join(v.witness_j1) << ',' << join(v.witness) << ','
                << v.note << '\n';
      return 0;
    }

    if (cs->parsed()) {
      cs_cfg.models = pr::default_cs_models(cs_reg.build());
      cs_cfg.fal = cs_solver.fal_config();
      cs_cfg.npg = cs_solver.npg;
      const auto records = pr::run_cs_sweep(cs_cfg);
      std::ofstream out(cs_out);
      if (!out) throw std::runtime_error("cannot write " + cs_out);
      pr::write_records_csv(out, records);
      if (!cs_summary.empty()) {
        std::ofstream sum(cs_summary);
        if (!sum) throw std::runtime_error("cannot write " + cs_summary);
        pr::write_summary_csv(sum, pr::summarize_cs(records));
      }
      return 0;
    }

    if (lr->parsed()) {
      lr_cfg.phi = lr_reg.build();
      std::vector<pr::ExperimentRecord> records;
      if (!lr_samples.empty()) {
        if (lr_outcomes.empty()) throw std::invalid_argument("--samples requires --outcomes");
        pr::LogRegData data{pr::read_matrix_csv(lr_samples), pr::read_vector_csv(lr_outcomes)};
        if (lr_standardize) pr::standardize_columns(data.samples);
        records = pr::run_logreg_sweep(data, lr_cfg, 0);
      } else {
        for (std::size_t i = 0; i < lr_instances; ++i) {
          const pr::LogRegData data = pr::gen_logreg_instance(lr_m, lr_n, lr_seed + i);
          auto part = pr::run_logreg_sweep(data, lr_cfg, i);
          records.insert(records.end(), part.begin(), part.end());
        }
      }
      std::ofstream out(lr_out);
      if (!out) throw std::runtime_error("cannot write " + lr_out);
      pr::write_records_csv(out, records);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
