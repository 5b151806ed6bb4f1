// Copyright 2026 The isdim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <isdim_cli/commands.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <isdim/errors.hpp>
#include <isdim/filter.hpp>
#include <isdim/inverse.hpp>
#include <isdim/measures.hpp>
#include <isdim/random.hpp>
#include <isdim/sampler.hpp>

namespace isdim::cli {

namespace {

const std::vector<std::string> kFitColumns = {"fit_quantity", "fit_regressor", "slope", "intercept", "r2"};

std::vector<std::string> with_fit_columns(std::vector<std::string> columns) {
  columns.insert(columns.end(), kFitColumns.begin(), kFitColumns.end());
  return columns;
}

void add_fit_row(Result& result, const std::string& quantity, const std::string& regressor, const LinearFit& fit) {
  auto& row = result.table.add_row();
  result.table.set(row, "record", std::string("fit"));
  result.table.set(row, "fit_quantity", quantity);
  result.table.set(row, "fit_regressor", regressor);
  result.table.set(row, "slope", fit.slope);
  result.table.set(row, "intercept", fit.intercept);
  result.table.set(row, "r2", fit.r2);
  result.summaries.push_back("fit " + quantity + " vs " + regressor + ": slope " + format_number(fit.slope) +
                             ", R^2 " + format_number(fit.r2));
}

measures::DenseGaussian as_dense(const measures::DiagonalGaussian& g) { return g.to_dense(); }
measures::DenseGaussian as_dense(const measures::DenseGaussian& g) { return g; }

double kl_between(const measures::Gaussian& target, const measures::Gaussian& proposal) {
  return std::visit(
      [](const auto& a, const auto& b) -> double {
        using A = std::decay_t<decltype(a)>;
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<A, B>) {
          return measures::kl_divergence(a, b);
        } else {
          return measures::kl_divergence(as_dense(a), as_dense(b));
        }
      },
      target, proposal);
}

Eigen::VectorXd optional_vector(const ExperimentConfig& c, const std::string& path, Eigen::Index size,
                                double fill) {
  if (!c.has(path)) {
    return Eigen::VectorXd::Constant(size, fill);
  }
  Eigen::VectorXd v = c.vector(path);
  if (v.size() != size) {
    throw DimensionError(path + ": expected " + std::to_string(size) + " entries, got " + std::to_string(v.size()));
  }
  return v;
}

filter::OneStepFilter build_filter(const ExperimentConfig& c) {
  if (c.text("model.form") == "dense") {
    return filter::OneStepFilter::dense(c.matrix("model.M"), c.matrix("model.H"), c.matrix("model.P"),
                                        c.matrix("model.Q"), c.matrix("model.R"));
  }
  return filter::OneStepFilter::scalar_identity(c.real("model.m"), c.real("model.h"), c.real("model.p"),
                                                c.real("model.q"), c.real("model.r"), c.integer("model.d"));
}

inverse::SpectralCascade build_cascade(const ExperimentConfig& c) {
  Eigen::VectorXd truth = c.has("model.truth") ? c.vector("model.truth") : Eigen::VectorXd();
  return {c.real("model.beta"), c.real("model.gamma"), c.integer("model.d"), std::move(truth)};
}

Result diagnose(const ExperimentConfig& c) {
  Result result;
  const std::string& type = c.model_type();
  auto& t = result.table;
  if (type == "cascade" || type == "dense-ip") {
    t.columns = {"model", "nominal_dim", "tau", "efd", "log_rho", "kl"};
    std::optional<inverse::LinearGaussianIP> ip;
    Eigen::VectorXd y;
    if (type == "cascade") {
      const auto cascade = build_cascade(c);
      ip = cascade.as_problem();
      y = inverse::generate_data(cascade, derive_seed(c.seed(), 0));
      result.notes.push_back("data y = truth + gamma^(1/2) xi with xi from derive_seed(seed, 0)");
    } else {
      ip = inverse::LinearGaussianIP::dense(c.matrix("model.K"), c.matrix("model.Sigma"), c.matrix("model.Gamma"));
      y = optional_vector(c, "model.y", ip->data_dim(), 0.0);
    }
    const auto dims = inverse::intrinsic_dims(inverse::operator_a(*ip));
    const double log_rho = inverse::log_rho(*ip, y);
    const double kl = kl_between(inverse::posterior(*ip, y), ip->prior());
    auto& row = t.add_row();
    const auto nominal = static_cast<std::uint64_t>(std::min(ip->state_dim(), ip->data_dim()));
    t.set(row, "model", type);
    t.set(row, "nominal_dim", nominal);
    t.set(row, "tau", dims.tau);
    t.set(row, "efd", dims.efd);
    t.set(row, "log_rho", log_rho);
    t.set(row, "kl", kl);
    result.summaries.push_back(type + ": tau " + format_number(dims.tau) + ", efd " + format_number(dims.efd) +
                               ", log rho " + format_number(log_rho));
  } else if (type == "gaussian-pair") {
    t.columns = {"model", "nominal_dim", "log_rho", "chi2", "kl"};
    const Eigen::VectorXd mean = c.vector("model.target_mean");
    const measures::DiagonalGaussian target(mean, optional_vector(c, "model.target_var", mean.size(), 1.0));
    const measures::DiagonalGaussian proposal(optional_vector(c, "model.proposal_mean", mean.size(), 0.0),
                                              optional_vector(c, "model.proposal_var", mean.size(), 1.0));
    const double log_rho = measures::log_rho(target, proposal);
    auto& row = t.add_row();
    t.set(row, "model", type);
    t.set(row, "nominal_dim", static_cast<std::uint64_t>(mean.size()));
    t.set(row, "log_rho", log_rho);
    t.set(row, "chi2", measures::chi2_divergence(target, proposal));
    t.set(row, "kl", measures::kl_divergence(target, proposal));
    result.summaries.push_back("gaussian-pair: log rho " + format_number(log_rho));
  } else {
    t.columns = {"model", "form", "tau_st", "efd_st", "tau_op", "efd_op", "log_rho_st", "log_rho_op"};
    const auto f = build_filter(c);
    const auto ops = filter::a_operators(f);
    const auto cmp = filter::compare_proposals(f, optional_vector(c, "model.y", f.obs_dim(), 0.0), 0, c.seed());
    auto& row = t.add_row();
    t.set(row, "model", type);
    t.set(row, "form", c.text("model.form"));
    t.set(row, "tau_st", ops.dims_st.tau);
    t.set(row, "efd_st", ops.dims_st.efd);
    t.set(row, "tau_op", ops.dims_op.tau);
    t.set(row, "efd_op", ops.dims_op.efd);
    t.set(row, "log_rho_st", cmp.log_rho_st);
    t.set(row, "log_rho_op", cmp.log_rho_op);
    result.summaries.push_back("filter: tau_st " + format_number(ops.dims_st.tau) + ", tau_op " +
                               format_number(ops.dims_op.tau));
  }
  return result;
}

Result sweep_cascade(const ExperimentConfig& c) {
  inverse::Table1Grid grid;
  if (c.has("grid.gamma")) {
    grid.gamma = c.reals("grid.gamma");
  }
  if (c.has("grid.d")) {
    grid.d = c.integers("grid.d");
  }
  if (c.has("grid.beta")) {
    grid.beta = c.reals("grid.beta");
  }
  grid.beta_fixed = c.real("model.beta");
  grid.gamma_fixed = c.real("model.gamma");
  grid.d_fixed = c.integer("model.d");
  grid.alpha = c.real("grid.alpha");
  grid.d_max = c.integer("grid.d_max");
  grid.data_seeds = c.integer("grid.data_seeds");
  const auto regime = inverse::regime_from_string(c.text("grid.regime"));
  const auto report = inverse::sweep_table1(regime, grid, c.seed());

  Result result;
  result.notes.push_back(report.data_note);
  auto& t = result.table;
  t.columns = with_fit_columns({"record", "regime", "parameter", "beta", "gamma", "d", "infinite_d", "tau", "efd",
                                "log_rho_q25", "log_rho_median", "log_rho_q75", "verdict"});
  for (const auto& r : report.rows) {
    auto& row = t.add_row();
    t.set(row, "record", std::string("row"));
    t.set(row, "regime", inverse::to_string(regime));
    t.set(row, "parameter", r.parameter);
    t.set(row, "beta", r.beta);
    t.set(row, "gamma", r.gamma);
    t.set(row, "d", static_cast<std::uint64_t>(r.d));
    t.set(row, "infinite_d", r.infinite_d);
    t.set(row, "tau", r.tau);
    t.set(row, "efd", r.efd);
    t.set(row, "log_rho_q25", r.log_rho.q25);
    t.set(row, "log_rho_median", r.log_rho.median);
    t.set(row, "log_rho_q75", r.log_rho.q75);
    t.set(row, "verdict", std::string(!r.infinite_d ? "finite" : (r.converged ? "converged" : "inf")));
    result.summaries.push_back(report.parameter_name + " = " + format_number(r.parameter) + ": tau " +
                               format_number(r.tau) + ", efd " + format_number(r.efd) + ", median log rho " +
                               format_number(r.log_rho.median));
  }
  for (const auto& f : report.fits) {
    add_fit_row(result, f.quantity, f.regressor, f.fit);
  }
  return result;
}

Result verify_bounds(const ExperimentConfig& c) {
  const auto model = sampler::gaussian_shift_model(c.real("model.shift"), c.integer("model.dim"));
  const auto tests = sampler::bounded_test_family(c.real("model.shift"));
  const auto replications = c.integer("run.replications");
  Result result;
  result.notes.push_back("replication r of grid point i uses derive_seed(derive_seed(seed, i), r)");
  auto& t = result.table;
  t.columns = {"model", "test", "n_particles", "replications", "rho", "bias", "se_bias", "bias_bound", "bias_ok",
               "mse", "se_mse", "mse_bound", "mse_ok"};
  const auto ns = c.integers("grid.n");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    for (const auto& rep :
         sampler::bias_mse_experiment(model, tests, ns[i], replications, derive_seed(c.seed(), i))) {
      auto& row = t.add_row();
      t.set(row, "model", rep.model_id);
      t.set(row, "test", rep.test_name);
      t.set(row, "n_particles", static_cast<std::uint64_t>(rep.n_particles));
      t.set(row, "replications", static_cast<std::uint64_t>(rep.replications));
      t.set(row, "rho", rep.rho);
      t.set(row, "bias", rep.empirical_bias);
      t.set(row, "se_bias", rep.std_error_bias);
      t.set(row, "bias_bound", rep.bias_bound);
      t.set(row, "bias_ok", rep.bias_within_bound());
      t.set(row, "mse", rep.empirical_mse);
      t.set(row, "se_mse", rep.std_error_mse);
      t.set(row, "mse_bound", rep.mse_bound);
      t.set(row, "mse_ok", rep.mse_within_bound());
      result.summaries.push_back(rep.test_name + " N=" + std::to_string(rep.n_particles) + ": mse " +
                                 format_number(rep.empirical_mse) + " <= " + format_number(rep.mse_bound) + " " +
                                 (rep.mse_within_bound() ? "ok" : "VIOLATED") + ", |bias| " +
                                 format_number(std::abs(rep.empirical_bias)) + " <= " +
                                 format_number(rep.bias_bound) + " " + (rep.bias_within_bound() ? "ok" : "VIOLATED"));
    }
  }
  return result;
}

Result filter_compare(const ExperimentConfig& c) {
  const auto f = build_filter(c);
  const Eigen::VectorXd y = optional_vector(c, "model.y", f.obs_dim(), 0.0);
  const auto n = c.integer("run.n_particles");
  const auto cmp = filter::compare_proposals(f, y, n, c.seed());
  const auto ops = filter::a_operators(f);
  Result result;
  auto& t = result.table;
  t.columns = {"form", "state_dim", "tau_st", "tau_op", "efd_st", "efd_op", "log_rho_st", "log_rho_op",
               "st_exceeds_op", "n_particles", "mc_log_rho_st", "mc_log_rho_st_se", "mc_log_rho_op",
               "mc_log_rho_op_se", "ess_st", "ess_op"};
  auto& row = t.add_row();
  t.set(row, "form", c.text("model.form"));
  t.set(row, "state_dim", static_cast<std::uint64_t>(f.state_dim()));
  t.set(row, "tau_st", ops.dims_st.tau);
  t.set(row, "tau_op", ops.dims_op.tau);
  t.set(row, "efd_st", ops.dims_st.efd);
  t.set(row, "efd_op", ops.dims_op.efd);
  t.set(row, "log_rho_st", cmp.log_rho_st);
  t.set(row, "log_rho_op", cmp.log_rho_op);
  t.set(row, "st_exceeds_op", cmp.st_exceeds_op);
  t.set(row, "n_particles", static_cast<std::uint64_t>(n));
  if (cmp.mc_st && cmp.mc_op) {
    t.set(row, "mc_log_rho_st", cmp.mc_st->rho.log_rho);
    t.set(row, "mc_log_rho_st_se", cmp.mc_st->rho.log_std_error);
    t.set(row, "mc_log_rho_op", cmp.mc_op->rho.log_rho);
    t.set(row, "mc_log_rho_op_se", cmp.mc_op->rho.log_std_error);
    t.set(row, "ess_st", cmp.mc_st->ess);
    t.set(row, "ess_op", cmp.mc_op->ess);
  }
  result.summaries.push_back("log rho_st " + format_number(cmp.log_rho_st) + ", log rho_op " +
                             format_number(cmp.log_rho_op) + ", rho_st > rho_op: " +
                             (cmp.st_exceeds_op ? "true" : "false"));
  return result;
}

Result sweep_filter(const ExperimentConfig& c) {
  Result result;
  auto& t = result.table;
  const std::string driver = c.text("grid.driver");
  if (driver == "truncation") {
    const double p = c.real("model.p");
    const double decay = c.real("grid.p_decay");
    const auto family = filter::identity_dynamics_family(
        [p, decay](std::size_t j) { return p * std::pow(static_cast<double>(j), -decay); });
    result.notes.push_back("M = H = Q = R = I with P eigenvalues p j^-p_decay; log rho at y1 = 0");
    t.columns = {"record", "quantity", "d", "at_d", "at_2d", "verdict"};
    for (std::size_t d : c.integers("grid.d")) {
      for (const auto& v : filter::truncation_verdicts(family, d)) {
        auto& row = t.add_row();
        t.set(row, "record", std::string("verdict"));
        t.set(row, "quantity", v.quantity);
        t.set(row, "d", static_cast<std::uint64_t>(v.d));
        t.set(row, "at_d", v.at_d);
        t.set(row, "at_2d", v.at_2d);
        t.set(row, "verdict", std::string(v.converged ? "converged" : "inf"));
        result.summaries.push_back(v.quantity + " d=" + std::to_string(v.d) + ": " +
                                   (v.converged ? "converged" : "divergent"));
      }
    }
    return result;
  }

  filter::FilterGrid grid;
  grid.init = filter::initialization_from_string(c.text("grid.init"));
  grid.driver = filter::filter_driver_from_string(driver);
  if (c.has("grid.r")) {
    grid.r = c.reals("grid.r");
  }
  if (c.has("grid.d")) {
    grid.d = c.integers("grid.d");
  }
  grid.m = c.real("model.m");
  grid.h = c.real("model.h");
  grid.r_fixed = c.real("model.r");
  grid.q_fixed = c.real("model.q");
  grid.p_fixed = c.real("model.p");
  grid.d_fixed = c.integer("model.d");
  grid.data_seeds = c.integer("grid.data_seeds");
  const auto report = filter::sweep_tables34(grid, c.seed());
  result.notes.push_back(report.data_note);
  t.columns = with_fit_columns({"record", "init", "r", "q", "p", "d", "lambda_st", "lambda_op", "tau_st", "tau_op",
                                "efd_st", "efd_op", "log_rho_st", "log_rho_op"});
  for (const auto& r : report.rows) {
    auto& row = t.add_row();
    t.set(row, "record", std::string("row"));
    t.set(row, "init", filter::to_string(r.init));
    t.set(row, "r", r.r);
    t.set(row, "q", r.q);
    t.set(row, "p", r.p);
    t.set(row, "d", static_cast<std::uint64_t>(r.d));
    t.set(row, "lambda_st", r.lambda_st);
    t.set(row, "lambda_op", r.lambda_op);
    t.set(row, "tau_st", r.tau_st);
    t.set(row, "tau_op", r.tau_op);
    t.set(row, "efd_st", r.efd_st);
    t.set(row, "efd_op", r.efd_op);
    t.set(row, "log_rho_st", r.log_rho_st);
    t.set(row, "log_rho_op", r.log_rho_op);
    result.summaries.push_back("r = " + format_number(r.r) + ", d = " + std::to_string(r.d) + ": log rho_st " +
                               format_number(r.log_rho_st) + ", log rho_op " + format_number(r.log_rho_op));
  }
  for (const auto& f : report.fits) {
    add_fit_row(result, f.quantity, f.regressor, f.fit);
  }
  return result;
}

Result deconvolve_demo(const ExperimentConfig& c) {
  const double t_exp = c.real("model.t");
  const double s_exp = c.real("model.s");
  const auto d = c.integer("model.d");
  const double decay = c.real("model.truth_decay");
  Eigen::VectorXd truth(static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < truth.size(); ++j) {
    truth(j) = std::pow(static_cast<double>(j + 1), -decay);
  }
  Result result;
  result.notes.push_back("Fourier coefficients of the data: truth j^-truth_decay plus noise from derive_seed(seed, 0)");
  auto& t = result.table;
  t.columns = {"t", "s", "beta", "gamma", "d", "tau", "efd", "log_rho"};
  for (double gamma : c.reals("grid.gamma")) {
    const auto cascade = inverse::deconvolution_model(t_exp, s_exp, d, gamma, truth);
    const Eigen::VectorXd y = inverse::generate_data(cascade, derive_seed(c.seed(), 0));
    const auto dims = inverse::intrinsic_dims(cascade.eigenvalues());
    const double log_rho = inverse::cascade_log_rho(cascade, y);
    auto& row = t.add_row();
    t.set(row, "t", t_exp);
    t.set(row, "s", s_exp);
    t.set(row, "beta", cascade.beta());
    t.set(row, "gamma", gamma);
    t.set(row, "d", static_cast<std::uint64_t>(d));
    t.set(row, "tau", dims.tau);
    t.set(row, "efd", dims.efd);
    t.set(row, "log_rho", log_rho);
    result.summaries.push_back("gamma = " + format_number(gamma) + ": tau " + format_number(dims.tau) + ", efd " +
                               format_number(dims.efd) + ", log rho " + format_number(log_rho));
  }
  return result;
}

Result singular_limit(const ExperimentConfig& c) {
  const auto potential = c.text("model.kind") == "flat"
                             ? measures::ScalarPotential::flat()
                             : measures::ScalarPotential::quadratic(c.real("model.curvature"), c.real("model.center"));
  const measures::DiagonalGaussian proposal(Eigen::VectorXd::Constant(1, c.real("model.proposal_mean")),
                                            Eigen::VectorXd::Constant(1, c.real("model.proposal_var")));
  const auto report =
      sampler::singular_limit_sweep(potential, proposal, c.reals("grid.epsilon"), c.integer("run.n_particles"),
                                    c.seed());
  Result result;
  result.notes.push_back("Monte Carlo row i uses derive_seed(seed, i)");
  auto& t = result.table;
  t.columns = with_fit_columns(
      {"record", "epsilon", "log_rho_reference", "log_rho_mc", "log_rho_mc_se", "laplace_rate"});
  for (const auto& r : report.rows) {
    auto& row = t.add_row();
    t.set(row, "record", std::string("row"));
    t.set(row, "epsilon", r.epsilon);
    t.set(row, "log_rho_reference", r.reference_log_rho);
    t.set(row, "log_rho_mc", r.mc.log_rho);
    t.set(row, "log_rho_mc_se", r.mc.log_std_error);
    t.set(row, "laplace_rate", r.rate);
    result.summaries.push_back("epsilon = " + format_number(r.epsilon) + ": log rho " +
                               format_number(r.reference_log_rho) + " (MC " + format_number(r.mc.log_rho) + ")");
  }
  if (report.reference_fit) {
    add_fit_row(result, "log_rho_reference", "log(1/epsilon)", *report.reference_fit);
  }
  if (report.mc_fit) {
    add_fit_row(result, "log_rho_mc", "log(1/epsilon)", *report.mc_fit);
  }
  return result;
}

Result product_collapse(const ExperimentConfig& c) {
  sampler::CollapseOptions options;
  options.mc_max_d = c.integer("grid.mc_max_d");
  options.n = c.integer("run.n_particles");
  options.seed = c.seed();
  const auto rows = sampler::product_collapse_sweep(c.real("model.rho_1"), c.integers("grid.d"), options);
  Result result;
  result.notes.push_back("Monte Carlo row i uses derive_seed(seed, i) on the Gaussian shift with shift^2 = log rho_1");
  auto& t = result.table;
  t.columns = {"d", "log_rho_exact", "mc_log_rho", "mc_log_rho_se", "mc_rho", "mc_rho_se"};
  for (const auto& r : rows) {
    auto& row = t.add_row();
    t.set(row, "d", static_cast<std::uint64_t>(r.d));
    t.set(row, "log_rho_exact", r.log_rho_exact);
    std::string summary = "d = " + std::to_string(r.d) + ": log rho " + format_number(r.log_rho_exact);
    if (r.mc) {
      t.set(row, "mc_log_rho", r.mc->log_rho);
      t.set(row, "mc_log_rho_se", r.mc->log_std_error);
      t.set(row, "mc_rho", r.mc->rho);
      t.set(row, "mc_rho_se", r.mc->std_error);
      summary += " (MC " + format_number(r.mc->log_rho) + ")";
    }
    result.summaries.push_back(summary);
  }
  return result;
}

}  // namespace

Result run_experiment(const ExperimentConfig& config) {
  switch (config.command()) {
    case Command::diagnose:
      return diagnose(config);
    case Command::sweep_cascade:
      return sweep_cascade(config);
    case Command::verify_bounds:
      return verify_bounds(config);
    case Command::filter_compare:
      return filter_compare(config);
    case Command::sweep_filter:
      return sweep_filter(config);
    case Command::deconvolve_demo:
      return deconvolve_demo(config);
    case Command::singular_limit:
      return singular_limit(config);
    case Command::product_collapse:
      return product_collapse(config);
  }
  throw InvalidArgument("unhandled command");
}

std::string run_to_string(const std::string& config_text, const std::vector<std::string>& overrides) {
  IniDocument doc = IniDocument::parse(config_text);
  for (const auto& o : overrides) {
    doc.set(o);
  }
  const auto config = validate(doc);
  return render(run_experiment(config), config, RenderOptions{false});
}

}  // namespace isdim::cli
