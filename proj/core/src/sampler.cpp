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

#include <isdim/sampler.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <isdim/errors.hpp>
#include <isdim/parallel.hpp>
#include <isdim/random.hpp>

namespace isdim::sampler {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double integrate(const std::function<double(double)>& f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

// E[phi(X)], X ~ N(mean, 1), for smooth phi without a closed form.
double gaussian_expectation(const std::function<double(double)>& phi, double mean) {
  auto integrand = [&](double x) { return phi(x) * normal_pdf(x - mean); };
  double total = 0.0;
  double lo = mean - 12.0;
  for (int k = 0; k < 24; ++k) {
    total += integrate(integrand, lo + k, lo + k + 1.0);
  }
  return total;
}

double first(PointRef u) { return u(0); }

}  // namespace

Eigen::VectorXd normalize(const Eigen::VectorXd& log_unnorm_weights) {
  if (log_unnorm_weights.size() == 0) {
    throw DegenerateWeightsError("normalize: empty weight vector");
  }
  for (Eigen::Index i = 0; i < log_unnorm_weights.size(); ++i) {
    const double l = log_unnorm_weights(i);
    if (std::isnan(l) || l == kInf) {
      throw DegenerateWeightsError("normalize: log weight " + std::to_string(i) + " is NaN or +inf");
    }
  }
  const double total = log_sum_exp(log_unnorm_weights);
  if (!std::isfinite(total)) {
    throw DegenerateWeightsError("normalize: every log weight is -inf");
  }
  // Scalar exp: the vectorized one clamps -inf to a denormal instead of 0.
  Eigen::VectorXd weights = (log_unnorm_weights.array() - total).unaryExpr([](double l) { return std::exp(l); });
  // Final rescale absorbs the rounding of the exponentials.
  const double sum = compensated_sum(std::span<const double>(weights.data(), static_cast<std::size_t>(weights.size())));
  weights /= sum;
  return weights;
}

WeightedEnsemble::WeightedEnsemble(Eigen::MatrixXd points, Eigen::VectorXd log_unnorm_weights)
    : points_(std::move(points)), log_weights_(std::move(log_unnorm_weights)) {
  if (points_.rows() != log_weights_.size()) {
    throw DimensionError("WeightedEnsemble: one log weight per particle required");
  }
  weights_ = normalize(log_weights_);
}

Eigen::VectorXd evaluate_log_weights(const Eigen::MatrixXd& points, const LogDensity& log_g) {
  Eigen::VectorXd log_weights(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    log_weights(i) = log_g(points.row(i));
  }
  return log_weights;
}

WeightedEnsemble weigh(const ProposalSampler& proposal, const LogDensity& log_g, std::size_t n,
                       std::uint64_t seed) {
  Eigen::MatrixXd points = proposal(n, seed);
  Eigen::VectorXd log_weights = evaluate_log_weights(points, log_g);
  return {std::move(points), std::move(log_weights)};
}

double autonormalized_estimate(const WeightedEnsemble& ensemble, const TestFunction& phi) {
  CompensatedSum sum;
  const auto& w = ensemble.norm_weights();
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) != 0.0) {
      sum.add(w(i) * phi(ensemble.points().row(i)));
    }
  }
  return sum.value();
}

double ess(const Eigen::VectorXd& norm_weights) {
  CompensatedSum sum;
  for (Eigen::Index i = 0; i < norm_weights.size(); ++i) {
    sum.add(norm_weights(i) * norm_weights(i));
  }
  return 1.0 / sum.value();
}

double ess(const WeightedEnsemble& ensemble) { return ess(ensemble.norm_weights()); }

RhoEstimate rho_from_log_weights(const Eigen::VectorXd& log_weights, std::size_t blocks) {
  const auto n = static_cast<std::size_t>(log_weights.size());
  require(n >= 2, "rho_mc: at least two samples are required");
  require(blocks >= 2, "rho_mc: jackknife needs at least two blocks");
  blocks = std::min(blocks, n);

  std::vector<double> block_l1(blocks);
  std::vector<double> block_l2(blocks);
  std::vector<double> block_size(blocks);
  std::vector<double> scratch1;
  std::vector<double> scratch2;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t begin = b * n / blocks;
    const std::size_t end = (b + 1) * n / blocks;
    scratch1.assign(log_weights.data() + begin, log_weights.data() + end);
    scratch2.resize(scratch1.size());
    std::transform(scratch1.begin(), scratch1.end(), scratch2.begin(), [](double l) { return 2.0 * l; });
    block_l1[b] = log_sum_exp(scratch1);
    block_l2[b] = log_sum_exp(scratch2);
    block_size[b] = static_cast<double>(end - begin);
  }

  auto combine = [&](std::size_t skip) {
    std::vector<double> l1;
    std::vector<double> l2;
    double count = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
      if (b == skip) {
        continue;
      }
      l1.push_back(block_l1[b]);
      l2.push_back(block_l2[b]);
      count += block_size[b];
    }
    return log_sum_exp(l2) - 2.0 * log_sum_exp(l1) + std::log(count);
  };

  RhoEstimate estimate;
  estimate.n = n;
  estimate.log_rho = combine(blocks);
  if (!std::isfinite(estimate.log_rho)) {
    throw DegenerateWeightsError("rho_mc: every log weight is -inf");
  }
  estimate.rho = std::exp(estimate.log_rho);

  std::vector<double> loo_log;
  std::vector<double> loo_rho;
  for (std::size_t b = 0; b < blocks; ++b) {
    const double value = combine(b);
    if (std::isfinite(value)) {
      loo_log.push_back(value);
      loo_rho.push_back(std::exp(value));
    }
  }
  if (loo_log.size() >= 2) {
    const double scale = static_cast<double>(loo_log.size() - 1);
    auto jackknife_se = [&](const std::vector<double>& values) {
      const double m = mean(values);
      CompensatedSum sum;
      for (double v : values) {
        sum.add((v - m) * (v - m));
      }
      return std::sqrt(scale / static_cast<double>(values.size()) * sum.value());
    };
    estimate.std_error = jackknife_se(loo_rho);
    estimate.log_std_error = jackknife_se(loo_log);
  } else {
    estimate.std_error = kInf;
    estimate.log_std_error = kInf;
  }
  return estimate;
}

RhoEstimate rho_mc(const ProposalSampler& proposal, const LogDensity& log_g, std::size_t n,
                   std::uint64_t seed) {
  require(n >= 2, "rho_mc: at least two samples are required");
  const Eigen::MatrixXd points = proposal(n, seed);
  return rho_from_log_weights(evaluate_log_weights(points, log_g));
}

ImportanceModel gaussian_shift_model(double shift, Eigen::Index dim) {
  require(dim >= 1, "gaussian_shift_model: dim must be positive");
  ImportanceModel model;
  model.id = "gaussian-shift";
  model.dim = dim;
  model.draw = [dim](std::size_t n, std::uint64_t seed) {
    return measures::sample(measures::DiagonalGaussian::standard(dim), n, seed);
  };
  const double offset = 0.5 * static_cast<double>(dim) * shift * shift;
  model.log_g = [shift, offset](PointRef u) { return shift * u.sum() - offset; };
  model.rho = std::exp(static_cast<double>(dim) * shift * shift);
  return model;
}

ImportanceModel constant_weight_model(Eigen::Index dim) {
  require(dim >= 1, "constant_weight_model: dim must be positive");
  ImportanceModel model;
  model.id = "constant-weight";
  model.dim = dim;
  model.draw = [dim](std::size_t n, std::uint64_t seed) {
    return measures::sample(measures::DiagonalGaussian::standard(dim), n, seed);
  };
  model.log_g = [](PointRef) { return 0.0; };
  model.rho = 1.0;
  return model;
}

std::vector<BoundedTest> bounded_test_family(double m) {
  std::vector<BoundedTest> family;
  family.push_back({"tanh", [](PointRef u) { return std::tanh(first(u)); },
                    gaussian_expectation([](double x) { return std::tanh(x); }, m)});
  family.push_back({"sin", [](PointRef u) { return std::sin(first(u)); }, std::sin(m) * std::exp(-0.5)});

  // E[clamp(X, -1, 1)] = E[X; |X| <= 1] + P(X > 1) - P(X < -1)
  const double inside = m * (normal_cdf(1.0 - m) - normal_cdf(-1.0 - m)) + normal_pdf(-1.0 - m) - normal_pdf(1.0 - m);
  const double clamp_mean = inside + normal_cdf(m - 1.0) - normal_cdf(-1.0 - m);
  family.push_back({"clamp", [](PointRef u) { return std::clamp(first(u), -1.0, 1.0); }, clamp_mean});

  family.push_back({"sign", [](PointRef u) { return first(u) > 0.0 ? 1.0 : -1.0; }, 2.0 * normal_cdf(m) - 1.0});
  return family;
}

bool BoundReport::mse_within_bound() const noexcept {
  return empirical_mse <= mse_bound + 3.0 * std_error_mse;
}

bool BoundReport::bias_within_bound() const noexcept {
  return std::abs(empirical_bias) <= bias_bound + 3.0 * std_error_bias;
}

std::vector<BoundReport> bias_mse_experiment(const ImportanceModel& model, const std::vector<BoundedTest>& tests,
                                             std::size_t n, std::size_t replications, std::uint64_t seed) {
  require(replications >= 100, "bias_mse_experiment: at least 100 replications are required");
  require(n >= 1, "bias_mse_experiment: n must be positive");
  for (const auto& test : tests) {
    if (!test.target_mean) {
      throw NoOracleError("bias_mse_experiment: no exact target mean for test function '" + test.name + "'");
    }
  }

  const std::size_t k = tests.size();
  std::vector<double> errors(replications * k);
  parallel_for(replications, [&](std::size_t r) {
    const WeightedEnsemble ensemble = weigh(model.draw, model.log_g, n, derive_seed(seed, r));
    for (std::size_t t = 0; t < k; ++t) {
      errors[r * k + t] = autonormalized_estimate(ensemble, tests[t].phi) - *tests[t].target_mean;
    }
  });

  std::vector<BoundReport> reports;
  std::vector<double> e(replications);
  std::vector<double> e2(replications);
  const double count = static_cast<double>(replications);
  for (std::size_t t = 0; t < k; ++t) {
    for (std::size_t r = 0; r < replications; ++r) {
      e[r] = errors[r * k + t];
      e2[r] = e[r] * e[r];
    }
    BoundReport report;
    report.model_id = model.id;
    report.test_name = tests[t].name;
    report.rho = model.rho;
    report.n_particles = n;
    report.replications = replications;
    report.empirical_bias = mean(e);
    report.std_error_bias = sample_stddev(e) / std::sqrt(count);
    report.empirical_mse = mean(e2);
    report.std_error_mse = sample_stddev(e2) / std::sqrt(count);
    report.bias_bound = 12.0 * model.rho / static_cast<double>(n);
    report.mse_bound = 4.0 * model.rho / static_cast<double>(n);
    reports.push_back(std::move(report));
  }
  return reports;
}

double ess_rho_consistency(const ImportanceModel& model, std::size_t n, std::uint64_t seed) {
  require(std::isfinite(model.rho) && model.rho >= 1.0, "ess_rho_consistency: rho must be finite");
  const WeightedEnsemble ensemble = weigh(model.draw, model.log_g, n, seed);
  return std::abs(ess(ensemble) * model.rho / static_cast<double>(n) - 1.0);
}

void CmseSpec::validate() const {
  for (double v : {d, e, p, q}) {
    require(v > 1.0 && std::isfinite(v), "CmseSpec: exponents must lie in (1, inf)");
  }
  require(std::abs(1.0 / d + 1.0 / e - 1.0) <= 1e-12, "CmseSpec: d and e are not conjugate");
  require(std::abs(1.0 / p + 1.0 / q - 1.0) <= 1e-12, "CmseSpec: p and q are not conjugate");
}

double moment_constant(double t) {
  require(t >= 2.0, "moment_constant: order must be at least 2");
  return std::pow(t - 1.0, t);
}

CmseBound cmse_bound(const CmseSpec& spec, double pi_g, const CmseMoments& moments) {
  spec.validate();
  const double values[] = {pi_g,
                           moments.pi_g2,
                           moments.m2_phi_g,
                           moments.abs_phi_g_pow_2d,
                           moments.m_2e_g,
                           moments.abs_phi_pow_2p,
                           moments.m_third_g,
                           moments.m2_g,
                           moments.m2_phibar_g};
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw NotApplicableError("cmse_bound: a required moment is infinite, NaN or negative");
    }
  }
  if (!(pi_g > 0.0)) {
    throw NotApplicableError("cmse_bound: pi(g) must be positive");
  }

  const double order_two = spec.second_term_order();
  const double order_three = spec.third_term_order();
  const double first_term = 3.0 / (pi_g * pi_g) * moments.m2_phi_g;
  const double second_term = 3.0 / std::pow(pi_g, 4.0) * std::pow(moments.abs_phi_g_pow_2d, 1.0 / spec.d) *
                             std::pow(moment_constant(order_two), 1.0 / spec.e) *
                             std::pow(moments.m_2e_g, 1.0 / spec.e);
  const double third_term = 3.0 / std::pow(pi_g, 2.0 * (1.0 + 1.0 / spec.p)) *
                            std::pow(moments.abs_phi_pow_2p, 1.0 / spec.p) *
                            std::pow(moment_constant(order_three), 1.0 / spec.q) *
                            std::pow(moments.m_third_g, 1.0 / spec.q);

  CmseBound bound;
  bound.c_mse = first_term + second_term + third_term;
  bound.bias_constant = 2.0 / (pi_g * pi_g) * std::sqrt(moments.m2_g) * std::sqrt(moments.m2_phibar_g) +
                        2.0 * std::sqrt(bound.c_mse) * std::sqrt(moments.pi_g2) / pi_g;
  if (!std::isfinite(bound.c_mse) || !std::isfinite(bound.bias_constant)) {
    throw NotApplicableError("cmse_bound: constant overflowed");
  }
  return bound;
}

std::vector<CollapseRow> product_collapse_sweep(double rho_1, const std::vector<std::size_t>& d_values,
                                                const CollapseOptions& options) {
  require(std::isfinite(rho_1) && rho_1 >= 1.0, "product_collapse_sweep: rho_1 must be at least 1");
  const double log_rho_1 = std::log(rho_1);
  const double shift = std::sqrt(log_rho_1);
  std::vector<CollapseRow> rows;
  rows.reserve(d_values.size());
  for (std::size_t i = 0; i < d_values.size(); ++i) {
    const std::size_t d = d_values[i];
    require(d >= 1, "product_collapse_sweep: d must be positive");
    CollapseRow row;
    row.d = d;
    row.log_rho_exact = static_cast<double>(d) * log_rho_1;
    if (d <= options.mc_max_d) {
      const auto model = gaussian_shift_model(shift, static_cast<Eigen::Index>(d));
      row.mc = rho_mc(model.draw, model.log_g, options.n, derive_seed(options.seed, i));
    }
    rows.push_back(row);
  }
  return rows;
}

double singular_limit_log_rho(const measures::ScalarPotential& potential, const measures::DiagonalGaussian& proposal,
                              double epsilon) {
  require(epsilon > 0.0, "singular_limit_log_rho: epsilon must be positive");
  require(proposal.dim() == 1, "singular_limit_log_rho: proposal must be one-dimensional");
  if (potential.is_flat()) {
    return 0.0;
  }
  const double mu = proposal.mean()(0);
  const double sd = std::sqrt(proposal.variance()(0));
  const double u_star = potential.minimizer();
  const double h_star = potential(u_star);
  const double width = std::sqrt(epsilon / potential.curvature());

  std::set<double> cuts;
  for (double k : {1.0, 5.0, 20.0, 60.0}) {
    cuts.insert(u_star - k * width);
    cuts.insert(u_star + k * width);
  }
  for (double k : {5.0, 20.0}) {
    cuts.insert(mu - k * sd);
    cuts.insert(mu + k * sd);
  }
  const std::vector<double> points(cuts.begin(), cuts.end());

  auto log_moment = [&](double power) {
    auto integrand = [&](double u) {
      const double z = (u - mu) / sd;
      return std::exp(-power * (potential(u) - h_star) / epsilon - 0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
    };
    double total = integrate(integrand, -kInf, points.front());
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
      total += integrate(integrand, points[i], points[i + 1]);
    }
    total += integrate(integrand, points.back(), kInf);
    return std::log(total);
  };
  // The exp(-k h* / eps) factors cancel between numerator and denominator.
  return log_moment(2.0) - 2.0 * log_moment(1.0);
}

SingularLimitReport singular_limit_sweep(const measures::ScalarPotential& potential,
                                         const measures::DiagonalGaussian& proposal,
                                         const std::vector<double>& epsilons, std::size_t n, std::uint64_t seed) {
  require(proposal.dim() == 1, "singular_limit_sweep: proposal must be one-dimensional");
  require(!epsilons.empty(), "singular_limit_sweep: empty epsilon grid");
  SingularLimitReport report;
  report.rows.resize(epsilons.size());
  const ProposalSampler draw = [&proposal](std::size_t count, std::uint64_t s) {
    return measures::sample(proposal, count, s);
  };
  parallel_for(epsilons.size(), [&](std::size_t i) {
    const double eps = epsilons[i];
    require(eps > 0.0, "singular_limit_sweep: epsilon must be positive");
    SingularLimitRow& row = report.rows[i];
    row.epsilon = eps;
    if (potential.is_flat()) {
      row.mc = RhoEstimate{1.0, 0.0, 0.0, 0.0, n};
      row.rate = std::numeric_limits<double>::quiet_NaN();
      row.reference_log_rho = 0.0;
      return;
    }
    const LogDensity log_g = [&potential, eps](PointRef u) { return -potential(u(0)) / eps; };
    row.mc = rho_mc(draw, log_g, n, derive_seed(seed, i));
    row.rate = measures::laplace_rho_rate(potential, eps);
    row.reference_log_rho = singular_limit_log_rho(potential, proposal, eps);
  });

  if (epsilons.size() >= 3 && !potential.is_flat()) {
    std::vector<double> x;
    std::vector<double> mc;
    std::vector<double> ref;
    for (const auto& row : report.rows) {
      x.push_back(std::log(1.0 / row.epsilon));
      mc.push_back(row.mc.log_rho);
      ref.push_back(row.reference_log_rho);
    }
    report.mc_fit = fit_line(x, mc);
    report.reference_fit = fit_line(x, ref);
  }
  return report;
}

}  // namespace isdim::sampler
