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

#ifndef ISDIM_SAMPLER_HPP
#define ISDIM_SAMPLER_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <isdim/measures.hpp>
#include <isdim/numerics.hpp>

namespace isdim::sampler {

/// One particle: a row of an n x dim point matrix.
using PointRef = Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

/// log g(u) up to an additive constant, g the unnormalized target/proposal density.
using LogDensity = std::function<double(PointRef)>;

/// Draws an n x dim matrix of proposal samples for a given seed.
using ProposalSampler = std::function<Eigen::MatrixXd(std::size_t n, std::uint64_t seed)>;

using TestFunction = std::function<double(PointRef)>;

/// Normalized weights exp(l_i - logsumexp(l)). Throws DegenerateWeightsError
/// when the input is empty, contains NaN or +inf, or is entirely -inf.
Eigen::VectorXd normalize(const Eigen::VectorXd& log_unnorm_weights);

/// Particles with their log-domain and normalized weights.
class WeightedEnsemble {
 public:
  WeightedEnsemble(Eigen::MatrixXd points, Eigen::VectorXd log_unnorm_weights);

  [[nodiscard]] const Eigen::MatrixXd& points() const noexcept { return points_; }
  [[nodiscard]] const Eigen::VectorXd& log_unnorm_weights() const noexcept { return log_weights_; }
  [[nodiscard]] const Eigen::VectorXd& norm_weights() const noexcept { return weights_; }
  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }

 private:
  Eigen::MatrixXd points_;
  Eigen::VectorXd log_weights_;
  Eigen::VectorXd weights_;
};

Eigen::VectorXd evaluate_log_weights(const Eigen::MatrixXd& points, const LogDensity& log_g);

/// Draws n proposal samples and weighs them by g.
WeightedEnsemble weigh(const ProposalSampler& proposal, const LogDensity& log_g, std::size_t n,
                       std::uint64_t seed);

/// sum_n w^n phi(u^n).
double autonormalized_estimate(const WeightedEnsemble& ensemble, const TestFunction& phi);

/// (sum_n (w^n)^2)^{-1}, always in [1, N].
double ess(const WeightedEnsemble& ensemble);
double ess(const Eigen::VectorXd& norm_weights);

struct RhoEstimate {
  double rho = 1.0;
  double log_rho = 0.0;
  /// Jackknife standard error of rho.
  double std_error = 0.0;
  /// Jackknife standard error of log rho.
  double log_std_error = 0.0;
  std::size_t n = 0;
};

/// Ratio estimator of pi(g^2)/pi(g)^2 from log weights,
///   log rho = logsumexp(2l) - 2 logsumexp(l) + log n,
/// with a leave-one-block-out jackknife over `blocks` contiguous blocks.
RhoEstimate rho_from_log_weights(const Eigen::VectorXd& log_weights, std::size_t blocks = 100);

RhoEstimate rho_mc(const ProposalSampler& proposal, const LogDensity& log_g, std::size_t n,
                   std::uint64_t seed);

/// Proposal sampler and density of an importance sampling problem together
/// with its exact rho.
struct ImportanceModel {
  std::string id;
  Eigen::Index dim = 1;
  ProposalSampler draw;
  LogDensity log_g;
  double rho = 1.0;
};

/// Target N(shift * 1, I), proposal N(0, I) in `dim` coordinates;
/// rho = exp(dim * shift^2).
ImportanceModel gaussian_shift_model(double shift, Eigen::Index dim = 1);

/// Importance model whose proposal is the prior N(0, I) and g is constant.
ImportanceModel constant_weight_model(Eigen::Index dim = 1);

/// A test function with |phi| <= 1 and, when known, its exact target mean.
struct BoundedTest {
  std::string name;
  TestFunction phi;
  std::optional<double> target_mean;
};

/// The fixed bounded family evaluated on the first coordinate: tanh, sin,
/// clamp to [-1, 1], and 2 * 1{u > 0} - 1; exact means under a N(mean, 1)
/// target (tanh by adaptive quadrature, the others in closed form).
std::vector<BoundedTest> bounded_test_family(double target_mean_first_coordinate);

struct BoundReport {
  std::string model_id;
  std::string test_name;
  double empirical_bias = 0.0;
  double std_error_bias = 0.0;
  double empirical_mse = 0.0;
  double std_error_mse = 0.0;
  double rho = 1.0;
  std::size_t n_particles = 0;
  std::size_t replications = 0;
  /// 12 rho / N
  double bias_bound = 0.0;
  /// 4 rho / N
  double mse_bound = 0.0;

  /// Violation only counts beyond three standard errors of the empirical value.
  [[nodiscard]] bool mse_within_bound() const noexcept;
  [[nodiscard]] bool bias_within_bound() const noexcept;
};

/// Runs `replications` independent importance samplers of size n and reports
/// empirical bias and MSE per test function against 12 rho / N and 4 rho / N.
/// Replication r uses derive_seed(seed, r). Throws NoOracleError if a test
/// lacks an exact target mean, InvalidArgument if replications < 100.
std::vector<BoundReport> bias_mse_experiment(const ImportanceModel& model, const std::vector<BoundedTest>& tests,
                                             std::size_t n, std::size_t replications, std::uint64_t seed);

/// |ess * rho / n - 1| for one draw of n particles, rho taken from the model.
double ess_rho_consistency(const ImportanceModel& model, std::size_t n, std::uint64_t seed);

/// Hoelder exponents for the unbounded-test-function MSE constant.
struct CmseSpec {
  double d = 2.0;
  double e = 2.0;
  double p = 2.0;
  double q = 2.0;

  /// Throws InvalidArgument unless 1/d + 1/e = 1/p + 1/q = 1 (to 1e-12) and all lie in (1, inf).
  void validate() const;
  /// Central-moment order of g in the second term, 2e.
  [[nodiscard]] double second_term_order() const noexcept { return 2.0 * e; }
  /// Central-moment order of g in the third term, 2q(1 + 1/p).
  [[nodiscard]] double third_term_order() const noexcept { return 2.0 * q * (1.0 + 1.0 / p); }
};

/// C_t with C_t^{1/t} = t - 1.
double moment_constant(double t);

/// Moments under the proposal. m_t[h] = pi(|h - pi(h)|^t); phibar = phi - mu(phi).
struct CmseMoments {
  double pi_g2 = 0.0;                ///< pi(g^2)
  double m2_phi_g = 0.0;             ///< m_2[phi g]
  double abs_phi_g_pow_2d = 0.0;     ///< pi(|phi g|^{2d})
  double m_2e_g = 0.0;               ///< m_{2e}[g]
  double abs_phi_pow_2p = 0.0;       ///< pi(|phi|^{2p})
  double m_third_g = 0.0;            ///< m_{2q(1+1/p)}[g]
  double m2_g = 0.0;                 ///< m_2[g]
  double m2_phibar_g = 0.0;          ///< m_2[phibar g]
};

struct CmseBound {
  double c_mse = 0.0;
  double bias_constant = 0.0;
  [[nodiscard]] double mse_bound(std::size_t n) const noexcept { return c_mse / static_cast<double>(n); }
  [[nodiscard]] double bias_bound(std::size_t n) const noexcept {
    return bias_constant / static_cast<double>(n);
  }
};

/// Evaluates C_MSE (MSE <= C_MSE / N) and the matching bias constant. Throws
/// NotApplicableError if a moment is negative, infinite or NaN.
CmseBound cmse_bound(const CmseSpec& spec, double pi_g, const CmseMoments& moments);

struct CollapseRow {
  std::size_t d = 0;
  double log_rho_exact = 0.0;
  std::optional<RhoEstimate> mc;
};

struct CollapseOptions {
  /// Monte Carlo column is filled for d <= mc_max_d.
  std::size_t mc_max_d = 3;
  std::size_t n = 1'000'000;
  std::uint64_t seed = 1;
};

/// log rho_d = d log rho_1 for a product of d independent copies. The Monte
/// Carlo column uses the Gaussian shift with shift^2 = log rho_1.
/// Throws InvalidArgument if rho_1 < 1.
std::vector<CollapseRow> product_collapse_sweep(double rho_1, const std::vector<std::size_t>& d_values,
                                                const CollapseOptions& options = {});

struct SingularLimitRow {
  double epsilon = 0.0;
  RhoEstimate mc;
  /// sqrt(h'' / (4 pi eps)); NaN for a flat potential.
  double rate = 0.0;
  /// log rho by adaptive quadrature.
  double reference_log_rho = 0.0;
};

struct SingularLimitReport {
  std::vector<SingularLimitRow> rows;
  /// log rho_MC against log(1/eps).
  std::optional<LinearFit> mc_fit;
  /// Quadrature log rho against log(1/eps).
  std::optional<LinearFit> reference_fit;
};

/// log rho for g = exp(-h/eps) under a 1-D Gaussian proposal, by adaptive
/// Gauss-Kronrod quadrature around u* and the proposal mean.
double singular_limit_log_rho(const measures::ScalarPotential& potential, const measures::DiagonalGaussian& proposal,
                              double epsilon);

SingularLimitReport singular_limit_sweep(const measures::ScalarPotential& potential,
                                         const measures::DiagonalGaussian& proposal,
                                         const std::vector<double>& epsilons, std::size_t n, std::uint64_t seed);

}  // namespace isdim::sampler

#endif
