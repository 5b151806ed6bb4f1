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

#ifndef ISDIM_INVERSE_HPP
#define ISDIM_INVERSE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <isdim/measures.hpp>
#include <isdim/numerics.hpp>
#include <isdim/sampler.hpp>

namespace isdim::inverse {

enum class Form { diagonal, dense };

/// y = K u + eta with prior u ~ N(0, Sigma) and noise eta ~ N(0, Gamma).
///
/// The diagonal form stores per-coordinate multipliers and variances (d_u = d_y);
/// the dense form stores the matrices. Both forms materialize dense matrices on
/// request, so code written against the dense accessors works for either.
class LinearGaussianIP {
 public:
  static LinearGaussianIP diagonal(Eigen::VectorXd k, Eigen::VectorXd sigma, Eigen::VectorXd gamma);
  static LinearGaussianIP dense(Eigen::MatrixXd k, Eigen::MatrixXd sigma, Eigen::MatrixXd gamma);

  [[nodiscard]] Form form() const noexcept { return form_; }
  [[nodiscard]] bool is_diagonal() const noexcept { return form_ == Form::diagonal; }
  [[nodiscard]] Eigen::Index state_dim() const noexcept;
  [[nodiscard]] Eigen::Index data_dim() const noexcept;

  /// Diagonal form only; throw FormError otherwise.
  [[nodiscard]] const Eigen::VectorXd& k_diagonal() const;
  [[nodiscard]] const Eigen::VectorXd& sigma_diagonal() const;
  [[nodiscard]] const Eigen::VectorXd& gamma_diagonal() const;

  [[nodiscard]] Eigen::MatrixXd forward() const;
  [[nodiscard]] Eigen::MatrixXd prior_covariance() const;
  [[nodiscard]] Eigen::MatrixXd noise_covariance() const;

  [[nodiscard]] measures::Gaussian prior() const;

 private:
  LinearGaussianIP() = default;

  Form form_ = Form::diagonal;
  Eigen::VectorXd k_diag_;
  Eigen::VectorXd sigma_diag_;
  Eigen::VectorXd gamma_diag_;
  Eigen::MatrixXd k_;
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd gamma_;
};

/// A = S^T S with S = Gamma^{-1/2} K Sigma^{1/2}.
struct OperatorA {
  Form form = Form::diagonal;
  /// Eigenvalues, non-increasing.
  Eigen::VectorXd spectrum;
  /// Symmetric matrix Sigma^{1/2} K^T Gamma^{-1} K Sigma^{1/2}; empty for the diagonal form.
  Eigen::MatrixXd matrix;
};

/// Throws IllConditionedError when cond(Gamma) > 1e12, ConsistencyError if the
/// dense A fails to be positive-semidefinite to 1e-10 of its largest eigenvalue.
OperatorA operator_a(const LinearGaussianIP& ip);

struct IntrinsicDims {
  /// Tr(A)
  double tau = 0.0;
  /// Tr((I + A)^{-1} A)
  double efd = 0.0;
  /// Non-increasing spectrum of A.
  Eigen::VectorXd a_spectrum;
};

IntrinsicDims intrinsic_dims(const Eigen::VectorXd& spectrum);
IntrinsicDims intrinsic_dims(const Eigen::MatrixXd& a);
IntrinsicDims intrinsic_dims(const OperatorA& a);

/// Posterior N(m, C), computed both through the covariance formulas
/// C = Sigma - Sigma K^T (K Sigma K^T + Gamma)^{-1} K Sigma and through the
/// precision formulas C^{-1} = Sigma^{-1} + K^T Gamma^{-1} K,
/// C^{-1} m = K^T Gamma^{-1} y. Throws ConsistencyError if the routes differ by
/// more than 1e-8 relative. Diagonal problems return a DiagonalGaussian.
measures::Gaussian posterior(const LinearGaussianIP& ip, const Eigen::VectorXd& y);

/// log g(u; y) = -|Gamma^{-1/2} K u|^2 / 2 + <Gamma^{-1/2} y, Gamma^{-1/2} K u>,
/// the log density of the posterior with respect to the prior up to a constant.
double log_g(const LinearGaussianIP& ip, const Eigen::VectorXd& u, const Eigen::VectorXd& y);

/// Same density packaged for the sampler, with the solves done once.
sampler::LogDensity log_density(const LinearGaussianIP& ip, const Eigen::VectorXd& y);

/// Per-coordinate spectrum lambda_j = k_j^2 sigma_j / gamma_j and whitened data
/// z_j = y_j / sqrt(gamma_j) of a diagonal problem, in the original coordinate order.
struct WhitenedData {
  Eigen::VectorXd lambda;
  Eigen::VectorXd z;
};

WhitenedData whiten(const LinearGaussianIP& ip, const Eigen::VectorXd& y);

/// log rho = sum_j [log(1 + l_j) - log(1 + 2 l_j) / 2] + sum_j l_j z_j^2 / ((1 + l_j)(1 + 2 l_j)).
double rho_closed_form_diag(const Eigen::VectorXd& lambda, const Eigen::VectorXd& z);

/// log rho of posterior against prior for either form (dense: simultaneous diagonalization).
double log_rho(const LinearGaussianIP& ip, const Eigen::VectorXd& y);

/// The family with eigenvalues j^{-beta} / gamma, j = 1..d, Gamma = gamma I and
/// data generated from a fixed truth (coordinates of K u^dagger in the eigenbasis).
class SpectralCascade {
 public:
  /// truth may be shorter than d; missing coordinates are zero.
  SpectralCascade(double beta, double gamma, std::size_t d, Eigen::VectorXd truth = {});

  [[nodiscard]] double beta() const noexcept { return beta_; }
  [[nodiscard]] double gamma() const noexcept { return gamma_; }
  [[nodiscard]] std::size_t dim() const noexcept { return d_; }
  [[nodiscard]] const Eigen::VectorXd& truth() const noexcept { return truth_; }

  /// lambda_j for j = 1..d; values below 1e-300 gamma are flushed to zero.
  [[nodiscard]] Eigen::VectorXd eigenvalues() const;
  [[nodiscard]] double eigenvalue(std::size_t j) const;

  /// Diagonal realization K_j = j^{-beta/2}, Sigma = I, Gamma = gamma I.
  [[nodiscard]] LinearGaussianIP as_problem() const;

  [[nodiscard]] SpectralCascade truncated(std::size_t d) const;

 private:
  double beta_;
  double gamma_;
  std::size_t d_;
  Eigen::VectorXd truth_;
};

/// y_j = truth_j + sqrt(gamma) xi_j. Draws are generated in coordinate order
/// so that the first k entries do not depend on d.
Eigen::VectorXd generate_data(const SpectralCascade& cascade, std::uint64_t seed);

double cascade_log_rho(const SpectralCascade& cascade, const Eigen::VectorXd& y);

enum class Regime { small_noise_fixed_d, small_noise_infinite_d, large_d, joint, regularity };

std::string to_string(Regime regime);
/// Throws InvalidArgument on an unknown name.
Regime regime_from_string(const std::string& name);

/// Grid of a scaling sweep. Only the list matching the regime's driving
/// parameter is read; the other parameters come from the *_fixed fields.
struct Table1Grid {
  std::vector<double> gamma;
  std::vector<std::size_t> d;
  std::vector<double> beta;
  double beta_fixed = 1.0;
  double gamma_fixed = 1.0;
  std::size_t d_fixed = 4;
  /// gamma = d^{-alpha} in the joint regime.
  double alpha = 2.0;
  /// Truncation used for d = infinity.
  std::size_t d_max = 16384;
  /// Data seeds for rows whose claim holds in probability.
  std::size_t data_seeds = 32;
};

struct Table1Row {
  /// Value of the driving parameter.
  double parameter = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  /// Truncation level; for d = infinity this is d_max.
  std::size_t d = 0;
  bool infinite_d = false;
  double tau = 0.0;
  double efd = 0.0;
  Quartiles log_rho;
  /// d = infinity rows: every reported quantity changed by < 0.5% when the
  /// truncation doubled. Always true for finite d.
  bool converged = true;
};

struct ScalingFit {
  std::string quantity;
  std::string regressor;
  LinearFit fit;
};

struct ScalingReport {
  Regime regime = Regime::small_noise_fixed_d;
  std::string parameter_name;
  std::vector<Table1Row> rows;
  std::vector<ScalingFit> fits;
  /// How the data were generated (fixed dataset or median over seeds).
  std::string data_note;

  /// Throws InvalidArgument if no fit of that quantity exists.
  [[nodiscard]] const ScalingFit& fit(const std::string& quantity) const;
};

/// Sweeps one regime of the cascade family and fits the scalings of tau, efd
/// and log rho against the regime's driving parameter:
///  - small_noise_fixed_d: gamma grid, d = d_fixed; log tau, log efd, log rho vs log(1/gamma)
///  - small_noise_infinite_d: gamma grid, d = inf (beta > 1); log tau, log efd, log log rho vs log(1/gamma)
///  - large_d: d grid, beta < 1; tau, efd, log rho vs d^{1-beta}; log tau vs log d
///  - joint: d grid with gamma = d^{-alpha}; log tau, log efd vs log d; log rho vs d log d
///  - regularity: beta grid (> 1), d = inf; log tau, log efd vs log(1/(beta-1)); log rho vs 1/(beta-1)
/// Small-noise and joint rows use one fixed dataset (zero truth, fixed seed);
/// large_d and regularity rows report the median and quartiles over
/// data_seeds datasets with seeds derived from (seed, grid index, data index).
/// d = infinity is the truncation d_max plus an integral estimate of the tail,
/// checked against 2 d_max. Throws FitError with fewer than 3 grid points.
ScalingReport sweep_table1(Regime regime, const Table1Grid& grid, std::uint64_t seed);

/// Tau and efd of the infinite cascade (beta > 1): truncated sums plus tail integrals.
struct InfiniteCascadeDims {
  double tau = 0.0;
  double efd = 0.0;
  bool converged = false;
};

InfiniteCascadeDims infinite_cascade_dims(double beta, double gamma, std::size_t d_max = 16384);

struct SpectralJump {
  double tau = 0.0;
  double efd = 0.0;
  double kl = 0.0;
  /// Closed-form log rho.
  double log_rho = 0.0;
  /// (efd / 2) log C, the heuristic lower bound on log rho.
  double heuristic_log_rho_bound = 0.0;
  /// exp(KL) <= rho, the exact inequality.
  bool kl_bound_holds = false;
  /// C >= 10 and the tail sum <= 0.1.
  bool assumptions_hold = false;
};

/// k eigenvalues equal to `large` followed by `tail`; m is the posterior mean in
/// prior-whitened coordinates (Sigma = I), of length k + tail.size().
SpectralJump spectral_jump(std::size_t k, double large, const Eigen::VectorXd& tail, const Eigen::VectorXd& m);

/// Periodic deconvolution with kernel decay j^{-t} and prior decay j^{-2s}:
/// a cascade with beta = 2t + 2s (Fourier-diagonal, unit constant).
SpectralCascade deconvolution_model(double t, double s, std::size_t d, double gamma, Eigen::VectorXd truth = {});

}  // namespace isdim::inverse

#endif
