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

#ifndef ISDIM_FILTER_HPP
#define ISDIM_FILTER_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <isdim/inverse.hpp>
#include <isdim/measures.hpp>
#include <isdim/sampler.hpp>

namespace isdim::filter {

enum class ProposalKind { standard, optimal };

std::string to_string(ProposalKind kind);

enum class FilterForm { scalar_identity, dense };

/// v1 = M v0 + xi, y1 = H v1 + eta with v0 ~ N(0, P), xi ~ N(0, Q), eta ~ N(0, R).
///
/// The scalar-identity form stores each operator as a multiple of the identity
/// in dimension d; spectra are then available in closed form.
class OneStepFilter {
 public:
  /// Throws DefinitenessError("covariance scalar must be positive") unless p, q, r > 0.
  static OneStepFilter scalar_identity(double m, double h, double p, double q, double r, std::size_t d);
  static OneStepFilter dense(Eigen::MatrixXd m, Eigen::MatrixXd h, Eigen::MatrixXd p, Eigen::MatrixXd q,
                             Eigen::MatrixXd r);

  [[nodiscard]] FilterForm form() const noexcept { return form_; }
  [[nodiscard]] bool is_scalar() const noexcept { return form_ == FilterForm::scalar_identity; }
  [[nodiscard]] Eigen::Index state_dim() const noexcept;
  [[nodiscard]] Eigen::Index obs_dim() const noexcept;

  /// Scalar-identity form only; throw FormError otherwise.
  [[nodiscard]] double m() const;
  [[nodiscard]] double h() const;
  [[nodiscard]] double p() const;
  [[nodiscard]] double q() const;
  [[nodiscard]] double r() const;

  [[nodiscard]] Eigen::MatrixXd M() const;
  [[nodiscard]] Eigen::MatrixXd H() const;
  [[nodiscard]] Eigen::MatrixXd P() const;
  [[nodiscard]] Eigen::MatrixXd Q() const;
  [[nodiscard]] Eigen::MatrixXd R() const;

  /// Copy with the initial covariance replaced (scalar or dense to match the form).
  [[nodiscard]] OneStepFilter with_p(double p) const;
  [[nodiscard]] OneStepFilter with_p(const Eigen::MatrixXd& p) const;

 private:
  OneStepFilter() = default;
  FilterForm form_ = FilterForm::scalar_identity;
  double m_ = 1.0;
  double h_ = 1.0;
  double p_ = 1.0;
  double q_ = 1.0;
  double r_ = 1.0;
  std::size_t d_ = 1;
  Eigen::MatrixXd mm_;
  Eigen::MatrixXd hm_;
  Eigen::MatrixXd pm_;
  Eigen::MatrixXd qm_;
  Eigen::MatrixXd rm_;
};

/// Sigma = M P M^T + Q, K = H, Gamma = R.
inverse::LinearGaussianIP standard_reduction(const OneStepFilter& f);
/// Sigma = P, K = H M, Gamma = R + H Q H^T.
inverse::LinearGaussianIP optimal_reduction(const OneStepFilter& f);
inverse::LinearGaussianIP reduction(const OneStepFilter& f, ProposalKind kind);

/// Per-coordinate eigenvalues of the scalar-identity family.
double lambda_standard(double m, double h, double p, double q, double r);
double lambda_optimal(double m, double h, double p, double q, double r);

struct ProposalOperators {
  inverse::OperatorA a_st;
  inverse::OperatorA a_op;
  inverse::IntrinsicDims dims_st;
  inverse::IntrinsicDims dims_op;
};

/// A_st = (MPM^T+Q)^{1/2} H^T R^{-1} H (MPM^T+Q)^{1/2} and
/// A_op = P^{1/2} M^T H^T (R+HQH^T)^{-1} H M P^{1/2}, formed directly and
/// checked against operator_a of the reductions (ConsistencyError above 1e-10).
ProposalOperators a_operators(const OneStepFilter& f);

/// Law of v1 given (v0, y1): N(m, Xi) with Xi = Q - Q H^T (HQH^T+R)^{-1} H Q and
/// m = M v0 + Q H^T (HQH^T+R)^{-1} (y1 - H M v0). Throws DefinitenessError if Xi is not SPD.
measures::DenseGaussian conditioned_dynamics(const OneStepFilter& f, const Eigen::VectorXd& v0,
                                             const Eigen::VectorXd& y1);

/// Fixed point ((q^2 + 4qr)^{1/2} - q) / 2 of the covariance recursion for
/// M = H = I, Q = qI, R = rI. Throws FormError outside that family and
/// ConsistencyError if kalman_update does not reproduce it to 1e-10.
double stationary_covariance(const OneStepFilter& f);

/// One covariance cycle: Sigma' = M P M^T + Q, C' = Sigma' - Sigma' H^T (H Sigma' H^T + R)^{-1} H Sigma'.
Eigen::MatrixXd kalman_update(const OneStepFilter& f, const Eigen::MatrixXd& p);
/// Scalar-identity overload acting on the scalar p.
double kalman_update(const OneStepFilter& f, double p);

struct MonteCarloProposal {
  sampler::RhoEstimate rho;
  double ess = 0.0;
};

struct ProposalComparison {
  double log_rho_st = 0.0;
  double log_rho_op = 0.0;
  /// Closed-form rho_st > rho_op.
  bool st_exceeds_op = false;
  std::optional<MonteCarloProposal> mc_st;
  std::optional<MonteCarloProposal> mc_op;
};

/// Closed-form log rho of both reductions for data y1 and, when n > 0, Monte
/// Carlo estimates drawing from each reduction's prior and weighting by its g.
ProposalComparison compare_proposals(const OneStepFilter& f, const Eigen::VectorXd& y1, std::size_t n,
                                     std::uint64_t seed);

enum class Initialization { stationary, fixed_p };
std::string to_string(Initialization init);
Initialization initialization_from_string(const std::string& name);

/// Which parameter drives a filter sweep.
enum class FilterDriver { r, r_equals_q, d };
std::string to_string(FilterDriver driver);
FilterDriver filter_driver_from_string(const std::string& name);

struct FilterGrid {
  Initialization init = Initialization::stationary;
  FilterDriver driver = FilterDriver::r;
  std::vector<double> r;
  std::vector<std::size_t> d;
  double m = 1.0;
  double h = 1.0;
  double r_fixed = 1.0;
  double q_fixed = 1.0;
  /// Initial covariance for fixed_p; ignored for stationary.
  double p_fixed = 1.0;
  std::size_t d_fixed = 3;
  std::size_t data_seeds = 32;
};

struct FilterRow {
  Initialization init = Initialization::stationary;
  double r = 0.0;
  double q = 0.0;
  /// Scalar initial covariance (P-infinity for stationary rows).
  double p = 0.0;
  std::size_t d = 0;
  double lambda_st = 0.0;
  double lambda_op = 0.0;
  double tau_st = 0.0;
  double tau_op = 0.0;
  double efd_st = 0.0;
  double efd_op = 0.0;
  /// Medians over the data seeds.
  double log_rho_st = 0.0;
  double log_rho_op = 0.0;
};

struct FilterReport {
  FilterGrid grid;
  std::vector<FilterRow> rows;
  std::vector<inverse::ScalingFit> fits;
  std::string data_note;
  [[nodiscard]] const inverse::ScalingFit& fit(const std::string& quantity) const;
};

/// Scalar-identity sweep. Data y1 = r^{1/2} xi (truth 0), one dataset per
/// (grid index, seed index), medians reported. Fits:
///  - r and r_equals_q drivers: log_rho_st, log_rho_op vs log(1/r); for
///    stationary rows also log_p vs log(r)
///  - d driver: log_rho_st, log_rho_op, tau_st, tau_op vs d
/// Throws FitError with fewer than 3 grid points.
FilterReport sweep_tables34(const FilterGrid& grid, std::uint64_t seed);

/// Coordinate-wise (diagonal) filter whose parameters may vary with the index
/// j = 1, 2, ..., used to examine truncations of an infinite-dimensional model.
struct DiagonalFilterFamily {
  std::function<double(std::size_t)> m;
  std::function<double(std::size_t)> h;
  std::function<double(std::size_t)> p;
  std::function<double(std::size_t)> q;
  std::function<double(std::size_t)> r;
};

/// M = H = Q = R = I with P eigenvalues p(j).
DiagonalFilterFamily identity_dynamics_family(std::function<double(std::size_t)> p);

struct TruncationVerdict {
  std::string quantity;
  std::size_t d = 0;
  double at_d = 0.0;
  double at_2d = 0.0;
  /// Relative change under doubling below 0.5%; otherwise the quantity is divergent.
  bool converged = false;
};

/// tau, efd and log rho (y1 = 0) of both proposals at truncations d and 2d.
std::vector<TruncationVerdict> truncation_verdicts(const DiagonalFilterFamily& family, std::size_t d);

}  // namespace isdim::filter

#endif
