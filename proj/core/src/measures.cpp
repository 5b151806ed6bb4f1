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

#include <isdim/measures.hpp>

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include <isdim/errors.hpp>
#include <isdim/numerics.hpp>
#include <isdim/random.hpp>

namespace isdim::measures {

namespace {

// Target variances must stay below twice the proposal variance.
constexpr double kRatioGuard = 1e-12;

void check_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
  }
}

// Generalized eigenproblem target_cov v = lambda proposal_cov v, with
// V^T proposal_cov V = I; returns (lambda, V^T (target_mean - proposal_mean)).
std::pair<Eigen::VectorXd, Eigen::VectorXd> simultaneous_frame(const DenseGaussian& target,
                                                                const DenseGaussian& proposal) {
  check_same_dim(target.dim(), proposal.dim(), "dense Gaussian pair");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      target.covariance(), proposal.covariance(), Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) {
    throw DefinitenessError("generalized eigendecomposition failed");
  }
  Eigen::VectorXd shift = solver.eigenvectors().transpose() * (target.mean() - proposal.mean());
  return {solver.eigenvalues(), std::move(shift)};
}

double log_rho_coordinate(double ratio, double scaled_shift_sq) {
  if (!(ratio < 2.0 - kRatioGuard)) {
    throw NonIntegrableError("second moment of the density is infinite: variance ratio " +
                             std::to_string(ratio) + " is not below 2");
  }
  return -0.5 * std::log(ratio) - 0.5 * std::log(2.0 - ratio) + scaled_shift_sq / (2.0 - ratio);
}

}  // namespace

DiagonalGaussian::DiagonalGaussian(Eigen::VectorXd mean, Eigen::VectorXd variance)
    : mean_(std::move(mean)), variance_(std::move(variance)) {
  check_same_dim(mean_.size(), variance_.size(), "DiagonalGaussian");
  for (Eigen::Index i = 0; i < variance_.size(); ++i) {
    if (!(variance_(i) > 0.0) || !std::isfinite(variance_(i))) {
      throw DefinitenessError("DiagonalGaussian: variance " + std::to_string(i) + " is not positive (" +
                              std::to_string(variance_(i)) + ")");
    }
  }
}

DiagonalGaussian DiagonalGaussian::standard(Eigen::Index dim) {
  return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
}

DenseGaussian DiagonalGaussian::to_dense() const {
  return {mean_, variance_.asDiagonal().toDenseMatrix()};
}

DenseGaussian::DenseGaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  if (covariance_.rows() != covariance_.cols()) {
    throw DimensionError("DenseGaussian: covariance is not square");
  }
  check_same_dim(mean_.size(), covariance_.rows(), "DenseGaussian");
  if (!is_symmetric(covariance_, 1e-12)) {
    throw InvalidArgument("DenseGaussian: covariance is not symmetric");
  }
  covariance_ = 0.5 * (covariance_ + covariance_.transpose()).eval();
  covariance_sqrt_ = symmetric_sqrt(covariance_);
}

ScalarPotential::ScalarPotential(std::function<double(double)> h, double u_star, double curvature)
    : h_(std::move(h)), u_star_(u_star), curvature_(curvature) {
  require(static_cast<bool>(h_), "ScalarPotential: empty evaluation rule");
  require(curvature_ > 0.0 && std::isfinite(curvature_), "ScalarPotential: curvature must be positive");
  const double h_min = h_(u_star_);
  require(h_min >= 0.0, "ScalarPotential: h must be nonnegative");
  const double slack = 1e-12 * (1.0 + std::abs(h_min));
  for (double step = 1e-3; step <= 1e2; step *= 1.5) {
    require(h_(u_star_ - step) + slack >= h_min && h_(u_star_ + step) + slack >= h_min,
            "ScalarPotential: u_star is not a minimizer of h on the check grid");
  }
}

ScalarPotential::ScalarPotential(FlatTag) : h_([](double) { return 0.0; }), flat_(true) {}

ScalarPotential ScalarPotential::quadratic(double curvature, double center) {
  return {[curvature, center](double u) { return 0.5 * curvature * (u - center) * (u - center); }, center,
          curvature};
}

ScalarPotential ScalarPotential::flat() { return ScalarPotential{FlatTag{}}; }

Eigen::MatrixXd sample(const DiagonalGaussian& g, std::size_t n, std::uint64_t seed) {
  require(n >= 1, "sample: n must be at least 1");
  Eigen::MatrixXd draws = standard_normal_matrix(static_cast<Eigen::Index>(n), g.dim(), seed);
  const Eigen::RowVectorXd scale = g.variance().array().sqrt().transpose();
  draws.array().rowwise() *= scale.array();
  draws.rowwise() += g.mean().transpose();
  return draws;
}

Eigen::MatrixXd sample(const DenseGaussian& g, std::size_t n, std::uint64_t seed) {
  require(n >= 1, "sample: n must be at least 1");
  Eigen::MatrixXd draws = standard_normal_matrix(static_cast<Eigen::Index>(n), g.dim(), seed);
  draws = draws * g.covariance_sqrt();  // factor is symmetric
  draws.rowwise() += g.mean().transpose();
  return draws;
}

Eigen::MatrixXd sample(const Gaussian& g, std::size_t n, std::uint64_t seed) {
  return std::visit([&](const auto& gaussian) { return sample(gaussian, n, seed); }, g);
}

double log_rho(const DiagonalGaussian& target, const DiagonalGaussian& proposal) {
  check_same_dim(target.dim(), proposal.dim(), "log_rho");
  CompensatedSum total;
  for (Eigen::Index i = 0; i < target.dim(); ++i) {
    const double ratio = target.variance()(i) / proposal.variance()(i);
    const double shift = target.mean()(i) - proposal.mean()(i);
    total.add(log_rho_coordinate(ratio, shift * shift / proposal.variance()(i)));
  }
  return total.value();
}

double log_rho(const DenseGaussian& target, const DenseGaussian& proposal) {
  const auto [ratios, shifts] = simultaneous_frame(target, proposal);
  CompensatedSum total;
  for (Eigen::Index i = 0; i < ratios.size(); ++i) {
    total.add(log_rho_coordinate(ratios(i), shifts(i) * shifts(i)));
  }
  return total.value();
}

double log_rho(const Gaussian& target, const Gaussian& proposal) {
  if (target.index() != proposal.index()) {
    throw InvalidArgument("log_rho: target and proposal must be of the same kind");
  }
  return std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        return log_rho(t, std::get<T>(proposal));
      },
      target);
}

double chi2_divergence(const DiagonalGaussian& target, const DiagonalGaussian& proposal) {
  return std::expm1(log_rho(target, proposal));
}

double chi2_divergence(const DenseGaussian& target, const DenseGaussian& proposal) {
  return std::expm1(log_rho(target, proposal));
}

double chi2_divergence(const Gaussian& target, const Gaussian& proposal) {
  return std::expm1(log_rho(target, proposal));
}

double kl_divergence(const DiagonalGaussian& target, const DiagonalGaussian& proposal) {
  check_same_dim(target.dim(), proposal.dim(), "kl_divergence");
  CompensatedSum total;
  for (Eigen::Index i = 0; i < target.dim(); ++i) {
    const double ratio = target.variance()(i) / proposal.variance()(i);
    const double shift = target.mean()(i) - proposal.mean()(i);
    total.add(ratio - 1.0 - std::log(ratio) + shift * shift / proposal.variance()(i));
  }
  return 0.5 * total.value();
}

double kl_divergence(const DenseGaussian& target, const DenseGaussian& proposal) {
  const auto [ratios, shifts] = simultaneous_frame(target, proposal);
  CompensatedSum total;
  for (Eigen::Index i = 0; i < ratios.size(); ++i) {
    total.add(ratios(i) - 1.0 - std::log(ratios(i)) + shifts(i) * shifts(i));
  }
  return 0.5 * total.value();
}

double kl_posterior_prior(const Eigen::VectorXd& a_spectrum, const Eigen::VectorXd& m,
                          const DiagonalGaussian& sigma) {
  check_same_dim(a_spectrum.size(), m.size(), "kl_posterior_prior");
  check_same_dim(m.size(), sigma.dim(), "kl_posterior_prior");
  CompensatedSum twice_kl;
  for (Eigen::Index i = 0; i < a_spectrum.size(); ++i) {
    const double lambda = a_spectrum(i);
    require(lambda >= 0.0, "kl_posterior_prior: spectrum entries must be nonnegative");
    twice_kl.add(std::log1p(lambda) - lambda / (1.0 + lambda));
    twice_kl.add(m(i) * m(i) / sigma.variance()(i));
  }
  return 0.5 * twice_kl.value();
}

double laplace_rho_rate(const ScalarPotential& potential, double epsilon) {
  require(epsilon > 0.0, "laplace_rho_rate: epsilon must be positive");
  if (potential.is_flat()) {
    throw FormError("laplace_rho_rate: a flat potential has no Laplace rate");
  }
  return std::sqrt(potential.curvature() / (4.0 * std::numbers::pi * epsilon));
}

}  // namespace isdim::measures
