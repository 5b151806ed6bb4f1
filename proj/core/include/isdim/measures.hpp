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

#ifndef ISDIM_MEASURES_HPP
#define ISDIM_MEASURES_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <variant>

#include <Eigen/Core>

namespace isdim::measures {

class DenseGaussian;

/// Gaussian with independent coordinates, N(mean, diag(variance)).
class DiagonalGaussian {
 public:
  /// Throws DimensionError on length mismatch, DefinitenessError unless every
  /// variance is strictly positive and finite.
  DiagonalGaussian(Eigen::VectorXd mean, Eigen::VectorXd variance);

  static DiagonalGaussian standard(Eigen::Index dim);

  [[nodiscard]] Eigen::Index dim() const noexcept { return mean_.size(); }
  [[nodiscard]] const Eigen::VectorXd& mean() const noexcept { return mean_; }
  [[nodiscard]] const Eigen::VectorXd& variance() const noexcept { return variance_; }

  [[nodiscard]] DenseGaussian to_dense() const;

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd variance_;
};

/// Gaussian with a full covariance. The symmetric square root of the
/// covariance is computed once at construction and reused for sampling.
class DenseGaussian {
 public:
  /// Throws InvalidArgument if the covariance is not symmetric to 1e-12 of its
  /// largest entry, DefinitenessError if its smallest eigenvalue is not > 0.
  DenseGaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  [[nodiscard]] Eigen::Index dim() const noexcept { return mean_.size(); }
  [[nodiscard]] const Eigen::VectorXd& mean() const noexcept { return mean_; }
  [[nodiscard]] const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
  [[nodiscard]] const Eigen::MatrixXd& covariance_sqrt() const noexcept { return covariance_sqrt_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd covariance_sqrt_;
};

using Gaussian = std::variant<DiagonalGaussian, DenseGaussian>;

/// A potential h >= 0 on the real line with a unique minimizer u* and
/// curvature h''(u*) > 0, as used by the small-parameter density
/// g(u) = exp(-h(u) / eps).
class ScalarPotential {
 public:
  /// Checks h(u*) >= 0, h'' > 0 and h(u*) <= h(u) on a grid of points around u*.
  ScalarPotential(std::function<double(double)> h, double u_star, double curvature);

  /// h(u) = curvature * (u - center)^2 / 2.
  static ScalarPotential quadratic(double curvature, double center = 0.0);

  /// h identically zero. Has no curvature; singular-limit sweeps short-circuit it to rho = 1.
  static ScalarPotential flat();

  double operator()(double u) const { return h_(u); }
  [[nodiscard]] double minimizer() const noexcept { return u_star_; }
  [[nodiscard]] double curvature() const noexcept { return curvature_; }
  [[nodiscard]] bool is_flat() const noexcept { return flat_; }

 private:
  struct FlatTag {};
  explicit ScalarPotential(FlatTag);

  std::function<double(double)> h_;
  double u_star_ = 0.0;
  double curvature_ = 0.0;
  bool flat_ = false;
};

/// n x dim matrix of i.i.d. draws; identical (g, n, seed) give identical bits.
Eigen::MatrixXd sample(const DiagonalGaussian& g, std::size_t n, std::uint64_t seed);
Eigen::MatrixXd sample(const DenseGaussian& g, std::size_t n, std::uint64_t seed);
Eigen::MatrixXd sample(const Gaussian& g, std::size_t n, std::uint64_t seed);

/// log rho = log pi(g^2)/pi(g)^2 where g = d target / d proposal, by the
/// closed-form Gaussian integral. Throws NonIntegrableError when some target
/// variance is not below twice the matching proposal variance (in the
/// simultaneously diagonalized frame), with a 1e-12 guard.
double log_rho(const DiagonalGaussian& target, const DiagonalGaussian& proposal);
double log_rho(const DenseGaussian& target, const DenseGaussian& proposal);
double log_rho(const Gaussian& target, const Gaussian& proposal);

/// chi^2(target || proposal) = rho - 1.
double chi2_divergence(const DiagonalGaussian& target, const DiagonalGaussian& proposal);
double chi2_divergence(const DenseGaussian& target, const DenseGaussian& proposal);
double chi2_divergence(const Gaussian& target, const Gaussian& proposal);

/// KL(target || proposal).
double kl_divergence(const DiagonalGaussian& target, const DiagonalGaussian& proposal);
double kl_divergence(const DenseGaussian& target, const DenseGaussian& proposal);

/// KL(posterior || prior) of a linear-Gaussian problem from the spectrum of
/// A, the posterior mean m and the prior N(0, Sigma):
///   2 KL = log det(I + A) - Tr((I + A)^{-1} A) + m^T Sigma^{-1} m.
/// `a_spectrum` must be expressed in the coordinates in which Sigma is diagonal.
double kl_posterior_prior(const Eigen::VectorXd& a_spectrum, const Eigen::VectorXd& m,
                          const DiagonalGaussian& sigma);

/// Laplace-method rate sqrt(h''(u*) / (4 pi eps)) for rho under g = exp(-h/eps).
/// This is an order-of-magnitude rate: the proposal density at u* (an O(1)
/// factor) is left out, so only the eps^{-1/2} dependence is meaningful.
double laplace_rho_rate(const ScalarPotential& potential, double epsilon);

}  // namespace isdim::measures

#endif
