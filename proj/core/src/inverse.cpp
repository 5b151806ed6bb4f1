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

#include <isdim/inverse.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <isdim/errors.hpp>
#include <isdim/parallel.hpp>
#include <isdim/random.hpp>

namespace isdim::inverse {

namespace {

constexpr double kConditionLimit = 1e12;
constexpr double kRouteTolerance = 1e-8;
constexpr double kConvergenceTolerance = 0.005;

void check_positive(const Eigen::VectorXd& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v(i) > 0.0) || !std::isfinite(v(i))) {
      throw DefinitenessError(std::string(what) + ": entry " + std::to_string(i) + " is not positive");
    }
  }
}

Eigen::VectorXd sorted_descending(Eigen::VectorXd v) {
  std::sort(v.data(), v.data() + v.size(), std::greater<>());
  return v;
}

Eigen::LLT<Eigen::MatrixXd> cholesky(const Eigen::MatrixXd& spd, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(spd);
  if (llt.info() != Eigen::Success) {
    throw DefinitenessError(std::string(what) + ": Cholesky factorization failed");
  }
  return llt;
}

double log_rho_term(double lambda, double z) {
  return std::log1p(lambda) - 0.5 * std::log1p(2.0 * lambda) +
         lambda * z * z / ((1.0 + lambda) * (1.0 + 2.0 * lambda));
}

double integrate_tail(const std::function<double(double)>& f, double from) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(f, from, std::numeric_limits<double>::infinity(), 15, 1e-12);
}

double cascade_lambda(double x, double beta, double gamma) { return std::pow(x, -beta) / gamma; }

// Integral estimates of the sums over j > d (midpoint rule anchored at d + 1/2).
double tau_tail(double beta, double gamma, std::size_t d) {
  const double a = static_cast<double>(d) + 0.5;
  return std::pow(a, 1.0 - beta) / ((beta - 1.0) * gamma);
}

double efd_tail(double beta, double gamma, std::size_t d) {
  return integrate_tail([&](double x) { return 1.0 / (1.0 + gamma * std::pow(x, beta)); },
                        static_cast<double>(d) + 0.5);
}

// Expected tail of log rho for zero truth beyond d (E z^2 = 1).
double log_rho_tail(double beta, double gamma, std::size_t d) {
  return integrate_tail([&](double x) { return log_rho_term(cascade_lambda(x, beta, gamma), 1.0); },
                        static_cast<double>(d) + 0.5);
}

bool close_enough(double a, double b) {
  const double scale = std::max(std::abs(a), 1e-12);
  return std::abs(a - b) <= kConvergenceTolerance * scale;
}

}  // namespace

LinearGaussianIP LinearGaussianIP::diagonal(Eigen::VectorXd k, Eigen::VectorXd sigma, Eigen::VectorXd gamma) {
  if (k.size() != sigma.size() || k.size() != gamma.size()) {
    throw DimensionError("LinearGaussianIP: K, Sigma and Gamma diagonals must have equal length");
  }
  check_positive(sigma, "LinearGaussianIP Sigma");
  check_positive(gamma, "LinearGaussianIP Gamma");
  LinearGaussianIP ip;
  ip.form_ = Form::diagonal;
  ip.k_diag_ = std::move(k);
  ip.sigma_diag_ = std::move(sigma);
  ip.gamma_diag_ = std::move(gamma);
  return ip;
}

LinearGaussianIP LinearGaussianIP::dense(Eigen::MatrixXd k, Eigen::MatrixXd sigma, Eigen::MatrixXd gamma) {
  if (sigma.rows() != sigma.cols() || gamma.rows() != gamma.cols()) {
    throw DimensionError("LinearGaussianIP: covariances must be square");
  }
  if (k.rows() != gamma.rows() || k.cols() != sigma.rows()) {
    throw DimensionError("LinearGaussianIP: K must be d_y x d_u");
  }
  // Reuses the Gaussian checks (symmetry, positive-definiteness).
  const measures::DenseGaussian sigma_check(Eigen::VectorXd::Zero(sigma.rows()), sigma);
  const measures::DenseGaussian gamma_check(Eigen::VectorXd::Zero(gamma.rows()), gamma);
  LinearGaussianIP ip;
  ip.form_ = Form::dense;
  ip.k_ = std::move(k);
  ip.sigma_ = sigma_check.covariance();
  ip.gamma_ = gamma_check.covariance();
  return ip;
}

Eigen::Index LinearGaussianIP::state_dim() const noexcept {
  return is_diagonal() ? sigma_diag_.size() : sigma_.rows();
}

Eigen::Index LinearGaussianIP::data_dim() const noexcept {
  return is_diagonal() ? gamma_diag_.size() : gamma_.rows();
}

const Eigen::VectorXd& LinearGaussianIP::k_diagonal() const {
  if (!is_diagonal()) {
    throw FormError("k_diagonal: problem is dense");
  }
  return k_diag_;
}

const Eigen::VectorXd& LinearGaussianIP::sigma_diagonal() const {
  if (!is_diagonal()) {
    throw FormError("sigma_diagonal: problem is dense");
  }
  return sigma_diag_;
}

const Eigen::VectorXd& LinearGaussianIP::gamma_diagonal() const {
  if (!is_diagonal()) {
    throw FormError("gamma_diagonal: problem is dense");
  }
  return gamma_diag_;
}

Eigen::MatrixXd LinearGaussianIP::forward() const {
  return is_diagonal() ? Eigen::MatrixXd(k_diag_.asDiagonal()) : k_;
}

Eigen::MatrixXd LinearGaussianIP::prior_covariance() const {
  return is_diagonal() ? Eigen::MatrixXd(sigma_diag_.asDiagonal()) : sigma_;
}

Eigen::MatrixXd LinearGaussianIP::noise_covariance() const {
  return is_diagonal() ? Eigen::MatrixXd(gamma_diag_.asDiagonal()) : gamma_;
}

measures::Gaussian LinearGaussianIP::prior() const {
  if (is_diagonal()) {
    return measures::DiagonalGaussian(Eigen::VectorXd::Zero(sigma_diag_.size()), sigma_diag_);
  }
  return measures::DenseGaussian(Eigen::VectorXd::Zero(sigma_.rows()), sigma_);
}

OperatorA operator_a(const LinearGaussianIP& ip) {
  OperatorA a;
  a.form = ip.form();
  if (ip.is_diagonal()) {
    const auto& g = ip.gamma_diagonal();
    if (g.size() > 0 && g.maxCoeff() / g.minCoeff() > kConditionLimit) {
      throw IllConditionedError("operator_a: Gamma condition number exceeds 1e12");
    }
    a.spectrum = sorted_descending(
        (ip.k_diagonal().array().square() * ip.sigma_diagonal().array() / g.array()).matrix());
    return a;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gamma_eig(ip.noise_covariance(), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd gamma_values = gamma_eig.eigenvalues();
  if (gamma_values.size() > 0 && gamma_values.maxCoeff() / gamma_values.minCoeff() > kConditionLimit) {
    throw IllConditionedError("operator_a: Gamma condition number exceeds 1e12");
  }
  const Eigen::MatrixXd sigma_half = symmetric_sqrt(ip.prior_covariance());
  const Eigen::MatrixXd k_sigma_half = ip.forward() * sigma_half;
  const auto gamma_llt = cholesky(ip.noise_covariance(), "operator_a Gamma");
  Eigen::MatrixXd matrix = k_sigma_half.transpose() * gamma_llt.solve(k_sigma_half);
  matrix = 0.5 * (matrix + matrix.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(matrix, Eigen::EigenvaluesOnly);
  Eigen::VectorXd spectrum = eig.eigenvalues();
  if (spectrum.size() > 0) {
    const double scale = std::max(spectrum.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    if (spectrum.minCoeff() < -1e-10 * scale) {
      throw ConsistencyError("operator_a: A is not positive-semidefinite");
    }
    spectrum = spectrum.cwiseMax(0.0);
  }
  a.spectrum = sorted_descending(std::move(spectrum));
  a.matrix = std::move(matrix);
  return a;
}

IntrinsicDims intrinsic_dims(const Eigen::VectorXd& spectrum) {
  IntrinsicDims dims;
  CompensatedSum tau;
  CompensatedSum efd;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    const double lambda = spectrum(i);
    require(lambda >= 0.0, "intrinsic_dims: spectrum entries must be nonnegative");
    tau.add(lambda);
    efd.add(lambda / (1.0 + lambda));
  }
  dims.tau = tau.value();
  dims.efd = efd.value();
  dims.a_spectrum = sorted_descending(spectrum);
  return dims;
}

IntrinsicDims intrinsic_dims(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("intrinsic_dims: A must be square");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  Eigen::VectorXd spectrum = eig.eigenvalues();
  if (spectrum.size() > 0) {
    const double scale = std::max(spectrum.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    if (spectrum.minCoeff() < -1e-10 * scale) {
      throw InvalidArgument("intrinsic_dims: A is not positive-semidefinite");
    }
  }
  return intrinsic_dims(Eigen::VectorXd(spectrum.cwiseMax(0.0)));
}

IntrinsicDims intrinsic_dims(const OperatorA& a) { return intrinsic_dims(a.spectrum); }

measures::Gaussian posterior(const LinearGaussianIP& ip, const Eigen::VectorXd& y) {
  if (y.size() != ip.data_dim()) {
    throw DimensionError("posterior: data has length " + std::to_string(y.size()) + ", expected " +
                         std::to_string(ip.data_dim()));
  }

  if (ip.is_diagonal()) {
    const Eigen::ArrayXd k = ip.k_diagonal().array();
    const Eigen::ArrayXd s = ip.sigma_diagonal().array();
    const Eigen::ArrayXd g = ip.gamma_diagonal().array();
    const Eigen::ArrayXd denom = k.square() * s + g;
    const Eigen::ArrayXd cov_route = s - s * k.square() * s / denom;
    const Eigen::ArrayXd mean_route = s * k * y.array() / denom;
    const Eigen::ArrayXd cov_precision = 1.0 / (1.0 / s + k.square() / g);
    const Eigen::ArrayXd mean_precision = cov_precision * k * y.array() / g;
    if (max_relative_difference(cov_route.matrix(), cov_precision.matrix()) > kRouteTolerance ||
        (mean_route - mean_precision).abs().maxCoeff() >
            kRouteTolerance * std::max(mean_precision.abs().maxCoeff(), std::numeric_limits<double>::min())) {
      throw ConsistencyError("posterior: covariance and precision routes disagree");
    }
    return measures::DiagonalGaussian(mean_route.matrix(), cov_route.matrix());
  }

  const Eigen::MatrixXd& k = ip.forward();
  const Eigen::MatrixXd sigma = ip.prior_covariance();
  const Eigen::MatrixXd gamma = ip.noise_covariance();

  const auto innovation = cholesky(k * sigma * k.transpose() + gamma, "posterior innovation covariance");
  const Eigen::MatrixXd gain_t = innovation.solve(k * sigma);  // (Sigma K^T S^{-1})^T
  Eigen::MatrixXd cov_route = sigma - gain_t.transpose() * k * sigma;
  cov_route = 0.5 * (cov_route + cov_route.transpose()).eval();
  const Eigen::VectorXd mean_route = gain_t.transpose() * y;

  const auto gamma_llt = cholesky(gamma, "posterior Gamma");
  const auto sigma_llt = cholesky(sigma, "posterior Sigma");
  const Eigen::MatrixXd sigma_inv = sigma_llt.solve(Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols()));
  const Eigen::MatrixXd precision = sigma_inv + k.transpose() * gamma_llt.solve(k);
  const auto precision_llt = cholesky(precision, "posterior precision");
  Eigen::MatrixXd cov_precision = precision_llt.solve(Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols()));
  cov_precision = 0.5 * (cov_precision + cov_precision.transpose()).eval();
  const Eigen::VectorXd mean_precision = precision_llt.solve(k.transpose() * gamma_llt.solve(y));

  const double mean_scale = std::max(mean_precision.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  if (max_relative_difference(cov_route, cov_precision) > kRouteTolerance ||
      (mean_route - mean_precision).cwiseAbs().maxCoeff() > kRouteTolerance * mean_scale) {
    throw ConsistencyError("posterior: covariance and precision routes disagree");
  }
  return measures::DenseGaussian(mean_route, cov_route);
}

double log_g(const LinearGaussianIP& ip, const Eigen::VectorXd& u, const Eigen::VectorXd& y) {
  if (u.size() != ip.state_dim() || y.size() != ip.data_dim()) {
    throw DimensionError("log_g: dimension mismatch");
  }
  if (ip.is_diagonal()) {
    const Eigen::ArrayXd ku = ip.k_diagonal().array() * u.array();
    const Eigen::ArrayXd whitened = ku / ip.gamma_diagonal().array();
    return -0.5 * (ku * whitened).sum() + (y.array() * whitened).sum();
  }
  const Eigen::VectorXd ku = ip.forward() * u;
  const Eigen::VectorXd whitened = cholesky(ip.noise_covariance(), "log_g Gamma").solve(ku);
  return -0.5 * ku.dot(whitened) + y.dot(whitened);
}

sampler::LogDensity log_density(const LinearGaussianIP& ip, const Eigen::VectorXd& y) {
  if (y.size() != ip.data_dim()) {
    throw DimensionError("log_density: dimension mismatch");
  }
  if (ip.is_diagonal()) {
    const Eigen::RowVectorXd curvature =
        (ip.k_diagonal().array().square() / ip.gamma_diagonal().array()).matrix().transpose();
    const Eigen::RowVectorXd linear =
        (ip.k_diagonal().array() * y.array() / ip.gamma_diagonal().array()).matrix().transpose();
    return [curvature, linear](sampler::PointRef u) {
      return -0.5 * (curvature.array() * u.array().square()).sum() + (linear.array() * u.array()).sum();
    };
  }
  const auto gamma_llt = cholesky(ip.noise_covariance(), "log_density Gamma");
  const Eigen::MatrixXd& k = ip.forward();
  const Eigen::MatrixXd curvature = k.transpose() * gamma_llt.solve(k);
  const Eigen::RowVectorXd linear = (k.transpose() * gamma_llt.solve(y)).transpose();
  return [curvature, linear](sampler::PointRef u) {
    const Eigen::RowVectorXd row = u;
    return -0.5 * row.dot(row * curvature) + linear.dot(row);
  };
}

WhitenedData whiten(const LinearGaussianIP& ip, const Eigen::VectorXd& y) {
  if (!ip.is_diagonal()) {
    throw FormError("whiten: only diagonal problems have a per-coordinate whitening");
  }
  if (y.size() != ip.data_dim()) {
    throw DimensionError("whiten: dimension mismatch");
  }
  WhitenedData w;
  w.lambda = (ip.k_diagonal().array().square() * ip.sigma_diagonal().array() / ip.gamma_diagonal().array()).matrix();
  w.z = (y.array() / ip.gamma_diagonal().array().sqrt()).matrix();
  return w;
}

double rho_closed_form_diag(const Eigen::VectorXd& lambda, const Eigen::VectorXd& z) {
  if (lambda.size() != z.size()) {
    throw DimensionError("rho_closed_form_diag: lambda and z differ in length");
  }
  CompensatedSum total;
  for (Eigen::Index j = 0; j < lambda.size(); ++j) {
    require(lambda(j) >= 0.0, "rho_closed_form_diag: eigenvalues must be nonnegative");
    total.add(log_rho_term(lambda(j), z(j)));
  }
  return total.value();
}

double log_rho(const LinearGaussianIP& ip, const Eigen::VectorXd& y) {
  if (ip.is_diagonal()) {
    const auto w = whiten(ip, y);
    return rho_closed_form_diag(w.lambda, w.z);
  }
  return measures::log_rho(posterior(ip, y), ip.prior());
}

SpectralCascade::SpectralCascade(double beta, double gamma, std::size_t d, Eigen::VectorXd truth)
    : beta_(beta), gamma_(gamma), d_(d), truth_(std::move(truth)) {
  require(beta >= 0.0 && std::isfinite(beta), "SpectralCascade: beta must be nonnegative");
  require(gamma > 0.0 && std::isfinite(gamma), "SpectralCascade: gamma must be positive");
  require(d >= 1, "SpectralCascade: d must be positive");
  if (static_cast<std::size_t>(truth_.size()) > d_) {
    throw DimensionError("SpectralCascade: truth is longer than d");
  }
}

double SpectralCascade::eigenvalue(std::size_t j) const {
  const double value = cascade_lambda(static_cast<double>(j), beta_, gamma_);
  return value < 1e-300 * gamma_ ? 0.0 : value;
}

Eigen::VectorXd SpectralCascade::eigenvalues() const {
  Eigen::VectorXd values(static_cast<Eigen::Index>(d_));
  for (std::size_t j = 1; j <= d_; ++j) {
    values(static_cast<Eigen::Index>(j - 1)) = eigenvalue(j);
  }
  return values;
}

LinearGaussianIP SpectralCascade::as_problem() const {
  const auto n = static_cast<Eigen::Index>(d_);
  Eigen::VectorXd k(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j) = std::pow(static_cast<double>(j + 1), -0.5 * beta_);
  }
  return LinearGaussianIP::diagonal(std::move(k), Eigen::VectorXd::Ones(n), Eigen::VectorXd::Constant(n, gamma_));
}

SpectralCascade SpectralCascade::truncated(std::size_t d) const {
  const auto keep = std::min<Eigen::Index>(truth_.size(), static_cast<Eigen::Index>(d));
  return {beta_, gamma_, d, truth_.head(keep)};
}

Eigen::VectorXd generate_data(const SpectralCascade& cascade, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(cascade.dim());
  Eigen::VectorXd y = standard_normal_matrix(n, 1, seed).col(0) * std::sqrt(cascade.gamma());
  y.head(cascade.truth().size()) += cascade.truth();
  return y;
}

double cascade_log_rho(const SpectralCascade& cascade, const Eigen::VectorXd& y) {
  if (static_cast<std::size_t>(y.size()) != cascade.dim()) {
    throw DimensionError("cascade_log_rho: data length differs from d");
  }
  return rho_closed_form_diag(cascade.eigenvalues(), y / std::sqrt(cascade.gamma()));
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::small_noise_fixed_d:
      return "small_noise_fixed_d";
    case Regime::small_noise_infinite_d:
      return "small_noise_infinite_d";
    case Regime::large_d:
      return "large_d";
    case Regime::joint:
      return "joint";
    case Regime::regularity:
      return "regularity";
  }
  return "unknown";
}

Regime regime_from_string(const std::string& name) {
  for (auto r : {Regime::small_noise_fixed_d, Regime::small_noise_infinite_d, Regime::large_d, Regime::joint,
                 Regime::regularity}) {
    if (to_string(r) == name) {
      return r;
    }
  }
  throw InvalidArgument("unknown regime '" + name + "'");
}

const ScalingFit& ScalingReport::fit(const std::string& quantity) const {
  for (const auto& f : fits) {
    if (f.quantity == quantity) {
      return f;
    }
  }
  throw InvalidArgument("ScalingReport: no fit for '" + quantity + "'");
}

InfiniteCascadeDims infinite_cascade_dims(double beta, double gamma, std::size_t d_max) {
  require(beta > 1.0, "infinite_cascade_dims: the infinite cascade needs beta > 1");
  const SpectralCascade base(beta, gamma, 2 * d_max);
  const Eigen::VectorXd lambda = base.eigenvalues();
  auto sums = [&](std::size_t d) {
    const auto dims = intrinsic_dims(Eigen::VectorXd(lambda.head(static_cast<Eigen::Index>(d))));
    return std::pair{dims.tau + tau_tail(beta, gamma, d), dims.efd + efd_tail(beta, gamma, d)};
  };
  const auto [tau, efd] = sums(d_max);
  const auto [tau2, efd2] = sums(2 * d_max);
  return {tau, efd, close_enough(tau, tau2) && close_enough(efd, efd2)};
}

namespace {

struct RowSpec {
  double parameter;
  double beta;
  double gamma;
  std::size_t d;
  bool infinite;
};

// Evaluates one grid point. Fixed-data rows reuse `fixed_seed` for every point;
// in-probability rows draw `seeds` datasets.
Table1Row evaluate_row(const RowSpec& spec, std::size_t grid_index, std::uint64_t seed, bool in_probability,
                       std::size_t seeds) {
  Table1Row row;
  row.parameter = spec.parameter;
  row.beta = spec.beta;
  row.gamma = spec.gamma;
  row.d = spec.d;
  row.infinite_d = spec.infinite;

  const std::size_t length = spec.infinite ? 2 * spec.d : spec.d;
  const SpectralCascade cascade(spec.beta, spec.gamma, length);
  const Eigen::VectorXd lambda = cascade.eigenvalues();
  const Eigen::VectorXd head = lambda.head(static_cast<Eigen::Index>(spec.d));
  const auto dims = intrinsic_dims(head);
  row.tau = dims.tau;
  row.efd = dims.efd;

  double rho_tail = 0.0;
  double rho_tail_doubled = 0.0;
  if (spec.infinite) {
    const auto inf_dims = infinite_cascade_dims(spec.beta, spec.gamma, spec.d);
    row.tau = inf_dims.tau;
    row.efd = inf_dims.efd;
    row.converged = inf_dims.converged;
    rho_tail = log_rho_tail(spec.beta, spec.gamma, spec.d);
    rho_tail_doubled = log_rho_tail(spec.beta, spec.gamma, 2 * spec.d);
  }

  const std::size_t count = in_probability ? seeds : 1;
  std::vector<double> values(count);
  std::vector<double> doubled(count);
  const double inv_sqrt_gamma = 1.0 / std::sqrt(spec.gamma);
  for (std::size_t s = 0; s < count; ++s) {
    const std::uint64_t data_seed = in_probability ? derive_seed(derive_seed(seed, grid_index), s) : seed;
    const Eigen::VectorXd y = generate_data(cascade, data_seed);
    CompensatedSum sum;
    for (std::size_t j = 0; j < length; ++j) {
      if (j == spec.d) {
        values[s] = sum.value() + rho_tail;
      }
      const auto i = static_cast<Eigen::Index>(j);
      sum.add(log_rho_term(lambda(i), y(i) * inv_sqrt_gamma));
    }
    if (spec.infinite) {
      doubled[s] = sum.value() + rho_tail_doubled;
    } else {
      values[s] = sum.value();
    }
  }
  row.log_rho = quartiles(values);
  if (spec.infinite) {
    row.converged = row.converged && close_enough(row.log_rho.median, quartiles(doubled).median);
  }
  return row;
}

void add_fit(ScalingReport& report, const std::string& quantity, const std::string& regressor,
             const std::vector<double>& x, const std::vector<double>& y) {
  for (double v : y) {
    if (!std::isfinite(v)) {
      return;
    }
  }
  report.fits.push_back({quantity, regressor, fit_line(x, y)});
}

}  // namespace

ScalingReport sweep_table1(Regime regime, const Table1Grid& grid, std::uint64_t seed) {
  ScalingReport report;
  report.regime = regime;
  std::vector<RowSpec> specs;
  bool in_probability = false;

  switch (regime) {
    case Regime::small_noise_fixed_d:
      report.parameter_name = "gamma";
      for (double g : grid.gamma) {
        specs.push_back({g, grid.beta_fixed, g, grid.d_fixed, false});
      }
      break;
    case Regime::small_noise_infinite_d:
      report.parameter_name = "gamma";
      require(grid.beta_fixed > 1.0, "sweep_table1: d = infinity requires beta > 1");
      for (double g : grid.gamma) {
        specs.push_back({g, grid.beta_fixed, g, grid.d_max, true});
      }
      break;
    case Regime::large_d:
      report.parameter_name = "d";
      in_probability = true;
      for (std::size_t d : grid.d) {
        specs.push_back({static_cast<double>(d), grid.beta_fixed, grid.gamma_fixed, d, false});
      }
      break;
    case Regime::joint:
      report.parameter_name = "d";
      for (std::size_t d : grid.d) {
        const double g = std::pow(static_cast<double>(d), -grid.alpha);
        specs.push_back({static_cast<double>(d), grid.beta_fixed, g, d, false});
      }
      break;
    case Regime::regularity:
      report.parameter_name = "beta";
      in_probability = true;
      for (double b : grid.beta) {
        require(b > 1.0, "sweep_table1: the regularity regime requires beta > 1");
        specs.push_back({b, b, grid.gamma_fixed, grid.d_max, true});
      }
      break;
  }
  if (specs.size() < 3) {
    throw FitError("sweep_table1: at least 3 grid points are required, got " + std::to_string(specs.size()));
  }
  require(!in_probability || grid.data_seeds >= 1, "sweep_table1: data_seeds must be positive");

  report.data_note = in_probability
                         ? "median and quartiles over " + std::to_string(grid.data_seeds) +
                               " datasets, zero truth, seeds derived from (seed, grid index, dataset index)"
                         : "single fixed dataset, zero truth, fixed seed";

  report.rows.resize(specs.size());
  parallel_for(specs.size(), [&](std::size_t i) {
    report.rows[i] = evaluate_row(specs[i], i, seed, in_probability, grid.data_seeds);
  });

  std::vector<double> x;
  std::vector<double> tau;
  std::vector<double> efd;
  std::vector<double> rho;
  for (const auto& row : report.rows) {
    tau.push_back(row.tau);
    efd.push_back(row.efd);
    rho.push_back(row.log_rho.median);
  }
  auto logs = [](std::vector<double> v) {
    for (double& e : v) {
      e = std::log(e);
    }
    return v;
  };

  switch (regime) {
    case Regime::small_noise_fixed_d:
    case Regime::small_noise_infinite_d:
      for (const auto& row : report.rows) {
        x.push_back(std::log(1.0 / row.gamma));
      }
      add_fit(report, "log_tau", "log(1/gamma)", x, logs(tau));
      add_fit(report, "log_efd", "log(1/gamma)", x, logs(efd));
      if (regime == Regime::small_noise_fixed_d) {
        add_fit(report, "log_rho", "log(1/gamma)", x, rho);
      } else {
        add_fit(report, "log_log_rho", "log(1/gamma)", x, logs(rho));
      }
      break;
    case Regime::large_d: {
      std::vector<double> log_d;
      for (const auto& row : report.rows) {
        x.push_back(std::pow(static_cast<double>(row.d), 1.0 - row.beta));
        log_d.push_back(std::log(static_cast<double>(row.d)));
      }
      add_fit(report, "tau", "d^(1-beta)", x, tau);
      add_fit(report, "efd", "d^(1-beta)", x, efd);
      add_fit(report, "log_rho", "d^(1-beta)", x, rho);
      add_fit(report, "log_tau", "log(d)", log_d, logs(tau));
      break;
    }
    case Regime::joint: {
      std::vector<double> d_log_d;
      for (const auto& row : report.rows) {
        const double d = static_cast<double>(row.d);
        x.push_back(std::log(d));
        d_log_d.push_back(d * std::log(d));
      }
      add_fit(report, "log_tau", "log(d)", x, logs(tau));
      add_fit(report, "log_efd", "log(d)", x, logs(efd));
      add_fit(report, "log_rho", "d log(d)", d_log_d, rho);
      break;
    }
    case Regime::regularity: {
      std::vector<double> inv;
      for (const auto& row : report.rows) {
        x.push_back(std::log(1.0 / (row.beta - 1.0)));
        inv.push_back(1.0 / (row.beta - 1.0));
      }
      add_fit(report, "log_tau", "log(1/(beta-1))", x, logs(tau));
      add_fit(report, "log_efd", "log(1/(beta-1))", x, logs(efd));
      add_fit(report, "log_rho", "1/(beta-1)", inv, rho);
      break;
    }
  }
  return report;
}

SpectralJump spectral_jump(std::size_t k, double large, const Eigen::VectorXd& tail, const Eigen::VectorXd& m) {
  require(large > 0.0, "spectral_jump: the large eigenvalue must be positive");
  const auto total = static_cast<Eigen::Index>(k) + tail.size();
  if (m.size() != total) {
    throw DimensionError("spectral_jump: m must have length k + tail size");
  }
  Eigen::VectorXd lambda(total);
  lambda.head(static_cast<Eigen::Index>(k)).setConstant(large);
  lambda.tail(tail.size()) = tail;

  Eigen::VectorXd z(total);
  for (Eigen::Index i = 0; i < total; ++i) {
    require(lambda(i) >= 0.0, "spectral_jump: eigenvalues must be nonnegative");
    if (lambda(i) == 0.0) {
      require(m(i) == 0.0, "spectral_jump: nonzero posterior mean on a zero eigenvalue");
      z(i) = 0.0;
    } else {
      // Posterior mean in whitened coordinates is sqrt(l) z / (1 + l).
      z(i) = m(i) * (1.0 + lambda(i)) / std::sqrt(lambda(i));
    }
  }

  SpectralJump result;
  const auto dims = intrinsic_dims(lambda);
  result.tau = dims.tau;
  result.efd = dims.efd;
  result.kl = measures::kl_posterior_prior(lambda, m, measures::DiagonalGaussian::standard(total));
  result.log_rho = rho_closed_form_diag(lambda, z);
  result.heuristic_log_rho_bound = 0.5 * result.efd * std::log(large);
  result.kl_bound_holds = result.kl <= result.log_rho + 1e-12 * std::max(1.0, std::abs(result.log_rho));
  result.assumptions_hold = large >= 10.0 && tail.sum() <= 0.1;
  return result;
}

SpectralCascade deconvolution_model(double t, double s, std::size_t d, double gamma, Eigen::VectorXd truth) {
  require(t >= 0.0 && s >= 0.0, "deconvolution_model: t and s must be nonnegative");
  return {2.0 * t + 2.0 * s, gamma, d, std::move(truth)};
}

}  // namespace isdim::inverse
