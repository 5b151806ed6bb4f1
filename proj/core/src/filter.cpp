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

#include <isdim/filter.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <isdim/errors.hpp>
#include <isdim/numerics.hpp>
#include <isdim/parallel.hpp>
#include <isdim/random.hpp>

namespace isdim::filter {

namespace {

constexpr double kReductionTolerance = 1e-10;
constexpr double kFixedPointTolerance = 1e-10;
constexpr double kConvergenceTolerance = 0.005;

void check_scalar_covariance(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DefinitenessError("covariance scalar must be positive");
  }
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

inverse::OperatorA operator_from_matrix(Eigen::MatrixXd matrix) {
  matrix = symmetrized(matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(matrix, Eigen::EigenvaluesOnly);
  Eigen::VectorXd spectrum = eig.eigenvalues();
  if (spectrum.size() > 0) {
    const double scale = std::max(spectrum.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    if (spectrum.minCoeff() < -1e-10 * scale) {
      throw ConsistencyError("a_operators: operator is not positive-semidefinite");
    }
  }
  spectrum = spectrum.cwiseMax(0.0);
  std::sort(spectrum.data(), spectrum.data() + spectrum.size(), std::greater<>());
  return {inverse::Form::dense, std::move(spectrum), std::move(matrix)};
}

void check_agreement(double direct, double reduced, const char* what) {
  const double scale = std::max({std::abs(direct), std::abs(reduced), 1e-12});
  if (std::abs(direct - reduced) > kReductionTolerance * scale) {
    throw ConsistencyError(std::string("a_operators: ") + what + " disagrees with the reduction");
  }
}

double log_rho_term(double lambda, double z) {
  return std::log1p(lambda) - 0.5 * std::log1p(2.0 * lambda) +
         lambda * z * z / ((1.0 + lambda) * (1.0 + 2.0 * lambda));
}

bool close_enough(double a, double b) {
  return std::abs(a - b) <= kConvergenceTolerance * std::max(std::abs(a), 1e-12);
}

}  // namespace

std::string to_string(ProposalKind kind) { return kind == ProposalKind::standard ? "standard" : "optimal"; }

OneStepFilter OneStepFilter::scalar_identity(double m, double h, double p, double q, double r, std::size_t d) {
  require(std::isfinite(m) && std::isfinite(h), "OneStepFilter: m and h must be finite");
  require(d >= 1, "OneStepFilter: d must be positive");
  check_scalar_covariance(p);
  check_scalar_covariance(q);
  check_scalar_covariance(r);
  OneStepFilter f;
  f.form_ = FilterForm::scalar_identity;
  f.m_ = m;
  f.h_ = h;
  f.p_ = p;
  f.q_ = q;
  f.r_ = r;
  f.d_ = d;
  return f;
}

OneStepFilter OneStepFilter::dense(Eigen::MatrixXd m, Eigen::MatrixXd h, Eigen::MatrixXd p, Eigen::MatrixXd q,
                                   Eigen::MatrixXd r) {
  const Eigen::Index du = p.rows();
  if (m.rows() != du || m.cols() != du || q.rows() != du || q.cols() != du || p.cols() != du) {
    throw DimensionError("OneStepFilter: M, P and Q must be square of the state dimension");
  }
  if (h.cols() != du || r.rows() != h.rows() || r.cols() != h.rows()) {
    throw DimensionError("OneStepFilter: H must be d_y x d_u and R d_y x d_y");
  }
  OneStepFilter f;
  f.form_ = FilterForm::dense;
  f.mm_ = std::move(m);
  f.hm_ = std::move(h);
  f.pm_ = measures::DenseGaussian(Eigen::VectorXd::Zero(du), p).covariance();
  f.qm_ = measures::DenseGaussian(Eigen::VectorXd::Zero(du), q).covariance();
  f.rm_ = measures::DenseGaussian(Eigen::VectorXd::Zero(f.hm_.rows()), r).covariance();
  return f;
}

Eigen::Index OneStepFilter::state_dim() const noexcept {
  return is_scalar() ? static_cast<Eigen::Index>(d_) : pm_.rows();
}

Eigen::Index OneStepFilter::obs_dim() const noexcept {
  return is_scalar() ? static_cast<Eigen::Index>(d_) : hm_.rows();
}

#define ISDIM_SCALAR_ACCESSOR(name, member)                                    \
  double OneStepFilter::name() const {                                         \
    if (!is_scalar()) {                                                        \
      throw FormError("OneStepFilter::" #name ": model is not scalar-identity"); \
    }                                                                          \
    return member;                                                             \
  }

ISDIM_SCALAR_ACCESSOR(m, m_)
ISDIM_SCALAR_ACCESSOR(h, h_)
ISDIM_SCALAR_ACCESSOR(p, p_)
ISDIM_SCALAR_ACCESSOR(q, q_)
ISDIM_SCALAR_ACCESSOR(r, r_)

#undef ISDIM_SCALAR_ACCESSOR

Eigen::MatrixXd OneStepFilter::M() const {
  return is_scalar() ? Eigen::MatrixXd(m_ * Eigen::MatrixXd::Identity(state_dim(), state_dim())) : mm_;
}

Eigen::MatrixXd OneStepFilter::H() const {
  return is_scalar() ? Eigen::MatrixXd(h_ * Eigen::MatrixXd::Identity(obs_dim(), state_dim())) : hm_;
}

Eigen::MatrixXd OneStepFilter::P() const {
  return is_scalar() ? Eigen::MatrixXd(p_ * Eigen::MatrixXd::Identity(state_dim(), state_dim())) : pm_;
}

Eigen::MatrixXd OneStepFilter::Q() const {
  return is_scalar() ? Eigen::MatrixXd(q_ * Eigen::MatrixXd::Identity(state_dim(), state_dim())) : qm_;
}

Eigen::MatrixXd OneStepFilter::R() const {
  return is_scalar() ? Eigen::MatrixXd(r_ * Eigen::MatrixXd::Identity(obs_dim(), obs_dim())) : rm_;
}

OneStepFilter OneStepFilter::with_p(double p) const {
  if (!is_scalar()) {
    throw FormError("OneStepFilter::with_p: scalar initial covariance on a dense model");
  }
  return scalar_identity(m_, h_, p, q_, r_, d_);
}

OneStepFilter OneStepFilter::with_p(const Eigen::MatrixXd& p) const {
  if (is_scalar()) {
    throw FormError("OneStepFilter::with_p: matrix initial covariance on a scalar-identity model");
  }
  return dense(mm_, hm_, p, qm_, rm_);
}

double lambda_standard(double m, double h, double p, double q, double r) { return h * h * (m * m * p + q) / r; }

double lambda_optimal(double m, double h, double p, double q, double r) {
  return h * h * m * m * p / (r + h * h * q);
}

inverse::LinearGaussianIP standard_reduction(const OneStepFilter& f) {
  if (f.is_scalar()) {
    const auto d = f.state_dim();
    return inverse::LinearGaussianIP::diagonal(Eigen::VectorXd::Constant(d, f.h()),
                                               Eigen::VectorXd::Constant(d, f.m() * f.m() * f.p() + f.q()),
                                               Eigen::VectorXd::Constant(d, f.r()));
  }
  const Eigen::MatrixXd m = f.M();
  return inverse::LinearGaussianIP::dense(f.H(), symmetrized(m * f.P() * m.transpose() + f.Q()), f.R());
}

inverse::LinearGaussianIP optimal_reduction(const OneStepFilter& f) {
  if (f.is_scalar()) {
    const auto d = f.state_dim();
    return inverse::LinearGaussianIP::diagonal(Eigen::VectorXd::Constant(d, f.h() * f.m()),
                                               Eigen::VectorXd::Constant(d, f.p()),
                                               Eigen::VectorXd::Constant(d, f.r() + f.h() * f.h() * f.q()));
  }
  const Eigen::MatrixXd h = f.H();
  return inverse::LinearGaussianIP::dense(h * f.M(), f.P(), symmetrized(f.R() + h * f.Q() * h.transpose()));
}

inverse::LinearGaussianIP reduction(const OneStepFilter& f, ProposalKind kind) {
  return kind == ProposalKind::standard ? standard_reduction(f) : optimal_reduction(f);
}

ProposalOperators a_operators(const OneStepFilter& f) {
  ProposalOperators ops;
  if (f.is_scalar()) {
    const auto d = f.state_dim();
    ops.a_st = {inverse::Form::diagonal,
                Eigen::VectorXd::Constant(d, lambda_standard(f.m(), f.h(), f.p(), f.q(), f.r())),
                Eigen::MatrixXd()};
    ops.a_op = {inverse::Form::diagonal,
                Eigen::VectorXd::Constant(d, lambda_optimal(f.m(), f.h(), f.p(), f.q(), f.r())),
                Eigen::MatrixXd()};
  } else {
    const Eigen::MatrixXd m = f.M();
    const Eigen::MatrixXd h = f.H();
    const Eigen::MatrixXd sigma_st_half = symmetric_sqrt(symmetrized(m * f.P() * m.transpose() + f.Q()));
    const Eigen::MatrixXd r_inv = f.R().inverse();
    ops.a_st = operator_from_matrix(sigma_st_half * h.transpose() * r_inv * h * sigma_st_half);

    const Eigen::MatrixXd p_half = symmetric_sqrt(f.P());
    const Eigen::MatrixXd gamma_op_inv = (f.R() + h * f.Q() * h.transpose()).inverse();
    const Eigen::MatrixXd hm = h * m;
    ops.a_op = operator_from_matrix(p_half * hm.transpose() * gamma_op_inv * hm * p_half);
  }
  ops.dims_st = inverse::intrinsic_dims(ops.a_st.spectrum);
  ops.dims_op = inverse::intrinsic_dims(ops.a_op.spectrum);

  const auto reduced_st = inverse::intrinsic_dims(inverse::operator_a(standard_reduction(f)));
  const auto reduced_op = inverse::intrinsic_dims(inverse::operator_a(optimal_reduction(f)));
  check_agreement(ops.dims_st.tau, reduced_st.tau, "tau_st");
  check_agreement(ops.dims_st.efd, reduced_st.efd, "efd_st");
  check_agreement(ops.dims_op.tau, reduced_op.tau, "tau_op");
  check_agreement(ops.dims_op.efd, reduced_op.efd, "efd_op");
  return ops;
}

measures::DenseGaussian conditioned_dynamics(const OneStepFilter& f, const Eigen::VectorXd& v0,
                                             const Eigen::VectorXd& y1) {
  if (v0.size() != f.state_dim() || y1.size() != f.obs_dim()) {
    throw DimensionError("conditioned_dynamics: v0 or y1 has the wrong length");
  }
  const Eigen::MatrixXd m = f.M();
  const Eigen::MatrixXd h = f.H();
  const Eigen::MatrixXd q = f.Q();
  const Eigen::LLT<Eigen::MatrixXd> innovation(symmetrized(h * q * h.transpose() + f.R()));
  if (innovation.info() != Eigen::Success) {
    throw DefinitenessError("conditioned_dynamics: H Q H^T + R is not positive-definite");
  }
  const Eigen::MatrixXd gain_t = innovation.solve(h * q);  // (Q H^T S^{-1})^T
  const Eigen::VectorXd predicted = m * v0;
  const Eigen::VectorXd mean = predicted + gain_t.transpose() * (y1 - h * predicted);
  const Eigen::MatrixXd xi = symmetrized(q - gain_t.transpose() * h * q);
  Eigen::LLT<Eigen::MatrixXd> check(xi);
  if (check.info() != Eigen::Success) {
    throw DefinitenessError("conditioned_dynamics: conditioned covariance is not positive-definite");
  }
  return {mean, xi};
}

double stationary_covariance(const OneStepFilter& f) {
  if (!f.is_scalar() || f.m() != 1.0 || f.h() != 1.0) {
    throw FormError("stationary_covariance: requires the scalar-identity model with M = H = I");
  }
  const double q = f.q();
  const double r = f.r();
  // Rationalized form, free of cancellation as r -> 0.
  const double p_inf = 2.0 * q * r / (std::sqrt(q * q + 4.0 * q * r) + q);
  const double updated = kalman_update(f, p_inf);
  if (std::abs(updated - p_inf) > kFixedPointTolerance * p_inf) {
    throw ConsistencyError("stationary_covariance: fixed point not reproduced by the covariance update");
  }
  return p_inf;
}

Eigen::MatrixXd kalman_update(const OneStepFilter& f, const Eigen::MatrixXd& p) {
  if (p.rows() != f.state_dim() || p.cols() != f.state_dim()) {
    throw DimensionError("kalman_update: P has the wrong shape");
  }
  if (Eigen::LLT<Eigen::MatrixXd>(symmetrized(p)).info() != Eigen::Success) {
    throw DefinitenessError("kalman_update: P is not positive-definite");
  }
  const Eigen::MatrixXd m = f.M();
  const Eigen::MatrixXd h = f.H();
  const Eigen::MatrixXd predicted = symmetrized(m * p * m.transpose() + f.Q());
  const Eigen::LLT<Eigen::MatrixXd> innovation(symmetrized(h * predicted * h.transpose() + f.R()));
  if (innovation.info() != Eigen::Success) {
    throw DefinitenessError("kalman_update: innovation covariance solve failed");
  }
  const Eigen::MatrixXd hs = h * predicted;
  return symmetrized(predicted - hs.transpose() * innovation.solve(hs));
}

double kalman_update(const OneStepFilter& f, double p) {
  check_scalar_covariance(p);
  const double h2 = f.h() * f.h();
  const double predicted = f.m() * f.m() * p + f.q();
  return predicted * f.r() / (h2 * predicted + f.r());
}

ProposalComparison compare_proposals(const OneStepFilter& f, const Eigen::VectorXd& y1, std::size_t n,
                                     std::uint64_t seed) {
  if (y1.size() != f.obs_dim()) {
    throw DimensionError("compare_proposals: y1 has the wrong length");
  }
  ProposalComparison result;
  const auto st = standard_reduction(f);
  const auto op = optimal_reduction(f);
  result.log_rho_st = inverse::log_rho(st, y1);
  result.log_rho_op = inverse::log_rho(op, y1);
  result.st_exceeds_op = result.log_rho_st > result.log_rho_op;
  if (n == 0) {
    return result;
  }
  auto monte_carlo = [&](const inverse::LinearGaussianIP& ip, std::uint64_t stream_seed) {
    const Eigen::MatrixXd points = measures::sample(ip.prior(), n, stream_seed);
    const Eigen::VectorXd logw = sampler::evaluate_log_weights(points, inverse::log_density(ip, y1));
    return MonteCarloProposal{sampler::rho_from_log_weights(logw), sampler::ess(sampler::normalize(logw))};
  };
  result.mc_st = monte_carlo(st, derive_seed(seed, 0));
  result.mc_op = monte_carlo(op, derive_seed(seed, 1));
  return result;
}

std::string to_string(Initialization init) { return init == Initialization::stationary ? "stationary" : "fixed_p"; }

Initialization initialization_from_string(const std::string& name) {
  if (name == "stationary") {
    return Initialization::stationary;
  }
  if (name == "fixed_p") {
    return Initialization::fixed_p;
  }
  throw InvalidArgument("unknown initialization '" + name + "'");
}

std::string to_string(FilterDriver driver) {
  switch (driver) {
    case FilterDriver::r:
      return "r";
    case FilterDriver::r_equals_q:
      return "r_equals_q";
    case FilterDriver::d:
      return "d";
  }
  return "unknown";
}

FilterDriver filter_driver_from_string(const std::string& name) {
  for (auto d : {FilterDriver::r, FilterDriver::r_equals_q, FilterDriver::d}) {
    if (to_string(d) == name) {
      return d;
    }
  }
  throw InvalidArgument("unknown filter sweep driver '" + name + "'");
}

const inverse::ScalingFit& FilterReport::fit(const std::string& quantity) const {
  for (const auto& f : fits) {
    if (f.quantity == quantity) {
      return f;
    }
  }
  throw InvalidArgument("FilterReport: no fit for '" + quantity + "'");
}

FilterReport sweep_tables34(const FilterGrid& grid, std::uint64_t seed) {
  struct Point {
    double r;
    double q;
    std::size_t d;
  };
  std::vector<Point> points;
  switch (grid.driver) {
    case FilterDriver::r:
      for (double r : grid.r) {
        points.push_back({r, grid.q_fixed, grid.d_fixed});
      }
      break;
    case FilterDriver::r_equals_q:
      for (double r : grid.r) {
        points.push_back({r, r, grid.d_fixed});
      }
      break;
    case FilterDriver::d:
      for (std::size_t d : grid.d) {
        points.push_back({grid.r_fixed, grid.q_fixed, d});
      }
      break;
  }
  if (points.size() < 3) {
    throw FitError("sweep_tables34: at least 3 grid points are required, got " + std::to_string(points.size()));
  }
  require(grid.data_seeds >= 1, "sweep_tables34: data_seeds must be positive");

  FilterReport report;
  report.grid = grid;
  report.data_note = "y1 = r^(1/2) xi from truth 0; medians over " + std::to_string(grid.data_seeds) +
                     " datasets with seeds derived from (seed, grid index, dataset index)";
  report.rows.resize(points.size());

  parallel_for(points.size(), [&](std::size_t i) {
    const Point& pt = points[i];
    auto f = OneStepFilter::scalar_identity(grid.m, grid.h, grid.p_fixed, pt.q, pt.r, pt.d);
    if (grid.init == Initialization::stationary) {
      f = f.with_p(stationary_covariance(f));
    }
    FilterRow row;
    row.init = grid.init;
    row.r = pt.r;
    row.q = pt.q;
    row.p = f.p();
    row.d = pt.d;
    row.lambda_st = lambda_standard(f.m(), f.h(), f.p(), f.q(), f.r());
    row.lambda_op = lambda_optimal(f.m(), f.h(), f.p(), f.q(), f.r());
    const double dd = static_cast<double>(pt.d);
    row.tau_st = dd * row.lambda_st;
    row.tau_op = dd * row.lambda_op;
    row.efd_st = dd * row.lambda_st / (1.0 + row.lambda_st);
    row.efd_op = dd * row.lambda_op / (1.0 + row.lambda_op);

    const double scale_op = std::sqrt(pt.r / (pt.r + f.h() * f.h() * pt.q));
    std::vector<double> st(grid.data_seeds);
    std::vector<double> op(grid.data_seeds);
    for (std::size_t s = 0; s < grid.data_seeds; ++s) {
      const Eigen::MatrixXd xi =
          standard_normal_matrix(static_cast<Eigen::Index>(pt.d), 1, derive_seed(derive_seed(seed, i), s));
      CompensatedSum sum_st;
      CompensatedSum sum_op;
      for (Eigen::Index j = 0; j < xi.rows(); ++j) {
        // Whitened data: y / sqrt(Gamma) for each reduction.
        sum_st.add(log_rho_term(row.lambda_st, xi(j, 0)));
        sum_op.add(log_rho_term(row.lambda_op, xi(j, 0) * scale_op));
      }
      st[s] = sum_st.value();
      op[s] = sum_op.value();
    }
    row.log_rho_st = quartiles(st).median;
    row.log_rho_op = quartiles(op).median;
    report.rows[i] = row;
  });

  std::vector<double> x;
  std::vector<double> st;
  std::vector<double> op;
  for (const auto& row : report.rows) {
    st.push_back(row.log_rho_st);
    op.push_back(row.log_rho_op);
  }
  if (grid.driver == FilterDriver::d) {
    std::vector<double> tau_st;
    std::vector<double> tau_op;
    for (const auto& row : report.rows) {
      x.push_back(static_cast<double>(row.d));
      tau_st.push_back(row.tau_st);
      tau_op.push_back(row.tau_op);
    }
    report.fits.push_back({"log_rho_st", "d", fit_line(x, st)});
    report.fits.push_back({"log_rho_op", "d", fit_line(x, op)});
    report.fits.push_back({"tau_st", "d", fit_line(x, tau_st)});
    report.fits.push_back({"tau_op", "d", fit_line(x, tau_op)});
  } else {
    std::vector<double> log_r;
    std::vector<double> log_p;
    for (const auto& row : report.rows) {
      x.push_back(std::log(1.0 / row.r));
      log_r.push_back(std::log(row.r));
      log_p.push_back(std::log(row.p));
    }
    report.fits.push_back({"log_rho_st", "log(1/r)", fit_line(x, st)});
    report.fits.push_back({"log_rho_op", "log(1/r)", fit_line(x, op)});
    if (grid.init == Initialization::stationary) {
      report.fits.push_back({"log_p", "log(r)", fit_line(log_r, log_p)});
    }
  }
  return report;
}

DiagonalFilterFamily identity_dynamics_family(std::function<double(std::size_t)> p) {
  auto one = [](std::size_t) { return 1.0; };
  return {one, one, std::move(p), one, one};
}

std::vector<TruncationVerdict> truncation_verdicts(const DiagonalFilterFamily& family, std::size_t d) {
  require(d >= 1, "truncation_verdicts: d must be positive");
  require(family.m && family.h && family.p && family.q && family.r,
          "truncation_verdicts: every coefficient function must be set");

  enum { kTauSt, kTauOp, kEfdSt, kEfdOp, kRhoSt, kRhoOp, kCount };
  std::vector<CompensatedSum> sums(kCount);
  std::vector<double> at_d(kCount);
  for (std::size_t j = 1; j <= 2 * d; ++j) {
    const double p = family.p(j);
    const double q = family.q(j);
    const double r = family.r(j);
    check_scalar_covariance(p);
    check_scalar_covariance(q);
    check_scalar_covariance(r);
    const double ls = lambda_standard(family.m(j), family.h(j), p, q, r);
    const double lo = lambda_optimal(family.m(j), family.h(j), p, q, r);
    sums[kTauSt].add(ls);
    sums[kTauOp].add(lo);
    sums[kEfdSt].add(ls / (1.0 + ls));
    sums[kEfdOp].add(lo / (1.0 + lo));
    sums[kRhoSt].add(log_rho_term(ls, 0.0));
    sums[kRhoOp].add(log_rho_term(lo, 0.0));
    if (j == d) {
      for (int k = 0; k < kCount; ++k) {
        at_d[k] = sums[k].value();
      }
    }
  }
  const char* names[kCount] = {"tau_st", "tau_op", "efd_st", "efd_op", "log_rho_st", "log_rho_op"};
  std::vector<TruncationVerdict> verdicts;
  for (int k = 0; k < kCount; ++k) {
    const double doubled = sums[k].value();
    verdicts.push_back({names[k], d, at_d[k], doubled, close_enough(at_d[k], doubled)});
  }
  return verdicts;
}

}  // namespace isdim::filter
